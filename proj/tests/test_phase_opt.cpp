#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "aeris/phase_opt.hpp"
#include "aeris/rng.hpp"

using namespace aeris;

namespace {

// One UAV straight above one RIS with the UE almost underneath. The boresight
// geometry keeps the per-element array phases equal, so with mu = 1 the
// reflected path is strong and the quantized phase choice visibly moves the
// served rate: all-zero phases add to the direct path, pi entries subtract.
struct Boresight {
  PhaseProblem problem;

  explicit Boresight(int elements = 2, int bits = 1) {
    problem.params.mu = 1.0;
    problem.ues.push_back({1, {0.0, 0.0001, 0.0}, ServiceClass::video});
    problem.uav_snapshots.push_back({{1, {0.0, 0.0, 60.0}, 1.0e6, 0.0}});
    problem.ris.push_back(
        {1, {0.0, 0.0, 20.0}, elements, problem.params.element_spacing_m, bits});
  }
};

}  // namespace

TEST_CASE("constriction coefficient closed forms") {
  CHECK(constriction_coefficient(2.05, 2.05, ChiMode::clerc_kennedy) ==
        doctest::Approx(0.729843788128358).epsilon(1e-12));
  CHECK(constriction_coefficient(2.05, 2.05, ChiMode::simplified) ==
        doctest::Approx(1.07625377284725).epsilon(1e-12));
  // at c = 4 the radical vanishes and the simplified form is exactly 3/4
  CHECK(constriction_coefficient(2.0, 2.0, ChiMode::simplified) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_AS(constriction_coefficient(2.0, 2.0, ChiMode::clerc_kennedy),
                  DomainError);
  CHECK_THROWS_AS(constriction_coefficient(1.0, -2.0, ChiMode::simplified),
                  DomainError);
}

TEST_CASE("chi mode names round trip") {
  CHECK(to_string(ChiMode::clerc_kennedy) == "clerc");
  CHECK(to_string(ChiMode::simplified) == "simplified");
  CHECK(chi_mode_from_string("clerc") == ChiMode::clerc_kennedy);
  CHECK(chi_mode_from_string("simplified") == ChiMode::simplified);
  CHECK_THROWS_AS(chi_mode_from_string("chaotic"), ConfigError);
}

TEST_CASE("wrap_phase folds into the primary interval") {
  CHECK(wrap_phase(0.0) == 0.0);
  CHECK(wrap_phase(kTwoPi) == 0.0);
  CHECK(wrap_phase(-kPi / 2.0) == doctest::Approx(1.5 * kPi).epsilon(1e-12));
  CHECK(wrap_phase(7.0 * kPi) == doctest::Approx(kPi).epsilon(1e-12));
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    double w = wrap_phase(rng.uniform(-50.0, 50.0));
    CHECK(w >= 0.0);
    CHECK(w < kTwoPi);
  }
}

TEST_CASE("quantize_phase snaps to the nearest level") {
  // one bit: levels {0, pi}
  CHECK(quantize_phase(1.0, 1) == 0.0);
  CHECK(quantize_phase(2.0, 1) == psi_value(1, 2));
  // equidistant points round up to the higher level
  CHECK(quantize_phase(kPi / 2.0, 1) == psi_value(1, 2));
  // two bits: levels {0, pi/2, pi, 3pi/2}
  CHECK(quantize_phase(1.0, 2) == psi_value(1, 4));
  // just below 2pi wraps back to level zero
  CHECK(quantize_phase(kTwoPi - 0.1, 2) == 0.0);
  CHECK_THROWS_AS(quantize_phase(1.0, 0), DomainError);
  CHECK_THROWS_AS(quantize_phase(1.0, 17), DomainError);
}

TEST_CASE("quantizer output is always a set member and idempotent") {
  Rng rng(5);
  for (int bits : {1, 2, 3, 6}) {
    for (int i = 0; i < 500; ++i) {
      double q = quantize_phase(rng.uniform(-10.0, 10.0), bits);
      CHECK(is_psi_member(q, bits));
      CHECK(quantize_phase(q, bits) == q);
    }
  }
}

TEST_CASE("quantize_phases splits a flat vector across surfaces") {
  std::vector<RisDescriptor> ris = {
      {1, {0, 0, 10}, 2, 0.15, 1},
      {2, {50, 0, 10}, 3, 0.15, 2},
  };
  std::vector<double> flat = {1.0, 2.0, 1.0, 2.0, kTwoPi - 0.05};
  auto configs = quantize_phases(flat, ris);
  REQUIRE(configs.size() == 2);
  CHECK(configs[0].phase_bits == 1);
  CHECK(configs[1].phase_bits == 2);
  REQUIRE(configs[0].phases_rad.size() == 2);
  REQUIRE(configs[1].phases_rad.size() == 3);
  CHECK(configs[0].phases_rad[0] == 0.0);
  CHECK(configs[0].phases_rad[1] == psi_value(1, 2));
  CHECK(configs[1].phases_rad[0] == psi_value(1, 4));
  CHECK(configs[1].phases_rad[1] == psi_value(1, 4));
  CHECK(configs[1].phases_rad[2] == 0.0);
  CHECK_THROWS_AS(quantize_phases({1.0, 2.0}, ris), ContractError);
}

TEST_CASE("pso_step_particle follows the hand-computed update") {
  PsoConfig cfg;
  cfg.c1 = 2.0;
  cfg.c2 = 1.0;
  cfg.velocity_clamp = 0.0;  // disabled
  SwarmParticle p;
  p.position = {1.0};
  p.velocity = {0.5};
  p.best_position = {2.0};

  SUBCASE("personal and swarm attraction") {
    pso_step_particle(p, {3.0}, 0.5, cfg, {0.5}, {1.0});
    // 0.5 * (0.5 + 2*0.5*(2-1) + 1*1*(3-1)) = 1.75
    CHECK(p.velocity[0] == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(p.position[0] == doctest::Approx(2.75).epsilon(1e-12));
  }

  SUBCASE("global best only replaces the personal pull") {
    cfg.global_best_only = true;
    pso_step_particle(p, {3.0}, 0.5, cfg, {0.5}, {1.0});
    // 0.5 * (0.5 + 2*0.5*(3-1) + 1*1*(3-1)) = 2.25
    CHECK(p.velocity[0] == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(p.position[0] == doctest::Approx(3.25).epsilon(1e-12));
  }

  SUBCASE("velocity clamp caps the step") {
    cfg.velocity_clamp = kPi;
    p.position = {0.0};
    p.velocity = {0.0};
    p.best_position = {3.0};
    pso_step_particle(p, {3.0}, 1.0, cfg, {1.0}, {1.0});
    // raw update 2*3 + 1*3 = 9 clamps to pi
    CHECK(p.velocity[0] == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(p.position[0] == doctest::Approx(kPi).epsilon(1e-12));
  }

  SUBCASE("positions wrap back into range") {
    p.position = {6.0};
    p.velocity = {2.0};
    p.best_position = {6.0};
    pso_step_particle(p, {6.0}, 1.0, cfg, {0.0}, {0.0});
    CHECK(p.position[0] == doctest::Approx(8.0 - kTwoPi).epsilon(1e-12));
  }

  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(pso_step_particle(p, {3.0, 4.0}, 0.5, cfg, {0.5}, {1.0}),
                    ContractError);
  }
}

TEST_CASE("problem dimension sums surface elements") {
  Boresight fix;
  CHECK(fix.problem.dimension() == 2);
  fix.problem.ris.push_back({2, {10, 0, 20}, 5, 0.15, 2});
  CHECK(fix.problem.dimension() == 7);
}

TEST_CASE("problem validation rejects degenerate setups") {
  Boresight fix;
  CHECK_NOTHROW(fix.problem.validate());

  PhaseProblem no_ris = fix.problem;
  no_ris.ris.clear();
  CHECK_THROWS_AS(no_ris.validate(), ConfigError);

  PhaseProblem no_snapshots = fix.problem;
  no_snapshots.uav_snapshots.clear();
  CHECK_THROWS_AS(no_snapshots.validate(), ConfigError);

  PhaseProblem empty_snapshot = fix.problem;
  empty_snapshot.uav_snapshots.push_back({});
  CHECK_THROWS_AS(empty_snapshot.validate(), ConfigError);

  PhaseProblem bad_bits = fix.problem;
  bad_bits.ris[0].phase_bits = 0;
  CHECK_THROWS_AS(bad_bits.validate(), ConfigError);
}

TEST_CASE("evaluate_cost scores the quantized projection") {
  Boresight fix;
  std::vector<double> raw = {0.3, 2.9};
  std::vector<double> snapped;
  for (double v : raw) snapped.push_back(quantize_phase(v, 1));
  CHECK(evaluate_cost(raw, fix.problem) ==
        evaluate_cost(snapped, fix.problem));
}

TEST_CASE("aligned phases serve a higher rate than opposed ones") {
  Boresight fix;
  double aligned = evaluate_cost({0.0, 0.0}, fix.problem);
  double opposed = evaluate_cost({kPi, kPi}, fix.problem);
  double mixed = evaluate_cost({0.0, kPi}, fix.problem);
  CHECK(aligned > mixed);
  CHECK(mixed > opposed);
}

TEST_CASE("exhaustive search enumerates small spaces exactly") {
  Boresight fix;  // 2 elements, 1 bit -> 4 combinations
  auto result = exhaustive_best(fix.problem, 16, 7);
  CHECK(result.exact);
  CHECK(result.evaluated == 4);
  REQUIRE(result.best_phases.size() == 1);
  REQUIRE(result.best_phases[0].phases_rad.size() == 2);
  // all-zero alignment adds to the direct path and wins
  CHECK(result.best_phases[0].phases_rad[0] == 0.0);
  CHECK(result.best_phases[0].phases_rad[1] == 0.0);
  CHECK(result.best_cost ==
        doctest::Approx(evaluate_cost({0.0, 0.0}, fix.problem)));
}

TEST_CASE("exhaustive ties keep the first combination") {
  Boresight fix;
  fix.problem.ues.clear();  // nobody to serve, every cost is zero
  auto result = exhaustive_best(fix.problem, 16, 7);
  CHECK(result.exact);
  CHECK(result.best_cost == 0.0);
  for (double v : result.best_phases[0].phases_rad) CHECK(v == 0.0);
}

TEST_CASE("exhaustive falls back to seeded sampling over the cap") {
  Boresight fix(2, 2);
  fix.problem.ris.push_back(
      {2, {0.0, 0.0, 20.0}, 2, fix.problem.params.element_spacing_m, 2});
  // 4 dims x 4 levels = 256 combinations, cap 40 forces sampling
  auto a = exhaustive_best(fix.problem, 40, 5);
  CHECK_FALSE(a.exact);
  CHECK(a.evaluated == 40);
  auto b = exhaustive_best(fix.problem, 40, 5);
  CHECK(a.best_cost == b.best_cost);
  auto exact = exhaustive_best(fix.problem, 256, 5);
  CHECK(exact.exact);
  CHECK(a.best_cost <= exact.best_cost);
}

TEST_CASE("exhaustive survives spaces that overflow a counter") {
  Boresight fix(64, 16);  // 65536^64 combinations
  auto result = exhaustive_best(fix.problem, 3, 1);
  CHECK_FALSE(result.exact);
  CHECK(result.evaluated == 3);
}

TEST_CASE("exhaustive rejects a zero sample cap") {
  Boresight fix;
  CHECK_THROWS_AS(exhaustive_best(fix.problem, 0, 1), ConfigError);
}

TEST_CASE("swarm optimization finds the small-space optimum") {
  Boresight fix;  // 4 combinations
  PsoConfig cfg;
  cfg.particles = 8;
  cfg.iterations = 10;
  cfg.seed = 3;
  auto pso = optimize_phases(fix.problem, cfg);
  auto exact = exhaustive_best(fix.problem, 16, 1);
  CHECK(pso.best_cost == doctest::Approx(exact.best_cost).epsilon(1e-12));
}

TEST_CASE("swarm trace never decreases and matches the returned best") {
  Boresight fix(4, 2);
  PsoConfig cfg;
  cfg.particles = 6;
  cfg.iterations = 15;
  cfg.seed = 9;
  auto result = optimize_phases(fix.problem, cfg);
  REQUIRE(result.trace.size() == static_cast<std::size_t>(cfg.iterations) + 1);
  CHECK(result.trace.front().iteration == 0);
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    CHECK(result.trace[i].iteration == static_cast<int>(i));
    CHECK(result.trace[i].best_cost >= result.trace[i - 1].best_cost);
  }
  CHECK(result.trace.back().best_cost == result.best_cost);
}

TEST_CASE("swarm results are reproducible and quantized") {
  Boresight fix(4, 2);
  PsoConfig cfg;
  cfg.particles = 5;
  cfg.iterations = 8;
  cfg.seed = 21;
  auto a = optimize_phases(fix.problem, cfg);
  auto b = optimize_phases(fix.problem, cfg);
  CHECK(a.best_cost == b.best_cost);
  REQUIRE(a.best_phases.size() == b.best_phases.size());
  for (std::size_t s = 0; s < a.best_phases.size(); ++s)
    for (std::size_t m = 0; m < a.best_phases[s].phases_rad.size(); ++m) {
      CHECK(a.best_phases[s].phases_rad[m] == b.best_phases[s].phases_rad[m]);
      CHECK(is_psi_member(a.best_phases[s].phases_rad[m],
                          a.best_phases[s].phase_bits));
    }
}

TEST_CASE("a single particle swarm still runs") {
  Boresight fix;
  PsoConfig cfg;
  cfg.particles = 1;
  cfg.iterations = 5;
  auto result = optimize_phases(fix.problem, cfg);
  CHECK(result.trace.size() == 6);
  CHECK(result.best_cost >= 0.0);
}

TEST_CASE("swarm with no users scores zero") {
  Boresight fix;
  fix.problem.ues.clear();
  PsoConfig cfg;
  cfg.particles = 3;
  cfg.iterations = 3;
  auto result = optimize_phases(fix.problem, cfg);
  CHECK(result.best_cost == 0.0);
}

TEST_CASE("swarm configuration validation") {
  Boresight fix;
  PsoConfig cfg;
  cfg.particles = 0;
  CHECK_THROWS_AS(optimize_phases(fix.problem, cfg), ConfigError);
  cfg.particles = 4;
  cfg.iterations = 0;
  CHECK_THROWS_AS(optimize_phases(fix.problem, cfg), ConfigError);
  cfg.iterations = 2;
  PhaseProblem broken = fix.problem;
  broken.ris.clear();
  CHECK_THROWS_AS(optimize_phases(broken, cfg), ConfigError);
}
