#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aeris/energy.hpp"

using namespace aeris;

namespace {
constexpr double kTight = 1e-12;
}

TEST_CASE("hover power is the sum of the static terms") {
  EnergyParams p;
  CHECK(hover_power(p) == doctest::Approx(168.49).epsilon(kTight));
}

TEST_CASE("propulsion power components at 20 m/s") {
  EnergyParams p;
  // parasite: 0.5 * 0.6 * 0.05 * 1.225 * 0.503 * 20^3
  const double parasite = 73.941;
  const double blade = 86.515;  // 79.86 * (1 + 3 * 400 / 14400)
  double v = 20.0;
  double induced_arg =
      std::sqrt(1.0 + std::pow(v, 4) / (4.0 * std::pow(p.v0, 4))) -
      v * v / (2.0 * p.v0 * p.v0);
  double induced = p.eta_i * std::sqrt(induced_arg);
  CHECK(propulsion_power(20.0, p) ==
        doctest::Approx(parasite + blade + induced).epsilon(kTight));
}

TEST_CASE("induced power radical at the mean rotor speed") {
  EnergyParams p;
  // v == v0 collapses the radical to sqrt(sqrt(5)/2 - 1/2)
  double at_v0 = propulsion_power(p.v0, p);
  double blade = p.eta_b * (1.0 + 3.0 * p.v0 * p.v0 / (p.v_tip * p.v_tip));
  double parasite = 0.5 * p.f0 * p.rotor_solidity * p.air_density *
                    p.rotor_disc_area * std::pow(p.v0, 3);
  CHECK(at_v0 - blade - parasite ==
        doctest::Approx(69.6765966106404).epsilon(1e-12));
}

TEST_CASE("parasite drag dominates at high speed") {
  EnergyParams p;
  double p40 = propulsion_power(40.0, p);
  double p20 = propulsion_power(20.0, p);
  CHECK(p40 > p20);
  // v^3 scaling of the parasite term: doubling speed takes it x8
  CHECK(p40 > 8.0 * 73.941);
}

TEST_CASE("step energy switches between hover and motion") {
  EnergyParams p;
  CHECK(step_energy(0.0, 1.0, p) == doctest::Approx(168.49).epsilon(kTight));
  CHECK(step_energy(0.0, 2.5, p) ==
        doctest::Approx(2.5 * 168.49).epsilon(kTight));
  CHECK(step_energy(20.0, 1.0, p) ==
        doctest::Approx(propulsion_power(20.0, p)).epsilon(kTight));
}

TEST_CASE("battery bookkeeping") {
  BatteryState b = make_battery(500e3, 20e3);
  CHECK(b.capacity_j == doctest::Approx(520e3).epsilon(kTight));
  CHECK(b.level_j == doctest::Approx(520e3).epsilon(kTight));
  CHECK(b.reserve_j == doctest::Approx(20e3).epsilon(kTight));

  BatteryState after = battery_step(b, 1000.0);
  CHECK(after.level_j == doctest::Approx(519e3).epsilon(kTight));
  CHECK(after.capacity_j == b.capacity_j);

  // plain deduction: the floor is enforced elsewhere
  BatteryState drained = battery_step(b, 515e3);
  CHECK(drained.level_j == doctest::Approx(5e3).epsilon(kTight));
  CHECK(drained.level_j < drained.reserve_j);
}

TEST_CASE("energy parameter validation") {
  EnergyParams p;
  CHECK_NOTHROW(p.validate());
  p.v0 = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = EnergyParams{};
  p.v_tip = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
