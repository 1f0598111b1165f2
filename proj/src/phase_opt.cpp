#include "aeris/phase_opt.hpp"

#include <algorithm>
#include <cmath>

#include "aeris/rng.hpp"

namespace aeris {

namespace {

constexpr std::uint64_t kSwarmSalt = 0x50a3ull;
constexpr std::uint64_t kSampleSalt = 0xe5b1ull;

double cost_of(const std::vector<PhaseConfig>& phases,
               const PhaseProblem& problem) {
  double sum = 0.0;
  for (const auto& poses : problem.uav_snapshots)
    sum += served_throughput(problem.ues, poses, problem.ris, phases,
                             problem.params);
  return sum / static_cast<double>(problem.uav_snapshots.size());
}

std::vector<PhaseConfig> phases_from_levels(
    const std::vector<int>& levels, const std::vector<RisDescriptor>& ris) {
  std::vector<PhaseConfig> out;
  out.reserve(ris.size());
  std::size_t k = 0;
  for (const auto& surface : ris) {
    PhaseConfig cfg;
    cfg.phase_bits = surface.phase_bits;
    cfg.phases_rad.reserve(static_cast<std::size_t>(surface.element_count));
    int count = 1 << surface.phase_bits;
    for (int m = 0; m < surface.element_count; ++m)
      cfg.phases_rad.push_back(psi_value(levels[k++], count));
    out.push_back(std::move(cfg));
  }
  return out;
}

}  // namespace

std::string to_string(ChiMode m) {
  return m == ChiMode::clerc_kennedy ? "clerc" : "simplified";
}

ChiMode chi_mode_from_string(const std::string& name) {
  if (name == "clerc") return ChiMode::clerc_kennedy;
  if (name == "simplified") return ChiMode::simplified;
  throw ConfigError("unknown constriction mode '" + name +
                    "' (expected clerc or simplified)");
}

double constriction_coefficient(double c1, double c2, ChiMode mode) {
  const double c = c1 + c2;
  if (c <= 0.0)
    throw DomainError("constriction_coefficient: c1 + c2 must be positive");
  if (mode == ChiMode::clerc_kennedy) {
    if (c <= 4.0)
      throw DomainError(
          "constriction_coefficient: clerc mode needs c1 + c2 > 4");
    return 2.0 / std::abs(2.0 - c - std::sqrt(c * c - 4.0 * c));
  }
  return 1.0 - 1.0 / c + std::sqrt(std::abs(c * c - 4.0 * c)) / 2.0;
}

void PhaseProblem::validate() const {
  if (ris.empty()) throw ConfigError("PhaseProblem: no RIS surfaces");
  if (uav_snapshots.empty())
    throw ConfigError("PhaseProblem: no UAV pose snapshots");
  for (const auto& poses : uav_snapshots)
    if (poses.empty()) throw ConfigError("PhaseProblem: empty pose snapshot");
  for (const auto& surface : ris) {
    if (surface.element_count <= 0 || surface.phase_bits <= 0 ||
        surface.phase_bits > 16)
      throw ConfigError("PhaseProblem: bad RIS geometry for surface " +
                        std::to_string(surface.id));
  }
  params.validate();
}

int PhaseProblem::dimension() const {
  int d = 0;
  for (const auto& surface : ris) d += surface.element_count;
  return d;
}

double wrap_phase(double phase_rad) {
  double w = std::fmod(phase_rad, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

double quantize_phase(double phase_rad, int phase_bits) {
  if (phase_bits <= 0 || phase_bits > 16)
    throw DomainError("quantize_phase: phase bits out of range");
  const int count = 1 << phase_bits;
  const double w = wrap_phase(phase_rad);
  const double step = kTwoPi / count;
  int level = static_cast<int>(std::floor(w / step + 0.5)) % count;
  return psi_value(level, count);
}

void pso_step_particle(SwarmParticle& particle,
                       const std::vector<double>& swarm_best, double chi,
                       const PsoConfig& cfg, const std::vector<double>& j1,
                       const std::vector<double>& j2) {
  const std::size_t dim = particle.position.size();
  if (particle.velocity.size() != dim || particle.best_position.size() != dim ||
      swarm_best.size() != dim || j1.size() != dim || j2.size() != dim)
    throw ContractError("pso_step_particle: dimension mismatch");
  for (std::size_t d = 0; d < dim; ++d) {
    double toward1 = (cfg.global_best_only ? swarm_best[d]
                                           : particle.best_position[d]) -
                     particle.position[d];
    double toward2 = swarm_best[d] - particle.position[d];
    double nv = chi * (particle.velocity[d] + cfg.c1 * j1[d] * toward1 +
                       cfg.c2 * j2[d] * toward2);
    if (cfg.velocity_clamp > 0.0)
      nv = std::clamp(nv, -cfg.velocity_clamp, cfg.velocity_clamp);
    particle.velocity[d] = nv;
    particle.position[d] = wrap_phase(particle.position[d] + nv);
  }
}

std::vector<PhaseConfig> quantize_phases(
    const std::vector<double>& flat, const std::vector<RisDescriptor>& ris) {
  std::size_t expected = 0;
  for (const auto& surface : ris)
    expected += static_cast<std::size_t>(surface.element_count);
  if (flat.size() != expected)
    throw ContractError("quantize_phases: flat vector has " +
                        std::to_string(flat.size()) + " entries, expected " +
                        std::to_string(expected));
  std::vector<PhaseConfig> out;
  out.reserve(ris.size());
  std::size_t k = 0;
  for (const auto& surface : ris) {
    PhaseConfig cfg;
    cfg.phase_bits = surface.phase_bits;
    cfg.phases_rad.reserve(static_cast<std::size_t>(surface.element_count));
    for (int m = 0; m < surface.element_count; ++m)
      cfg.phases_rad.push_back(quantize_phase(flat[k++], surface.phase_bits));
    out.push_back(std::move(cfg));
  }
  return out;
}

double evaluate_cost(const std::vector<double>& flat,
                     const PhaseProblem& problem) {
  return cost_of(quantize_phases(flat, problem.ris), problem);
}

PsoResult optimize_phases(const PhaseProblem& problem, const PsoConfig& cfg) {
  problem.validate();
  if (cfg.particles <= 0) throw ConfigError("pso: particles must be > 0");
  if (cfg.iterations < 1) throw ConfigError("pso: iterations must be >= 1");

  const std::size_t dim = static_cast<std::size_t>(problem.dimension());
  const double chi = constriction_coefficient(cfg.c1, cfg.c2, cfg.chi_mode);
  Rng rng(mix_seed(cfg.seed, {kSwarmSalt}));

  std::vector<SwarmParticle> swarm(static_cast<std::size_t>(cfg.particles));
  for (auto& p : swarm) {
    p.position.resize(dim);
    for (auto& value : p.position) value = rng.uniform(0.0, kTwoPi);
    p.velocity.assign(dim, 0.0);
    p.best_position = p.position;
    p.best_cost = evaluate_cost(p.position, problem);
  }

  std::size_t gbest = 0;
  for (std::size_t i = 1; i < swarm.size(); ++i)
    if (swarm[i].best_cost > swarm[gbest].best_cost) gbest = i;
  std::vector<double> gbest_x = swarm[gbest].best_position;
  double gbest_cost = swarm[gbest].best_cost;

  PsoResult result;
  result.trace.push_back({0, gbest_cost});

  std::vector<double> j1(dim), j2(dim);
  for (int it = 1; it <= cfg.iterations; ++it) {
    for (auto& p : swarm) {
      for (std::size_t d = 0; d < dim; ++d) {
        j1[d] = rng.uniform();
        j2[d] = rng.uniform();
      }
      pso_step_particle(p, gbest_x, chi, cfg, j1, j2);
      double cost = evaluate_cost(p.position, problem);
      if (cost > p.best_cost) {
        p.best_cost = cost;
        p.best_position = p.position;
      }
      if (cost > gbest_cost) {
        gbest_cost = cost;
        gbest_x = p.position;
      }
    }
    result.trace.push_back({it, gbest_cost});
  }

  result.best_phases = quantize_phases(gbest_x, problem.ris);
  result.best_cost = gbest_cost;
  return result;
}

ExhaustiveResult exhaustive_best(const PhaseProblem& problem,
                                 std::uint64_t sample_cap,
                                 std::uint64_t seed) {
  problem.validate();
  if (sample_cap == 0)
    throw ConfigError("exhaustive_best: sample cap must be > 0");

  // Per-dimension level counts, flattened surface by surface.
  std::vector<int> level_counts;
  for (const auto& surface : problem.ris) {
    int count = 1 << surface.phase_bits;
    for (int m = 0; m < surface.element_count; ++m)
      level_counts.push_back(count);
  }
  const std::size_t dim = level_counts.size();

  // total <= cap/count before multiplying guarantees no overflow.
  bool exact = true;
  std::uint64_t total = 1;
  for (int count : level_counts) {
    if (total > sample_cap / static_cast<std::uint64_t>(count)) {
      exact = false;
      break;
    }
    total *= static_cast<std::uint64_t>(count);
  }

  ExhaustiveResult result;
  std::vector<int> levels(dim, 0);
  std::vector<int> best_levels = levels;
  double best_cost = -1.0;

  if (exact) {
    // Odometer over all combinations; ties keep the first (lowest levels).
    bool more = true;
    while (more) {
      double cost = cost_of(phases_from_levels(levels, problem.ris), problem);
      result.evaluated += 1;
      if (cost > best_cost) {
        best_cost = cost;
        best_levels = levels;
      }
      more = false;
      for (std::size_t d = dim; d-- > 0;) {
        levels[d] += 1;
        if (levels[d] < level_counts[d]) {
          more = true;
          break;
        }
        levels[d] = 0;
      }
    }
  } else {
    Rng rng(mix_seed(seed, {kSampleSalt}));
    for (std::uint64_t s = 0; s < sample_cap; ++s) {
      for (std::size_t d = 0; d < dim; ++d)
        levels[d] = static_cast<int>(
            rng.uniform_int(static_cast<std::uint64_t>(level_counts[d])));
      double cost = cost_of(phases_from_levels(levels, problem.ris), problem);
      result.evaluated += 1;
      if (cost > best_cost) {
        best_cost = cost;
        best_levels = levels;
      }
    }
  }

  result.best_phases = phases_from_levels(best_levels, problem.ris);
  result.best_cost = best_cost;
  result.exact = exact;
  return result;
}

}  // namespace aeris
