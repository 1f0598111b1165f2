#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aeris/channel.hpp"
#include "aeris/environment.hpp"
#include "aeris/scenario.hpp"

namespace aeris {

// Constriction coefficient variants. clerc_kennedy is the standard
// chi = 2 / |2 - c - sqrt(c^2 - 4c)| and needs c = c1 + c2 > 4;
// simplified is chi = 1 - 1/c + sqrt(|c^2 - 4c|) / 2.
enum class ChiMode { clerc_kennedy, simplified };

std::string to_string(ChiMode m);
ChiMode chi_mode_from_string(const std::string& name);

double constriction_coefficient(double c1, double c2, ChiMode mode);

struct PsoConfig {
  int particles = 30;
  int iterations = 100;
  double c1 = 2.05;
  double c2 = 2.05;
  ChiMode chi_mode = ChiMode::clerc_kennedy;
  // When set, the personal-best attraction term is replaced by a second pull
  // towards the swarm best.
  bool global_best_only = false;
  double velocity_clamp = kPi;  // per-dimension |v| cap, <= 0 disables
  std::uint64_t seed = 1;
};

// Phase angle folded into [0, 2pi).
double wrap_phase(double phase_rad);

struct SwarmParticle {
  std::vector<double> position;  // continuous phases in [0, 2pi)
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_cost = 0.0;
};

// One velocity/position update with explicit per-dimension random factors
// j1, j2 in [0,1]. The first attraction term pulls towards the personal best
// (or the swarm best under global_best_only), the second towards the swarm
// best; positions wrap back into [0, 2pi).
void pso_step_particle(SwarmParticle& particle,
                       const std::vector<double>& swarm_best, double chi,
                       const PsoConfig& cfg, const std::vector<double>& j1,
                       const std::vector<double>& j2);

// Fixed UE/RIS geometry with one or more UAV pose snapshots; the objective
// is the served throughput averaged over the snapshots.
struct PhaseProblem {
  std::vector<UserElement> ues;
  std::vector<std::vector<UavPose>> uav_snapshots;
  std::vector<RisDescriptor> ris;
  ChannelParams params;

  void validate() const;
  int dimension() const;  // total element count across surfaces
};

// Nearest quantizer level, wrapped into [0, 2pi).
double quantize_phase(double phase_rad, int phase_bits);

// Splits a flat per-element phase vector into per-surface configs,
// quantizing each entry to its surface's level set.
std::vector<PhaseConfig> quantize_phases(const std::vector<double>& flat,
                                         const std::vector<RisDescriptor>& ris);

// Served throughput at the quantized phases, averaged over snapshots.
double evaluate_cost(const std::vector<double>& flat,
                     const PhaseProblem& problem);

struct PsoTracePoint {
  int iteration = 0;
  double best_cost = 0.0;
};

struct PsoResult {
  std::vector<PhaseConfig> best_phases;  // quantized
  double best_cost = 0.0;
  std::vector<PsoTracePoint> trace;  // swarm best per iteration, never drops
};

// Particles fly in the continuous phase space; costs are always taken at the
// quantized projection, so the reported best is attainable by the hardware.
PsoResult optimize_phases(const PhaseProblem& problem, const PsoConfig& cfg);

struct ExhaustiveResult {
  std::vector<PhaseConfig> best_phases;
  double best_cost = 0.0;
  bool exact = false;          // full enumeration vs seeded sampling
  std::uint64_t evaluated = 0;
};

// Enumerates every level combination when their count fits under
// `sample_cap`, otherwise scores `sample_cap` uniform random combinations.
ExhaustiveResult exhaustive_best(const PhaseProblem& problem,
                                 std::uint64_t sample_cap, std::uint64_t seed);

}  // namespace aeris
