#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aeris/channel.hpp"
#include "aeris/energy.hpp"
#include "aeris/scenario.hpp"

namespace aeris {

// Nine discrete moves: hover plus the eight compass directions, one cell each.
// Index 0 is hover so that the all-equal-values tie break lands on it.
enum class MoveAction : int {
  hover = 0,
  north = 1,
  north_east = 2,
  east = 3,
  south_east = 4,
  south = 5,
  south_west = 6,
  west = 7,
  north_west = 8,
};

inline constexpr int kActionCount = 9;

// (dcol, drow) for an action index; row grows northwards.
std::pair<int, int> action_delta(int action);
int action_from_delta(int dcol, int drow);

struct EnvConfig {
  int horizon_slots = 100;
  double slot_seconds = 1.0;
  double d_max_m = 20.0;      // safety radius; separation must stay >= 2 * d_max
  bool shaped_reward = false; // reward = coverage delta instead of the argmax oracle
};

struct CoverageReport {
  int total = 0;
  std::array<int, 3> per_class{0, 0, 0};
  std::vector<std::uint8_t> covered;  // per UE flag
};

CoverageReport coverage_count(const std::vector<UserElement>& ues,
                              const std::vector<UavPose>& uavs,
                              const std::vector<RisDescriptor>& ris,
                              const std::vector<PhaseConfig>& phases,
                              const ChannelParams& p);

// Sum of delivered rates over the UEs whose class threshold is met.
double served_throughput(const std::vector<UserElement>& ues,
                         const std::vector<UavPose>& uavs,
                         const std::vector<RisDescriptor>& ris,
                         const std::vector<PhaseConfig>& phases,
                         const ChannelParams& p);

struct ConstraintReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Battery floor plus pairwise separation of at least 2 * d_max (inclusive).
ConstraintReport constraints_ok(const std::vector<UavPose>& uavs,
                                double reserve_j, double d_max_m);

struct MdpTransition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool done = false;
};

struct TraceRow {
  int slot = 0;
  int uav = 0;  // 1-based id
  double x = 0.0;
  double y = 0.0;
  double battery_j = 0.0;
  int coverage = 0;
  double reward = 0.0;
};

// Grid world for the UAV swarm. UAVs act round-robin inside a slot; the slot
// advances after the last UAV has moved. Moves leaving the grid or breaking
// the separation constraint are rejected in place with reward 0, and the
// episode ends before any battery could cross its floor.
class Environment {
 public:
  Environment(ScenarioState scenario, EnvConfig cfg, ChannelParams channel,
              EnergyParams energy, std::vector<PhaseConfig> phases);

  // Redraws the initial placement (one UAV per distinct cell) from the seed
  // and restores batteries to capacity.
  void reset(std::uint64_t seed);

  std::vector<double> observe() const;  // encoding for the acting UAV
  StepResult step(int action);

  static int encoding_length(const AreaGrid& area);

  bool done() const { return done_; }
  int slot() const { return slot_; }
  int current_uav() const { return turn_; }
  int uav_count() const { return static_cast<int>(scenario_.uavs.size()); }

  const ScenarioState& scenario() const { return scenario_; }
  const std::vector<UavPose>& uavs() const { return scenario_.uavs; }
  const std::vector<PhaseConfig>& phases() const { return phases_; }
  const EnvConfig& config() const { return cfg_; }
  const ChannelParams& channel_params() const { return channel_; }

  void set_phase_configs(std::vector<PhaseConfig> phases);

  CoverageReport coverage() const;
  double throughput() const;
  ConstraintReport constraints() const;

  // Swarm coverage reached by each candidate action of the acting UAV, with
  // every other UAV frozen; rejected moves resolve to their in-place outcome.
  std::array<int, kActionCount> candidate_coverages() const;

  void enable_trace(bool on) { trace_enabled_ = on; }
  const std::vector<TraceRow>& trace() const { return trace_; }

  // Skips reward evaluation (rollouts that never read rewards).
  void set_compute_reward(bool on) { compute_reward_ = on; }

 private:
  int effective_cell(int uav, int action) const;
  double move_speed(int from_cell, int to_cell) const;

  ScenarioState scenario_;
  EnvConfig cfg_;
  ChannelParams channel_;
  EnergyParams energy_;
  std::vector<PhaseConfig> phases_;
  std::vector<int> ue_cell_;

  int turn_ = 0;
  int slot_ = 0;
  bool done_ = true;
  bool trace_enabled_ = false;
  bool compute_reward_ = true;
  std::vector<TraceRow> trace_;
};

}  // namespace aeris
