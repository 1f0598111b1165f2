#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aeris/baselines.hpp"
#include "aeris/config.hpp"
#include "aeris/environment.hpp"
#include "aeris/learning.hpp"
#include "aeris/phase_opt.hpp"

namespace aeris {

// Slot-averaged evaluation of one episode. QoS satisfaction and coverage use
// the same class-threshold predicate and therefore agree; both columns are
// kept in the metrics schema.
struct EvalResult {
  double qos_pct = 0.0;
  double coverage_pct = 0.0;
  double throughput_bps = 0.0;
  double energy_j = 0.0;
  int slots = 0;
};

struct MetricsRow {
  std::string method;
  std::uint64_t seed = 0;
  std::string sweep_axis;  // empty for plain evaluation runs
  double sweep_value = 0.0;
  int train_iterations = 0;
  EvalResult eval;
  std::string status = "ok";  // "error: ..." marks a failed sweep cell
};

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

struct TimingRow {
  std::string label;
  double seconds = 0.0;
};

// Wall-clock sidecar; kept out of the metrics file so that metrics are
// byte-identical across reruns.
void write_timings_csv(const std::string& path,
                       const std::vector<TimingRow>& rows);

void save_phases(const std::string& path,
                 const std::vector<PhaseConfig>& phases,
                 const std::vector<RisDescriptor>& ris);
std::vector<PhaseConfig> load_phases(const std::string& path,
                                     const std::vector<RisDescriptor>& ris);

std::vector<PhaseConfig> zero_phases(const std::vector<RisDescriptor>& ris);
std::vector<PhaseConfig> random_member_phases(
    const std::vector<RisDescriptor>& ris, std::uint64_t seed);

Environment make_environment(const ScenarioState& scenario,
                             const ExperimentConfig& cfg,
                             std::vector<PhaseConfig> phases);

// Greedy rollout of a trained net.
EvalResult rollout_net(Environment env, const Mlp& net,
                       std::uint64_t eval_seed);

// Random-waypoint rollout; the policy stream is independent of the reset
// seed so that episode draws and waypoint draws never alias.
EvalResult rollout_rwp(Environment env, std::uint64_t eval_seed,
                       std::uint64_t policy_seed);

// UAV pose snapshot at the end of every completed slot of a greedy rollout.
std::vector<std::vector<UavPose>> greedy_slot_poses(Environment env,
                                                    const Mlp& net,
                                                    std::uint64_t eval_seed);

// Bounded search baseline: scores `plan_samples` random waypoint plans at
// zero phases, then runs the capped phase search on the best plan's slot
// poses and re-scores it.
EvalResult bounded_search_eval(const Environment& proto,
                               const ScenarioState& scenario,
                               std::uint64_t eval_seed,
                               std::uint64_t method_seed,
                               const BruteForceConfig& bf);

struct JointRound {
  int round = 0;
  double qos_pre_pso = 0.0;
  double throughput_pre_pso = 0.0;
  double qos_post_pso = 0.0;
  double throughput_post_pso = 0.0;
  double pso_cost = 0.0;
  double qos_best = 0.0;         // adopted state after the round
  double throughput_best = 0.0;
};

struct JointResult {
  Mlp net;
  std::vector<PhaseConfig> phases;
  std::vector<JointRound> rounds;
  std::vector<EpisodeStats> training_log;
  int episodes_trained = 0;
};

// Alternates planner training and phase optimization; keeps the best
// (net, phases) pair seen, so the adopted objective pair never drops.
// Stops early when neither QoS (percentage points) nor throughput
// (relative %) improves by more than joint.min_improvement_pct.
// An optional warm-start net seeds the first training round.
JointResult run_joint_optimization(const ScenarioState& scenario,
                                   const ExperimentConfig& cfg,
                                   const Mlp* warm_start = nullptr);

// Subcommand bodies. Each throws on failure; run_sweep returns the number
// of failed cells (partial failures leave error-marked rows behind).
void cmd_generate(const ExperimentConfig& cfg);
void cmd_train(const ExperimentConfig& cfg);
void cmd_optimize_phases(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);
void cmd_evaluate(const ExperimentConfig& cfg);
void cmd_report(const ExperimentConfig& cfg);

}  // namespace aeris
