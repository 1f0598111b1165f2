#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aeris/channel.hpp"
#include "aeris/energy.hpp"
#include "aeris/environment.hpp"
#include "aeris/learning.hpp"
#include "aeris/phase_opt.hpp"
#include "aeris/scenario.hpp"

namespace aeris {

struct JointConfig {
  int rounds = 3;
  double min_improvement_pct = 0.5;  // stop when no objective gains more
  double warm_epsilon = 0.2;         // exploration restart on later rounds
};

struct SweepConfig {
  std::string axis = "tx_power_dbm";  // tx_power_dbm | uav_count | ris_elements
  std::vector<double> values{20.0, 23.0, 26.0, 29.0, 32.0};
  std::vector<std::string> methods{"drl_dqn", "drl_ac", "brute_force", "rwp"};
  int threads = 0;  // 0 = number of hardware threads
};

struct BruteForceConfig {
  std::uint64_t plan_samples = 1000;   // candidate waypoint plans per seed
  std::uint64_t phase_samples = 1000;  // cap for the bounded phase search
  std::uint64_t path_cap = 200000;     // exact path enumeration refusal bound
};

struct PathsConfig {
  std::string scenario = "scenario.json";
  std::string checkpoint = "checkpoint.json";
  std::string phases = "phases.json";
  std::string metrics = "metrics.csv";
  std::string timings = "timings.csv";
  std::string plot_data = "plot_data.json";
  std::string report = "report.md";
  std::string episode_trace = "episode_trace.csv";
  std::string pso_trace = "pso_trace.csv";
  std::string joint_trace = "joint_trace.csv";
  std::string training_log = "training_episodes.csv";
};

struct ExperimentConfig {
  std::string name = "default";
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int eval_seed_count = 20;
  std::vector<std::uint64_t> eval_seeds;  // explicit list beats the count

  ScenarioSpec scenario;
  ChannelParams channel;
  EnergyParams energy;
  EnvConfig environment;
  TrainConfig training;
  PsoConfig pso;
  JointConfig joint;
  SweepConfig sweep;
  BruteForceConfig brute_force;
  PathsConfig paths;

  std::vector<std::uint64_t> resolved_eval_seeds() const;
  void validate() const;
};

// Fills an ExperimentConfig over its defaults from a parsed document.
ExperimentConfig parse_config(const nlohmann::json& j);

nlohmann::json config_to_json(const ExperimentConfig& c);

// Applies AERIS_<SECTION>_<KEY> process environment overrides onto the raw
// document (value parsed as JSON when possible, else taken as a string).
void apply_env_overrides(nlohmann::json& j);

// Sets a dotted key like "experiment.seed" on the raw document.
void apply_override_key(nlohmann::json& j, const std::string& dotted_key,
                        const std::string& raw_value);

// Path as given if it exists, else $AERIS_CONFIG_DIR/<name>.json, else
// ./configs/<name>.json.
std::string resolve_config_path(const std::string& name_or_path);

// Read + env overrides + parse + validate.
ExperimentConfig load_config_file(const std::string& path,
                                  bool with_env_overrides = true);

ExperimentConfig default_config();

}  // namespace aeris
