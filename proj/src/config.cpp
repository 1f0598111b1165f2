#include "aeris/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "aeris/rng.hpp"

extern "C" char** environ;

namespace aeris {

namespace {

constexpr std::uint64_t kEvalSeedSalt = 0xe7a1ull;
constexpr double kLightSpeed = 299792458.0;

using nlohmann::json;

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

Vec3 parse_vec3(const json& j) {
  Vec3 v;
  if (j.is_array()) {
    if (j.size() != 3) throw ValidationError("position must have 3 entries");
    v.x = j[0].get<double>();
    v.y = j[1].get<double>();
    v.z = j[2].get<double>();
  } else {
    j.at("x").get_to(v.x);
    j.at("y").get_to(v.y);
    j.at("z").get_to(v.z);
  }
  return v;
}

void parse_area(const json& j, AreaGrid& area) {
  double w = area.width_m() > 0 ? area.width_m() : 400.0;
  double h = area.height_m() > 0 ? area.height_m() : 400.0;
  double c = area.cell_size_m() > 0 ? area.cell_size_m() : 40.0;
  read_if(j, "width_m", w);
  read_if(j, "height_m", h);
  read_if(j, "cell_size_m", c);
  area = AreaGrid(w, h, c);
}

void parse_scenario(const json& j, ScenarioSpec& s) {
  if (j.contains("area")) parse_area(j.at("area"), s.area);
  read_if(j, "ue_count", s.ue_count);
  if (j.contains("clusters")) {
    const json& c = j.at("clusters");
    read_if(c, "count", s.clusters.count);
    read_if(c, "exponent", s.clusters.exponent);
    read_if(c, "scatter_std_m", s.clusters.scatter_std_m);
    if (c.contains("centers")) {
      s.clusters.centers.clear();
      for (const auto& e : c.at("centers")) {
        if (!e.is_array() || e.size() != 2)
          throw ValidationError("cluster center must be [x, y]");
        s.clusters.centers.emplace_back(e[0].get<double>(),
                                        e[1].get<double>());
      }
    }
  }
  if (j.contains("class_mix")) {
    auto mix = j.at("class_mix").get<std::vector<double>>();
    if (mix.size() != 3)
      throw ValidationError("class_mix must have 3 entries");
    std::copy(mix.begin(), mix.end(), s.class_mix.begin());
  }
  read_if(j, "uav_count", s.uav_count);
  read_if(j, "uav_altitude_m", s.uav_altitude_m);
  read_if(j, "battery_init_j", s.battery_init_j);
  read_if(j, "battery_reserve_j", s.battery_reserve_j);
  if (j.contains("ris")) {
    s.ris.clear();
    int next_id = 1;
    for (const auto& e : j.at("ris")) {
      RisDescriptor r;
      r.id = next_id++;
      read_if(e, "id", r.id);
      if (e.contains("position")) r.position = parse_vec3(e.at("position"));
      read_if(e, "element_count", r.element_count);
      read_if(e, "element_spacing_m", r.element_spacing_m);
      read_if(e, "phase_bits", r.phase_bits);
      s.ris.push_back(r);
    }
  }
}

void parse_channel(const json& j, ChannelParams& c) {
  read_if(j, "omega1", c.omega1);
  read_if(j, "omega2", c.omega2);
  read_if(j, "alpha1", c.alpha1);
  read_if(j, "alpha2", c.alpha2);
  read_if(j, "mu", c.mu);
  read_if(j, "rician_k", c.rician_k);
  if (j.contains("carrier_frequency_hz"))
    c.carrier_wavelength_m = kLightSpeed / j.at("carrier_frequency_hz").get<double>();
  read_if(j, "carrier_wavelength_m", c.carrier_wavelength_m);
  read_if(j, "element_spacing_m", c.element_spacing_m);
  read_if(j, "noise_power_w", c.noise_power_w);
  if (j.contains("noise_dbm"))
    c.noise_power_w = dbm_to_watts(j.at("noise_dbm").get<double>());
  read_if(j, "tx_power_w", c.tx_power_w);
  if (j.contains("tx_power_dbm"))
    c.tx_power_w = dbm_to_watts(j.at("tx_power_dbm").get<double>());
  read_if(j, "bandwidth_hz", c.bandwidth_hz);
  if (j.contains("thresholds_db")) {
    auto t = j.at("thresholds_db").get<std::vector<double>>();
    if (t.size() != 3)
      throw ValidationError("thresholds_db must have 3 entries");
    std::copy(t.begin(), t.end(), c.thresholds_db.begin());
  }
}

void parse_energy(const json& j, EnergyParams& e) {
  read_if(j, "eta_i", e.eta_i);
  read_if(j, "eta_b", e.eta_b);
  read_if(j, "v_tip", e.v_tip);
  read_if(j, "v0", e.v0);
  read_if(j, "f0", e.f0);
  read_if(j, "rotor_solidity", e.rotor_solidity);
  read_if(j, "air_density", e.air_density);
  read_if(j, "rotor_disc_area", e.rotor_disc_area);
}

void parse_environment(const json& j, EnvConfig& e) {
  read_if(j, "horizon_slots", e.horizon_slots);
  read_if(j, "slot_seconds", e.slot_seconds);
  read_if(j, "d_max_m", e.d_max_m);
  read_if(j, "shaped_reward", e.shaped_reward);
}

void parse_training(const json& j, TrainConfig& t) {
  if (j.contains("variant"))
    t.variant = learner_variant_from_string(j.at("variant").get<std::string>());
  read_if(j, "episodes", t.episodes);
  read_if(j, "batch_size", t.batch_size);
  read_if(j, "hidden_width", t.hidden_width);
  read_if(j, "learning_rate", t.learning_rate);
  read_if(j, "gamma", t.gamma);
  read_if(j, "epsilon_start", t.epsilon_start);
  read_if(j, "epsilon_end", t.epsilon_end);
  read_if(j, "epsilon_fraction", t.epsilon_fraction);
  read_if(j, "replay_capacity", t.replay_capacity);
  read_if(j, "seed", t.seed);
}

void parse_pso(const json& j, PsoConfig& p) {
  read_if(j, "particles", p.particles);
  read_if(j, "iterations", p.iterations);
  read_if(j, "c1", p.c1);
  read_if(j, "c2", p.c2);
  if (j.contains("chi_mode"))
    p.chi_mode = chi_mode_from_string(j.at("chi_mode").get<std::string>());
  read_if(j, "global_best_only", p.global_best_only);
  read_if(j, "velocity_clamp", p.velocity_clamp);
  read_if(j, "seed", p.seed);
}

void parse_joint(const json& j, JointConfig& k) {
  read_if(j, "rounds", k.rounds);
  read_if(j, "min_improvement_pct", k.min_improvement_pct);
  read_if(j, "warm_epsilon", k.warm_epsilon);
}

void parse_sweep(const json& j, SweepConfig& s) {
  read_if(j, "axis", s.axis);
  read_if(j, "values", s.values);
  read_if(j, "methods", s.methods);
  read_if(j, "threads", s.threads);
}

void parse_brute_force(const json& j, BruteForceConfig& b) {
  read_if(j, "plan_samples", b.plan_samples);
  read_if(j, "phase_samples", b.phase_samples);
  read_if(j, "path_cap", b.path_cap);
}

void parse_paths(const json& j, PathsConfig& p) {
  read_if(j, "scenario", p.scenario);
  read_if(j, "checkpoint", p.checkpoint);
  read_if(j, "phases", p.phases);
  read_if(j, "metrics", p.metrics);
  read_if(j, "timings", p.timings);
  read_if(j, "plot_data", p.plot_data);
  read_if(j, "report", p.report);
  read_if(j, "episode_trace", p.episode_trace);
  read_if(j, "pso_trace", p.pso_trace);
  read_if(j, "joint_trace", p.joint_trace);
  read_if(j, "training_log", p.training_log);
}

const std::vector<std::string>& known_sections() {
  static const std::vector<std::string> sections{
      "experiment", "scenario",    "channel", "energy", "environment",
      "training",   "pso",         "joint",   "sweep",  "brute_force",
      "paths"};
  return sections;
}

std::string to_upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::resolved_eval_seeds() const {
  if (!eval_seeds.empty()) return eval_seeds;
  std::vector<std::uint64_t> out;
  out.reserve(static_cast<std::size_t>(eval_seed_count));
  for (int i = 0; i < eval_seed_count; ++i)
    out.push_back(
        mix_seed(seed, {kEvalSeedSalt, static_cast<std::uint64_t>(i)}));
  return out;
}

void ExperimentConfig::validate() const {
  if (out_dir.empty()) throw ConfigError("config: out_dir must not be empty");
  if (eval_seeds.empty() && eval_seed_count <= 0)
    throw ConfigError("config: need at least one evaluation seed");
  if (sweep.axis != "tx_power_dbm" && sweep.axis != "uav_count" &&
      sweep.axis != "ris_elements")
    throw ConfigError("config: unknown sweep axis '" + sweep.axis +
                      "' (expected tx_power_dbm, uav_count or ris_elements)");
  if (sweep.values.empty())
    throw ConfigError("config: sweep needs at least one value");
  for (std::size_t i = 1; i < sweep.values.size(); ++i)
    if (sweep.values[i] <= sweep.values[i - 1])
      throw ConfigError("config: sweep values must be strictly increasing");
  if (sweep.methods.empty())
    throw ConfigError("config: sweep needs at least one method");
  for (const auto& m : sweep.methods)
    if (m != "drl_dqn" && m != "drl_ac" && m != "brute_force" && m != "rwp")
      throw ConfigError("config: unknown method '" + m + "'");
  if (sweep.threads < 0)
    throw ConfigError("config: sweep threads must be >= 0");
  if (joint.rounds < 1)
    throw ConfigError("config: joint rounds must be >= 1");
  if (brute_force.plan_samples == 0 || brute_force.phase_samples == 0)
    throw ConfigError("config: brute-force sample counts must be > 0");
  channel.validate();
  energy.validate();
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c = default_config();
  try {
    if (j.contains("experiment")) {
      const json& e = j.at("experiment");
      read_if(e, "name", c.name);
      read_if(e, "seed", c.seed);
      read_if(e, "out_dir", c.out_dir);
      read_if(e, "eval_seed_count", c.eval_seed_count);
      read_if(e, "eval_seeds", c.eval_seeds);
    }
    if (j.contains("scenario")) parse_scenario(j.at("scenario"), c.scenario);
    if (j.contains("channel")) parse_channel(j.at("channel"), c.channel);
    if (j.contains("energy")) parse_energy(j.at("energy"), c.energy);
    if (j.contains("environment"))
      parse_environment(j.at("environment"), c.environment);
    if (j.contains("training")) parse_training(j.at("training"), c.training);
    if (j.contains("pso")) parse_pso(j.at("pso"), c.pso);
    if (j.contains("joint")) parse_joint(j.at("joint"), c.joint);
    if (j.contains("sweep")) parse_sweep(j.at("sweep"), c.sweep);
    if (j.contains("brute_force"))
      parse_brute_force(j.at("brute_force"), c.brute_force);
    if (j.contains("paths")) parse_paths(j.at("paths"), c.paths);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }

  // Unset per-section seeds follow the experiment seed.
  if (!j.contains("training") || !j.at("training").contains("seed"))
    c.training.seed = c.seed;
  if (!j.contains("pso") || !j.at("pso").contains("seed")) c.pso.seed = c.seed;

  // RIS spacing defaults to half the carrier wavelength.
  for (auto& r : c.scenario.ris)
    if (r.element_spacing_m <= 0.0)
      r.element_spacing_m = c.channel.carrier_wavelength_m / 2.0;

  c.validate();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["experiment"] = {{"name", c.name},
                     {"seed", c.seed},
                     {"out_dir", c.out_dir},
                     {"eval_seed_count", c.eval_seed_count},
                     {"eval_seeds", c.eval_seeds}};
  nlohmann::ordered_json ris = nlohmann::ordered_json::array();
  for (const auto& r : c.scenario.ris)
    ris.push_back({{"id", r.id},
                   {"position", {r.position.x, r.position.y, r.position.z}},
                   {"element_count", r.element_count},
                   {"element_spacing_m", r.element_spacing_m},
                   {"phase_bits", r.phase_bits}});
  nlohmann::ordered_json centers = nlohmann::ordered_json::array();
  for (const auto& [x, y] : c.scenario.clusters.centers)
    centers.push_back({x, y});
  j["scenario"] = {
      {"area",
       {{"width_m", c.scenario.area.width_m()},
        {"height_m", c.scenario.area.height_m()},
        {"cell_size_m", c.scenario.area.cell_size_m()}}},
      {"ue_count", c.scenario.ue_count},
      {"clusters",
       {{"count", c.scenario.clusters.count},
        {"exponent", c.scenario.clusters.exponent},
        {"scatter_std_m", c.scenario.clusters.scatter_std_m},
        {"centers", centers}}},
      {"class_mix", c.scenario.class_mix},
      {"uav_count", c.scenario.uav_count},
      {"uav_altitude_m", c.scenario.uav_altitude_m},
      {"battery_init_j", c.scenario.battery_init_j},
      {"battery_reserve_j", c.scenario.battery_reserve_j},
      {"ris", ris}};
  j["channel"] = {{"omega1", c.channel.omega1},
                  {"omega2", c.channel.omega2},
                  {"alpha1", c.channel.alpha1},
                  {"alpha2", c.channel.alpha2},
                  {"mu", c.channel.mu},
                  {"rician_k", c.channel.rician_k},
                  {"carrier_wavelength_m", c.channel.carrier_wavelength_m},
                  {"element_spacing_m", c.channel.element_spacing_m},
                  {"noise_power_w", c.channel.noise_power_w},
                  {"tx_power_w", c.channel.tx_power_w},
                  {"bandwidth_hz", c.channel.bandwidth_hz},
                  {"thresholds_db", c.channel.thresholds_db}};
  j["energy"] = {{"eta_i", c.energy.eta_i},
                 {"eta_b", c.energy.eta_b},
                 {"v_tip", c.energy.v_tip},
                 {"v0", c.energy.v0},
                 {"f0", c.energy.f0},
                 {"rotor_solidity", c.energy.rotor_solidity},
                 {"air_density", c.energy.air_density},
                 {"rotor_disc_area", c.energy.rotor_disc_area}};
  j["environment"] = {{"horizon_slots", c.environment.horizon_slots},
                      {"slot_seconds", c.environment.slot_seconds},
                      {"d_max_m", c.environment.d_max_m},
                      {"shaped_reward", c.environment.shaped_reward}};
  j["training"] = {{"variant", to_string(c.training.variant)},
                   {"episodes", c.training.episodes},
                   {"batch_size", c.training.batch_size},
                   {"hidden_width", c.training.hidden_width},
                   {"learning_rate", c.training.learning_rate},
                   {"gamma", c.training.gamma},
                   {"epsilon_start", c.training.epsilon_start},
                   {"epsilon_end", c.training.epsilon_end},
                   {"epsilon_fraction", c.training.epsilon_fraction},
                   {"replay_capacity", c.training.replay_capacity},
                   {"seed", c.training.seed}};
  j["pso"] = {{"particles", c.pso.particles},
              {"iterations", c.pso.iterations},
              {"c1", c.pso.c1},
              {"c2", c.pso.c2},
              {"chi_mode", to_string(c.pso.chi_mode)},
              {"global_best_only", c.pso.global_best_only},
              {"velocity_clamp", c.pso.velocity_clamp},
              {"seed", c.pso.seed}};
  j["joint"] = {{"rounds", c.joint.rounds},
                {"min_improvement_pct", c.joint.min_improvement_pct},
                {"warm_epsilon", c.joint.warm_epsilon}};
  j["sweep"] = {{"axis", c.sweep.axis},
                {"values", c.sweep.values},
                {"methods", c.sweep.methods},
                {"threads", c.sweep.threads}};
  j["brute_force"] = {{"plan_samples", c.brute_force.plan_samples},
                      {"phase_samples", c.brute_force.phase_samples},
                      {"path_cap", c.brute_force.path_cap}};
  j["paths"] = {{"scenario", c.paths.scenario},
                {"checkpoint", c.paths.checkpoint},
                {"phases", c.paths.phases},
                {"metrics", c.paths.metrics},
                {"timings", c.paths.timings},
                {"plot_data", c.paths.plot_data},
                {"report", c.paths.report},
                {"episode_trace", c.paths.episode_trace},
                {"pso_trace", c.paths.pso_trace},
                {"joint_trace", c.paths.joint_trace},
                {"training_log", c.paths.training_log}};
  return j;
}

void apply_override_key(nlohmann::json& j, const std::string& dotted_key,
                        const std::string& raw_value) {
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(raw_value);
  } catch (const nlohmann::json::exception&) {
    value = raw_value;  // plain string
  }
  nlohmann::json* node = &j;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = dotted_key.find('.', start);
    std::string part = dotted_key.substr(
        start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty())
      throw ConfigError("override key '" + dotted_key + "' is malformed");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void apply_env_overrides(nlohmann::json& j) {
  for (char** env = environ; env && *env; ++env) {
    std::string entry(*env);
    if (entry.rfind("AERIS_", 0) != 0) continue;
    std::size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    std::string name = entry.substr(6, eq - 6);
    std::string value = entry.substr(eq + 1);
    if (name == "CONFIG_DIR") continue;  // path lookup, not a config key

    // Longest known section prefix wins (covers BRUTE_FORCE vs single-word
    // sections).
    std::string section, key;
    for (const auto& s : known_sections()) {
      std::string prefix = to_upper(s) + "_";
      if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size() &&
          s.size() > section.size()) {
        section = s;
        key = name.substr(prefix.size());
      }
    }
    if (section.empty()) continue;  // not one of ours
    apply_override_key(j, section + "." + to_lower(key), value);
  }
}

std::string resolve_config_path(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::exists(name_or_path)) return name_or_path;
  std::vector<std::string> candidates;
  if (const char* dir = std::getenv("AERIS_CONFIG_DIR"))
    candidates.push_back(std::string(dir) + "/" + name_or_path + ".json");
  candidates.push_back("configs/" + name_or_path + ".json");
  for (const auto& p : candidates)
    if (fs::exists(p)) return p;
  throw ConfigError("config '" + name_or_path +
                    "' not found (tried the literal path and " +
                    (candidates.empty() ? std::string("no fallbacks")
                                        : candidates.back()) +
                    ")");
}

ExperimentConfig load_config_file(const std::string& path,
                                  bool with_env_overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
  if (with_env_overrides) apply_env_overrides(j);
  return parse_config(j);
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.scenario.area = AreaGrid(400.0, 400.0, 40.0);
  c.scenario.ris = {
      {1, {200.0, 200.0, 50.0}, 16, c.channel.carrier_wavelength_m / 2.0, 2}};
  return c;
}

}  // namespace aeris
