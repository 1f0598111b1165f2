#include "aeris/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "aeris/rng.hpp"

namespace fs = std::filesystem;

namespace aeris {

namespace {

constexpr int kPhasesSchemaVersion = 1;

constexpr std::uint64_t kRoundTrainSalt = 0x71a2ull;
constexpr std::uint64_t kRoundPsoSalt = 0x90b5ull;
constexpr std::uint64_t kPlanSalt = 0x8c17ull;
constexpr std::uint64_t kPlanPhaseSalt = 0x77e3ull;
constexpr std::uint64_t kRwpPolicySalt = 0x5a11ull;
constexpr std::uint64_t kRwpPhaseSalt = 0x5a12ull;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = (c == ',') ? ';' : ' ';
  return s;
}

std::string join_path(const std::string& dir, const std::string& rel) {
  return (fs::path(dir) / rel).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir);
}

double wall_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

std::string method_name(LearnerVariant v) {
  return v == LearnerVariant::dqn ? "drl_dqn" : "drl_ac";
}

double coverage_pct_of(const std::vector<UserElement>& ues,
                       const std::vector<UavPose>& poses,
                       const std::vector<RisDescriptor>& ris,
                       const std::vector<PhaseConfig>& phases,
                       const ChannelParams& p) {
  if (ues.empty()) return 0.0;
  return 100.0 *
         coverage_count(ues, poses, ris, phases, p).total /
         static_cast<double>(ues.size());
}

// Episode loop shared by every evaluation path. Metrics are sampled at the
// end of each completed slot; a partial episode falls back to one sample at
// the point of termination.
template <typename ActFn>
EvalResult run_episode(Environment& env, std::uint64_t eval_seed, ActFn&& act,
                       bool needs_observation) {
  env.reset(eval_seed);
  const auto& scen = env.scenario();
  const double n_ues =
      std::max<std::size_t>(std::size_t{1}, scen.ues.size());

  double qos_sum = 0.0;
  double thr_sum = 0.0;
  int slots = 0;
  int prev_slot = env.slot();
  std::vector<double> obs;
  while (!env.done()) {
    if (needs_observation) obs = env.observe();
    env.step(act(env, obs));
    if (env.slot() != prev_slot) {
      prev_slot = env.slot();
      qos_sum += 100.0 * env.coverage().total / n_ues;
      thr_sum += env.throughput();
      slots += 1;
    }
  }
  if (slots == 0) {
    qos_sum = 100.0 * env.coverage().total / n_ues;
    thr_sum = env.throughput();
    slots = 1;
  }

  EvalResult r;
  r.qos_pct = qos_sum / slots;
  r.coverage_pct = r.qos_pct;
  r.throughput_bps = thr_sum / slots;
  for (const auto& uav : env.uavs())
    r.energy_j += scen.battery_capacity_j - uav.battery_j;
  r.slots = slots;
  return r;
}

std::pair<double, double> mean_qos_throughput(
    const ScenarioState& scen, const ExperimentConfig& cfg,
    const std::vector<PhaseConfig>& phases, const Mlp& net,
    const std::vector<std::uint64_t>& seeds) {
  double q = 0.0, t = 0.0;
  Environment proto = make_environment(scen, cfg, phases);
  for (std::uint64_t s : seeds) {
    EvalResult r = rollout_net(proto, net, s);
    q += r.qos_pct;
    t += r.throughput_bps;
  }
  return {q / seeds.size(), t / seeds.size()};
}

}  // namespace

void write_metrics_csv(const std::string& path,
                       const std::vector<MetricsRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write metrics file " + path);
  out << "method,seed,sweep_axis,sweep_value,train_iterations,"
         "qos_satisfaction_pct,coverage_pct,throughput_bps,status\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.seed << ',' << r.sweep_axis << ','
        << fmt(r.sweep_value) << ',' << r.train_iterations << ','
        << fmt(r.eval.qos_pct) << ',' << fmt(r.eval.coverage_pct) << ','
        << fmt(r.eval.throughput_bps) << ',' << sanitize(r.status) << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError("metrics file " + path + " is empty");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string part;
    while (std::getline(ss, part, ',')) f.push_back(part);
    if (f.size() != 9)
      throw ValidationError("metrics file " + path +
                            ": malformed row '" + line + "'");
    MetricsRow r;
    r.method = f[0];
    r.seed = std::stoull(f[1]);
    r.sweep_axis = f[2];
    r.sweep_value = std::stod(f[3]);
    r.train_iterations = std::stoi(f[4]);
    r.eval.qos_pct = std::stod(f[5]);
    r.eval.coverage_pct = std::stod(f[6]);
    r.eval.throughput_bps = std::stod(f[7]);
    r.status = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_timings_csv(const std::string& path,
                       const std::vector<TimingRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write timings file " + path);
  out << "label,seconds\n";
  for (const auto& r : rows)
    out << sanitize(r.label) << ',' << fmt(r.seconds) << '\n';
}

void save_phases(const std::string& path,
                 const std::vector<PhaseConfig>& phases,
                 const std::vector<RisDescriptor>& ris) {
  if (phases.size() != ris.size())
    throw ContractError("save_phases: one config per RIS surface required");
  nlohmann::ordered_json j;
  j["schema_version"] = kPhasesSchemaVersion;
  nlohmann::ordered_json surfaces = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < ris.size(); ++r) {
    surfaces.push_back({{"id", ris[r].id},
                        {"phase_bits", phases[r].phase_bits},
                        {"phases_rad", phases[r].phases_rad}});
  }
  j["surfaces"] = std::move(surfaces);
  std::ofstream out(path);
  if (!out) throw Error("cannot write phases file " + path);
  out << j.dump(2) << "\n";
}

std::vector<PhaseConfig> load_phases(const std::string& path,
                                     const std::vector<RisDescriptor>& ris) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open phases file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("phases file " + path + ": " + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kPhasesSchemaVersion)
      throw ValidationError("phases file " + path +
                            ": unsupported schema version");
    const auto& surfaces = j.at("surfaces");
    if (surfaces.size() != ris.size())
      throw ValidationError("phases file " + path + ": has " +
                            std::to_string(surfaces.size()) +
                            " surfaces, scenario has " +
                            std::to_string(ris.size()));
    std::vector<PhaseConfig> out;
    for (std::size_t r = 0; r < ris.size(); ++r) {
      PhaseConfig cfg;
      cfg.phase_bits = surfaces[r].at("phase_bits").get<int>();
      cfg.phases_rad =
          surfaces[r].at("phases_rad").get<std::vector<double>>();
      if (cfg.phase_bits != ris[r].phase_bits ||
          static_cast<int>(cfg.phases_rad.size()) != ris[r].element_count)
        throw ValidationError("phases file " + path +
                              ": surface geometry does not match RIS " +
                              std::to_string(ris[r].id));
      for (double p : cfg.phases_rad)
        if (!is_psi_member(p, cfg.phase_bits))
          throw ValidationError("phases file " + path +
                                ": value " + fmt(p) +
                                " is not a quantizer level");
      out.push_back(std::move(cfg));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("phases file " + path + ": " + e.what());
  }
}

std::vector<PhaseConfig> zero_phases(const std::vector<RisDescriptor>& ris) {
  std::vector<PhaseConfig> out;
  out.reserve(ris.size());
  for (const auto& r : ris)
    out.push_back(PhaseConfig::zeros(r.element_count, r.phase_bits));
  return out;
}

std::vector<PhaseConfig> random_member_phases(
    const std::vector<RisDescriptor>& ris, std::uint64_t seed) {
  Rng rng(mix_seed(seed, {kRwpPhaseSalt}));
  std::vector<PhaseConfig> out;
  out.reserve(ris.size());
  for (const auto& r : ris) {
    PhaseConfig cfg;
    cfg.phase_bits = r.phase_bits;
    int levels = 1 << r.phase_bits;
    for (int m = 0; m < r.element_count; ++m)
      cfg.phases_rad.push_back(psi_value(
          static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(levels))),
          levels));
    out.push_back(std::move(cfg));
  }
  return out;
}

Environment make_environment(const ScenarioState& scenario,
                             const ExperimentConfig& cfg,
                             std::vector<PhaseConfig> phases) {
  return Environment(scenario, cfg.environment, cfg.channel, cfg.energy,
                     std::move(phases));
}

EvalResult rollout_net(Environment env, const Mlp& net,
                       std::uint64_t eval_seed) {
  env.set_compute_reward(false);
  return run_episode(
      env, eval_seed,
      [&net](const Environment&, const std::vector<double>& obs) {
        return greedy_action(net, obs);
      },
      true);
}

EvalResult rollout_rwp(Environment env, std::uint64_t eval_seed,
                       std::uint64_t policy_seed) {
  env.set_compute_reward(false);
  RwpPolicy policy(env.scenario().area, env.uav_count(),
                   mix_seed(policy_seed, {kRwpPolicySalt}));
  return run_episode(
      env, eval_seed,
      [&policy](const Environment& e, const std::vector<double>&) {
        const auto& pose = e.uavs()[static_cast<std::size_t>(e.current_uav())];
        const AreaGrid& area = e.scenario().area;
        return policy.action_for(e.current_uav(),
                                 area.col_of(pose.position.x),
                                 area.row_of(pose.position.y));
      },
      false);
}

std::vector<std::vector<UavPose>> greedy_slot_poses(Environment env,
                                                    const Mlp& net,
                                                    std::uint64_t eval_seed) {
  env.set_compute_reward(false);
  env.reset(eval_seed);
  std::vector<std::vector<UavPose>> out;
  int prev_slot = env.slot();
  while (!env.done()) {
    env.step(greedy_action(net, env.observe()));
    if (env.slot() != prev_slot) {
      prev_slot = env.slot();
      out.push_back(env.uavs());
    }
  }
  if (out.empty()) out.push_back(env.uavs());
  return out;
}

EvalResult bounded_search_eval(const Environment& proto,
                               const ScenarioState& scenario,
                               std::uint64_t eval_seed,
                               std::uint64_t method_seed,
                               const BruteForceConfig& bf) {
  const AreaGrid& area = scenario.area;
  const auto zeros = zero_phases(scenario.ris);
  const ChannelParams& params = proto.channel_params();

  double best_metric = -1.0;
  std::vector<std::vector<UavPose>> best_poses;
  double best_energy = 0.0;

  for (std::uint64_t p = 0; p < bf.plan_samples; ++p) {
    Environment env = proto;
    env.set_compute_reward(false);
    env.enable_trace(false);
    RwpPolicy policy(area, env.uav_count(),
                     mix_seed(method_seed, {kPlanSalt, p}));
    env.reset(eval_seed);
    std::vector<std::vector<UavPose>> poses;
    int prev_slot = env.slot();
    while (!env.done()) {
      const auto& pose =
          env.uavs()[static_cast<std::size_t>(env.current_uav())];
      env.step(policy.action_for(env.current_uav(),
                                 area.col_of(pose.position.x),
                                 area.row_of(pose.position.y)));
      if (env.slot() != prev_slot) {
        prev_slot = env.slot();
        poses.push_back(env.uavs());
      }
    }
    if (poses.empty()) poses.push_back(env.uavs());

    double metric = 0.0;
    for (const auto& snap : poses)
      metric += coverage_pct_of(scenario.ues, snap, scenario.ris, zeros,
                                params);
    metric /= static_cast<double>(poses.size());
    if (metric > best_metric) {
      best_metric = metric;
      best_poses = std::move(poses);
      best_energy = 0.0;
      for (const auto& uav : env.uavs())
        best_energy += scenario.battery_capacity_j - uav.battery_j;
    }
  }

  PhaseProblem problem;
  problem.ues = scenario.ues;
  problem.uav_snapshots = best_poses;
  problem.ris = scenario.ris;
  problem.params = params;
  ExhaustiveResult search = exhaustive_best(
      problem, bf.phase_samples, mix_seed(method_seed, {kPlanPhaseSalt}));

  EvalResult r;
  double qos = 0.0, thr = 0.0;
  for (const auto& snap : best_poses) {
    qos += coverage_pct_of(scenario.ues, snap, scenario.ris,
                           search.best_phases, params);
    thr += served_throughput(scenario.ues, snap, scenario.ris,
                             search.best_phases, params);
  }
  r.qos_pct = qos / best_poses.size();
  r.coverage_pct = r.qos_pct;
  r.throughput_bps = thr / best_poses.size();
  r.energy_j = best_energy;
  r.slots = static_cast<int>(best_poses.size());
  return r;
}

JointResult run_joint_optimization(const ScenarioState& scenario,
                                   const ExperimentConfig& cfg,
                                   const Mlp* warm_start) {
  const std::vector<std::uint64_t> seeds = cfg.resolved_eval_seeds();
  JointResult jr;
  jr.phases = zero_phases(scenario.ris);
  bool have_net = false;
  double q_best = -1.0, thr_best = -1.0;
  double prev_q = 0.0, prev_thr = 0.0;

  for (int k = 0; k < cfg.joint.rounds; ++k) {
    TrainConfig tc = cfg.training;
    tc.seed = mix_seed(cfg.training.seed,
                       {kRoundTrainSalt, static_cast<std::uint64_t>(k)});
    const Mlp* warm = nullptr;
    if (have_net) warm = &jr.net;
    else if (warm_start) warm = warm_start;
    if (warm) tc.epsilon_start = std::min(cfg.joint.warm_epsilon,
                                          cfg.training.epsilon_start);

    Environment env = make_environment(scenario, cfg, jr.phases);
    TrainResult tr = train(env, tc, warm);
    for (auto stats : tr.episodes) {
      stats.episode += jr.episodes_trained;
      jr.training_log.push_back(stats);
    }
    jr.episodes_trained += tc.episodes;

    auto [q1, t1] = mean_qos_throughput(scenario, cfg, jr.phases, tr.net,
                                        seeds);
    if (!have_net || q1 > q_best || (q1 == q_best && t1 >= thr_best)) {
      jr.net = std::move(tr.net);
      have_net = true;
      q_best = q1;
      thr_best = t1;
    }

    auto snapshots = greedy_slot_poses(
        make_environment(scenario, cfg, jr.phases), jr.net, seeds.front());
    PhaseProblem problem;
    problem.ues = scenario.ues;
    problem.uav_snapshots = std::move(snapshots);
    problem.ris = scenario.ris;
    problem.params = cfg.channel;
    PsoConfig pc = cfg.pso;
    pc.seed = mix_seed(cfg.pso.seed,
                       {kRoundPsoSalt, static_cast<std::uint64_t>(k)});
    PsoResult pr = optimize_phases(problem, pc);

    auto [q2, t2] = mean_qos_throughput(scenario, cfg, pr.best_phases,
                                        jr.net, seeds);
    if (q2 > q_best || (q2 == q_best && t2 >= thr_best)) {
      jr.phases = pr.best_phases;
      q_best = q2;
      thr_best = t2;
    }

    jr.rounds.push_back(
        {k, q1, t1, q2, t2, pr.best_cost, q_best, thr_best});

    if (k > 0) {
      double dq = q_best - prev_q;
      double dthr_pct =
          prev_thr > 0.0 ? 100.0 * (thr_best - prev_thr) / prev_thr
                         : (thr_best > prev_thr ? 100.0 : 0.0);
      if (dq <= cfg.joint.min_improvement_pct &&
          dthr_pct <= cfg.joint.min_improvement_pct)
        break;
    }
    prev_q = q_best;
    prev_thr = thr_best;
  }
  return jr;
}

namespace {

ScenarioState obtain_scenario(const ExperimentConfig& cfg) {
  const std::string path = join_path(cfg.out_dir, cfg.paths.scenario);
  if (fs::exists(path)) return load_scenario(path);
  ScenarioState s = generate_scenario(cfg.seed, cfg.scenario);
  ensure_dir(cfg.out_dir);
  save_scenario(s, path);
  return s;
}

void write_training_log(const std::string& path,
                        const std::vector<EpisodeStats>& log) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write training log " + path);
  out << "episode,reward_sum,epsilon,loss_mean,final_coverage,steps\n";
  for (const auto& e : log)
    out << e.episode << ',' << fmt(e.reward_sum) << ',' << fmt(e.epsilon)
        << ',' << fmt(e.loss_mean) << ',' << e.final_coverage << ','
        << e.steps << '\n';
}

void write_joint_trace(const std::string& path,
                       const std::vector<JointRound>& rounds) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write joint trace " + path);
  out << "round,qos_pre_pso,throughput_pre_pso,qos_post_pso,"
         "throughput_post_pso,pso_cost,qos_adopted,throughput_adopted\n";
  for (const auto& r : rounds)
    out << r.round << ',' << fmt(r.qos_pre_pso) << ','
        << fmt(r.throughput_pre_pso) << ',' << fmt(r.qos_post_pso) << ','
        << fmt(r.throughput_post_pso) << ',' << fmt(r.pso_cost) << ','
        << fmt(r.qos_best) << ',' << fmt(r.throughput_best) << '\n';
}

void write_pso_trace(const std::string& path,
                     const std::vector<PsoTracePoint>& trace) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write pso trace " + path);
  out << "iteration,best_cost\n";
  for (const auto& p : trace)
    out << p.iteration << ',' << fmt(p.best_cost) << '\n';
}

struct MethodPrep {
  std::shared_ptr<Mlp> net;
  std::vector<PhaseConfig> phases;
  int train_iterations = 0;
  std::string error;
};

bool is_drl(const std::string& method) {
  return method == "drl_dqn" || method == "drl_ac";
}

ExperimentConfig config_for_value(const ExperimentConfig& cfg,
                                  const std::string& axis, double value) {
  ExperimentConfig out = cfg;
  if (axis == "tx_power_dbm") {
    out.channel.tx_power_w = dbm_to_watts(value);
  } else if (axis == "uav_count") {
    out.scenario.uav_count = static_cast<int>(value);
  } else if (axis == "ris_elements") {
    for (auto& r : out.scenario.ris)
      r.element_count = static_cast<int>(value);
  }
  return out;
}

ScenarioState scenario_for_value(const ScenarioState& base,
                                 const ExperimentConfig& cfg_v,
                                 const std::string& axis, double value) {
  if (axis == "uav_count")
    return generate_scenario(cfg_v.seed, cfg_v.scenario);
  if (axis == "ris_elements") {
    ScenarioState s = base;
    for (auto& r : s.ris) r.element_count = static_cast<int>(value);
    return s;
  }
  return base;
}

// Re-scores a fixed slot-pose trajectory under a (possibly different)
// channel. Pose batteries carry the energy spent flying the trajectory.
EvalResult score_slot_poses(const ScenarioState& scenario,
                            const std::vector<std::vector<UavPose>>& poses,
                            const std::vector<PhaseConfig>& phases,
                            const ChannelParams& params) {
  EvalResult r;
  double qos = 0.0, thr = 0.0;
  for (const auto& snap : poses) {
    qos += coverage_pct_of(scenario.ues, snap, scenario.ris, phases, params);
    thr += served_throughput(scenario.ues, snap, scenario.ris, phases,
                             params);
  }
  r.qos_pct = qos / static_cast<double>(poses.size());
  r.coverage_pct = r.qos_pct;
  r.throughput_bps = thr / static_cast<double>(poses.size());
  for (const auto& uav : poses.back())
    r.energy_j += scenario.battery_capacity_j - uav.battery_j;
  r.slots = static_cast<int>(poses.size());
  return r;
}

}  // namespace

void cmd_generate(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  ScenarioState s = generate_scenario(cfg.seed, cfg.scenario);
  const std::string path = join_path(cfg.out_dir, cfg.paths.scenario);
  save_scenario(s, path);
  std::cout << "scenario: " << path << " (" << s.ues.size() << " UEs, "
            << s.uavs.size() << " UAVs, " << s.ris.size() << " RIS, "
            << s.area.cols() << "x" << s.area.rows() << " cells)\n";
}

void cmd_train(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  ScenarioState s = obtain_scenario(cfg);
  double t0 = wall_seconds();
  JointResult jr = run_joint_optimization(s, cfg);
  double t1 = wall_seconds();

  save_checkpoint(join_path(cfg.out_dir, cfg.paths.checkpoint), jr.net,
                  cfg.training.variant, s.area);
  save_phases(join_path(cfg.out_dir, cfg.paths.phases), jr.phases, s.ris);
  write_joint_trace(join_path(cfg.out_dir, cfg.paths.joint_trace), jr.rounds);
  write_training_log(join_path(cfg.out_dir, cfg.paths.training_log),
                     jr.training_log);

  std::vector<MetricsRow> rows;
  Environment proto = make_environment(s, cfg, jr.phases);
  for (std::uint64_t seed : cfg.resolved_eval_seeds()) {
    MetricsRow r;
    r.method = method_name(cfg.training.variant);
    r.seed = seed;
    r.train_iterations = jr.episodes_trained;
    r.eval = rollout_net(proto, jr.net, seed);
    rows.push_back(std::move(r));
  }
  write_metrics_csv(join_path(cfg.out_dir, cfg.paths.metrics), rows);
  write_timings_csv(join_path(cfg.out_dir, cfg.paths.timings),
                    {{"train_total", t1 - t0}});

  double qos = 0.0;
  for (const auto& r : rows) qos += r.eval.qos_pct;
  std::cout << "train: " << rows.front().method << ", "
            << jr.episodes_trained << " episodes over "
            << jr.rounds.size() << " round(s), mean QoS "
            << fmt(qos / rows.size()) << "% across " << rows.size()
            << " eval seeds\n";
}

void cmd_optimize_phases(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  ScenarioState s = obtain_scenario(cfg);
  const std::vector<std::uint64_t> seeds = cfg.resolved_eval_seeds();

  const std::string cp_path = join_path(cfg.out_dir, cfg.paths.checkpoint);
  const std::string phases_path = join_path(cfg.out_dir, cfg.paths.phases);
  std::vector<PhaseConfig> current =
      fs::exists(phases_path) ? load_phases(phases_path, s.ris)
                              : zero_phases(s.ris);

  std::vector<std::vector<UavPose>> snapshots;
  if (fs::exists(cp_path)) {
    Checkpoint cp = load_checkpoint(cp_path);
    if (cp.grid_cols != s.area.cols() || cp.grid_rows != s.area.rows())
      throw ConfigError("checkpoint grid " + std::to_string(cp.grid_cols) +
                        "x" + std::to_string(cp.grid_rows) +
                        " does not match scenario grid " +
                        std::to_string(s.area.cols()) + "x" +
                        std::to_string(s.area.rows()));
    snapshots = greedy_slot_poses(make_environment(s, cfg, current), cp.net,
                                  seeds.front());
  } else {
    Environment env = make_environment(s, cfg, current);
    env.set_compute_reward(false);
    env.reset(seeds.front());
    snapshots.push_back(env.uavs());
  }

  PhaseProblem problem;
  problem.ues = s.ues;
  problem.uav_snapshots = std::move(snapshots);
  problem.ris = s.ris;
  problem.params = cfg.channel;
  PsoConfig pc = cfg.pso;
  pc.seed = mix_seed(cfg.pso.seed, {kRoundPsoSalt, 0ull});

  double t0 = wall_seconds();
  PsoResult pr = optimize_phases(problem, pc);
  double t1 = wall_seconds();

  save_phases(phases_path, pr.best_phases, s.ris);
  write_pso_trace(join_path(cfg.out_dir, cfg.paths.pso_trace), pr.trace);
  write_timings_csv(join_path(cfg.out_dir, cfg.paths.timings),
                    {{"pso_total", t1 - t0}});
  std::cout << "optimize-phases: best cost " << fmt(pr.best_cost)
            << " bps after " << pc.iterations << " iterations -> "
            << phases_path << "\n";
}

void cmd_evaluate(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  ScenarioState s = obtain_scenario(cfg);
  const std::string cp_path = join_path(cfg.out_dir, cfg.paths.checkpoint);
  if (!fs::exists(cp_path))
    throw ConfigError("no checkpoint at " + cp_path + "; run train first");
  Checkpoint cp = load_checkpoint(cp_path);
  if (cp.grid_cols != s.area.cols() || cp.grid_rows != s.area.rows())
    throw ConfigError("checkpoint grid " + std::to_string(cp.grid_cols) +
                      "x" + std::to_string(cp.grid_rows) +
                      " does not match scenario grid " +
                      std::to_string(s.area.cols()) + "x" +
                      std::to_string(s.area.rows()));

  const std::string phases_path = join_path(cfg.out_dir, cfg.paths.phases);
  std::vector<PhaseConfig> phases =
      fs::exists(phases_path) ? load_phases(phases_path, s.ris)
                              : zero_phases(s.ris);

  const std::vector<std::uint64_t> seeds = cfg.resolved_eval_seeds();
  std::vector<MetricsRow> rows;
  Environment proto = make_environment(s, cfg, phases);
  for (std::uint64_t seed : seeds) {
    MetricsRow r;
    r.method = method_name(cp.variant);
    r.seed = seed;
    r.eval = rollout_net(proto, cp.net, seed);
    rows.push_back(std::move(r));
  }
  write_metrics_csv(join_path(cfg.out_dir, cfg.paths.metrics), rows);

  // Step-level trace of the first evaluation seed, rewards included.
  Environment traced = proto;
  traced.enable_trace(true);
  traced.reset(seeds.front());
  while (!traced.done())
    traced.step(greedy_action(cp.net, traced.observe()));
  std::ofstream trace(join_path(cfg.out_dir, cfg.paths.episode_trace));
  if (!trace) throw Error("cannot write episode trace");
  trace << "slot,uav,x,y,battery_j,coverage,reward\n";
  for (const auto& row : traced.trace())
    trace << row.slot << ',' << row.uav << ',' << fmt(row.x) << ','
          << fmt(row.y) << ',' << fmt(row.battery_j) << ',' << row.coverage
          << ',' << fmt(row.reward) << '\n';

  double qos = 0.0;
  for (const auto& r : rows) qos += r.eval.qos_pct;
  std::cout << "evaluate: " << rows.front().method << " mean QoS "
            << fmt(qos / rows.size()) << "% across " << rows.size()
            << " seeds\n";
}

int cmd_sweep(const ExperimentConfig& cfg) {
  ensure_dir(cfg.out_dir);
  const std::string axis = cfg.sweep.axis;
  const auto& methods = cfg.sweep.methods;
  const auto& values = cfg.sweep.values;
  const std::vector<std::uint64_t> seeds = cfg.resolved_eval_seeds();
  ScenarioState base = obtain_scenario(cfg);

  std::vector<TimingRow> timings;

  // Per (method, value) artifacts. DRL methods share training where the
  // axis allows it: tx power and element count reuse one net trained at the
  // first value; the UAV-count axis retrains along the chain with warm
  // starts (the encoding does not depend on the UAV count).
  std::vector<std::vector<MethodPrep>> preps(
      methods.size(), std::vector<MethodPrep>(values.size()));
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    if (!is_drl(methods[mi])) continue;
    ExperimentConfig mcfg = cfg;
    mcfg.training.variant = learner_variant_from_string(
        methods[mi] == "drl_dqn" ? "dqn" : "actor_critic");
    mcfg.joint.rounds = 1;
    mcfg.training.seed =
        mix_seed(cfg.training.seed, {static_cast<std::uint64_t>(mi)});

    const Mlp* warm = nullptr;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      MethodPrep& prep = preps[mi][vi];
      const bool retrain = axis == "uav_count" || vi == 0;
      if (!retrain) {
        prep = preps[mi][0];  // shared net and phases
        continue;
      }
      double t0 = wall_seconds();
      try {
        ExperimentConfig cfg_v = config_for_value(mcfg, axis, values[vi]);
        cfg_v.training.seed =
            mix_seed(mcfg.training.seed, {static_cast<std::uint64_t>(vi)});
        ScenarioState scen_v =
            scenario_for_value(base, cfg_v, axis, values[vi]);
        JointResult jr = run_joint_optimization(scen_v, cfg_v, warm);
        prep.net = std::make_shared<Mlp>(std::move(jr.net));
        prep.phases = std::move(jr.phases);
        prep.train_iterations = jr.episodes_trained;
        warm = prep.net.get();
      } catch (const std::exception& e) {
        prep.error = e.what();
      }
      timings.push_back({"prep " + methods[mi] + " value " + fmt(values[vi]),
                         wall_seconds() - t0});
    }

    // Element-count axis: the shared net needs a phase search per value
    // (the phase vector length follows the element count).
    if (axis == "ris_elements" && preps[mi][0].error.empty()) {
      for (std::size_t vi = 1; vi < values.size(); ++vi) {
        MethodPrep& prep = preps[mi][vi];
        if (!prep.error.empty() || !prep.net) continue;
        double t0 = wall_seconds();
        try {
          ExperimentConfig cfg_v = config_for_value(mcfg, axis, values[vi]);
          ScenarioState scen_v =
              scenario_for_value(base, cfg_v, axis, values[vi]);
          auto zeros = zero_phases(scen_v.ris);
          auto snapshots = greedy_slot_poses(
              make_environment(scen_v, cfg_v, zeros), *prep.net,
              seeds.front());
          PhaseProblem problem;
          problem.ues = scen_v.ues;
          problem.uav_snapshots = std::move(snapshots);
          problem.ris = scen_v.ris;
          problem.params = cfg_v.channel;
          PsoConfig pc = cfg_v.pso;
          pc.seed = mix_seed(cfg.pso.seed,
                             {kRoundPsoSalt, static_cast<std::uint64_t>(vi)});
          PsoResult pr = optimize_phases(problem, pc);
          auto [qz, tz] = mean_qos_throughput(scen_v, cfg_v, zeros,
                                              *prep.net, seeds);
          auto [qp, tp] = mean_qos_throughput(scen_v, cfg_v, pr.best_phases,
                                              *prep.net, seeds);
          prep.phases = (qp > qz || (qp == qz && tp >= tz)) ? pr.best_phases
                                                            : zeros;
        } catch (const std::exception& e) {
          prep.error = e.what();
        }
        timings.push_back(
            {"phases " + methods[mi] + " value " + fmt(values[vi]),
             wall_seconds() - t0});
      }
    }
  }

  // Evaluation cells: one row per (method, value, seed), executed by a
  // work pool; every cell owns its slot, so merging is just the index
  // order and the metrics bytes cannot depend on the thread count.
  const std::size_t cell_count = methods.size() * values.size() * seeds.size();
  std::vector<MetricsRow> rows(cell_count);
  std::vector<double> cell_seconds(cell_count, 0.0);

  auto run_cell = [&](std::size_t ci) {
    const std::size_t mi = ci / (values.size() * seeds.size());
    const std::size_t vi = (ci / seeds.size()) % values.size();
    const std::size_t si = ci % seeds.size();
    MetricsRow& row = rows[ci];
    row.method = methods[mi];
    row.seed = seeds[si];
    row.sweep_axis = axis;
    row.sweep_value = values[vi];
    double t0 = wall_seconds();
    try {
      ExperimentConfig cfg_v = config_for_value(cfg, axis, values[vi]);
      ScenarioState scen_v = scenario_for_value(base, cfg_v, axis, values[vi]);
      if (is_drl(methods[mi])) {
        const MethodPrep& prep = preps[mi][vi];
        if (!prep.error.empty())
          throw Error("training failed: " + prep.error);
        row.train_iterations = prep.train_iterations;
        if (axis == "tx_power_dbm") {
          // The policy flies at its training operating point; the swept
          // power re-scores that same trajectory, mirroring how the
          // baselines reuse their per-seed draws along the axis.
          ExperimentConfig cfg_base =
              config_for_value(cfg, axis, values.front());
          auto poses = greedy_slot_poses(
              make_environment(scen_v, cfg_base, prep.phases), *prep.net,
              seeds[si]);
          row.eval =
              score_slot_poses(scen_v, poses, prep.phases, cfg_v.channel);
        } else {
          Environment env = make_environment(scen_v, cfg_v, prep.phases);
          row.eval = rollout_net(env, *prep.net, seeds[si]);
        }
      } else if (methods[mi] == "rwp") {
        // Common draws across the axis: the same seed column reuses the
        // same walk and phase draw at every swept value, so the value is
        // the only thing that changes along a row of the result table.
        Environment env = make_environment(
            scen_v, cfg_v,
            random_member_phases(
                scen_v.ris,
                mix_seed(cfg.seed, {kRwpPhaseSalt,
                                    static_cast<std::uint64_t>(si)})));
        row.eval = rollout_rwp(env, seeds[si],
                               mix_seed(cfg.seed,
                                        {kRwpPolicySalt,
                                         static_cast<std::uint64_t>(si)}));
      } else {  // bounded search baseline
        Environment proto =
            make_environment(scen_v, cfg_v, zero_phases(scen_v.ris));
        row.eval = bounded_search_eval(
            proto, scen_v, seeds[si],
            mix_seed(cfg.seed, {kPlanSalt, static_cast<std::uint64_t>(si)}),
            cfg.brute_force);
      }
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    cell_seconds[ci] = wall_seconds() - t0;
  };

  int threads = cfg.sweep.threads > 0
                    ? cfg.sweep.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp<int>(threads, 1, static_cast<int>(cell_count));
  if (threads <= 1) {
    for (std::size_t ci = 0; ci < cell_count; ++ci) run_cell(ci);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        while (true) {
          std::size_t ci = next.fetch_add(1);
          if (ci >= cell_count) return;
          run_cell(ci);
        }
      });
    for (auto& t : pool) t.join();
  }

  for (std::size_t ci = 0; ci < cell_count; ++ci)
    timings.push_back({"cell " + rows[ci].method + " value " +
                           fmt(rows[ci].sweep_value) + " seed " +
                           std::to_string(rows[ci].seed),
                       cell_seconds[ci]});

  write_metrics_csv(join_path(cfg.out_dir, cfg.paths.metrics), rows);
  write_timings_csv(join_path(cfg.out_dir, cfg.paths.timings), timings);

  // Aggregated series for the figure behind this axis.
  std::string figure, metric;
  if (axis == "tx_power_dbm") {
    figure = "qos_vs_tx_power";
    metric = "qos_satisfaction_pct";
  } else if (axis == "uav_count") {
    figure = "coverage_vs_uav_count";
    metric = "coverage_pct";
  } else {
    figure = "throughput_vs_ris_elements";
    metric = "throughput_bps";
  }
  nlohmann::ordered_json fig;
  fig["axis"] = axis;
  fig["metric"] = metric;
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    nlohmann::ordered_json series;
    series["values"] = values;
    std::vector<double> means, stds;
    std::vector<int> counts;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
      std::vector<double> xs;
      for (std::size_t si = 0; si < seeds.size(); ++si) {
        const MetricsRow& row =
            rows[(mi * values.size() + vi) * seeds.size() + si];
        if (row.status != "ok") continue;
        if (axis == "tx_power_dbm") xs.push_back(row.eval.qos_pct);
        else if (axis == "uav_count") xs.push_back(row.eval.coverage_pct);
        else xs.push_back(row.eval.throughput_bps);
      }
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean = xs.empty() ? 0.0 : mean / xs.size();
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      double sd = xs.size() > 1 ? std::sqrt(var / (xs.size() - 1)) : 0.0;
      means.push_back(mean);
      stds.push_back(sd);
      counts.push_back(static_cast<int>(xs.size()));
    }
    series["mean"] = means;
    series["std"] = stds;
    series["count"] = counts;
    fig["methods"][methods[mi]] = std::move(series);
  }

  const std::string plot_path = join_path(cfg.out_dir, cfg.paths.plot_data);
  nlohmann::ordered_json plot;
  if (fs::exists(plot_path)) {
    std::ifstream in(plot_path);
    try {
      in >> plot;
    } catch (const nlohmann::json::exception&) {
      plot = nlohmann::ordered_json::object();
    }
    if (!plot.is_object()) plot = nlohmann::ordered_json::object();
  }
  plot[figure] = std::move(fig);
  std::ofstream plot_out(plot_path);
  if (!plot_out) throw Error("cannot write plot data " + plot_path);
  plot_out << plot.dump(2) << "\n";

  int failed = 0;
  for (const auto& row : rows)
    if (row.status != "ok") ++failed;
  if (failed == static_cast<int>(cell_count))
    throw Error("sweep: all " + std::to_string(cell_count) +
                " cells failed; first error: " + rows.front().status);
  std::cout << "sweep " << axis << ": " << cell_count - failed << "/"
            << cell_count << " cells ok -> "
            << join_path(cfg.out_dir, cfg.paths.metrics) << "\n";
  return failed;
}

void cmd_report(const ExperimentConfig& cfg) {
  const std::string metrics_path = join_path(cfg.out_dir, cfg.paths.metrics);
  std::vector<MetricsRow> rows = read_metrics_csv(metrics_path);
  if (rows.empty()) throw ConfigError("no rows in " + metrics_path);

  // (axis, value) -> method -> rows
  std::map<std::pair<std::string, double>,
           std::map<std::string, std::vector<const MetricsRow*>>>
      groups;
  for (const auto& r : rows)
    groups[{r.sweep_axis, r.sweep_value}][r.method].push_back(&r);

  const std::string path = join_path(cfg.out_dir, cfg.paths.report);
  std::ofstream out(path);
  if (!out) throw Error("cannot write report " + path);
  out << "# Results: " << cfg.name << "\n";
  for (const auto& [key, by_method] : groups) {
    out << "\n## "
        << (key.first.empty() ? std::string("evaluation")
                              : key.first + " = " + fmt(key.second))
        << "\n\n";
    out << "| method | n | ok | QoS % mean | QoS % std | coverage % mean | "
           "throughput Mbps mean |\n";
    out << "|---|---|---|---|---|---|---|\n";
    for (const auto& [method, rs] : by_method) {
      std::vector<double> qos, cov, thr;
      int ok = 0;
      for (const MetricsRow* r : rs) {
        if (r->status != "ok") continue;
        ++ok;
        qos.push_back(r->eval.qos_pct);
        cov.push_back(r->eval.coverage_pct);
        thr.push_back(r->eval.throughput_bps);
      }
      auto mean = [](const std::vector<double>& xs) {
        double m = 0.0;
        for (double x : xs) m += x;
        return xs.empty() ? 0.0 : m / xs.size();
      };
      double qm = mean(qos);
      double var = 0.0;
      for (double x : qos) var += (x - qm) * (x - qm);
      double sd = qos.size() > 1 ? std::sqrt(var / (qos.size() - 1)) : 0.0;
      out << "| " << method << " | " << rs.size() << " | " << ok << " | "
          << fmt(qm) << " | " << fmt(sd) << " | " << fmt(mean(cov)) << " | "
          << fmt(mean(thr) / 1e6) << " |\n";
    }
  }
  std::cout << "report: " << path << "\n";
}

}  // namespace aeris
