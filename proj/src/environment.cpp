#include "aeris/environment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aeris/rng.hpp"

namespace aeris {

namespace {

// (dcol, drow) per action; index 0 is hover, then clockwise from north.
constexpr std::array<std::pair<int, int>, kActionCount> kDeltas{{
    {0, 0},    // hover
    {0, 1},    // N
    {1, 1},    // NE
    {1, 0},    // E
    {1, -1},   // SE
    {0, -1},   // S
    {-1, -1},  // SW
    {-1, 0},   // W
    {-1, 1},   // NW
}};

constexpr std::uint64_t kResetSalt = 0xa54c9ull;

}  // namespace

std::pair<int, int> action_delta(int action) {
  if (action < 0 || action >= kActionCount)
    throw ContractError("action_delta: action index " + std::to_string(action) +
                        " out of range");
  return kDeltas[static_cast<std::size_t>(action)];
}

int action_from_delta(int dcol, int drow) {
  for (int a = 0; a < kActionCount; ++a)
    if (kDeltas[static_cast<std::size_t>(a)] == std::make_pair(dcol, drow))
      return a;
  throw ContractError("action_from_delta: no action moves by (" +
                      std::to_string(dcol) + ", " + std::to_string(drow) + ")");
}

CoverageReport coverage_count(const std::vector<UserElement>& ues,
                              const std::vector<UavPose>& uavs,
                              const std::vector<RisDescriptor>& ris,
                              const std::vector<PhaseConfig>& phases,
                              const ChannelParams& p) {
  CoverageReport report;
  report.covered.assign(ues.size(), 0);
  if (uavs.empty()) return report;
  for (std::size_t i = 0; i < ues.size(); ++i) {
    BestLink link = best_link(ues[i], uavs, ris, phases, p);
    if (is_covered(link.snr, ues[i].service_class, p)) {
      report.covered[i] = 1;
      report.total += 1;
      report.per_class[static_cast<std::size_t>(
          class_index(ues[i].service_class))] += 1;
    }
  }
  return report;
}

double served_throughput(const std::vector<UserElement>& ues,
                         const std::vector<UavPose>& uavs,
                         const std::vector<RisDescriptor>& ris,
                         const std::vector<PhaseConfig>& phases,
                         const ChannelParams& p) {
  if (uavs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& ue : ues) {
    BestLink link = best_link(ue, uavs, ris, phases, p);
    if (is_covered(link.snr, ue.service_class, p)) sum += link.rate;
  }
  return sum;
}

ConstraintReport constraints_ok(const std::vector<UavPose>& uavs,
                                double reserve_j, double d_max_m) {
  ConstraintReport report;
  for (const auto& u : uavs) {
    if (u.battery_j < reserve_j) {
      report.ok = false;
      report.violations.push_back(
          "uav " + std::to_string(u.id) + " battery " +
          std::to_string(u.battery_j) + " J below reserve " +
          std::to_string(reserve_j) + " J");
    }
  }
  const double min_sep = 2.0 * d_max_m;
  for (std::size_t a = 0; a < uavs.size(); ++a) {
    for (std::size_t b = a + 1; b < uavs.size(); ++b) {
      double d = distance(uavs[a].position, uavs[b].position);
      if (d < min_sep) {
        report.ok = false;
        report.violations.push_back(
            "uavs " + std::to_string(uavs[a].id) + " and " +
            std::to_string(uavs[b].id) + " separated by " + std::to_string(d) +
            " m, need " + std::to_string(min_sep) + " m");
      }
    }
  }
  return report;
}

Environment::Environment(ScenarioState scenario, EnvConfig cfg,
                         ChannelParams channel, EnergyParams energy,
                         std::vector<PhaseConfig> phases)
    : scenario_(std::move(scenario)),
      cfg_(cfg),
      channel_(channel),
      energy_(energy),
      phases_(std::move(phases)) {
  validate_scenario(scenario_);
  channel_.validate();
  energy_.validate();
  if (cfg_.horizon_slots <= 0)
    throw ConfigError("Environment: horizon must be positive");
  if (cfg_.slot_seconds <= 0.0)
    throw ConfigError("Environment: slot duration must be positive");
  if (cfg_.d_max_m <= 0.0)
    throw ConfigError("Environment: safety radius must be positive");
  if (phases_.size() != scenario_.ris.size())
    throw ConfigError("Environment: need one phase config per RIS surface");
  for (std::size_t r = 0; r < phases_.size(); ++r) {
    if (static_cast<int>(phases_[r].phases_rad.size()) !=
        scenario_.ris[r].element_count)
      throw ConfigError("Environment: phase vector length does not match RIS " +
                        std::to_string(scenario_.ris[r].id));
  }
  if (static_cast<int>(scenario_.uavs.size()) > scenario_.area.cell_count())
    throw ConfigError("Environment: more UAVs than grid cells");
  ue_cell_.reserve(scenario_.ues.size());
  for (const auto& ue : scenario_.ues)
    ue_cell_.push_back(scenario_.area.cell_of(ue.position.x, ue.position.y));
}

void Environment::reset(std::uint64_t seed) {
  const AreaGrid& area = scenario_.area;
  const int uav_count = static_cast<int>(scenario_.uavs.size());
  Rng rng(mix_seed(seed, {kResetSalt}));

  // Distinct cells, resampled as a whole if the separation floor rejects the
  // draw (tight grids with a large safety radius).
  std::vector<int> cells(static_cast<std::size_t>(area.cell_count()));
  bool placed = false;
  for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
    std::iota(cells.begin(), cells.end(), 0);
    for (int i = 0; i < uav_count; ++i) {
      std::size_t j = static_cast<std::size_t>(i) +
                      static_cast<std::size_t>(rng.uniform_int(
                          static_cast<std::uint64_t>(area.cell_count() - i)));
      std::swap(cells[static_cast<std::size_t>(i)], cells[j]);
    }
    for (int i = 0; i < uav_count; ++i) {
      auto [cx, cy] = area.cell_center(cells[static_cast<std::size_t>(i)]);
      auto& pose = scenario_.uavs[static_cast<std::size_t>(i)];
      pose.position = {cx, cy, scenario_.uav_altitude_m};
      pose.battery_j = scenario_.battery_capacity_j;
      pose.speed_mps = 0.0;
    }
    placed = constraints_ok(scenario_.uavs, scenario_.battery_reserve_j,
                            cfg_.d_max_m)
                 .ok;
  }
  if (!placed)
    throw ConfigError(
        "Environment: cannot place UAVs with the required separation");

  turn_ = 0;
  slot_ = 0;
  done_ = false;
  trace_.clear();
}

int Environment::encoding_length(const AreaGrid& area) {
  return 5 * area.cell_count() + 3;
}

std::vector<double> Environment::observe() const {
  const AreaGrid& area = scenario_.area;
  const int cells = area.cell_count();
  const double uav_count = static_cast<double>(scenario_.uavs.size());
  const double ue_count =
      std::max<std::size_t>(std::size_t{1}, scenario_.ues.size());

  std::vector<double> out(static_cast<std::size_t>(encoding_length(area)), 0.0);
  const auto& me = scenario_.uavs[static_cast<std::size_t>(turn_)];
  out[0] = (area.col_of(me.position.x) + 0.5) / area.cols();
  out[1] = (area.row_of(me.position.y) + 0.5) / area.rows();

  const std::size_t occupancy = 2;
  const std::size_t covered = occupancy + static_cast<std::size_t>(cells);
  const std::size_t density = covered + static_cast<std::size_t>(cells);

  for (const auto& uav : scenario_.uavs) {
    int c = area.cell_of(uav.position.x, uav.position.y);
    out[occupancy + static_cast<std::size_t>(c)] += 1.0 / uav_count;
  }
  CoverageReport cov = coverage();
  for (std::size_t i = 0; i < scenario_.ues.size(); ++i) {
    std::size_t cell = static_cast<std::size_t>(ue_cell_[i]);
    if (cov.covered[i]) out[covered + cell] += 1.0 / ue_count;
    std::size_t cls = static_cast<std::size_t>(
        class_index(scenario_.ues[i].service_class));
    out[density + cls * static_cast<std::size_t>(cells) + cell] +=
        1.0 / ue_count;
  }
  out.back() = (turn_ + 1) / uav_count;
  return out;
}

int Environment::effective_cell(int uav, int action) const {
  const AreaGrid& area = scenario_.area;
  const auto& pose = scenario_.uavs[static_cast<std::size_t>(uav)];
  int col = area.col_of(pose.position.x);
  int row = area.row_of(pose.position.y);
  int current = area.cell_index(col, row);
  auto [dc, dr] = action_delta(action);
  if (dc == 0 && dr == 0) return current;
  int ncol = col + dc;
  int nrow = row + dr;
  if (ncol < 0 || ncol >= area.cols() || nrow < 0 || nrow >= area.rows())
    return current;
  int target = area.cell_index(ncol, nrow);
  auto [cx, cy] = area.cell_center(target);
  Vec3 candidate{cx, cy, pose.position.z};
  for (std::size_t k = 0; k < scenario_.uavs.size(); ++k) {
    if (static_cast<int>(k) == uav) continue;
    if (distance(candidate, scenario_.uavs[k].position) < 2.0 * cfg_.d_max_m)
      return current;
  }
  return target;
}

double Environment::move_speed(int from_cell, int to_cell) const {
  if (from_cell == to_cell) return 0.0;
  auto [ax, ay] = scenario_.area.cell_center(from_cell);
  auto [bx, by] = scenario_.area.cell_center(to_cell);
  return std::hypot(bx - ax, by - ay) / cfg_.slot_seconds;
}

std::array<int, kActionCount> Environment::candidate_coverages() const {
  if (done_) throw ContractError("candidate_coverages: episode is over");
  std::array<int, kActionCount> out{};
  std::vector<UavPose> poses = scenario_.uavs;
  const std::size_t u = static_cast<std::size_t>(turn_);
  for (int a = 0; a < kActionCount; ++a) {
    int cell = effective_cell(turn_, a);
    auto [cx, cy] = scenario_.area.cell_center(cell);
    poses[u].position = {cx, cy, scenario_.uavs[u].position.z};
    out[static_cast<std::size_t>(a)] =
        coverage_count(scenario_.ues, poses, scenario_.ris, phases_, channel_)
            .total;
    poses[u] = scenario_.uavs[u];
  }
  return out;
}

StepResult Environment::step(int action) {
  if (done_) throw ContractError("step: episode is over, reset first");
  if (action < 0 || action >= kActionCount)
    throw ContractError("step: action index " + std::to_string(action) +
                        " out of range");

  const int u = turn_;
  auto& pose = scenario_.uavs[static_cast<std::size_t>(u)];
  const AreaGrid& area = scenario_.area;
  int from_cell = area.cell_of(pose.position.x, pose.position.y);
  int eff_cell = effective_cell(u, action);
  bool rejected = (action != 0 && eff_cell == from_cell);

  double speed = move_speed(from_cell, eff_cell);
  double energy = step_energy(speed, cfg_.slot_seconds, energy_);

  // The episode ends instead of letting any battery cross its floor.
  if (pose.battery_j - energy < scenario_.battery_reserve_j) {
    done_ = true;
    return {observe(), 0.0, true};
  }

  double reward = 0.0;
  int coverage_before = 0;
  std::array<int, kActionCount> candidates{};
  if (compute_reward_) {
    if (cfg_.shaped_reward)
      coverage_before = coverage().total;
    else
      candidates = candidate_coverages();
  }

  auto [cx, cy] = area.cell_center(eff_cell);
  pose.position = {cx, cy, pose.position.z};
  pose.speed_mps = speed;
  pose.battery_j -= energy;

  if (compute_reward_ && !rejected) {
    if (cfg_.shaped_reward) {
      reward = static_cast<double>(coverage().total - coverage_before);
    } else {
      int best = *std::max_element(candidates.begin(), candidates.end());
      reward = (candidates[static_cast<std::size_t>(action)] == best) ? 1.0
                                                                      : 0.0;
    }
  }

  if (trace_enabled_) {
    trace_.push_back({slot_, pose.id, pose.position.x, pose.position.y,
                      pose.battery_j, coverage().total, reward});
  }

  turn_ += 1;
  if (turn_ == static_cast<int>(scenario_.uavs.size())) {
    turn_ = 0;
    slot_ += 1;
    if (slot_ >= cfg_.horizon_slots) done_ = true;
  }
  return {observe(), reward, done_};
}

void Environment::set_phase_configs(std::vector<PhaseConfig> phases) {
  if (phases.size() != scenario_.ris.size())
    throw ContractError("set_phase_configs: need one config per RIS surface");
  for (std::size_t r = 0; r < phases.size(); ++r) {
    if (static_cast<int>(phases[r].phases_rad.size()) !=
        scenario_.ris[r].element_count)
      throw ContractError(
          "set_phase_configs: phase vector length does not match RIS " +
          std::to_string(scenario_.ris[r].id));
  }
  phases_ = std::move(phases);
}

CoverageReport Environment::coverage() const {
  return coverage_count(scenario_.ues, scenario_.uavs, scenario_.ris, phases_,
                        channel_);
}

double Environment::throughput() const {
  return served_throughput(scenario_.ues, scenario_.uavs, scenario_.ris,
                           phases_, channel_);
}

ConstraintReport Environment::constraints() const {
  return constraints_ok(scenario_.uavs, scenario_.battery_reserve_j,
                        cfg_.d_max_m);
}

}  // namespace aeris
