#include "aeris/baselines.hpp"

#include <string>

namespace aeris {

namespace {

constexpr std::uint64_t kWaypointSalt = 0x3fb7ull;

int sign(int v) { return (v > 0) - (v < 0); }

}  // namespace

RwpPolicy::RwpPolicy(const AreaGrid& area, int uav_count, std::uint64_t seed)
    : area_(area), rng_(mix_seed(seed, {kWaypointSalt})) {
  if (uav_count <= 0)
    throw ConfigError("RwpPolicy: uav count must be positive");
  waypoints_.assign(static_cast<std::size_t>(uav_count), {-1, -1});
}

int RwpPolicy::action_for(int uav, int col, int row) {
  if (uav < 0 || uav >= static_cast<int>(waypoints_.size()))
    throw ContractError("RwpPolicy: uav index out of range");
  auto& wp = waypoints_[static_cast<std::size_t>(uav)];
  if (wp.first < 0 || (wp.first == col && wp.second == row)) {
    int cell = static_cast<int>(
        rng_.uniform_int(static_cast<std::uint64_t>(area_.cell_count())));
    wp = {cell % area_.cols(), cell / area_.cols()};
    if (wp.first == col && wp.second == row) return 0;  // arrived, rest a slot
  }
  return action_from_delta(sign(wp.first - col), sign(wp.second - row));
}

std::pair<int, int> RwpPolicy::waypoint(int uav) const {
  if (uav < 0 || uav >= static_cast<int>(waypoints_.size()))
    throw ContractError("RwpPolicy: uav index out of range");
  return waypoints_[static_cast<std::size_t>(uav)];
}

BruteForceResult brute_force_paths(Environment env, std::uint64_t reset_seed,
                                   std::uint64_t max_sequences) {
  if (max_sequences == 0)
    throw ConfigError("brute_force_paths: sequence cap must be > 0");
  const int steps = env.config().horizon_slots * env.uav_count();

  std::uint64_t total = 1;
  for (int i = 0; i < steps; ++i) {
    if (total > max_sequences / kActionCount)
      throw ConfigError("brute_force_paths: 9^" + std::to_string(steps) +
                        " sequences exceed the cap of " +
                        std::to_string(max_sequences));
    total *= kActionCount;
  }

  env.set_compute_reward(false);
  env.enable_trace(false);

  BruteForceResult best;
  best.objective = -1.0;
  std::vector<int> seq(static_cast<std::size_t>(steps), 0);

  for (std::uint64_t s = 0; s < total; ++s) {
    env.reset(reset_seed);
    double objective = 0.0;
    for (int i = 0; i < steps && !env.done(); ++i) {
      env.step(seq[static_cast<std::size_t>(i)]);
      objective += env.coverage().total;
    }
    if (objective > best.objective) {
      best.objective = objective;
      best.actions = seq;
    }
    // Advance the sequence like an odometer, last step fastest, so the scan
    // runs in lexicographic order.
    for (std::size_t d = seq.size(); d-- > 0;) {
      seq[d] += 1;
      if (seq[d] < kActionCount) break;
      seq[d] = 0;
    }
  }
  best.evaluated = total;
  return best;
}

}  // namespace aeris
