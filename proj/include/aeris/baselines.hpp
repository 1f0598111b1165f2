#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aeris/environment.hpp"
#include "aeris/rng.hpp"

namespace aeris {

// Random waypoint walk on the grid. Each UAV holds a waypoint cell drawn
// uniformly, steps one cell towards it per slot (diagonals allowed), and
// draws a fresh waypoint on arrival. Collision and boundary handling stay
// with the environment.
class RwpPolicy {
 public:
  RwpPolicy(const AreaGrid& area, int uav_count, std::uint64_t seed);

  // Action for the given UAV standing at (col, row). Consumes randomness
  // only when a new waypoint is needed.
  int action_for(int uav, int col, int row);

  std::pair<int, int> waypoint(int uav) const;  // (col, row), (-1,-1) undrawn

 private:
  AreaGrid area_;
  Rng rng_;
  std::vector<std::pair<int, int>> waypoints_;  // (col, row), -1 = undrawn
};

struct BruteForceResult {
  std::vector<int> actions;  // one action per step, in acting order
  double objective = 0.0;    // summed post-step coverage
  std::uint64_t evaluated = 0;
};

// Scores every action sequence over the full horizon by replaying the
// environment from `reset_seed`; refuses (config error) when the sequence
// count 9^steps exceeds `max_sequences`. Ties keep the first sequence in
// lexicographic order.
BruteForceResult brute_force_paths(Environment env, std::uint64_t reset_seed,
                                   std::uint64_t max_sequences);

}  // namespace aeris
