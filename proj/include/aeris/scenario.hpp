#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aeris/common.hpp"
#include "aeris/grid.hpp"

namespace aeris {

enum class ServiceClass : int { video = 1, data = 2, audio = 3 };

inline int class_index(ServiceClass c) { return static_cast<int>(c) - 1; }

struct UserElement {
  int id = 0;               // 1-based
  Vec3 position;            // ground device, z == 0
  ServiceClass service_class = ServiceClass::video;
};

struct UavPose {
  int id = 0;               // 1-based
  Vec3 position;
  double battery_j = 0.0;
  double speed_mps = 0.0;   // speed flown during the last slot
};

struct RisDescriptor {
  int id = 0;               // 1-based
  Vec3 position;
  int element_count = 0;
  double element_spacing_m = 0.0;
  int phase_bits = 0;
};

struct ClusterSpec {
  int count = 4;
  double exponent = 2.0;        // cluster k receives weight k^-exponent
  double scatter_std_m = 30.0;  // Gaussian spread around each center
  // Optional explicit centers; drawn uniformly inside the area when empty.
  std::vector<std::pair<double, double>> centers;
};

struct ScenarioSpec {
  AreaGrid area;
  int ue_count = 400;
  ClusterSpec clusters;
  std::array<double, 3> class_mix{1.0, 1.0, 1.0};  // video : data : audio
  int uav_count = 2;
  double uav_altitude_m = 100.0;
  double battery_init_j = 500e3;
  double battery_reserve_j = 20e3;
  std::vector<RisDescriptor> ris;
};

// Immutable-per-step world snapshot. UAV poses hold the canonical initial
// placement; per-episode placement is redrawn from the reset seed.
struct ScenarioState {
  std::uint64_t seed = 0;
  AreaGrid area;
  std::vector<UserElement> ues;
  std::vector<UavPose> uavs;
  double uav_altitude_m = 0.0;
  double battery_capacity_j = 0.0;  // level at mission start
  double battery_reserve_j = 0.0;
  std::vector<RisDescriptor> ris;
};

// Apportion `total` across ranks 1..clusters proportionally to rank^-exponent
// (largest-remainder rounding, so counts sum exactly to total).
std::vector<int> cluster_counts(int total, int clusters, double exponent);

ScenarioState generate_scenario(std::uint64_t seed, const ScenarioSpec& spec);

void validate_scenario(const ScenarioState& s);

void save_scenario(const ScenarioState& s, const std::string& path);
ScenarioState load_scenario(const std::string& path);

}  // namespace aeris
