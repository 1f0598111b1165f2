#include "aeris/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "aeris/rng.hpp"

namespace aeris {

namespace {

constexpr int kScenarioSchemaVersion = 1;

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Largest-remainder apportionment of `total` over real-valued weights.
std::vector<int> apportion(const std::vector<double>& weights, int total) {
  double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> counts(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double exact = total * weights[i] / wsum;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(exact - counts[i], i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int k = 0; k < total - assigned; ++k)
    counts[remainders[k % remainders.size()].second]++;
  return counts;
}

}  // namespace

std::vector<int> cluster_counts(int total, int clusters, double exponent) {
  if (total <= 0) throw ConfigError("cluster_counts: total must be positive");
  if (clusters < 1) throw ConfigError("cluster_counts: need at least one cluster");
  if (exponent <= 1.0)
    throw ConfigError("cluster_counts: power-law exponent must exceed 1");
  std::vector<double> weights(clusters);
  for (int k = 0; k < clusters; ++k)
    weights[k] = std::pow(static_cast<double>(k + 1), -exponent);
  return apportion(weights, total);
}

ScenarioState generate_scenario(std::uint64_t seed, const ScenarioSpec& spec) {
  const AreaGrid& area = spec.area;
  if (area.cell_count() == 0) throw ConfigError("generate_scenario: empty grid");
  if (spec.ue_count <= 0)
    throw ConfigError("generate_scenario: ue_count must be positive");
  if (spec.uav_count <= 0)
    throw ConfigError("generate_scenario: uav_count must be positive");
  if (spec.uav_count > area.cell_count())
    throw ConfigError("generate_scenario: more UAVs than grid cells");
  if (spec.ris.empty())
    throw ConfigError("generate_scenario: at least one RIS is required");
  if (spec.uav_altitude_m <= 0.0)
    throw ConfigError("generate_scenario: UAV altitude must be positive");

  for (const auto& c : spec.clusters.centers) {
    if (!area.contains(c.first, c.second))
      throw ConfigError("generate_scenario: cluster center (" +
                        std::to_string(c.first) + ", " +
                        std::to_string(c.second) + ") outside area");
  }

  ScenarioState s;
  s.seed = seed;
  s.area = area;
  s.uav_altitude_m = spec.uav_altitude_m;
  s.battery_capacity_j = spec.battery_init_j + spec.battery_reserve_j;
  s.battery_reserve_j = spec.battery_reserve_j;
  s.ris = spec.ris;
  for (std::size_t r = 0; r < s.ris.size(); ++r) {
    auto& d = s.ris[r];
    if (d.id == 0) d.id = static_cast<int>(r) + 1;
    if (d.element_count < 1)
      throw ConfigError("generate_scenario: RIS element count must be >= 1");
    if (d.phase_bits < 1)
      throw ConfigError("generate_scenario: RIS phase bits must be >= 1");
    if (d.element_spacing_m <= 0.0)
      throw ConfigError("generate_scenario: RIS element spacing must be positive");
  }

  Rng rng(mix_seed(seed, {0x5ce9a21ull}));

  // Cluster centers, ranked 1..C. Rank 1 is the busiest.
  std::vector<std::pair<double, double>> centers = spec.clusters.centers;
  while (static_cast<int>(centers.size()) < spec.clusters.count) {
    centers.emplace_back(rng.uniform(0.0, area.width_m()),
                         rng.uniform(0.0, area.height_m()));
  }
  centers.resize(spec.clusters.count);

  std::vector<int> counts =
      cluster_counts(spec.ue_count, spec.clusters.count, spec.clusters.exponent);

  // Service classes follow the configured proportions exactly, then get
  // shuffled over UE ids.
  std::vector<double> mix(spec.class_mix.begin(), spec.class_mix.end());
  if (mix[0] < 0 || mix[1] < 0 || mix[2] < 0 ||
      mix[0] + mix[1] + mix[2] <= 0.0)
    throw ConfigError("generate_scenario: invalid service class mix");
  std::vector<int> class_totals = apportion(mix, spec.ue_count);
  std::vector<ServiceClass> classes;
  classes.reserve(spec.ue_count);
  for (int j = 0; j < 3; ++j)
    classes.insert(classes.end(), class_totals[j],
                   static_cast<ServiceClass>(j + 1));
  for (std::size_t i = classes.size(); i > 1; --i)
    std::swap(classes[i - 1], classes[rng.uniform_int(i)]);

  int ue_id = 1;
  for (int k = 0; k < spec.clusters.count; ++k) {
    for (int n = 0; n < counts[k]; ++n) {
      UserElement ue;
      ue.id = ue_id;
      ue.position.x = clamp(rng.normal(centers[k].first, spec.clusters.scatter_std_m),
                            0.0, area.width_m());
      ue.position.y = clamp(rng.normal(centers[k].second, spec.clusters.scatter_std_m),
                            0.0, area.height_m());
      ue.position.z = 0.0;
      ue.service_class = classes[ue_id - 1];
      s.ues.push_back(ue);
      ++ue_id;
    }
  }

  // Canonical initial placement: one UAV per distinct cell.
  std::vector<int> cells(area.cell_count());
  std::iota(cells.begin(), cells.end(), 0);
  for (int u = 0; u < spec.uav_count; ++u) {
    std::size_t pick = u + rng.uniform_int(cells.size() - u);
    std::swap(cells[u], cells[pick]);
    auto [cx, cy] = area.cell_center(cells[u]);
    UavPose pose;
    pose.id = u + 1;
    pose.position = {cx, cy, spec.uav_altitude_m};
    pose.battery_j = s.battery_capacity_j;
    pose.speed_mps = 0.0;
    s.uavs.push_back(pose);
  }

  validate_scenario(s);
  return s;
}

void validate_scenario(const ScenarioState& s) {
  if (s.area.cell_count() == 0)
    throw ValidationError("scenario: empty or missing area grid");
  if (s.ues.empty()) throw ValidationError("scenario: no user elements");
  if (s.uavs.empty()) throw ValidationError("scenario: no UAVs");
  if (s.ris.empty()) throw ValidationError("scenario: no RIS");
  for (const auto& ue : s.ues) {
    if (!s.area.contains(ue.position.x, ue.position.y))
      throw ValidationError("scenario: UE " + std::to_string(ue.id) +
                            " at (" + std::to_string(ue.position.x) + ", " +
                            std::to_string(ue.position.y) + ") outside area");
    if (ue.position.z != 0.0)
      throw ValidationError("scenario: UE " + std::to_string(ue.id) +
                            " has nonzero altitude");
    int c = static_cast<int>(ue.service_class);
    if (c < 1 || c > 3)
      throw ValidationError("scenario: UE " + std::to_string(ue.id) +
                            " has invalid service class " + std::to_string(c));
  }
  for (const auto& uav : s.uavs) {
    if (!s.area.contains(uav.position.x, uav.position.y))
      throw ValidationError("scenario: UAV " + std::to_string(uav.id) +
                            " outside area");
    if (uav.position.z != s.uav_altitude_m)
      throw ValidationError("scenario: UAV " + std::to_string(uav.id) +
                            " not at the configured altitude");
  }
  for (const auto& r : s.ris) {
    if (r.element_count < 1 || r.phase_bits < 1 || r.element_spacing_m <= 0.0)
      throw ValidationError("scenario: RIS " + std::to_string(r.id) +
                            " has invalid geometry");
  }
}

namespace {

using json = nlohmann::ordered_json;

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError("scenario file: malformed position");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void save_scenario(const ScenarioState& s, const std::string& path) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["seed"] = s.seed;
  j["area"] = {{"width_m", s.area.width_m()},
               {"height_m", s.area.height_m()},
               {"cell_size_m", s.area.cell_size_m()}};
  j["uav_altitude_m"] = s.uav_altitude_m;
  j["battery_capacity_j"] = s.battery_capacity_j;
  j["battery_reserve_j"] = s.battery_reserve_j;
  j["ues"] = json::array();
  for (const auto& ue : s.ues)
    j["ues"].push_back({{"id", ue.id},
                        {"position", vec3_to_json(ue.position)},
                        {"service_class", static_cast<int>(ue.service_class)}});
  j["uavs"] = json::array();
  for (const auto& uav : s.uavs)
    j["uavs"].push_back({{"id", uav.id},
                         {"position", vec3_to_json(uav.position)},
                         {"battery_j", uav.battery_j},
                         {"speed_mps", uav.speed_mps}});
  j["ris"] = json::array();
  for (const auto& r : s.ris)
    j["ris"].push_back({{"id", r.id},
                        {"position", vec3_to_json(r.position)},
                        {"element_count", r.element_count},
                        {"element_spacing_m", r.element_spacing_m},
                        {"phase_bits", r.phase_bits}});

  std::ofstream out(path);
  if (!out) throw ConfigError("save_scenario: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("save_scenario: write failed for " + path);
}

ScenarioState load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("load_scenario: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("load_scenario: " + path +
                          " is not a valid scenario file: " + e.what());
  }
  try {
    if (!j.contains("schema_version"))
      throw ValidationError("scenario file: missing schema_version");
    int version = j["schema_version"].get<int>();
    if (version != kScenarioSchemaVersion)
      throw ValidationError("scenario file: unsupported schema_version " +
                            std::to_string(version) + " (expected " +
                            std::to_string(kScenarioSchemaVersion) + ")");
    ScenarioState s;
    s.seed = j.at("seed").get<std::uint64_t>();
    const auto& a = j.at("area");
    s.area = AreaGrid(a.at("width_m").get<double>(),
                      a.at("height_m").get<double>(),
                      a.at("cell_size_m").get<double>());
    s.uav_altitude_m = j.at("uav_altitude_m").get<double>();
    s.battery_capacity_j = j.at("battery_capacity_j").get<double>();
    s.battery_reserve_j = j.at("battery_reserve_j").get<double>();
    for (const auto& e : j.at("ues")) {
      UserElement ue;
      ue.id = e.at("id").get<int>();
      ue.position = vec3_from_json(e.at("position"));
      ue.service_class =
          static_cast<ServiceClass>(e.at("service_class").get<int>());
      s.ues.push_back(ue);
    }
    for (const auto& e : j.at("uavs")) {
      UavPose uav;
      uav.id = e.at("id").get<int>();
      uav.position = vec3_from_json(e.at("position"));
      uav.battery_j = e.at("battery_j").get<double>();
      uav.speed_mps = e.at("speed_mps").get<double>();
      s.uavs.push_back(uav);
    }
    for (const auto& e : j.at("ris")) {
      RisDescriptor r;
      r.id = e.at("id").get<int>();
      r.position = vec3_from_json(e.at("position"));
      r.element_count = e.at("element_count").get<int>();
      r.element_spacing_m = e.at("element_spacing_m").get<double>();
      r.phase_bits = e.at("phase_bits").get<int>();
      s.ris.push_back(r);
    }
    validate_scenario(s);
    return s;
  } catch (const json::exception& e) {
    throw ValidationError("load_scenario: schema error in " + path + ": " +
                          e.what());
  }
}

}  // namespace aeris
