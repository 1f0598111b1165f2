#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "aeris/config.hpp"
#include "aeris/rng.hpp"

using namespace aeris;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory under the system temp root.
fs::path scratch_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("aeris_cfg_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

struct EnvGuard {
  std::string name;
  EnvGuard(const std::string& n, const std::string& value) : name(n) {
    ::setenv(name.c_str(), value.c_str(), 1);
  }
  ~EnvGuard() { ::unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("defaults form a valid configuration") {
  ExperimentConfig c = default_config();
  CHECK_NOTHROW(c.validate());
  CHECK(c.seed == 1);
  CHECK(c.out_dir == "out");
  CHECK(c.scenario.area.cols() == 10);
  CHECK(c.scenario.area.rows() == 10);
  REQUIRE(c.scenario.ris.size() == 1);
  CHECK(c.scenario.ris[0].element_count == 16);
  CHECK(c.scenario.ris[0].element_spacing_m ==
        doctest::Approx(c.channel.carrier_wavelength_m / 2.0));
  CHECK(c.sweep.axis == "tx_power_dbm");
  CHECK(c.sweep.methods.size() == 4);
}

TEST_CASE("serialized configs parse back unchanged") {
  ExperimentConfig c = default_config();
  c.seed = 17;
  c.name = "roundtrip";
  c.training.episodes = 123;
  c.channel.tx_power_w = 0.5;
  c.sweep.values = {1.0, 2.0};
  json j = config_to_json(c);
  ExperimentConfig back = parse_config(j);
  CHECK(config_to_json(back).dump() == j.dump());
  CHECK(back.seed == 17);
  CHECK(back.training.episodes == 123);
  CHECK(back.channel.tx_power_w == 0.5);
}

TEST_CASE("power levels accept dBm spellings") {
  json j;
  j["channel"]["tx_power_dbm"] = 30.0;
  j["channel"]["noise_dbm"] = -90.0;
  ExperimentConfig c = parse_config(j);
  CHECK(c.channel.tx_power_w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.channel.noise_power_w == doctest::Approx(1e-12).epsilon(1e-12));
  CHECK(dbm_to_watts(20.0) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("carrier frequency sets the wavelength unless given directly") {
  json j;
  j["channel"]["carrier_frequency_hz"] = 2.997924580e9;
  ExperimentConfig c = parse_config(j);
  CHECK(c.channel.carrier_wavelength_m == doctest::Approx(0.1).epsilon(1e-12));

  j["channel"]["carrier_wavelength_m"] = 0.2;  // explicit value wins
  c = parse_config(j);
  CHECK(c.channel.carrier_wavelength_m == 0.2);
}

TEST_CASE("section seeds follow the experiment seed when unset") {
  json j;
  j["experiment"]["seed"] = 42;
  ExperimentConfig c = parse_config(j);
  CHECK(c.training.seed == 42);
  CHECK(c.pso.seed == 42);

  j["training"]["seed"] = 7;
  c = parse_config(j);
  CHECK(c.training.seed == 7);
  CHECK(c.pso.seed == 42);
}

TEST_CASE("ris spacing defaults to half the carrier wavelength") {
  json j;
  j["scenario"]["ris"] = json::array(
      {{{"position", {100.0, 100.0, 30.0}}, {"element_count", 8},
        {"phase_bits", 2}}});
  ExperimentConfig c = parse_config(j);
  REQUIRE(c.scenario.ris.size() == 1);
  CHECK(c.scenario.ris[0].id == 1);
  CHECK(c.scenario.ris[0].element_spacing_m ==
        doctest::Approx(c.channel.carrier_wavelength_m / 2.0));
  CHECK(c.scenario.ris[0].position.z == 30.0);
}

TEST_CASE("explicit evaluation seeds beat the generated count") {
  ExperimentConfig c = default_config();
  c.eval_seeds = {5, 6, 7};
  c.eval_seed_count = 20;
  CHECK(c.resolved_eval_seeds() == std::vector<std::uint64_t>{5, 6, 7});

  c.eval_seeds.clear();
  c.eval_seed_count = 8;
  auto seeds = c.resolved_eval_seeds();
  REQUIRE(seeds.size() == 8);
  CHECK(seeds == c.resolved_eval_seeds());
  CHECK(std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() == 8);

  ExperimentConfig other = c;
  other.seed = c.seed + 1;  // the master seed feeds the generated list
  CHECK(other.resolved_eval_seeds() != seeds);
}

TEST_CASE("validation rejects inconsistent settings") {
  auto broken = [] { return default_config(); };

  auto c = broken();
  c.out_dir = "";
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.eval_seed_count = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.eval_seeds = {1};  // an explicit list rescues a zero count
  CHECK_NOTHROW(c.validate());

  c = broken();
  c.sweep.axis = "altitude";
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.sweep.values = {20.0, 20.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.sweep.values = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.sweep.methods = {"drl_dqn", "genetic"};
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.sweep.threads = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.joint.rounds = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.brute_force.plan_samples = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.channel.tx_power_w = 0.0;  // section validation bubbles up
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = broken();
  c.energy.v0 = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("malformed documents become validation errors") {
  json j;
  j["experiment"]["seed"] = "not a number";
  CHECK_THROWS_AS(parse_config(j), ValidationError);

  j = json{};
  j["scenario"]["class_mix"] = {0.5, 0.5};
  CHECK_THROWS_AS(parse_config(j), ValidationError);

  j = json{};
  j["channel"]["thresholds_db"] = {30.0};
  CHECK_THROWS_AS(parse_config(j), ValidationError);

  j = json{};
  j["scenario"]["clusters"]["centers"] = json::array({json::array({1.0})});
  CHECK_THROWS_AS(parse_config(j), ValidationError);
}

TEST_CASE("dotted overrides set nested keys with JSON or string values") {
  json j;
  apply_override_key(j, "experiment.seed", "42");
  CHECK(j["experiment"]["seed"] == 42);

  apply_override_key(j, "paths.metrics", "m.csv");  // not valid JSON
  CHECK(j["paths"]["metrics"] == "m.csv");

  apply_override_key(j, "sweep.values", "[1, 2, 3]");
  CHECK(j["sweep"]["values"] == json::array({1, 2, 3}));

  apply_override_key(j, "a.b.c", "true");
  CHECK(j["a"]["b"]["c"] == true);

  CHECK_THROWS_AS(apply_override_key(j, "", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override_key(j, "a..b", "1"), ConfigError);
  CHECK_THROWS_AS(apply_override_key(j, "a.", "1"), ConfigError);
}

TEST_CASE("process environment overrides map onto sections") {
  EnvGuard g1("AERIS_CHANNEL_TX_POWER_W", "0.25");
  EnvGuard g2("AERIS_BRUTE_FORCE_PLAN_SAMPLES", "10");
  EnvGuard g3("AERIS_EXPERIMENT_SEED", "99");
  EnvGuard g4("AERIS_CONFIG_DIR", "/nowhere");  // lookup knob, must be skipped
  EnvGuard g5("AERIS_UNKNOWNSECTION_KEY", "1");

  json j;
  apply_env_overrides(j);
  CHECK(j["channel"]["tx_power_w"] == 0.25);
  // the two-word section wins over any shorter interpretation
  CHECK(j["brute_force"]["plan_samples"] == 10);
  CHECK(j["experiment"]["seed"] == 99);
  CHECK_FALSE(j.contains("config_dir"));
  CHECK(j.size() == 3);

  ExperimentConfig c = parse_config(j);
  CHECK(c.channel.tx_power_w == 0.25);
  CHECK(c.brute_force.plan_samples == 10);
  CHECK(c.seed == 99);
}

TEST_CASE("config path resolution prefers literal then the env directory") {
  fs::path base = scratch_dir("resolve");
  fs::path literal = base / "direct.json";
  write_file(literal, "{}");
  CHECK(resolve_config_path(literal.string()) == literal.string());

  fs::path env_dir = base / "envdir";
  fs::create_directories(env_dir);
  write_file(env_dir / "tiny.json", "{}");
  EnvGuard guard("AERIS_CONFIG_DIR", env_dir.string());
  CHECK(resolve_config_path("tiny") == (env_dir / "tiny.json").string());

  CHECK_THROWS_AS(resolve_config_path("missing"), ConfigError);
  fs::remove_all(base);
}

TEST_CASE("config names fall back to the local configs directory") {
  fs::path base = scratch_dir("local");
  fs::create_directories(base / "configs");
  write_file(base / "configs" / "here.json", "{}");
  fs::path old_cwd = fs::current_path();
  fs::current_path(base);
  CHECK(resolve_config_path("here") == "configs/here.json");
  fs::current_path(old_cwd);
  fs::remove_all(base);
}

TEST_CASE("config files load with overrides applied") {
  fs::path base = scratch_dir("load");
  fs::path file = base / "exp.json";
  write_file(file, R"({"experiment": {"seed": 5, "name": "fileged"},
                       "training": {"episodes": 11}})");

  ExperimentConfig c = load_config_file(file.string());
  CHECK(c.seed == 5);
  CHECK(c.training.episodes == 11);

  {
    EnvGuard guard("AERIS_EXPERIMENT_SEED", "77");
    CHECK(load_config_file(file.string()).seed == 77);
    CHECK(load_config_file(file.string(), false).seed == 5);
  }

  CHECK_THROWS_AS(load_config_file((base / "nope.json").string()), ConfigError);

  fs::path bad = base / "bad.json";
  write_file(bad, "{ not json");
  CHECK_THROWS_AS(load_config_file(bad.string()), ValidationError);

  fs::path invalid = base / "invalid.json";
  write_file(invalid, R"({"sweep": {"axis": "altitude"}})");
  CHECK_THROWS_AS(load_config_file(invalid.string()), ConfigError);
  fs::remove_all(base);
}
