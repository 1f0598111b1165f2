#include "aeris.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "aeris/config.hpp"
#include "aeris/harness.hpp"
#include "aeris/scenario.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// ConfigError and ValidationError cover everything the caller can fix by
// changing inputs; the rest is a runtime failure.
template <typename Fn>
aeris_status guarded(Fn&& fn) {
  try {
    fn();
    return AERIS_OK;
  } catch (const aeris::ConfigError& e) {
    set_error(e.what());
    return AERIS_ERR_CONFIG;
  } catch (const aeris::ValidationError& e) {
    set_error(e.what());
    return AERIS_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return AERIS_ERR_RUNTIME;
  } catch (...) {
    set_error("unknown error");
    return AERIS_ERR_RUNTIME;
  }
}

aeris_status require(const void* p, const char* what) {
  if (p) return AERIS_OK;
  set_error(std::string(what) + " must not be null");
  return AERIS_ERR_CONFIG;
}

}  // namespace

struct aeris_config {
  nlohmann::json raw;  // source document; overrides mutate this
  aeris::ExperimentConfig parsed;
};

struct aeris_scenario {
  aeris::ScenarioState state;
};

extern "C" {

const char* aeris_version(void) { return "0.1.0"; }

const char* aeris_last_error(void) { return g_last_error.c_str(); }

aeris_status aeris_config_open(const char* name_or_path, aeris_config** out) {
  if (aeris_status s = require(name_or_path, "name_or_path")) return s;
  if (aeris_status s = require(out, "out")) return s;
  *out = nullptr;
  return guarded([&] {
    std::string path = aeris::resolve_config_path(name_or_path);
    std::ifstream in(path);
    if (!in) throw aeris::ConfigError("cannot open config file " + path);
    nlohmann::json raw;
    try {
      in >> raw;
    } catch (const nlohmann::json::exception& e) {
      throw aeris::ValidationError("config " + path + ": " + e.what());
    }
    aeris::apply_env_overrides(raw);
    auto* cfg = new aeris_config{raw, aeris::parse_config(raw)};
    *out = cfg;
  });
}

aeris_status aeris_config_from_json(const char* json_text,
                                    aeris_config** out) {
  if (aeris_status s = require(json_text, "json_text")) return s;
  if (aeris_status s = require(out, "out")) return s;
  *out = nullptr;
  return guarded([&] {
    nlohmann::json raw;
    try {
      raw = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      throw aeris::ValidationError(std::string("config text: ") + e.what());
    }
    *out = new aeris_config{raw, aeris::parse_config(raw)};
  });
}

aeris_status aeris_config_default(aeris_config** out) {
  if (aeris_status s = require(out, "out")) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new aeris_config{nlohmann::json::object(),
                            aeris::default_config()};
  });
}

aeris_status aeris_config_override(aeris_config* cfg, const char* dotted_key,
                                   const char* value) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  if (aeris_status s = require(dotted_key, "dotted_key")) return s;
  if (aeris_status s = require(value, "value")) return s;
  return guarded([&] {
    nlohmann::json raw = cfg->raw;
    aeris::apply_override_key(raw, dotted_key, value);
    cfg->parsed = aeris::parse_config(raw);  // throws before any mutation
    cfg->raw = std::move(raw);
  });
}

aeris_status aeris_config_to_json(const aeris_config* cfg, char** out_json) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  if (aeris_status s = require(out_json, "out_json")) return s;
  *out_json = nullptr;
  return guarded([&] {
    std::string text = aeris::config_to_json(cfg->parsed).dump(2);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_json = buf;
  });
}

void aeris_config_free(aeris_config* cfg) { delete cfg; }

void aeris_string_free(char* s) { std::free(s); }

aeris_status aeris_scenario_generate(const aeris_config* cfg,
                                     aeris_scenario** out) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  if (aeris_status s = require(out, "out")) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new aeris_scenario{
        aeris::generate_scenario(cfg->parsed.seed, cfg->parsed.scenario)};
  });
}

aeris_status aeris_scenario_load(const char* path, aeris_scenario** out) {
  if (aeris_status s = require(path, "path")) return s;
  if (aeris_status s = require(out, "out")) return s;
  *out = nullptr;
  return guarded([&] { *out = new aeris_scenario{aeris::load_scenario(path)}; });
}

aeris_status aeris_scenario_save(const aeris_scenario* s, const char* path) {
  if (aeris_status st = require(s, "scenario")) return st;
  if (aeris_status st = require(path, "path")) return st;
  return guarded([&] { aeris::save_scenario(s->state, path); });
}

int aeris_scenario_ue_count(const aeris_scenario* s) {
  return s ? static_cast<int>(s->state.ues.size()) : -1;
}

int aeris_scenario_uav_count(const aeris_scenario* s) {
  return s ? static_cast<int>(s->state.uavs.size()) : -1;
}

int aeris_scenario_ris_count(const aeris_scenario* s) {
  return s ? static_cast<int>(s->state.ris.size()) : -1;
}

void aeris_scenario_free(aeris_scenario* s) { delete s; }

aeris_status aeris_run_generate(const aeris_config* cfg) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  return guarded([&] { aeris::cmd_generate(cfg->parsed); });
}

aeris_status aeris_run_train(const aeris_config* cfg) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  return guarded([&] { aeris::cmd_train(cfg->parsed); });
}

aeris_status aeris_run_optimize_phases(const aeris_config* cfg) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  return guarded([&] { aeris::cmd_optimize_phases(cfg->parsed); });
}

aeris_status aeris_run_evaluate(const aeris_config* cfg) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  return guarded([&] { aeris::cmd_evaluate(cfg->parsed); });
}

aeris_status aeris_run_report(const aeris_config* cfg) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  return guarded([&] { aeris::cmd_report(cfg->parsed); });
}

aeris_status aeris_run_sweep(const aeris_config* cfg, int* failed_cells) {
  if (aeris_status s = require(cfg, "cfg")) return s;
  int failed = 0;
  aeris_status st = guarded([&] { failed = aeris::cmd_sweep(cfg->parsed); });
  if (failed_cells) *failed_cells = failed;
  if (st != AERIS_OK) return st;
  if (failed > 0) {
    set_error(std::to_string(failed) + " sweep cell(s) failed");
    return AERIS_ERR_PARTIAL;
  }
  return AERIS_OK;
}

}  // extern "C"
