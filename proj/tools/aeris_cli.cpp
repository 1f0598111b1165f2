#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "aeris.h"

// The CLI is a thin shell over the C API: parse arguments, build a config
// handle, dispatch one command, translate the status into an exit code.
// Exit codes: 0 ok, 2 config/usage error, 3 runtime error, 4 partial sweep.

namespace {

struct Options {
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool verbose = false;
};

int fail(aeris_status status) {
  std::fprintf(stderr, "aeris: %s\n", aeris_last_error());
  return static_cast<int>(status);
}

int dispatch(const std::string& command, const Options& opt) {
  aeris_config* cfg = nullptr;
  aeris_status st = opt.config.empty()
                        ? aeris_config_default(&cfg)
                        : aeris_config_open(opt.config.c_str(), &cfg);
  if (st != AERIS_OK) return fail(st);

  if (opt.seed_set) {
    st = aeris_config_override(cfg, "experiment.seed",
                               std::to_string(opt.seed).c_str());
    if (st != AERIS_OK) {
      aeris_config_free(cfg);
      return fail(st);
    }
  }
  if (!opt.out_dir.empty()) {
    st = aeris_config_override(cfg, "experiment.out_dir",
                               opt.out_dir.c_str());
    if (st != AERIS_OK) {
      aeris_config_free(cfg);
      return fail(st);
    }
  }

  if (opt.verbose) {
    char* json = nullptr;
    if (aeris_config_to_json(cfg, &json) == AERIS_OK) {
      std::fprintf(stderr, "resolved config:\n%s\n", json);
      aeris_string_free(json);
    }
  }

  if (command == "generate") {
    st = aeris_run_generate(cfg);
  } else if (command == "train") {
    st = aeris_run_train(cfg);
  } else if (command == "optimize-phases") {
    st = aeris_run_optimize_phases(cfg);
  } else if (command == "sweep") {
    int failed = 0;
    st = aeris_run_sweep(cfg, &failed);
    if (st == AERIS_ERR_PARTIAL)
      std::fprintf(stderr,
                   "aeris: %d sweep cell(s) failed; error rows are marked in "
                   "the metrics file\n",
                   failed);
  } else if (command == "evaluate") {
    st = aeris_run_evaluate(cfg);
  } else {
    st = aeris_run_report(cfg);
  }

  aeris_config_free(cfg);
  if (st == AERIS_OK || st == AERIS_ERR_PARTIAL) {
    if (st == AERIS_ERR_PARTIAL) return static_cast<int>(st);
    return 0;
  }
  return fail(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aeris: multi-UAV aerial network simulator and optimizer"};
  app.set_version_flag("--version", std::string(aeris_version()));
  app.require_subcommand(1);

  Options opt;
  app.add_option("-c,--config", opt.config,
                 "Config file path, or a name resolved against "
                 "$AERIS_CONFIG_DIR and ./configs");
  auto* seed_opt =
      app.add_option("--seed", opt.seed, "Override the experiment seed");
  app.add_option("--out-dir", opt.out_dir, "Override the output directory");
  app.add_flag("-v,--verbose", opt.verbose,
               "Print the resolved config to stderr");

  // fallthrough lets the global flags appear after the subcommand too.
  app.add_subcommand("generate", "Draw the scenario and write it out")
      ->fallthrough();
  app.add_subcommand("train", "Joint planner training and phase search")
      ->fallthrough();
  app.add_subcommand("optimize-phases",
                     "Phase-only search against the current checkpoint")
      ->fallthrough();
  app.add_subcommand("sweep", "Run the configured method/value/seed sweep")
      ->fallthrough();
  app.add_subcommand("evaluate", "Roll out the saved checkpoint")
      ->fallthrough();
  app.add_subcommand("report", "Summarise the metrics file as markdown")
      ->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help text, exit 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the error and usage hint
    return 2;
  }

  opt.seed_set = seed_opt->count() > 0;
  return dispatch(app.get_subcommands().front()->get_name(), opt);
}
