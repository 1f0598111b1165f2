#ifndef AERIS_H
#define AERIS_H

/* C interface to the aeris simulator and optimizer suite.
 *
 * All entry points return an aeris_status. Anything other than AERIS_OK
 * leaves a human-readable message in aeris_last_error() (thread-local).
 * Handles are opaque; every *_open/*_generate call that succeeds must be
 * paired with the matching *_free.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aeris_status {
  AERIS_OK = 0,
  AERIS_ERR_CONFIG = 2,  /* bad config, bad input file, bad arguments */
  AERIS_ERR_RUNTIME = 3, /* failure while running */
  AERIS_ERR_PARTIAL = 4  /* sweep finished with some failed cells */
} aeris_status;

const char* aeris_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* aeris_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct aeris_config aeris_config;

/* Loads a config by literal path, $AERIS_CONFIG_DIR/<name>.json or
 * ./configs/<name>.json, applies AERIS_* environment overrides, validates. */
aeris_status aeris_config_open(const char* name_or_path, aeris_config** out);

/* Parses a config from a JSON document in memory (no env overrides). */
aeris_status aeris_config_from_json(const char* json_text, aeris_config** out);

/* Built-in defaults. */
aeris_status aeris_config_default(aeris_config** out);

/* Sets one dotted key, e.g. ("experiment.seed", "7") or
 * ("sweep.axis", "\"uav_count\""). The value is parsed as JSON when
 * possible and taken as a string otherwise. Re-validates the config. */
aeris_status aeris_config_override(aeris_config* cfg, const char* dotted_key,
                                   const char* value);

/* Serialized resolved config; free with aeris_string_free. */
aeris_status aeris_config_to_json(const aeris_config* cfg, char** out_json);

void aeris_config_free(aeris_config* cfg);

void aeris_string_free(char* s);

/* ---- scenarios -------------------------------------------------------- */

typedef struct aeris_scenario aeris_scenario;

aeris_status aeris_scenario_generate(const aeris_config* cfg,
                                     aeris_scenario** out);
aeris_status aeris_scenario_load(const char* path, aeris_scenario** out);
aeris_status aeris_scenario_save(const aeris_scenario* s, const char* path);

/* Entity counts; -1 when the handle is NULL. */
int aeris_scenario_ue_count(const aeris_scenario* s);
int aeris_scenario_uav_count(const aeris_scenario* s);
int aeris_scenario_ris_count(const aeris_scenario* s);

void aeris_scenario_free(aeris_scenario* s);

/* ---- pipeline commands ------------------------------------------------ */

/* Each command reads inputs from and writes artifacts into the config's
 * out_dir; see the project README for the file layout. */

aeris_status aeris_run_generate(const aeris_config* cfg);
aeris_status aeris_run_train(const aeris_config* cfg);
aeris_status aeris_run_optimize_phases(const aeris_config* cfg);
aeris_status aeris_run_evaluate(const aeris_config* cfg);
aeris_status aeris_run_report(const aeris_config* cfg);

/* Runs the configured sweep. Failed cells are recorded as error rows in the
 * metrics file; if any cell failed the call returns AERIS_ERR_PARTIAL and
 * writes the count to *failed_cells (may be NULL). All cells failing is
 * AERIS_ERR_RUNTIME. */
aeris_status aeris_run_sweep(const aeris_config* cfg, int* failed_cells);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* AERIS_H */
