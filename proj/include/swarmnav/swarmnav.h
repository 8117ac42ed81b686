/* Copyright 2026 The swarmnav Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libswarmnav. All handles are opaque; every call that can
 * fail returns a status code and leaves a message retrievable with
 * swarmnav_last_error() on the calling thread. */

#ifndef SWARMNAV_SWARMNAV_H_
#define SWARMNAV_SWARMNAV_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SWARMNAV_API __declspec(dllexport)
#else
#define SWARMNAV_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum swarmnav_status {
  SWARMNAV_OK = 0,
  SWARMNAV_ERR_IO = 1,
  SWARMNAV_ERR_PARSE = 2,
  SWARMNAV_ERR_VALIDATION = 3,
  SWARMNAV_ERR_INFEASIBLE = 4,
  SWARMNAV_ERR_COLLISION = 5,
  SWARMNAV_ERR_ARGUMENT = 6,
  SWARMNAV_ERR_INTERNAL = 7
} swarmnav_status;

typedef struct swarmnav_scenario swarmnav_scenario;
typedef struct swarmnav_instance swarmnav_instance;
typedef struct swarmnav_tour swarmnav_tour;
typedef struct swarmnav_mission swarmnav_mission;
typedef struct swarmnav_report swarmnav_report;

SWARMNAV_API const char* swarmnav_version(void);
/* Message of the last failed call on this thread; empty after success. */
SWARMNAV_API const char* swarmnav_last_error(void);
SWARMNAV_API const char* swarmnav_status_name(swarmnav_status status);

/* Configuration keys with their defaults, as "section.key". Returns the
 * number of keys; index out of range yields null strings. */
SWARMNAV_API size_t swarmnav_config_key_count(void);
SWARMNAV_API void swarmnav_config_key(size_t index, const char** key, const char** default_value);

/* ---- scenario ---- */

/* Loads a scenario document. `config_path` (may be null) names a JSON file
 * of configuration overrides applied on top of the scenario's own. When
 * `has_seed` is nonzero `seed` replaces the document's seed. */
SWARMNAV_API swarmnav_status swarmnav_scenario_load(const char* path, const char* config_path, int has_seed,
                                                    uint64_t seed, swarmnav_scenario** out);
/* Reloads the scenario recorded in a run manifest with the manifest's seed
 * and resolved configuration. */
SWARMNAV_API swarmnav_status swarmnav_manifest_load(const char* manifest_path, swarmnav_scenario** out);
SWARMNAV_API void swarmnav_scenario_free(swarmnav_scenario* scenario);
SWARMNAV_API swarmnav_status swarmnav_scenario_save(const swarmnav_scenario* scenario, const char* path);
SWARMNAV_API int swarmnav_scenario_agent_count(const swarmnav_scenario* scenario);
SWARMNAV_API int swarmnav_scenario_obstacle_count(const swarmnav_scenario* scenario);
SWARMNAV_API int swarmnav_scenario_poi_count(const swarmnav_scenario* scenario);
SWARMNAV_API uint64_t swarmnav_scenario_seed(const swarmnav_scenario* scenario);

/* ---- tour instances ---- */

SWARMNAV_API swarmnav_status swarmnav_instance_load(const char* path, swarmnav_instance** out);
/* Builds the tour instance a mission would solve for this scenario. */
SWARMNAV_API swarmnav_status swarmnav_instance_from_scenario(const swarmnav_scenario* scenario,
                                                             swarmnav_instance** out);
SWARMNAV_API swarmnav_status swarmnav_instance_save(const swarmnav_instance* instance, const char* path);
/* Node count, depot included. */
SWARMNAV_API int swarmnav_instance_size(const swarmnav_instance* instance);
SWARMNAV_API void swarmnav_instance_free(swarmnav_instance* instance);

typedef enum swarmnav_solver {
  SWARMNAV_SOLVER_AUTO = 0,
  SWARMNAV_SOLVER_EXACT = 1,
  SWARMNAV_SOLVER_HEURISTIC = 2,
  /* Exhaustive enumeration; small instances only. */
  SWARMNAV_SOLVER_ENUMERATE = 3
} swarmnav_solver;

typedef struct swarmnav_solve_options {
  swarmnav_solver solver;
  double deadline;    /* seconds, exact solver */
  int exact_limit;    /* AUTO uses the exact solver up to this many POIs */
} swarmnav_solve_options;

SWARMNAV_API void swarmnav_solve_options_default(swarmnav_solve_options* options);
SWARMNAV_API swarmnav_status swarmnav_solve(const swarmnav_instance* instance, const swarmnav_solve_options* options,
                                            swarmnav_tour** out);

typedef struct swarmnav_tour_summary {
  double collected_prize;
  double travel_cost;
  double objective;
  int visited;
  int skipped;
  int optimal;
} swarmnav_tour_summary;

SWARMNAV_API swarmnav_status swarmnav_tour_summarize(const swarmnav_tour* tour, swarmnav_tour_summary* out);
/* Copies up to `capacity` node ids of the visit order (depot first and last)
 * and returns the full count. */
SWARMNAV_API int swarmnav_tour_visit_ids(const swarmnav_tour* tour, int* ids, int capacity);
SWARMNAV_API int swarmnav_tour_skipped_ids(const swarmnav_tour* tour, int* ids, int capacity);
/* Returns SWARMNAV_ERR_VALIDATION with the reason when the tour breaks a
 * window, the duration cap or the visit-once rule. */
SWARMNAV_API swarmnav_status swarmnav_tour_validate(const swarmnav_tour* tour);
SWARMNAV_API swarmnav_status swarmnav_tour_write(const swarmnav_tour* tour, const char* path);
SWARMNAV_API void swarmnav_tour_free(swarmnav_tour* tour);

/* ---- missions ---- */

typedef struct swarmnav_run_options {
  int threads;            /* <= 0 keeps the configured value */
  int halt_on_collision;  /* < 0 keeps the configured value */
  int debug_costs;        /* < 0 keeps the configured value */
} swarmnav_run_options;

SWARMNAV_API void swarmnav_run_options_default(swarmnav_run_options* options);

/* Runs the full mission. A run stopped by halt-on-collision returns
 * SWARMNAV_ERR_COLLISION and still hands back the partial mission. */
SWARMNAV_API swarmnav_status swarmnav_mission_run(const swarmnav_scenario* scenario,
                                                  const swarmnav_run_options* options, swarmnav_mission** out);
/* Writes the log directory and its manifest. */
SWARMNAV_API swarmnav_status swarmnav_mission_write(const swarmnav_mission* mission, const char* dir);
SWARMNAV_API void swarmnav_mission_free(swarmnav_mission* mission);

typedef struct swarmnav_mission_summary {
  int64_t ticks;
  double sim_time;
  int completed;
  int halted;
  int collisions;
  int replans;
  int replans_not_converged;
  int visited_pois;
} swarmnav_mission_summary;

SWARMNAV_API swarmnav_status swarmnav_mission_summarize(const swarmnav_mission* mission,
                                                        swarmnav_mission_summary* out);
SWARMNAV_API swarmnav_status swarmnav_mission_report(const swarmnav_mission* mission, swarmnav_report** out);

/* ---- metrics ---- */

typedef struct swarmnav_agent_metrics {
  int uav_id;
  int central;
  double formation_mean;
  double formation_max;
  double formation_mean_pct;
  double trajectory_mean;
  double trajectory_max;
  double path_length;
} swarmnav_agent_metrics;

/* Recomputes the metrics from a log directory's raw files. */
SWARMNAV_API swarmnav_status swarmnav_report_from_dir(const char* dir, swarmnav_report** out);
SWARMNAV_API int swarmnav_report_agent_count(const swarmnav_report* report);
SWARMNAV_API swarmnav_status swarmnav_report_agent(const swarmnav_report* report, int index,
                                                   swarmnav_agent_metrics* out);
SWARMNAV_API double swarmnav_report_coverage(const swarmnav_report* report);
SWARMNAV_API swarmnav_status swarmnav_report_write_csv(const swarmnav_report* report, const char* path);
/* Writes metrics.csv, formation_error.csv and trajectory_error.csv for a log
 * directory into `out_dir`. */
SWARMNAV_API swarmnav_status swarmnav_report_write_plots(const char* log_dir, const char* out_dir);
SWARMNAV_API void swarmnav_report_free(swarmnav_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SWARMNAV_SWARMNAV_H_ */
