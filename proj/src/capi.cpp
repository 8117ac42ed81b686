// Copyright 2026 The swarmnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "swarmnav/swarmnav.h"

#include "swarmnav/config.hpp"
#include "swarmnav/pctsp.hpp"
#include "swarmnav/scenario.hpp"
#include "swarmnav/swarm_sim.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

struct swarmnav_scenario {
  swarmnav::ScenarioConfig config;
  std::string source_path;
  std::string input_hash;
};

struct swarmnav_instance {
  swarmnav::pctsp::PctspInstance instance;
};

struct swarmnav_tour {
  swarmnav::pctsp::PctspInstance instance;
  swarmnav::pctsp::Tour tour;
};

struct swarmnav_mission {
  swarmnav::sim::MissionLog log;
  std::string source_path;
  std::string input_hash;
};

struct swarmnav_report {
  swarmnav::metrics::MetricsReport report;
};

namespace {

thread_local std::string g_last_error;

swarmnav_status to_status(swarmnav::ErrorKind kind) {
  using swarmnav::ErrorKind;
  switch (kind) {
    case ErrorKind::kIo:
      return SWARMNAV_ERR_IO;
    case ErrorKind::kParse:
      return SWARMNAV_ERR_PARSE;
    case ErrorKind::kValidation:
      return SWARMNAV_ERR_VALIDATION;
    case ErrorKind::kInfeasible:
      return SWARMNAV_ERR_INFEASIBLE;
    case ErrorKind::kCollision:
      return SWARMNAV_ERR_COLLISION;
    case ErrorKind::kArgument:
      return SWARMNAV_ERR_ARGUMENT;
  }
  return SWARMNAV_ERR_INTERNAL;
}

template <typename Fn>
swarmnav_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const swarmnav::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return SWARMNAV_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SWARMNAV_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SWARMNAV_ERR_INTERNAL;
  }
}

swarmnav_status null_argument(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return SWARMNAV_ERR_ARGUMENT;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) swarmnav::fail(swarmnav::ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// SHA-1 of the git blob object wrapping `content`.
std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr) != 1) {
    swarmnav::fail(swarmnav::ErrorKind::kIo, "sha1 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

int copy_ids(const std::vector<int>& idx, const swarmnav::pctsp::PctspInstance& inst, int* ids, int capacity) {
  const int n = static_cast<int>(idx.size());
  for (int k = 0; k < n && k < capacity && ids != nullptr; ++k) ids[k] = inst.nodes[idx[k]].id;
  return n;
}

std::vector<std::pair<std::string, std::string>>& config_keys() {
  static auto keys = swarmnav::describe_config();
  return keys;
}

}  // namespace

extern "C" {

const char* swarmnav_version(void) { return "0.1.0"; }

const char* swarmnav_last_error(void) { return g_last_error.c_str(); }

const char* swarmnav_status_name(swarmnav_status status) {
  switch (status) {
    case SWARMNAV_OK:
      return "ok";
    case SWARMNAV_ERR_IO:
      return "io error";
    case SWARMNAV_ERR_PARSE:
      return "parse error";
    case SWARMNAV_ERR_VALIDATION:
      return "validation error";
    case SWARMNAV_ERR_INFEASIBLE:
      return "infeasible";
    case SWARMNAV_ERR_COLLISION:
      return "collision";
    case SWARMNAV_ERR_ARGUMENT:
      return "invalid argument";
    case SWARMNAV_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown";
}

size_t swarmnav_config_key_count(void) { return config_keys().size(); }

void swarmnav_config_key(size_t index, const char** key, const char** default_value) {
  const auto& keys = config_keys();
  const bool ok = index < keys.size();
  if (key != nullptr) *key = ok ? keys[index].first.c_str() : nullptr;
  if (default_value != nullptr) *default_value = ok ? keys[index].second.c_str() : nullptr;
}

swarmnav_status swarmnav_scenario_load(const char* path, const char* config_path, int has_seed, uint64_t seed,
                                       swarmnav_scenario** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto s = std::make_unique<swarmnav_scenario>();
    const std::string text = slurp(path);
    std::string hashed = text;
    s->config = swarmnav::parse_scenario(text, has_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
    if (config_path != nullptr && *config_path != '\0') {
      const std::string overrides = slurp(config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(overrides);
      } catch (const nlohmann::json::parse_error& e) {
        swarmnav::fail(swarmnav::ErrorKind::kParse, std::string("config file '") + config_path + "': " + e.what());
      }
      s->config.config = swarmnav::merge_config(s->config.config, j);
      swarmnav::validate_config(s->config.config);
      hashed += overrides;
    }
    s->source_path = path;
    s->input_hash = git_blob_hash(hashed);
    *out = s.release();
    return SWARMNAV_OK;
  });
}

swarmnav_status swarmnav_manifest_load(const char* manifest_path, swarmnav_scenario** out) {
  if (manifest_path == nullptr) return null_argument("manifest_path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json m;
    try {
      m = nlohmann::json::parse(slurp(manifest_path));
    } catch (const nlohmann::json::parse_error& e) {
      swarmnav::fail(swarmnav::ErrorKind::kParse, std::string("manifest '") + manifest_path + "': " + e.what());
    }
    auto s = std::make_unique<swarmnav_scenario>();
    s->source_path = m.at("scenario_path").get<std::string>();
    const std::string text = slurp(s->source_path);
    s->config = swarmnav::parse_scenario(text, m.at("seed").get<std::uint64_t>());
    s->config.config = swarmnav::merge_config(swarmnav::MissionConfig{}, m.at("config"));
    swarmnav::validate_config(s->config.config);
    s->input_hash = m.at("input_hash").get<std::string>();
    *out = s.release();
    return SWARMNAV_OK;
  });
}

void swarmnav_scenario_free(swarmnav_scenario* scenario) { delete scenario; }

swarmnav_status swarmnav_scenario_save(const swarmnav_scenario* scenario, const char* path) {
  if (scenario == nullptr) return null_argument("scenario");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    swarmnav::save_scenario(scenario->config, path);
    return SWARMNAV_OK;
  });
}

int swarmnav_scenario_agent_count(const swarmnav_scenario* s) {
  return s ? static_cast<int>(s->config.swarm.agents.size()) : 0;
}
int swarmnav_scenario_obstacle_count(const swarmnav_scenario* s) {
  return s ? static_cast<int>(s->config.obstacles.size()) : 0;
}
int swarmnav_scenario_poi_count(const swarmnav_scenario* s) { return s ? static_cast<int>(s->config.pois.size()) : 0; }
uint64_t swarmnav_scenario_seed(const swarmnav_scenario* s) { return s ? s->config.seed : 0; }

swarmnav_status swarmnav_instance_load(const char* path, swarmnav_instance** out) {
  if (path == nullptr) return null_argument("path");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto i = std::make_unique<swarmnav_instance>();
    i->instance = swarmnav::pctsp::load_instance(path);
    *out = i.release();
    return SWARMNAV_OK;
  });
}

swarmnav_status swarmnav_instance_from_scenario(const swarmnav_scenario* scenario, swarmnav_instance** out) {
  if (scenario == nullptr) return null_argument("scenario");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto& sc = scenario->config;
    const auto& tour = sc.config.tour;
    auto i = std::make_unique<swarmnav_instance>();
    i->instance = swarmnav::pctsp::build_instance(sc, tour.cruise_fraction * sc.swarm.swarm_v_max,
                                                  tour.service_time_default, tour.alpha);
    *out = i.release();
    return SWARMNAV_OK;
  });
}

swarmnav_status swarmnav_instance_save(const swarmnav_instance* instance, const char* path) {
  if (instance == nullptr) return null_argument("instance");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    swarmnav::pctsp::save_instance(instance->instance, path);
    return SWARMNAV_OK;
  });
}

int swarmnav_instance_size(const swarmnav_instance* instance) { return instance ? instance->instance.size() : 0; }

void swarmnav_instance_free(swarmnav_instance* instance) { delete instance; }

void swarmnav_solve_options_default(swarmnav_solve_options* options) {
  if (options == nullptr) return;
  const swarmnav::TourConfig defaults;
  options->solver = SWARMNAV_SOLVER_AUTO;
  options->deadline = defaults.deadline;
  options->exact_limit = defaults.exact_limit;
}

swarmnav_status swarmnav_solve(const swarmnav_instance* instance, const swarmnav_solve_options* options,
                               swarmnav_tour** out) {
  if (instance == nullptr) return null_argument("instance");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  swarmnav_solve_options opts;
  swarmnav_solve_options_default(&opts);
  if (options != nullptr) opts = *options;
  return guarded([&] {
    namespace pc = swarmnav::pctsp;
    const auto& inst = instance->instance;
    auto t = std::make_unique<swarmnav_tour>();
    t->instance = inst;
    switch (opts.solver) {
      case SWARMNAV_SOLVER_EXACT:
        t->tour = pc::solve_exact(inst, {opts.deadline, 0});
        break;
      case SWARMNAV_SOLVER_HEURISTIC:
        t->tour = pc::solve_heuristic(inst);
        break;
      case SWARMNAV_SOLVER_ENUMERATE:
        t->tour = pc::solve_enumerate(inst);
        break;
      default:
        t->tour = inst.size() - 1 <= opts.exact_limit ? pc::solve_exact(inst, {opts.deadline, 0})
                                                      : pc::solve_heuristic(inst);
        break;
    }
    *out = t.release();
    return SWARMNAV_OK;
  });
}

swarmnav_status swarmnav_tour_summarize(const swarmnav_tour* tour, swarmnav_tour_summary* out) {
  if (tour == nullptr) return null_argument("tour");
  if (out == nullptr) return null_argument("out");
  const auto& t = tour->tour;
  out->collected_prize = t.collected_prize;
  out->travel_cost = t.travel_cost;
  out->objective = t.objective;
  out->visited = std::max(0, static_cast<int>(t.visit_order.size()) - 2);
  out->skipped = static_cast<int>(t.skipped.size());
  out->optimal = t.optimal ? 1 : 0;
  g_last_error.clear();
  return SWARMNAV_OK;
}

int swarmnav_tour_visit_ids(const swarmnav_tour* tour, int* ids, int capacity) {
  return tour ? copy_ids(tour->tour.visit_order, tour->instance, ids, capacity) : 0;
}

int swarmnav_tour_skipped_ids(const swarmnav_tour* tour, int* ids, int capacity) {
  return tour ? copy_ids(tour->tour.skipped, tour->instance, ids, capacity) : 0;
}

swarmnav_status swarmnav_tour_validate(const swarmnav_tour* tour) {
  if (tour == nullptr) return null_argument("tour");
  return guarded([&] {
    const auto v = swarmnav::pctsp::validate_tour(tour->instance, tour->tour);
    if (!v.ok) swarmnav::fail(swarmnav::ErrorKind::kValidation, v.message);
    return SWARMNAV_OK;
  });
}

swarmnav_status swarmnav_tour_write(const swarmnav_tour* tour, const char* path) {
  if (tour == nullptr) return null_argument("tour");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    std::ofstream f(path);
    if (!f) swarmnav::fail(swarmnav::ErrorKind::kIo, std::string("cannot write tour file '") + path + "'");
    swarmnav::pctsp::write_tour(f, tour->instance, tour->tour);
    return SWARMNAV_OK;
  });
}

void swarmnav_tour_free(swarmnav_tour* tour) { delete tour; }

void swarmnav_run_options_default(swarmnav_run_options* options) {
  if (options == nullptr) return;
  options->threads = 0;
  options->halt_on_collision = -1;
  options->debug_costs = -1;
}

swarmnav_status swarmnav_mission_run(const swarmnav_scenario* scenario, const swarmnav_run_options* options,
                                     swarmnav_mission** out) {
  if (scenario == nullptr) return null_argument("scenario");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto sc = scenario->config;
    if (options != nullptr) {
      if (options->threads > 0) sc.config.sim.threads = options->threads;
      if (options->halt_on_collision >= 0) sc.config.sim.halt_on_collision = options->halt_on_collision != 0;
      if (options->debug_costs >= 0) sc.config.sim.debug_costs = options->debug_costs != 0;
    }
    auto m = std::make_unique<swarmnav_mission>();
    m->log = swarmnav::sim::run_mission(sc);
    m->source_path = scenario->source_path;
    m->input_hash = scenario->input_hash;
    const bool halted = m->log.halted;
    *out = m.release();
    if (halted) {
      g_last_error = "mission halted on collision";
      return SWARMNAV_ERR_COLLISION;
    }
    return SWARMNAV_OK;
  });
}

swarmnav_status swarmnav_mission_write(const swarmnav_mission* mission, const char* dir) {
  if (mission == nullptr) return null_argument("mission");
  if (dir == nullptr) return null_argument("dir");
  return guarded([&] {
    swarmnav::sim::write_log(mission->log, dir);
    const auto& sc = mission->log.scenario;
    nlohmann::ordered_json m;
    m["scenario_path"] = mission->source_path;
    m["seed"] = sc.seed;
    m["input_hash"] = mission->input_hash;
    m["output_dir"] = dir;
    m["config"] = nlohmann::json(sc.config);
    const auto path = std::filesystem::path(dir) / "manifest.json";
    std::ofstream f(path, std::ios::binary);
    if (!f) swarmnav::fail(swarmnav::ErrorKind::kIo, "cannot write '" + path.string() + "'");
    f << m.dump(2) << "\n";
    return SWARMNAV_OK;
  });
}

void swarmnav_mission_free(swarmnav_mission* mission) { delete mission; }

swarmnav_status swarmnav_mission_summarize(const swarmnav_mission* mission, swarmnav_mission_summary* out) {
  if (mission == nullptr) return null_argument("mission");
  if (out == nullptr) return null_argument("out");
  const auto& log = mission->log;
  out->ticks = log.ticks;
  out->sim_time = static_cast<double>(log.ticks) * log.scenario.config.sim.dt;
  out->completed = log.completed ? 1 : 0;
  out->halted = log.halted ? 1 : 0;
  out->collisions = log.collision_count();
  out->replans = static_cast<int>(log.trajectories.size());
  out->replans_not_converged = static_cast<int>(std::count_if(
      log.events.begin(), log.events.end(), [](const auto& e) { return e.kind == "replan_not_converged"; }));
  out->visited_pois = std::max(0, static_cast<int>(log.tour.visit_order.size()) - 2);
  g_last_error.clear();
  return SWARMNAV_OK;
}

swarmnav_status swarmnav_mission_report(const swarmnav_mission* mission, swarmnav_report** out) {
  if (mission == nullptr) return null_argument("mission");
  if (out == nullptr) return null_argument("out");
  *out = new swarmnav_report{mission->log.metrics};
  g_last_error.clear();
  return SWARMNAV_OK;
}

swarmnav_status swarmnav_report_from_dir(const char* dir, swarmnav_report** out) {
  if (dir == nullptr) return null_argument("dir");
  if (out == nullptr) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    *out = new swarmnav_report{swarmnav::sim::report_from_dir(dir)};
    return SWARMNAV_OK;
  });
}

int swarmnav_report_agent_count(const swarmnav_report* report) {
  return report ? static_cast<int>(report->report.agents.size()) : 0;
}

swarmnav_status swarmnav_report_agent(const swarmnav_report* report, int index, swarmnav_agent_metrics* out) {
  if (report == nullptr) return null_argument("report");
  if (out == nullptr) return null_argument("out");
  if (index < 0 || index >= swarmnav_report_agent_count(report)) {
    g_last_error = "agent index out of range";
    return SWARMNAV_ERR_ARGUMENT;
  }
  const auto& a = report->report.agents[index];
  *out = {a.uav_id,        a.central ? 1 : 0,  a.formation.mean, a.formation.max, a.formation.mean_pct,
          a.trajectory.mean, a.trajectory.max, a.path_length};
  g_last_error.clear();
  return SWARMNAV_OK;
}

double swarmnav_report_coverage(const swarmnav_report* report) { return report ? report->report.coverage_ratio : 0.0; }

swarmnav_status swarmnav_report_write_csv(const swarmnav_report* report, const char* path) {
  if (report == nullptr) return null_argument("report");
  if (path == nullptr) return null_argument("path");
  return guarded([&] {
    swarmnav::sim::write_metrics_csv(report->report, path);
    return SWARMNAV_OK;
  });
}

swarmnav_status swarmnav_report_write_plots(const char* log_dir, const char* out_dir) {
  if (log_dir == nullptr) return null_argument("log_dir");
  if (out_dir == nullptr) return null_argument("out_dir");
  return guarded([&] {
    swarmnav::sim::write_plot_csvs(log_dir, out_dir);
    return SWARMNAV_OK;
  });
}

void swarmnav_report_free(swarmnav_report* report) { delete report; }

}  // extern "C"
