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

// swarmnav command-line driver: solve-tour, run, report.

#include "swarmnav/swarmnav.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

int exit_code(swarmnav_status s) {
  switch (s) {
    case SWARMNAV_OK:
      return 0;
    case SWARMNAV_ERR_PARSE:
    case SWARMNAV_ERR_VALIDATION:
    case SWARMNAV_ERR_ARGUMENT:
      return 2;
    case SWARMNAV_ERR_INFEASIBLE:
      return 3;
    case SWARMNAV_ERR_COLLISION:
      return 4;
    default:
      return 1;
  }
}

// Thrown out of command bodies to unwind with a status.
struct Failure {
  swarmnav_status status;
};

void check(swarmnav_status s, const std::string& what) {
  if (s == SWARMNAV_OK) return;
  std::cerr << "error: " << what << ": " << swarmnav_last_error() << " (" << swarmnav_status_name(s) << ")\n";
  throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};
using Scenario = Handle<swarmnav_scenario, swarmnav_scenario_free>;
using Instance = Handle<swarmnav_instance, swarmnav_instance_free>;
using Tour = Handle<swarmnav_tour, swarmnav_tour_free>;
using Mission = Handle<swarmnav_mission, swarmnav_mission_free>;
using Report = Handle<swarmnav_report, swarmnav_report_free>;

std::string ids_text(const std::vector<int>& ids) {
  std::string s;
  for (int id : ids) s += (s.empty() ? "" : " ") + std::to_string(id);
  return s.empty() ? "-" : s;
}

std::vector<int> visit_ids(const swarmnav_tour* t) {
  std::vector<int> ids(swarmnav_tour_visit_ids(t, nullptr, 0));
  swarmnav_tour_visit_ids(t, ids.data(), static_cast<int>(ids.size()));
  return ids;
}

std::vector<int> skipped_ids(const swarmnav_tour* t) {
  std::vector<int> ids(swarmnav_tour_skipped_ids(t, nullptr, 0));
  swarmnav_tour_skipped_ids(t, ids.data(), static_cast<int>(ids.size()));
  return ids;
}

swarmnav_tour_summary print_tour(const char* label, const swarmnav_tour* t) {
  swarmnav_tour_summary s{};
  check(swarmnav_tour_summarize(t, &s), "summarize tour");
  const auto skipped = skipped_ids(t);
  std::printf("%s: route %s\n", label, ids_text(visit_ids(t)).c_str());
  std::printf("  prize collected %g, transport cost %g s, objective %.17g%s\n", s.collected_prize, s.travel_cost,
              s.objective, s.optimal ? " (optimal)" : "");
  std::printf("  visited %d, skipped %s%s\n", s.visited, ids_text(skipped).c_str(),
              skipped.empty() ? " (all POIs visited)" : "");
  return s;
}

struct SolveArgs {
  std::string instance;
  std::string scenario;
  std::string solver = "auto";
  std::optional<double> deadline;
  std::string out;
  std::string export_instance;
  bool oracle = false;
};

int cmd_solve_tour(const SolveArgs& a) {
  Instance inst;
  if (!a.instance.empty()) {
    check(swarmnav_instance_load(a.instance.c_str(), &inst.p), "load instance");
  } else {
    Scenario sc;
    check(swarmnav_scenario_load(a.scenario.c_str(), nullptr, 0, 0, &sc.p), "load scenario");
    check(swarmnav_instance_from_scenario(sc.p, &inst.p), "build instance");
  }
  if (!a.export_instance.empty()) check(swarmnav_instance_save(inst.p, a.export_instance.c_str()), "export instance");

  swarmnav_solve_options opts;
  swarmnav_solve_options_default(&opts);
  if (a.solver == "exact") opts.solver = SWARMNAV_SOLVER_EXACT;
  if (a.solver == "heuristic") opts.solver = SWARMNAV_SOLVER_HEURISTIC;
  if (a.solver == "enumerate") opts.solver = SWARMNAV_SOLVER_ENUMERATE;
  if (a.deadline) opts.deadline = *a.deadline;

  Tour tour;
  check(swarmnav_solve(inst.p, &opts, &tour.p), "solve");
  check(swarmnav_tour_validate(tour.p), "validate tour");
  const auto s = print_tour("solver", tour.p);
  if (!a.out.empty()) check(swarmnav_tour_write(tour.p, a.out.c_str()), "write tour");

  if (a.oracle) {
    swarmnav_solve_options brute = opts;
    brute.solver = SWARMNAV_SOLVER_ENUMERATE;
    Tour ref;
    check(swarmnav_solve(inst.p, &brute, &ref.p), "enumerate");
    const auto r = print_tour("oracle", ref.p);
    const bool match = r.objective == s.objective;
    std::printf("oracle %s\n", match ? "match" : "MISMATCH");
    if (!match) return 1;
  }
  return 0;
}

struct RunArgs {
  std::string scenario;
  std::string manifest;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  int repeat = 1;
  std::optional<std::uint64_t> seed_base;
  int threads = 0;
  bool halt_on_collision = false;
  bool debug_costs = false;
};

struct RunOutcome {
  swarmnav_status status = SWARMNAV_OK;
  swarmnav_mission_summary summary{};
  std::vector<swarmnav_agent_metrics> agents;
  double coverage = 0.0;
  double wall = 0.0;
};

RunOutcome run_once(const RunArgs& a, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  Scenario sc;
  if (!a.manifest.empty()) {
    check(swarmnav_manifest_load(a.manifest.c_str(), &sc.p), "load manifest");
  } else {
    const char* cfg = a.config.empty() ? nullptr : a.config.c_str();
    check(swarmnav_scenario_load(a.scenario.c_str(), cfg, seed ? 1 : 0, seed.value_or(0), &sc.p), "load scenario");
  }
  swarmnav_run_options opts;
  swarmnav_run_options_default(&opts);
  opts.threads = a.threads;
  if (a.halt_on_collision) opts.halt_on_collision = 1;
  if (a.debug_costs) opts.debug_costs = 1;

  RunOutcome o;
  Mission m;
  const auto t0 = std::chrono::steady_clock::now();
  o.status = swarmnav_mission_run(sc.p, &opts, &m.p);
  o.wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.status != SWARMNAV_OK && o.status != SWARMNAV_ERR_COLLISION) check(o.status, "run mission");
  check(swarmnav_mission_write(m.p, out_dir.c_str()), "write log");
  check(swarmnav_mission_summarize(m.p, &o.summary), "summarize mission");
  Report r;
  check(swarmnav_mission_report(m.p, &r.p), "report");
  for (int i = 0; i < swarmnav_report_agent_count(r.p); ++i) {
    swarmnav_agent_metrics am{};
    check(swarmnav_report_agent(r.p, i, &am), "agent metrics");
    o.agents.push_back(am);
  }
  o.coverage = swarmnav_report_coverage(r.p);

  std::printf("run seed %llu -> %s\n", static_cast<unsigned long long>(swarmnav_scenario_seed(sc.p)),
              out_dir.c_str());
  std::printf("  %s after %.2f s simulated (%.1f s wall), %d collisions, %d/%d replans not converged\n",
              o.summary.halted ? "halted" : (o.summary.completed ? "completed" : "time limit"), o.summary.sim_time,
              o.wall, o.summary.collisions, o.summary.replans_not_converged, o.summary.replans);
  std::printf("  %-6s %-9s %10s %10s %9s %10s %10s %9s\n", "uav", "role", "form_mean", "form_max", "form_%",
              "traj_mean", "traj_max", "path_m");
  for (const auto& am : o.agents) {
    std::printf("  %-6d %-9s %10.3f %10.3f %9.2f %10.3f %10.3f %9.1f\n", am.uav_id,
                am.central ? "central" : "follower", am.formation_mean, am.formation_max, am.formation_mean_pct,
                am.trajectory_mean, am.trajectory_max, am.path_length);
  }
  std::printf("  coverage ratio %.6f\n", o.coverage);
  return o;
}

int cmd_run(const RunArgs& a) {
  std::string out = a.out;
  if (out.empty() && !a.manifest.empty()) {
    std::ifstream f(a.manifest);
    const auto m = nlohmann::json::parse(f, nullptr, false);
    if (!m.is_discarded() && m.contains("output_dir")) out = m["output_dir"].get<std::string>();
  }
  if (out.empty()) out = (fs::path("runs") / fs::path(a.scenario).stem()).string();

  if (a.repeat <= 1) {
    const auto o = run_once(a, a.seed_base ? a.seed_base : a.seed, out);
    return exit_code(o.status);
  }

  const std::uint64_t base = a.seed_base.value_or(a.seed.value_or(1));
  std::vector<RunOutcome> runs;
  swarmnav_status worst = SWARMNAV_OK;
  for (int k = 0; k < a.repeat; ++k) {
    const std::uint64_t seed = base + static_cast<std::uint64_t>(k);
    runs.push_back(run_once(a, seed, (fs::path(out) / ("seed_" + std::to_string(seed))).string()));
    if (runs.back().status != SWARMNAV_OK) worst = runs.back().status;
  }

  // Per-agent averages of the per-run statistics.
  const std::size_t n = runs.front().agents.size();
  std::ofstream agg(fs::path(out) / "aggregate.csv");
  agg << "uav_id,role,formation_mean_m,formation_max_m,formation_mean_pct,trajectory_mean_m,trajectory_max_m,"
         "path_length_m\n";
  std::printf("aggregate over %d runs\n", a.repeat);
  for (std::size_t i = 0; i < n; ++i) {
    swarmnav_agent_metrics m{};
    m.uav_id = runs.front().agents[i].uav_id;
    m.central = runs.front().agents[i].central;
    for (const auto& r : runs) {
      m.formation_mean += r.agents[i].formation_mean / a.repeat;
      m.formation_max = std::max(m.formation_max, r.agents[i].formation_max);
      m.formation_mean_pct += r.agents[i].formation_mean_pct / a.repeat;
      m.trajectory_mean += r.agents[i].trajectory_mean / a.repeat;
      m.trajectory_max = std::max(m.trajectory_max, r.agents[i].trajectory_max);
      m.path_length += r.agents[i].path_length / a.repeat;
    }
    agg << m.uav_id << ',' << (m.central ? "central" : "follower") << ',' << m.formation_mean << ','
        << m.formation_max << ',' << m.formation_mean_pct << ',' << m.trajectory_mean << ',' << m.trajectory_max
        << ',' << m.path_length << '\n';
    std::printf("  uav %-4d form mean %.3f m (%.2f %%) max %.3f m, traj mean %.3f m max %.3f m, path %.1f m\n",
                m.uav_id, m.formation_mean, m.formation_mean_pct, m.formation_max, m.trajectory_mean,
                m.trajectory_max, m.path_length);
  }
  int collisions = 0;
  double wall = 0.0;
  double cov_min = 1.0;
  for (const auto& r : runs) {
    collisions += r.summary.collisions;
    wall += r.wall;
    cov_min = std::min(cov_min, r.coverage);
  }
  std::printf("  total collisions %d, min coverage %.6f, total wall %.1f s\n", collisions, cov_min, wall);
  return exit_code(worst);
}

int cmd_report(const std::string& dir, const std::string& out) {
  Report r;
  check(swarmnav_report_from_dir(dir.c_str(), &r.p), "recompute metrics");
  const std::string target = out.empty() ? (fs::path(dir) / "report").string() : out;
  check(swarmnav_report_write_plots(dir.c_str(), target.c_str()), "write report");
  std::printf("%-6s %-9s %10s %10s %9s %10s %10s\n", "uav", "role", "form_mean", "form_max", "form_%", "traj_mean",
              "traj_max");
  for (int i = 0; i < swarmnav_report_agent_count(r.p); ++i) {
    swarmnav_agent_metrics m{};
    check(swarmnav_report_agent(r.p, i, &m), "agent metrics");
    std::printf("%-6d %-9s %10.3f %10.3f %9.2f %10.3f %10.3f\n", m.uav_id, m.central ? "central" : "follower",
                m.formation_mean, m.formation_max, m.formation_mean_pct, m.trajectory_mean, m.trajectory_max);
  }
  std::printf("coverage ratio %.6f\nwritten to %s\n", swarmnav_report_coverage(r.p), target.c_str());
  return 0;
}

std::string config_footer() {
  std::string s = "Configuration keys (scenario \"config\" object or --config file) and defaults:\n";
  for (std::size_t i = 0; i < swarmnav_config_key_count(); ++i) {
    const char* key = nullptr;
    const char* value = nullptr;
    swarmnav_config_key(i, &key, &value);
    s += "  " + std::string(key) + " = " + value + "\n";
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swarmnav: formation swarm navigation between points of interest"};
  app.set_version_flag("--version", swarmnav_version());
  app.footer(config_footer());
  app.require_subcommand(1);

  SolveArgs solve;
  auto* st = app.add_subcommand("solve-tour", "Solve a prize-collecting tour with time windows");
  auto* inst_opt = st->add_option("--instance", solve.instance, "Two-table instance file");
  auto* scen_opt = st->add_option("--scenario", solve.scenario, "Scenario file (instance built from its POIs)");
  inst_opt->excludes(scen_opt);
  st->add_option("--solver", solve.solver, "auto, exact, heuristic or enumerate")
      ->check(CLI::IsMember({"auto", "exact", "heuristic", "enumerate"}));
  st->add_option("--deadline", solve.deadline, "Exact solver time budget in seconds");
  st->add_option("--out", solve.out, "Write the tour to this file");
  st->add_option("--export-instance", solve.export_instance, "Write the instance in two-table format");
  st->add_flag("--oracle", solve.oracle, "Cross-check against exhaustive enumeration");

  RunArgs run;
  auto* rn = app.add_subcommand("run", "Simulate a mission and write its log directory");
  rn->add_option("scenario", run.scenario, "Scenario file");
  rn->add_option("--manifest", run.manifest, "Re-run the manifest of an earlier run");
  rn->add_option("--config", run.config, "JSON config overrides (default: $SWARMNAV_CONFIG)");
  rn->add_option("--seed", run.seed, "Override the scenario seed");
  rn->add_option("--out", run.out, "Output directory (default runs/<scenario>)");
  rn->add_option("--repeat", run.repeat, "Number of seeds to run")->check(CLI::PositiveNumber);
  rn->add_option("--seed-base", run.seed_base, "First seed of a repeated run");
  rn->add_option("--threads", run.threads, "Planner threads per tick");
  rn->add_flag("--halt-on-collision", run.halt_on_collision, "Stop at the first collision (exit 4)");
  rn->add_flag("--debug-costs", run.debug_costs, "Write per-replan cost terms to replans.csv");

  std::string report_dir;
  std::string report_out;
  auto* rp = app.add_subcommand("report", "Recompute metrics and plot CSVs from a log directory");
  rp->add_option("dir", report_dir, "Log directory")->required();
  rp->add_option("--out", report_out, "Output directory (default <dir>/report)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*st) {
      if (solve.instance.empty() && solve.scenario.empty()) {
        std::cerr << "error: solve-tour needs --instance or --scenario\n";
        return 2;
      }
      return cmd_solve_tour(solve);
    }
    if (*rn) {
      if (run.scenario.empty() && run.manifest.empty()) {
        std::cerr << "error: run needs a scenario or --manifest\n";
        return 2;
      }
      if (run.config.empty()) {
        if (const char* env = std::getenv("SWARMNAV_CONFIG")) run.config = env;
      }
      return cmd_run(run);
    }
    return cmd_report(report_dir, report_out);
  } catch (const Failure& f) {
    return exit_code(f.status);
  }
}
