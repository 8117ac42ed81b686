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

#include "swarmnav/swarm_sim.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace swarmnav::sim {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "missing log file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void append_vec(fmt::memory_buffer& buf, const Vec3& v) { fmt::format_to(std::back_inserter(buf), ",{},{},{}", v.x(), v.y(), v.z()); }

std::string to_string(const fmt::memory_buffer& buf) { return std::string(buf.data(), buf.size()); }

// Rows of a CSV file with a fixed header; every row must have the header's
// column count.
class CsvReader {
 public:
  CsvReader(const fs::path& path, const std::string& header) : name_(path.filename().string()) {
    text_ = read_file(path);
    std::istringstream in(text_);
    std::string line;
    if (!std::getline(in, line) || line != header) fail(ErrorKind::kParse, name_ + ": unexpected header");
    columns_ = static_cast<int>(std::count(header.begin(), header.end(), ',')) + 1;
    int lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::size_t start = 0;
      for (;;) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      if (static_cast<int>(cells.size()) != columns_) {
        fail(ErrorKind::kParse, name_ + " line " + std::to_string(lineno) + ": expected " + std::to_string(columns_) +
                                    " columns, found " + std::to_string(cells.size()));
      }
      if (text_.back() != '\n' && in.peek() == EOF) {
        fail(ErrorKind::kParse, name_ + " line " + std::to_string(lineno) + ": truncated row");
      }
      rows_.push_back(std::move(cells));
      linenos_.push_back(lineno);
    }
  }

  std::size_t size() const { return rows_.size(); }

  double number(std::size_t row, int col) const {
    const auto& s = rows_[row][col];
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(row, col);
    return v;
  }
  long long integer(std::size_t row, int col) const {
    const auto& s = rows_[row][col];
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) bad(row, col);
    return v;
  }
  Vec3 vec(std::size_t row, int col) const { return {number(row, col), number(row, col + 1), number(row, col + 2)}; }

 private:
  [[noreturn]] void bad(std::size_t row, int col) const {
    fail(ErrorKind::kParse, name_ + " line " + std::to_string(linenos_[row]) + ": bad value '" + rows_[row][col] +
                                "' in column " + std::to_string(col + 1));
  }

  std::string name_;
  std::string text_;
  int columns_ = 0;
  std::vector<std::vector<std::string>> rows_;
  std::vector<int> linenos_;
};

constexpr const char* kStatesHeader =
    "tick,t,uav_id,x,y,z,vx,vy,vz,ref_x,ref_y,ref_z,plan_x,plan_y,plan_z";
constexpr const char* kWaypointsHeader = "index,poi_id,x,y,z,arrival,departure";
constexpr const char* kMetricsHeader =
    "uav_id,role,formation_mean_m,formation_max_m,formation_mean_pct,trajectory_mean_m,trajectory_max_m,"
    "path_length_m,coverage_ratio";

std::string metrics_csv(const metrics::MetricsReport& report) {
  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kMetricsHeader);
  for (const auto& a : report.agents) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},{}\n", a.uav_id,
                   a.central ? "central" : "follower", a.formation.mean, a.formation.max, a.formation.mean_pct,
                   a.trajectory.mean, a.trajectory.max, a.path_length, report.coverage_ratio);
  }
  return to_string(buf);
}

}  // namespace

void write_metrics_csv(const metrics::MetricsReport& report, const std::string& path) {
  write_file(path, metrics_csv(report));
}

void write_log(const MissionLog& log, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create log directory '" + dir + "': " + ec.message());
  const fs::path root(dir);

  write_file(root / "scenario.json", dump_scenario(log.scenario));

  fmt::memory_buffer buf;
  fmt::format_to(std::back_inserter(buf), "{}\n", kStatesHeader);
  for (const auto& s : log.states) {
    fmt::format_to(std::back_inserter(buf), "{},{},{}", s.tick, s.t, s.uav_id);
    append_vec(buf, s.position);
    append_vec(buf, s.velocity);
    append_vec(buf, s.reference);
    append_vec(buf, s.plan);
    buf.push_back('\n');
  }
  write_file(root / "states.csv", to_string(buf));

  buf.clear();
  fmt::format_to(std::back_inserter(buf), "tick,uav_id,t_start,segment_time,degree,index,x,y,z\n");
  for (const auto& r : log.trajectories) {
    const auto& cps = r.trajectory.control_points();
    for (std::size_t k = 0; k < cps.size(); ++k) {
      fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{}", r.tick, r.uav_id, r.trajectory.t_start(),
                     r.trajectory.segment_time(), r.trajectory.degree(), k);
      append_vec(buf, cps[k]);
      buf.push_back('\n');
    }
  }
  write_file(root / "trajectories.csv", to_string(buf));

  buf.clear();
  fmt::format_to(std::back_inserter(buf), "{}\n", kWaypointsHeader);
  for (std::size_t k = 0; k < log.waypoints.size(); ++k) {
    const auto& w = log.waypoints[k];
    fmt::format_to(std::back_inserter(buf), "{},{}", k, w.poi_id);
    append_vec(buf, w.position);
    fmt::format_to(std::back_inserter(buf), ",{},{}\n", w.arrival, w.departure);
  }
  write_file(root / "waypoints.csv", to_string(buf));

  buf.clear();
  fmt::format_to(std::back_inserter(buf), "tick,t,kind,a,b,value,detail\n");
  for (const auto& e : log.events) {
    fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{}\n", e.tick, e.t, e.kind, e.a, e.b, e.value, e.detail);
  }
  write_file(root / "events.csv", to_string(buf));

  if (!log.replans.empty()) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf),
                   "tick,uav_id,iterations,converged,degraded,initial_total,collision,endpoint,smoothness,formation,"
                   "reciprocal\n");
    for (const auto& r : log.replans) {
      fmt::format_to(std::back_inserter(buf), "{},{},{},{},{},{},{},{},{},{},{}\n", r.tick, r.uav_id, r.iterations,
                     r.converged ? 1 : 0, r.degraded ? 1 : 0, r.initial_total, r.collision, r.endpoint,
                     r.smoothness, r.formation, r.reciprocal);
    }
    write_file(root / "replans.csv", to_string(buf));
  }

  write_file(root / "metrics.csv", metrics_csv(log.metrics));
}

namespace {

struct LoadedLog {
  ScenarioConfig scenario;
  std::vector<StateSample> states;
  std::vector<WaypointRecord> waypoints;
};

LoadedLog load_log(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) fail(ErrorKind::kIo, "log directory '" + dir + "' does not exist");
  LoadedLog out;
  out.scenario = parse_scenario(read_file(root / "scenario.json"));

  const CsvReader states_csv(root / "states.csv", kStatesHeader);
  out.states.resize(states_csv.size());
  for (std::size_t r = 0; r < states_csv.size(); ++r) {
    auto& s = out.states[r];
    s.tick = states_csv.integer(r, 0);
    s.t = states_csv.number(r, 1);
    s.uav_id = static_cast<int>(states_csv.integer(r, 2));
    s.position = states_csv.vec(r, 3);
    s.velocity = states_csv.vec(r, 6);
    s.reference = states_csv.vec(r, 9);
    s.plan = states_csv.vec(r, 12);
  }
  const CsvReader wp_csv(root / "waypoints.csv", kWaypointsHeader);
  out.waypoints.resize(wp_csv.size());
  for (std::size_t r = 0; r < wp_csv.size(); ++r) {
    out.waypoints[r].poi_id = static_cast<int>(wp_csv.integer(r, 1));
    out.waypoints[r].position = wp_csv.vec(r, 2);
    out.waypoints[r].arrival = wp_csv.number(r, 5);
    out.waypoints[r].departure = wp_csv.number(r, 6);
  }
  return out;
}

metrics::MetricsInput checked_input(const LoadedLog& log) {
  auto in = metrics_input(log.scenario, log.states, log.waypoints);
  for (const auto& a : in.agents) {
    if (a.actual.size() != in.agents.front().actual.size()) {
      fail(ErrorKind::kParse, "states.csv: agents have different sample counts (file truncated?)");
    }
  }
  return in;
}

}  // namespace

metrics::MetricsReport report_from_dir(const std::string& dir) {
  return metrics::compute_report(checked_input(load_log(dir)));
}

void write_plot_csvs(const std::string& log_dir, const std::string& out_dir) {
  const auto log = load_log(log_dir);
  const auto in = checked_input(log);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::kIo, "cannot create '" + out_dir + "': " + ec.message());

  std::vector<double> times;
  for (const auto& s : log.states) {
    if (s.uav_id == in.agents.front().uav_id) times.push_back(s.t);
  }
  const auto& central = in.agents[in.central_index];
  fmt::memory_buffer form;
  fmt::memory_buffer traj;
  fmt::format_to(std::back_inserter(form), "t");
  fmt::format_to(std::back_inserter(traj), "t");
  for (const auto& a : in.agents) {
    fmt::format_to(std::back_inserter(form), ",uav_{}", a.uav_id);
    fmt::format_to(std::back_inserter(traj), ",uav_{}", a.uav_id);
  }
  form.push_back('\n');
  traj.push_back('\n');
  for (std::size_t n = 0; n < times.size(); ++n) {
    fmt::format_to(std::back_inserter(form), "{}", times[n]);
    fmt::format_to(std::back_inserter(traj), "{}", times[n]);
    for (const auto& a : in.agents) {
      const double d0 = (a.offset - central.offset).norm();
      const double e = d0 > 0.0 ? std::abs((a.actual[n] - central.actual[n]).norm() - d0) : 0.0;
      fmt::format_to(std::back_inserter(form), ",{}", e);
      fmt::format_to(std::back_inserter(traj), ",{}", (a.reference[n] - a.replanned[n]).norm());
    }
    form.push_back('\n');
    traj.push_back('\n');
  }
  write_file(fs::path(out_dir) / "formation_error.csv", to_string(form));
  write_file(fs::path(out_dir) / "trajectory_error.csv", to_string(traj));
  write_metrics_csv(metrics::compute_report(in), (fs::path(out_dir) / "metrics.csv").string());
}

}  // namespace swarmnav::sim
