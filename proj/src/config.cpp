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

#include "swarmnav/config.hpp"

#include "swarmnav/common.hpp"

namespace swarmnav {

namespace {

void check_keys(const nlohmann::json& base, const nlohmann::json& patch, const std::string& path) {
  if (!patch.is_object()) {
    fail(ErrorKind::kValidation, (path.empty() ? std::string("config") : path) + ": expected an object");
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) fail(ErrorKind::kValidation, "config." + here + ": unknown key");
    if (base[key].is_object()) check_keys(base[key], value, here);
  }
}

void flatten(const nlohmann::json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  for (const auto& [key, value] : j.items()) {
    const std::string here = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, here, out);
    } else {
      out.emplace_back(here, value.dump());
    }
  }
}

}  // namespace

MissionConfig merge_config(const MissionConfig& base, const nlohmann::json& overrides) {
  nlohmann::json merged = base;
  if (overrides.is_null()) return base;
  check_keys(merged, overrides, "");
  merged.merge_patch(overrides);
  MissionConfig out;
  try {
    out = merged.get<MissionConfig>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kValidation, std::string("config: ") + e.what());
  }
  validate_config(out);
  return out;
}

std::vector<std::pair<std::string, std::string>> describe_config(const MissionConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  flatten(nlohmann::json(cfg), "", out);
  return out;
}

void validate_config(const MissionConfig& c) {
  auto positive = [](double v, const char* name) {
    require(v > 0.0, ErrorKind::kValidation, std::string("config.") + name + ": must be > 0");
  };
  positive(c.esdf.resolution, "esdf.resolution");
  positive(c.esdf.window_extent, "esdf.window_extent");
  positive(c.esdf.window_height, "esdf.window_height");
  positive(c.esdf.d_max, "esdf.d_max");
  const auto& p = c.planner;
  for (double w : {p.lambda_c, p.lambda_p, p.lambda_v, p.lambda_fs, p.lambda_fa}) {
    require(w >= 0.0, ErrorKind::kValidation, "config.planner: weights must be >= 0");
  }
  positive(p.tau, "planner.tau");
  positive(p.d_r, "planner.d_r");
  positive(p.a_limit, "planner.a_limit");
  positive(p.j_limit, "planner.j_limit");
  positive(p.segment_time, "planner.segment_time");
  require(p.degree == 3 || p.degree == 4, ErrorKind::kValidation, "config.planner.degree: must be 3 or 4");
  require(p.control_points >= p.degree + 2, ErrorKind::kValidation,
          "config.planner.control_points: must exceed degree + 1");
  require(p.samples_per_span >= 1, ErrorKind::kValidation, "config.planner.samples_per_span: must be >= 1");
  require(p.max_iterations >= 1, ErrorKind::kValidation, "config.planner.max_iterations: must be >= 1");
  positive(c.sim.dt, "sim.dt");
  require(c.sim.replan_every >= 1, ErrorKind::kValidation, "config.sim.replan_every: must be >= 1");
  positive(c.sim.a_max, "sim.a_max");
  require(c.sim.plan_continuity >= 0.0, ErrorKind::kValidation, "config.sim.plan_continuity: must be >= 0");
  require(c.sim.heartbeat_timeout >= 1, ErrorKind::kValidation, "config.sim.heartbeat_timeout: must be >= 1");
  require(c.sim.drop_rate >= 0.0 && c.sim.drop_rate < 1.0, ErrorKind::kValidation,
          "config.sim.drop_rate: must be in [0, 1)");
  require(c.sim.global_speed_fraction > 0.0 && c.sim.global_speed_fraction <= 1.0, ErrorKind::kValidation,
          "config.sim.global_speed_fraction: must be in (0, 1]");
  positive(c.sim.global_acc_limit, "sim.global_acc_limit");
  require(c.sim.threads >= 1, ErrorKind::kValidation, "config.sim.threads: must be >= 1");
  require(c.sim.log_every >= 1, ErrorKind::kValidation, "config.sim.log_every: must be >= 1");
  require(c.tour.alpha >= 0.0, ErrorKind::kValidation, "config.tour.alpha: must be >= 0");
  positive(c.tour.deadline, "tour.deadline");
  positive(c.tour.cruise_fraction, "tour.cruise_fraction");
  require(c.tour.service_time_default >= 0.0, ErrorKind::kValidation,
          "config.tour.service_time_default: must be >= 0");
  positive(c.metrics.footprint, "metrics.footprint");
}

}  // namespace swarmnav
