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

#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace swarmnav {

// Local distance-field window. The window is a box centred on the agent with
// half-width `window_extent` in x/y and half-height `window_height` in z.
struct EsdfConfig {
  double resolution = 0.1;
  double window_extent = 10.0;
  double window_height = 10.0;
  double d_max = 5.0;
};

// Weights and limits of the five-term replanning cost.
struct PlannerWeights {
  double lambda_c = 10.0;
  double lambda_p = 1.0;
  double lambda_v = 0.5;
  double lambda_fs = 1.0;
  double lambda_fa = 100.0;
  double tau = 1.4;
  double d_r = 1.0;
  // Soft limits on velocity, acceleration, jerk. Non-positive velocity limit
  // means "use the swarm's weakest-agent velocity".
  double v_limit = 0.0;
  double a_limit = 4.0;
  double j_limit = 8.0;
  int control_points = 12;
  double segment_time = 0.4;
  int degree = 3;
  int samples_per_span = 8;
  int max_iterations = 100;
  double grad_tol = 1e-4;
  double rel_cost_tol = 1e-6;
  // The central agent is the formation reference and does not chase followers.
  bool central_formation_term = false;
};

struct SimConfig {
  double dt = 0.02;
  int replan_every = 5;
  double a_max = 4.0;
  double kp = 16.0;
  double kd = 8.0;
  double speed_slack = 0.10;
  // Replanning starts from the previous plan's state while the agent is
  // within this distance of it, otherwise from the measured state.
  double plan_continuity = 0.5;
  int heartbeat_timeout = 25;
  double drop_rate = 0.0;
  bool halt_on_collision = false;
  bool debug_costs = false;
  double end_margin = 3.0;
  // Global reference is fitted against this fraction of the swarm limits so
  // followers keep headroom for evasive manoeuvres.
  double global_speed_fraction = 0.8;
  double global_acc_limit = 1.5;
  bool stop_at_pois = true;
  int threads = 1;
  // State rows are written every this many ticks.
  int log_every = 5;
};

struct TourConfig {
  double alpha = 0.01;
  int exact_limit = 15;
  double deadline = 30.0;
  double cruise_fraction = 0.4;
  double service_time_default = 0.0;
};

struct MetricsConfig {
  double footprint = 2.5;
};

struct MissionConfig {
  EsdfConfig esdf;
  PlannerWeights planner;
  SimConfig sim;
  TourConfig tour;
  MetricsConfig metrics;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(EsdfConfig, resolution, window_extent, window_height, d_max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PlannerWeights, lambda_c, lambda_p, lambda_v, lambda_fs,
                                                lambda_fa, tau, d_r, v_limit, a_limit, j_limit,
                                                control_points, segment_time, degree, samples_per_span,
                                                max_iterations, grad_tol, rel_cost_tol,
                                                central_formation_term)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SimConfig, dt, replan_every, a_max, kp, kd, speed_slack, plan_continuity,
                                                heartbeat_timeout, drop_rate, halt_on_collision, debug_costs,
                                                end_margin, global_speed_fraction, global_acc_limit,
                                                stop_at_pois, threads, log_every)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TourConfig, alpha, exact_limit, deadline, cruise_fraction,
                                                service_time_default)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MetricsConfig, footprint)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(MissionConfig, esdf, planner, sim, tour, metrics)

// Applies `overrides` (a possibly partial object) on top of `base`. Unknown
// keys are rejected with their dotted path.
MissionConfig merge_config(const MissionConfig& base, const nlohmann::json& overrides);

// Flattened "section.key = default" listing of every configuration key.
std::vector<std::pair<std::string, std::string>> describe_config(const MissionConfig& cfg = {});

void validate_config(const MissionConfig& cfg);

}  // namespace swarmnav
