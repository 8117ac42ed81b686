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

#include "swarmnav/common.hpp"
#include "swarmnav/config.hpp"
#include "swarmnav/esdf_map.hpp"
#include "swarmnav/trajectory.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace swarmnav::planner {

using trajectory::BsplineTrajectory;

// Value of one cost term with its gradient with respect to every control
// point of the spline being optimized.
struct CostGrad {
  double cost = 0.0;
  std::vector<Vec3> gradient;
  // Set when some input had to be substituted (stale neighbour, degenerate
  // formation sample).
  bool degraded = false;
};

// What one agent knows about another agent at the start of a planning cycle.
struct Neighbor {
  int slot = 0;  // index in the formation
  BsplineTrajectory trajectory;
  Vec3 position = Vec3::Zero();
  bool stale = false;

  // Broadcast trajectory at t (clamped to its domain), or the last known
  // position when stale or when no trajectory has been received.
  Vec3 predict(double t) const {
    if (stale || trajectory.empty()) return position;
    return trajectory.eval_clamped(t, 0);
  }
};

CostGrad collision_cost(const BsplineTrajectory& traj, const esdf::EsdfGrid& grid, const PlannerWeights& w);

CostGrad endpoint_cost(const BsplineTrajectory& traj, const Vec3& p_glob, const Vec3& v_glob,
                       const PlannerWeights& w);

// Limits are velocity, acceleration, jerk (derivative orders 1..3).
CostGrad soft_limit_cost(const BsplineTrajectory& traj, const std::array<double, 3>& limits,
                         int samples_per_span = 8);

// Times t_start + j T for j = 0..K at which the formation and reciprocal
// terms are evaluated; times past the end of the spline clamp to its end.
std::vector<double> coupling_times(const BsplineTrajectory& traj);

CostGrad formation_cost(const BsplineTrajectory& traj, int self_slot, std::span<const Neighbor> others,
                        const Eigen::MatrixXd& desired_laplacian, const PlannerWeights& w);

CostGrad reciprocal_cost(const BsplineTrajectory& traj, std::span<const Neighbor> others, const PlannerWeights& w);

struct CostBreakdown {
  double collision = 0.0;
  double endpoint = 0.0;
  double smoothness = 0.0;
  double formation = 0.0;
  double reciprocal = 0.0;
  double total() const { return collision + endpoint + smoothness + formation + reciprocal; }
};

struct ReplanResult {
  BsplineTrajectory trajectory;
  CostBreakdown cost;
  CostBreakdown initial_cost;
  int iterations = 0;
  bool converged = false;
  bool degraded = false;
};

// Reference position and velocity of the agent at time t.
struct Reference {
  Vec3 position;
  Vec3 velocity;
};

// Everything one agent needs for one replanning cycle.
struct ReplanProblem {
  double t_now = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
  const trajectory::PolyTrajectory* global = nullptr;
  Vec3 offset = Vec3::Zero();  // this agent's formation offset from the reference
  const esdf::EsdfGrid* grid = nullptr;
  int self_slot = 0;
  std::span<const Neighbor> others;
  const Eigen::MatrixXd* desired_laplacian = nullptr;
  PlannerWeights weights;
  double v_limit = 1.0;  // resolved velocity soft limit
  // Previous plan; seeds the initial guess where it still covers the horizon.
  const BsplineTrajectory* warm_start = nullptr;
  // Endpoint target; the reference at the spline's end when unset.
  std::optional<Reference> goal;
};


Reference reference_at(const trajectory::PolyTrajectory& global, const Vec3& offset, double t);

// Nearest point to `p` whose distance is at least `clearance`, searched in
// the horizontal plane on rings of growing radius (grid steps, up to
// `max_radius`) but only within a fan of about 57 degrees either side of the
// lateral to `heading`; straight across is tried first, then increasing
// tilt. `side` (+1 left of the heading, -1 right, 0 none yet) is tried first
// and is set by the first move, so repeated calls push consecutive points to
// the same side. Returns p itself when p is already free.
std::optional<Vec3> free_point_across(const esdf::EsdfGrid& grid, const Vec3& p, double clearance,
                                      const Vec3& heading, double max_radius, int& side);

// Initial guess: control points at the Greville abscissae of the previous
// plan (where defined) or else of the reference, with the first `degree`
// points fixed by the current position, velocity and acceleration. Free
// control points within one voxel of an obstacle are moved sideways to
// tau / 2 with free_point_across.
BsplineTrajectory initial_guess(const ReplanProblem& problem);

// Evaluates all five terms; `gradient` (if non-null) receives the summed
// gradient for every control point.
CostBreakdown evaluate_total(const BsplineTrajectory& traj, const ReplanProblem& problem,
                             std::vector<Vec3>* gradient = nullptr, bool* degraded = nullptr);

ReplanResult replan(const ReplanProblem& problem);

}  // namespace swarmnav::planner
