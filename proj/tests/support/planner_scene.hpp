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

// Randomized planning scenes and a central-difference gradient checker.

#pragma once

#include "swarmnav/esdf_map.hpp"
#include "swarmnav/formation.hpp"
#include "swarmnav/local_planner.hpp"

#include <functional>
#include <random>
#include <vector>

namespace scene {

using swarmnav::Obstacle;
using swarmnav::PlannerWeights;
using swarmnav::Vec2;
using swarmnav::Vec3;
using swarmnav::planner::BsplineTrajectory;
using swarmnav::planner::CostGrad;
using swarmnav::planner::Neighbor;

struct Scene {
  BsplineTrajectory traj;
  std::vector<Obstacle> obstacles;
  swarmnav::esdf::EsdfGrid grid;
  std::vector<Neighbor> others;
  Eigen::MatrixXd desired;
  int self_slot = 0;
  PlannerWeights weights;
  Vec3 p_glob = Vec3::Zero();
  Vec3 v_glob = Vec3::Zero();
  std::array<double, 3> limits{0.6, 1.5, 4.0};
};

// A wandering spline threaded between cylinders, with neighbours flying
// near-parallel copies of it so the reciprocal term is active.
inline Scene random_scene(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
  Scene s;
  const int k = 10 + static_cast<int>(unit(rng) * 5);
  std::vector<Vec3> cps{Vec3(0, 0, 2)};
  for (int i = 1; i < k; ++i) cps.push_back(cps.back() + Vec3(0.3 + 0.2 * u(rng), 0.25 * u(rng), 0.1 * u(rng)));
  s.traj = BsplineTrajectory(cps, unit(rng) < 0.8 ? 3 : 4, 0.3 + 0.2 * unit(rng), 10.0 * unit(rng));

  for (int i = 0; i < 6; ++i) {
    Obstacle o;
    const Vec3 near = cps[1 + static_cast<int>(unit(rng) * (k - 2))];
    o.center = near.head<2>() + Vec2(1.2 * u(rng), 1.2 * u(rng));
    o.radius = 0.3 + 0.4 * unit(rng);
    o.height = 1.5 + 4.0 * unit(rng);
    s.obstacles.push_back(o);
  }
  swarmnav::EsdfConfig cfg;
  cfg.resolution = 0.1;
  cfg.window_extent = 6.0;
  cfg.window_height = 3.0;
  cfg.d_max = 3.0;
  s.grid = swarmnav::esdf::build_local_esdf(s.obstacles, cps[k / 2], cfg);

  const int n = 3 + static_cast<int>(unit(rng) * 3);
  s.self_slot = static_cast<int>(unit(rng) * n);
  std::vector<Vec3> desired;
  for (int i = 0; i < n; ++i) desired.emplace_back(3 * u(rng), 3 * u(rng), 0.5 * u(rng));
  s.desired = swarmnav::formation::normalized_laplacian(desired);
  for (int slot = 0; slot < n; ++slot) {
    if (slot == s.self_slot) continue;
    Neighbor nb;
    nb.slot = slot;
    const Vec3 shift = Vec3(u(rng), u(rng), 0.3 * u(rng)).normalized() * (0.4 + 0.8 * unit(rng));
    std::vector<Vec3> theirs;
    for (const auto& c : cps) theirs.push_back(c + shift + 0.1 * Vec3(u(rng), u(rng), u(rng)));
    nb.trajectory = BsplineTrajectory(theirs, s.traj.degree(), s.traj.segment_time(), s.traj.t_start() + 0.1 * u(rng));
    nb.position = theirs.front();
    s.others.push_back(nb);
  }

  s.weights.lambda_c = 10.0;
  s.weights.lambda_fs = 1.0;
  s.weights.lambda_fa = 100.0;
  s.weights.d_r = 1.0;
  s.weights.tau = 1.0;
  s.p_glob = cps.back() + Vec3(u(rng), u(rng), u(rng));
  s.v_glob = Vec3(u(rng), u(rng), u(rng));
  return s;
}

using Term = std::function<CostGrad(const BsplineTrajectory&)>;

struct GradCheck {
  double relative_error = 0.0;
  double gradient_norm = 0.0;
};

// Central differences over every control-point coordinate; the error is
// |fd - analytic| / |analytic| over the whole gradient vector.
inline GradCheck check_gradient(const BsplineTrajectory& traj, const Term& term, double h = 1e-6) {
  const CostGrad an = term(traj);
  double err2 = 0.0, norm2 = 0.0;
  BsplineTrajectory probe = traj;
  for (std::size_t i = 0; i < traj.control_points().size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      auto& x = probe.mutable_control_points()[i][a];
      const double x0 = x;
      x = x0 + h;
      const double hi = term(probe).cost;
      x = x0 - h;
      const double lo = term(probe).cost;
      x = x0;
      const double fd = (hi - lo) / (2 * h);
      err2 += (fd - an.gradient[i][a]) * (fd - an.gradient[i][a]);
      norm2 += an.gradient[i][a] * an.gradient[i][a];
    }
  }
  GradCheck out;
  out.gradient_norm = std::sqrt(norm2);
  out.relative_error = out.gradient_norm > 1e-8 ? std::sqrt(err2) / out.gradient_norm : std::sqrt(err2);
  return out;
}

inline Term collision_term(const Scene& s) {
  return [&s](const BsplineTrajectory& t) { return swarmnav::planner::collision_cost(t, s.grid, s.weights); };
}
inline Term endpoint_term(const Scene& s) {
  return [&s](const BsplineTrajectory& t) { return swarmnav::planner::endpoint_cost(t, s.p_glob, s.v_glob, s.weights); };
}
inline Term smoothness_term(const Scene& s) {
  return [&s](const BsplineTrajectory& t) {
    return swarmnav::planner::soft_limit_cost(t, s.limits, s.weights.samples_per_span);
  };
}
inline Term formation_term(const Scene& s) {
  return [&s](const BsplineTrajectory& t) {
    return swarmnav::planner::formation_cost(t, s.self_slot, s.others, s.desired, s.weights);
  };
}
inline Term reciprocal_term(const Scene& s) {
  return [&s](const BsplineTrajectory& t) { return swarmnav::planner::reciprocal_cost(t, s.others, s.weights); };
}

}  // namespace scene
