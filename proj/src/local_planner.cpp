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

#include "swarmnav/local_planner.hpp"

#include "swarmnav/formation.hpp"
#include "swarmnav/lbfgs.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace swarmnav::planner {

namespace {

constexpr double kExponentCap = 50.0;
constexpr double kProjectionRadius = 3.0;
// Projection directions fan out this far (radians) from the lateral.
constexpr double kFanHalfAngle = 1.0;
constexpr int kFanSteps = 6;

// Points within one voxel of a surface (or inside) get pushed out to half
// the collision clearance.
bool needs_projection(const esdf::EsdfGrid& grid, const Vec3& p) {
  return grid.query(p).distance <= grid.resolution();
}

CostGrad zero_cost(const BsplineTrajectory& traj) {
  CostGrad out;
  out.gradient.assign(traj.control_points().size(), Vec3::Zero());
  return out;
}

Vec3 apply(const BsplineTrajectory& traj, const trajectory::BasisWeights& b) {
  Vec3 out = Vec3::Zero();
  for (int k = 0; k <= traj.degree(); ++k) out += b.weights[k] * traj.control_points()[b.first + k];
  return out;
}

void scatter(std::vector<Vec3>& grad, const trajectory::BasisWeights& b, int degree, const Vec3& g) {
  for (int k = 0; k <= degree; ++k) grad[b.first + k] += b.weights[k] * g;
}

// Midpoint quadrature nodes: `n` per span, each carrying weight T / n.
template <typename Fn>
void for_each_quadrature_node(const BsplineTrajectory& traj, int n, Fn&& fn) {
  const double dt = traj.segment_time() / n;
  for (int s = 0; s < traj.span_count(); ++s) {
    for (int i = 0; i < n; ++i) fn(s, (i + 0.5) / n, dt);
  }
}

}  // namespace

CostGrad collision_cost(const BsplineTrajectory& traj, const esdf::EsdfGrid& grid, const PlannerWeights& w) {
  CostGrad out = zero_cost(traj);
  for_each_quadrature_node(traj, w.samples_per_span, [&](int span, double u, double dt) {
    const auto b = traj.basis_local(span, u, 0);
    const auto q = grid.query(apply(traj, b));
    if (!q.in_bounds) return;
    const double diff = q.distance - w.tau;
    if (diff > 0.0) return;
    out.cost += w.lambda_c * diff * diff * dt;
    scatter(out.gradient, b, traj.degree(), 2.0 * w.lambda_c * diff * dt * q.gradient);
  });
  return out;
}

CostGrad endpoint_cost(const BsplineTrajectory& traj, const Vec3& p_glob, const Vec3& v_glob,
                       const PlannerWeights& w) {
  CostGrad out = zero_cost(traj);
  const double tf = traj.t_end();
  const auto bp = traj.basis(tf, 0);
  const auto bv = traj.basis(tf, 1);
  const Vec3 dp = apply(traj, bp) - p_glob;
  const Vec3 dv = apply(traj, bv) - v_glob;
  out.cost = w.lambda_p * dp.squaredNorm() + w.lambda_v * dv.squaredNorm();
  scatter(out.gradient, bp, traj.degree(), 2.0 * w.lambda_p * dp);
  scatter(out.gradient, bv, traj.degree(), 2.0 * w.lambda_v * dv);
  return out;
}

CostGrad soft_limit_cost(const BsplineTrajectory& traj, const std::array<double, 3>& limits, int samples_per_span) {
  CostGrad out = zero_cost(traj);
  const int max_order = std::min(3, traj.degree());
  for_each_quadrature_node(traj, samples_per_span, [&](int span, double u, double dt) {
    for (int order = 1; order <= max_order; ++order) {
      const auto b = traj.basis_local(span, u, order);
      const Vec3 d = apply(traj, b);
      const double lim = limits[order - 1];
      const double mag2 = d.squaredNorm();
      if (mag2 <= lim * lim) continue;
      const double exponent = mag2 - lim * lim;
      double value = 0.0;
      double slope = 0.0;  // d value / d exponent
      if (exponent < kExponentCap) {
        value = slope = std::exp(exponent);
      } else {
        // linear continuation past the cap
        slope = std::exp(kExponentCap);
        value = slope * (1.0 + exponent - kExponentCap);
      }
      out.cost += value * dt;
      scatter(out.gradient, b, traj.degree(), 2.0 * slope * dt * d);
    }
  });
  return out;
}

std::vector<double> coupling_times(const BsplineTrajectory& traj) {
  const int k = static_cast<int>(traj.control_points().size());
  std::vector<double> out;
  out.reserve(k + 1);
  for (int j = 0; j <= k; ++j) out.push_back(std::min(traj.t_start() + j * traj.segment_time(), traj.t_end()));
  return out;
}

CostGrad formation_cost(const BsplineTrajectory& traj, int self_slot, std::span<const Neighbor> others,
                        const Eigen::MatrixXd& desired_laplacian, const PlannerWeights& w) {
  CostGrad out = zero_cost(traj);
  const int n = static_cast<int>(desired_laplacian.rows());
  if (w.lambda_fs == 0.0 || n < 2) return out;
  for (const auto& o : others) out.degraded = out.degraded || o.stale;

  std::vector<Vec3> positions(n, Vec3::Zero());
  for (double t : coupling_times(traj)) {
    const auto b = traj.basis(t, 0);
    positions[self_slot] = apply(traj, b);
    for (const auto& o : others) positions[o.slot] = o.predict(t);
    formation::SimilarityGrad sg;
    try {
      sg = formation::similarity_with_gradient(positions, desired_laplacian, self_slot);
    } catch (const Error&) {
      out.degraded = true;  // coincident agents at this sample
      continue;
    }
    out.cost += w.lambda_fs * sg.value;
    scatter(out.gradient, b, traj.degree(), w.lambda_fs * sg.gradient);
  }
  return out;
}

CostGrad reciprocal_cost(const BsplineTrajectory& traj, std::span<const Neighbor> others, const PlannerWeights& w) {
  CostGrad out = zero_cost(traj);
  if (w.lambda_fa == 0.0) return out;
  const double dr2 = w.d_r * w.d_r;
  for (const auto& o : others) out.degraded = out.degraded || o.stale;
  for (double t : coupling_times(traj)) {
    const auto b = traj.basis(t, 0);
    const Vec3 p = apply(traj, b);
    for (const auto& o : others) {
      const Vec3 rel = p - o.predict(t);
      const double eps = dr2 - rel.squaredNorm();
      if (eps <= 0.0) continue;
      out.cost += w.lambda_fa * eps * eps * eps;
      scatter(out.gradient, b, traj.degree(), -6.0 * w.lambda_fa * eps * eps * rel);
    }
  }
  return out;
}

Reference reference_at(const trajectory::PolyTrajectory& global, const Vec3& offset, double t) {
  if (t >= global.duration()) return {global.waypoints().back() + offset, Vec3::Zero()};
  return {global.eval(t, 0) + offset, global.eval(t, 1)};
}

std::optional<Vec3> free_point_across(const esdf::EsdfGrid& grid, const Vec3& p, double clearance,
                                      const Vec3& heading, double max_radius, int& side) {
  if (grid.query(p).distance >= clearance) return p;
  Vec3 n(-heading.y(), heading.x(), 0.0);
  if (n.norm() < 1e-9) n = Vec3::UnitY();
  n.normalize();
  const Vec3 f(n.y(), -n.x(), 0.0);
  const int first = side < 0 ? -1 : 1;
  const double step = grid.resolution();
  for (double r = step; r <= max_radius + 1e-9; r += step) {
    for (int k = 0; k <= kFanSteps; ++k) {
      for (int tilt : {1, -1}) {
        if (k == 0 && tilt < 0) continue;
        const double a = tilt * kFanHalfAngle * k / kFanSteps;
        for (int s : {first, -first}) {
          const Vec3 c = p + r * (s * std::cos(a) * n + std::sin(a) * f);
          if (grid.query(c).distance < clearance) continue;
          if (side == 0) side = s;
          return c;
        }
      }
    }
  }
  return std::nullopt;
}

BsplineTrajectory initial_guess(const ReplanProblem& pr) {
  const auto& w = pr.weights;
  const int p = w.degree;
  const int k_points = w.control_points;
  const double T = w.segment_time;
  std::vector<Vec3> q(k_points);
  for (int k = 0; k < k_points; ++k) {
    const double greville = pr.t_now + (k - 0.5 * (p - 1)) * T;
    const auto* warm = pr.warm_start;
    if (warm != nullptr && !warm->empty() && greville >= warm->t_start() && greville <= warm->t_end()) {
      q[k] = warm->eval(greville, 0);
    } else {
      q[k] = reference_at(*pr.global, pr.offset, greville).position;
    }
  }
  BsplineTrajectory traj(q, p, T, pr.t_now);

  // Leading control points reproduce position, velocity, acceleration (and
  // zero jerk for quartics) at t_now.
  std::array<Vec3, 4> target{pr.position, pr.velocity, pr.acceleration, Vec3::Zero()};
  Eigen::MatrixXd a(p, p);
  Eigen::MatrixXd rhs(p, 3);
  for (int r = 0; r < p; ++r) {
    const auto b = traj.basis_local(0, 0.0, r);
    Vec3 known = Vec3::Zero();
    for (int c = 0; c <= p; ++c) {
      if (c < p) {
        a(r, c) = b.weights[c];
      } else {
        known += b.weights[c] * q[c];
      }
    }
    rhs.row(r) = (target[r] - known).transpose();
  }
  const Eigen::MatrixXd sol = a.fullPivLu().solve(rhs);
  auto& cps = traj.mutable_control_points();
  for (int c = 0; c < p; ++c) cps[c] = sol.row(c).transpose();
  if (pr.grid != nullptr) {
    const std::vector<Vec3> path = cps;
    int side = 0;
    for (int k = p; k < k_points; ++k) {
      if (!needs_projection(*pr.grid, cps[k])) continue;
      const Vec3 along = path[std::min(k + 1, k_points - 1)] - path[k - 1];
      if (auto moved = free_point_across(*pr.grid, cps[k], 0.5 * pr.weights.tau, along, kProjectionRadius, side)) {
        cps[k] = *moved;
      }
    }
  }
  return traj;
}

CostBreakdown evaluate_total(const BsplineTrajectory& traj, const ReplanProblem& pr, std::vector<Vec3>* gradient,
                             bool* degraded) {
  const auto& w = pr.weights;
  CostBreakdown out;
  std::vector<CostGrad> terms;
  if (pr.grid != nullptr) {
    terms.push_back(collision_cost(traj, *pr.grid, w));
    out.collision = terms.back().cost;
  }
  const Reference end = pr.goal ? *pr.goal : reference_at(*pr.global, pr.offset, traj.t_end());
  terms.push_back(endpoint_cost(traj, end.position, end.velocity, w));
  out.endpoint = terms.back().cost;
  terms.push_back(soft_limit_cost(traj, {pr.v_limit, w.a_limit, w.j_limit}, w.samples_per_span));
  out.smoothness = terms.back().cost;
  if (pr.desired_laplacian != nullptr && !pr.others.empty()) {
    terms.push_back(formation_cost(traj, pr.self_slot, pr.others, *pr.desired_laplacian, w));
    out.formation = terms.back().cost;
  }
  if (!pr.others.empty()) {
    terms.push_back(reciprocal_cost(traj, pr.others, w));
    out.reciprocal = terms.back().cost;
  }
  if (gradient != nullptr) {
    gradient->assign(traj.control_points().size(), Vec3::Zero());
    for (const auto& t : terms) {
      for (std::size_t i = 0; i < gradient->size(); ++i) (*gradient)[i] += t.gradient[i];
    }
  }
  if (degraded != nullptr) {
    *degraded = std::any_of(terms.begin(), terms.end(), [](const CostGrad& t) { return t.degraded; });
  }
  return out;
}

ReplanResult replan(const ReplanProblem& problem) {
  require(problem.global != nullptr, ErrorKind::kArgument, "replan: missing global trajectory");
  ReplanProblem pr = problem;
  const int p = pr.weights.degree;
  BsplineTrajectory traj = initial_guess(pr);
  if (!pr.goal) {
    Reference goal = reference_at(*pr.global, pr.offset, traj.t_end());
    if (pr.grid != nullptr && needs_projection(*pr.grid, goal.position)) {
      int side = 0;
      const Vec3 along = goal.position - traj.control_points()[p];
      if (auto moved = free_point_across(*pr.grid, goal.position, 0.5 * pr.weights.tau, along, kProjectionRadius,
                                         side)) {
        goal.position = *moved;
      }
    }
    pr.goal = goal;
  }
  const int free_points = static_cast<int>(traj.control_points().size()) - p;

  ReplanResult result;
  result.initial_cost = evaluate_total(traj, pr);

  std::vector<Vec3> grad;
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    auto& cps = traj.mutable_control_points();
    for (int i = 0; i < free_points; ++i) cps[p + i] = x.segment<3>(3 * i);
    const double f = evaluate_total(traj, pr, &grad).total();
    for (int i = 0; i < free_points; ++i) g.segment<3>(3 * i) = grad[p + i];
    return f;
  };

  Eigen::VectorXd x0(3 * free_points);
  for (int i = 0; i < free_points; ++i) x0.segment<3>(3 * i) = traj.control_points()[p + i];

  lbfgs::Params params;
  params.max_iterations = pr.weights.max_iterations;
  params.grad_tol = pr.weights.grad_tol;
  params.rel_cost_tol = pr.weights.rel_cost_tol;
  const auto res = lbfgs::minimize(objective, x0, params);

  auto& cps = traj.mutable_control_points();
  for (int i = 0; i < free_points; ++i) cps[p + i] = res.x.segment<3>(3 * i);
  result.cost = evaluate_total(traj, pr, nullptr, &result.degraded);
  result.trajectory = std::move(traj);
  result.iterations = res.iterations;
  result.converged = res.converged();
  return result;
}

}  // namespace swarmnav::planner
