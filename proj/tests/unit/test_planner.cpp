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

#include "../support/planner_scene.hpp"
#include "swarmnav/lbfgs.hpp"
#include "swarmnav/local_planner.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace swarmnav;
using namespace swarmnav::planner;
using trajectory::PolySegment;
using trajectory::PolyTrajectory;

namespace {

BsplineTrajectory line(const Vec3& from, const Vec3& step, int k, double seg, double t0 = 0.0) {
  std::vector<Vec3> cps;
  for (int i = 0; i < k; ++i) cps.push_back(from + i * step);
  return BsplineTrajectory(cps, 3, seg, t0);
}

// Single segment p(t) = p0 + v t on [0, duration].
PolyTrajectory straight(const Vec3& p0, const Vec3& v, double duration) {
  PolySegment s;
  s.duration = duration;
  s.coeffs.col(0) = p0;
  s.coeffs.col(1) = v * duration;
  return PolyTrajectory({s}, {p0, p0 + v * duration});
}

esdf::EsdfGrid constant_grid(const Vec3& origin, double res, int n, double value) {
  esdf::EsdfGrid g(origin, res, {n, n, n}, 5.0, 1.0);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) g.at(i, j, k) = value;
  return g;
}

}  // namespace

TEST_SUITE("planner") {

TEST_CASE("collision term vanishes beyond the clearance") {
  PlannerWeights w;
  const auto g = esdf::build_local_esdf({}, Vec3::Zero(), EsdfConfig{0.2, 4.0, 2.0, 3.0});
  const auto c = collision_cost(line(Vec3(-1, 0, 0), Vec3(0.2, 0, 0), 10, 0.4), g, w);
  CHECK(c.cost == 0.0);
  for (const auto& v : c.gradient) CHECK(v == Vec3::Zero());
}

TEST_CASE("constant distance below the clearance integrates exactly") {
  PlannerWeights w;
  const auto g = constant_grid(Vec3(-5, -5, -5), 0.5, 21, w.tau - 0.2);
  const auto traj = line(Vec3(-1, 0, 0), Vec3(0.2, 0.05, 0), 12, 0.4, 3.0);
  const auto c = collision_cost(traj, g, w);
  CHECK(c.cost == doctest::Approx(w.lambda_c * 0.04 * traj.duration()).epsilon(1e-12));
}

TEST_CASE("endpoint term") {
  PlannerWeights w;
  w.lambda_p = 2.0;
  const auto traj = line(Vec3(0, 0, 1), Vec3(0.3, 0, 0), 8, 0.5);
  const Vec3 p = traj.eval(traj.t_end()), v = traj.eval(traj.t_end(), 1);
  CHECK(endpoint_cost(traj, p, v, w).cost == doctest::Approx(0.0));
  const Vec3 delta(0.3, -0.4, 1.2);
  CHECK(endpoint_cost(traj, p + delta, v, w).cost == doctest::Approx(2.0 * delta.squaredNorm()).epsilon(1e-12));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec3 dp(u(rng), u(rng), u(rng)), dv(u(rng), u(rng), u(rng));
    const double direct = w.lambda_p * dp.squaredNorm() + w.lambda_v * dv.squaredNorm();
    CHECK(endpoint_cost(traj, p - dp, v - dv, w).cost == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("soft limits") {
  const auto slow = line(Vec3::Zero(), Vec3(0.1, 0, 0), 10, 0.5);
  CHECK(soft_limit_cost(slow, {1.0, 1.0, 1.0}).cost == 0.0);
  // Constant speed 2 m/s against a 1.5 m/s limit.
  const auto fast = line(Vec3::Zero(), Vec3(0.8, 0, 0), 10, 0.4);
  CHECK(soft_limit_cost(fast, {1.5, 1.0, 1.0}).cost ==
        doctest::Approx(fast.duration() * std::exp(4.0 - 2.25)).epsilon(1e-12));
  // Past the exponent cap the penalty keeps growing linearly instead of overflowing.
  const auto faster = line(Vec3::Zero(), Vec3(4.0, 0, 0), 10, 0.4);
  const double capped = soft_limit_cost(faster, {1.0, 1.0, 1.0}).cost;
  CHECK(std::isfinite(capped));
  CHECK(capped == doctest::Approx(faster.duration() * std::exp(50.0) * (1.0 + (100.0 - 1.0) - 50.0)).epsilon(1e-12));
}

TEST_CASE("lower limits never lower the smoothness cost") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = scene::random_scene(rng);
    double prev = -1.0;
    for (double scale = 3.0; scale >= 0.2; scale -= 0.2) {
      const double c = soft_limit_cost(s.traj, {0.6 * scale, 1.5 * scale, 4.0 * scale}).cost;
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("formation term") {
  const std::vector<Vec3> offsets{Vec3(0, 0, 0), Vec3(2, 2, 0), Vec3(-2, 2, 0), Vec3(-2, -2, 0)};
  const auto desired = formation::normalized_laplacian(offsets);
  PlannerWeights w;
  auto build = [&](const Vec3& shift, const Vec3& self_extra) {
    std::vector<Neighbor> others;
    for (int slot = 1; slot < 4; ++slot) {
      Neighbor n;
      n.slot = slot;
      n.trajectory = line(offsets[slot] + shift, Vec3(0.3, 0, 0), 10, 0.4);
      others.push_back(n);
    }
    return std::pair(line(offsets[0] + shift + self_extra, Vec3(0.3, 0, 0), 10, 0.4), others);
  };
  auto [on, others] = build(Vec3::Zero(), Vec3::Zero());
  CHECK(formation_cost(on, 0, others, desired, w).cost == doctest::Approx(0.0).epsilon(1e-20));
  auto [moved, others2] = build(Vec3(5, -3, 2), Vec3::Zero());
  CHECK(formation_cost(moved, 0, others2, desired, w).cost < 1e-20);
  auto [off, others3] = build(Vec3::Zero(), Vec3(0.4, -0.3, 0.1));
  CHECK(formation_cost(off, 0, others3, desired, w).cost > 0.0);
  scene::Scene s;
  s.traj = off;
  s.others = others3;
  s.desired = desired;
  s.self_slot = 0;
  CHECK(scene::check_gradient(off, scene::formation_term(s)).relative_error < 1e-3);
}

TEST_CASE("stale neighbours are held and flagged") {
  const std::vector<Vec3> offsets{Vec3(0, 0, 0), Vec3(2, 0, 0)};
  const auto desired = formation::normalized_laplacian(offsets);
  Neighbor n;
  n.slot = 1;
  n.stale = true;
  n.position = Vec3(7, 7, 7);
  n.trajectory = line(Vec3(2, 0, 0), Vec3(0.3, 0, 0), 10, 0.4);
  CHECK(n.predict(1.0) == n.position);
  const std::vector<Neighbor> others{n};
  CHECK(formation_cost(line(Vec3::Zero(), Vec3(0.3, 0, 0), 10, 0.4), 0, others, desired, PlannerWeights{}).degraded);
  CHECK(reciprocal_cost(line(Vec3::Zero(), Vec3(0.3, 0, 0), 10, 0.4), others, PlannerWeights{}).degraded);
}

TEST_CASE("reciprocal term") {
  PlannerWeights w;
  w.d_r = 1.0;
  w.lambda_fa = 100.0;
  // 2 m/s along x: coupling samples are 2 m apart.
  const auto traj = line(Vec3::Zero(), Vec3(2, 0, 0), 10, 1.0);
  Neighbor far;
  far.slot = 1;
  far.trajectory = line(Vec3(0, 1.5, 0), Vec3(2, 0, 0), 10, 1.0);
  CHECK(reciprocal_cost(traj, std::vector<Neighbor>{far}, w).cost == 0.0);

  Neighbor parked;
  parked.slot = 1;
  parked.stale = true;
  parked.position = traj.eval(3.0);
  const auto c = reciprocal_cost(traj, std::vector<Neighbor>{parked}, w);
  CHECK(c.cost == doctest::Approx(100.0 * std::pow(1.0, 6)).epsilon(1e-12));
}

TEST_CASE("coupling times step by the segment time and clamp at the end") {
  const auto traj = line(Vec3::Zero(), Vec3(1, 0, 0), 6, 0.5, 2.0);
  const auto t = coupling_times(traj);
  REQUIRE(t.size() == 7);
  CHECK(t[0] == 2.0);
  CHECK(t[1] == 2.5);
  CHECK(t[3] == traj.t_end());
  CHECK(t[6] == traj.t_end());
}

TEST_CASE("all five gradients match finite differences on random scenes") {
  std::mt19937_64 rng(6);
  int active[5] = {0, 0, 0, 0, 0};
  for (int trial = 0; trial < 25; ++trial) {
    const auto s = scene::random_scene(rng);
    const scene::Term terms[5] = {scene::collision_term(s), scene::endpoint_term(s), scene::smoothness_term(s),
                                  scene::formation_term(s), scene::reciprocal_term(s)};
    const double tol[5] = {1e-4, 1e-4, 1e-4, 1e-3, 1e-3};
    for (int i = 0; i < 5; ++i) {
      const auto r = scene::check_gradient(s.traj, terms[i]);
      if (r.gradient_norm > 1e-8) ++active[i];
      CHECK_MESSAGE(r.relative_error < tol[i], "term " << i << " trial " << trial);
      CHECK(terms[i](s.traj).cost >= 0.0);
    }
  }
  for (int i = 0; i < 5; ++i) CHECK(active[i] > 5);
}

TEST_CASE("optimizer minimizes the Rosenbrock function") {
  auto rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(2);
    g(0) = -2 * (1 - x(0)) - 400 * x(0) * (x(1) - x(0) * x(0));
    g(1) = 200 * (x(1) - x(0) * x(0));
    return (1 - x(0)) * (1 - x(0)) + 100 * std::pow(x(1) - x(0) * x(0), 2);
  };
  lbfgs::Params p;
  p.max_iterations = 500;
  p.grad_tol = 1e-8;
  p.rel_cost_tol = 0.0;
  const auto r = lbfgs::minimize(rosen, Eigen::Vector2d(-1.2, 1.0), p);
  CHECK(r.converged());
  CHECK(std::abs(r.x(0) - 1.0) < 1e-5);
  CHECK(std::abs(r.x(1) - 1.0) < 1e-5);
}

TEST_CASE("replanning an undisturbed straight reference changes nothing") {
  const Vec3 v(1.2, 0.3, 0);
  const auto global = straight(Vec3(0, 0, 2), v, 30.0);
  ReplanProblem pr;
  pr.t_now = 4.0;
  pr.global = &global;
  pr.position = global.eval(4.0);
  pr.velocity = v;
  pr.v_limit = 2.0;
  const auto guess = initial_guess(pr);
  const auto r = replan(pr);
  REQUIRE(r.trajectory.control_points().size() == guess.control_points().size());
  for (std::size_t i = 0; i < guess.control_points().size(); ++i) {
    CHECK((r.trajectory.control_points()[i] - guess.control_points()[i]).norm() < 1e-3);
  }
  CHECK(r.cost.total() < 1e-12);
}

TEST_CASE("without obstacles or neighbours the end reaches the reference") {
  const std::vector<Vec3> wps{Vec3(0, 0, 2), Vec3(8, 3, 2), Vec3(12, -2, 3)};
  const auto global = trajectory::fit_global(wps, 2.0, 1.5);
  for (double t : {1.0, 3.5, 6.0}) {
    ReplanProblem pr;
    pr.t_now = t;
    pr.global = &global;
    pr.position = global.eval(t) + Vec3(0.2, -0.1, 0);
    pr.velocity = global.eval(t, 1);
    pr.v_limit = 2.5;
    const auto r = replan(pr);
    CHECK(r.cost.total() <= r.initial_cost.total());
    const Vec3 end = reference_at(global, Vec3::Zero(), r.trajectory.t_end()).position;
    CHECK((r.trajectory.eval(r.trajectory.t_end()) - end).norm() < 1e-3);
    CHECK((r.trajectory.eval(t) - pr.position).norm() < 1e-9);
  }
}

TEST_CASE("receding-horizon replanning steers around an obstacle on the path") {
  const Vec3 v(1.5, 0, 0);
  const auto global = straight(Vec3(0, 0, 2), v, 20.0);
  for (double off : {0.0, 0.1, -0.3}) {
    CAPTURE(off);
    Obstacle o;
    o.center = Vec2(9.0, off);
    o.radius = 0.5;
    o.height = 5.0;
    const std::vector<Obstacle> obs{o};
    const EsdfConfig cfg{0.1, 6.0, 2.0, 3.0};
    const double tick = 0.1;
    Vec3 pos(0, 0, 2), vel = v, acc = Vec3::Zero();
    BsplineTrajectory plan;
    double clearance = 1e9;
    for (int n = 0; n < 100; ++n) {
      ReplanProblem pr;
      pr.t_now = n * tick;
      pr.global = &global;
      pr.position = pos;
      pr.velocity = vel;
      pr.acceleration = acc;
      pr.v_limit = 2.0;
      const auto grid = esdf::build_local_esdf(obs, pos, cfg);
      pr.grid = &grid;
      if (!plan.empty()) pr.warm_start = &plan;
      const auto r = replan(pr);
      CHECK(r.cost.total() <= r.initial_cost.total());
      plan = r.trajectory;
      for (int k = 1; k <= 10; ++k) {
        clearance = std::min(clearance, esdf::cylinder_distance(o, plan.eval(pr.t_now + k * tick / 10)));
      }
      pos = plan.eval(pr.t_now + tick);
      vel = plan.eval(pr.t_now + tick, 1);
      acc = plan.eval(pr.t_now + tick, 2);
    }
    // The clearance term is soft, so allow a margin below tau.
    CHECK(clearance >= 1.0);
    CHECK(std::abs(pos.y()) < 0.2);
    CHECK(pos.x() > 13.0);
  }
}

TEST_CASE("replanning never raises the cost on random scenes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = scene::random_scene(rng);
    const std::vector<Vec3> wps{s.traj.control_points().front(), s.traj.control_points().back()};
    const auto global = trajectory::fit_global(wps, 2.0, 1.5);
    ReplanProblem pr;
    pr.global = &global;
    pr.position = wps.front();
    pr.grid = &s.grid;
    pr.others = s.others;
    pr.self_slot = s.self_slot;
    pr.desired_laplacian = &s.desired;
    pr.v_limit = 2.0;
    const auto r = replan(pr);
    CHECK(r.cost.total() <= r.initial_cost.total());
    CHECK(r.cost.collision >= 0.0);
    CHECK(r.cost.reciprocal >= 0.0);
  }
}

TEST_CASE("free point search moves across the heading") {
  Obstacle o;
  o.center = Vec2(0, 0);
  o.radius = 0.6;
  o.height = 5.0;
  const std::vector<Obstacle> obs{o};
  const auto grid = esdf::build_local_esdf(obs, Vec3(0, 0, 2), EsdfConfig{0.1, 4.0, 2.0, 3.0});
  const Vec3 heading(1, 0, 0);
  // Just below the axis: the nearer free side is -y.
  int side = 0;
  const auto moved = free_point_across(grid, Vec3(0.0, -0.1, 2.0), 0.7, heading, 3.0, side);
  REQUIRE(moved);
  CHECK(grid.query(*moved).distance >= 0.7);
  CHECK(moved->x() == 0.0);
  CHECK(moved->y() < -1.2);
  CHECK(moved->z() == 2.0);
  CHECK(side == -1);
  // The chosen side wins ties.
  const auto tie = free_point_across(grid, Vec3(0.0, 0.0, 2.0), 0.65, heading, 3.0, side);
  REQUIRE(tie);
  CHECK(tie->y() < 0.0);
  int fresh = 0;
  CHECK(free_point_across(grid, Vec3(0.0, 0.0, 2.0), 0.65, heading, 3.0, fresh)->y() > 0.0);
  CHECK(fresh == 1);
  // Free points stay put; a short search can fail.
  const Vec3 free(3.0, 0.0, 2.0);
  CHECK(*free_point_across(grid, free, 0.7, heading, 3.0, side) == free);
  CHECK_FALSE(free_point_across(grid, Vec3(0.0, 0.0, 2.0), 0.7, heading, 0.2, fresh));
}

}  // TEST_SUITE
