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

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace swarmnav::trajectory {

inline constexpr int kMaxDegree = 4;

// Weights of the control points that influence one evaluation: the value of
// the order-th derivative at t is sum_k weights[k] * Q[first + k], k <= degree.
struct BasisWeights {
  int first = 0;
  std::array<double, kMaxDegree + 1> weights{};
};

// Uniform B-spline. Knot k sits at t_start + (k - degree) * T, so the curve is
// defined on [t_start, t_start + (K - degree) * T].
class BsplineTrajectory {
 public:
  BsplineTrajectory() = default;
  BsplineTrajectory(std::vector<Vec3> control_points, int degree, double segment_time, double t_start);

  const std::vector<Vec3>& control_points() const { return control_points_; }
  std::vector<Vec3>& mutable_control_points() { return control_points_; }
  int degree() const { return degree_; }
  double segment_time() const { return segment_time_; }
  double t_start() const { return t_start_; }
  double t_end() const { return t_start_ + duration(); }
  double duration() const { return (static_cast<int>(control_points_.size()) - degree_) * segment_time_; }
  int span_count() const { return static_cast<int>(control_points_.size()) - degree_; }
  bool empty() const { return control_points_.empty(); }

  // de Boor evaluation of the order-th derivative. Throws kArgument when t is
  // outside the domain (beyond a 1e-9 s tolerance) or order > degree.
  Vec3 eval(double t, int order = 0) const;

  // Like eval but clamps t into the domain.
  Vec3 eval_clamped(double t, int order = 0) const;

  BasisWeights basis(double t, int order) const;
  // Basis of span `span` at local parameter u in [0, 1].
  BasisWeights basis_local(int span, double u, int order) const;

 private:
  void locate(double t, int& span, double& u) const;

  std::vector<Vec3> control_points_;
  int degree_ = 3;
  double segment_time_ = 1.0;
  double t_start_ = 0.0;
};

// One polynomial piece, coefficients in normalized time s = (t - t0) / duration:
// p(t) = sum_n coeffs.col(n) * s^n.
struct PolySegment {
  double duration = 0.0;
  Eigen::Matrix<double, 3, 8> coeffs = Eigen::Matrix<double, 3, 8>::Zero();
};

class PolyTrajectory {
 public:
  PolyTrajectory() = default;
  PolyTrajectory(std::vector<PolySegment> segments, std::vector<Vec3> waypoints);

  const std::vector<PolySegment>& segments() const { return segments_; }
  const std::vector<Vec3>& waypoints() const { return waypoints_; }
  double duration() const { return starts_.empty() ? 0.0 : starts_.back() + segments_.back().duration; }
  std::span<const double> segment_starts() const { return starts_; }

  // Derivative of the given order (0..7); t is clamped into [0, duration].
  Vec3 eval(double t, int order = 0) const;

  // Integral of |p''''(t)|^2 computed from the coefficients.
  double snap_cost() const;

  // Concatenates `next` after this trajectory. The first waypoint of `next`
  // is dropped from the waypoint list when it repeats the current last one.
  void append(const PolyTrajectory& next);
  // Appends a stationary segment at the current final position.
  void hold(double seconds);

 private:
  std::vector<PolySegment> segments_;
  std::vector<Vec3> waypoints_;
  std::vector<double> starts_;
};

// Minimum-snap rest-to-rest trajectory through `waypoints` with fixed segment
// durations: minimizes the integral of the squared 4th derivative subject to
// interpolation, C4 continuity at joints and zero velocity, acceleration and
// jerk at both ends.
PolyTrajectory min_snap(std::span<const Vec3> waypoints, std::span<const double> durations);

struct KinematicPeaks {
  double velocity = 0.0;
  double acceleration = 0.0;
};
KinematicPeaks sample_peaks(const PolyTrajectory& traj, int samples_per_segment = 200);

// Heuristic durations distance / (0.7 v_max) (at least 0.5 s), then uniform
// time scaling until sampled velocity and acceleration respect the limits.
PolyTrajectory fit_global(std::span<const Vec3> waypoints, double v_max, double a_max);

struct WindowSample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

// n uniform samples over [t0, t0 + horizon]; samples past the end report the
// final waypoint at rest.
std::vector<WindowSample> sample_window(const PolyTrajectory& traj, double t0, double horizon, int n);

}  // namespace swarmnav::trajectory
