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

#include "swarmnav/trajectory.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace swarmnav::trajectory {

namespace {

constexpr int kCoeffs = 8;
constexpr int kSnapOrder = 4;

// n! / (n - r)!
double falling(int n, int r) {
  double out = 1.0;
  for (int i = 0; i < r; ++i) out *= n - i;
  return out;
}

// Snap Gram matrix on the unit interval: int_0^1 q''''(s)^2 ds = c^T H c.
Eigen::Matrix<double, kCoeffs, kCoeffs> unit_snap_hessian() {
  Eigen::Matrix<double, kCoeffs, kCoeffs> h = Eigen::Matrix<double, kCoeffs, kCoeffs>::Zero();
  for (int n = kSnapOrder; n < kCoeffs; ++n) {
    for (int m = kSnapOrder; m < kCoeffs; ++m) {
      h(n, m) = falling(n, kSnapOrder) * falling(m, kSnapOrder) / (n + m - 2 * kSnapOrder + 1);
    }
  }
  return h;
}

}  // namespace

PolyTrajectory::PolyTrajectory(std::vector<PolySegment> segments, std::vector<Vec3> waypoints)
    : segments_(std::move(segments)), waypoints_(std::move(waypoints)) {
  double t = 0.0;
  for (const auto& s : segments_) {
    starts_.push_back(t);
    t += s.duration;
  }
}

Vec3 PolyTrajectory::eval(double t, int order) const {
  require(!segments_.empty(), ErrorKind::kArgument, "poly trajectory: empty");
  require(order >= 0 && order < kCoeffs, ErrorKind::kArgument, "poly trajectory: derivative order out of range");
  t = std::clamp(t, 0.0, duration());
  auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
  std::size_t k = (it == starts_.begin()) ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
  while (k > 0 && segments_[k].duration <= 0.0) --k;
  const auto& seg = segments_[k];
  if (seg.duration <= 0.0) return order == 0 ? Vec3(seg.coeffs.col(0)) : Vec3::Zero();
  const double s = std::clamp((t - starts_[k]) / seg.duration, 0.0, 1.0);
  Vec3 out = Vec3::Zero();
  double power = 1.0;
  for (int n = order; n < kCoeffs; ++n) {
    out += falling(n, order) * power * seg.coeffs.col(n);
    power *= s;
  }
  return out / std::pow(seg.duration, order);
}

double PolyTrajectory::snap_cost() const {
  static const Eigen::Matrix<double, kCoeffs, kCoeffs> h = unit_snap_hessian();
  double cost = 0.0;
  for (const auto& seg : segments_) {
    if (seg.duration <= 0.0) continue;
    double c = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const Eigen::Matrix<double, kCoeffs, 1> row = seg.coeffs.row(axis).transpose();
      c += row.dot(h * row);
    }
    cost += c / std::pow(seg.duration, 2 * kSnapOrder - 1);
  }
  return cost;
}

void PolyTrajectory::append(const PolyTrajectory& next) {
  if (next.segments_.empty()) return;
  double t = duration();
  for (const auto& s : next.segments_) {
    starts_.push_back(t);
    segments_.push_back(s);
    t += s.duration;
  }
  auto first = next.waypoints_.begin();
  if (!waypoints_.empty() && first != next.waypoints_.end() && *first == waypoints_.back()) ++first;
  waypoints_.insert(waypoints_.end(), first, next.waypoints_.end());
}

void PolyTrajectory::hold(double seconds) {
  if (!(seconds > 0.0)) return;
  require(!segments_.empty() || !waypoints_.empty(), ErrorKind::kArgument, "poly trajectory: nothing to hold");
  PolySegment seg;
  seg.duration = seconds;
  seg.coeffs.col(0) = segments_.empty() ? waypoints_.back() : eval(duration(), 0);
  starts_.push_back(duration());
  segments_.push_back(seg);
}

PolyTrajectory min_snap(std::span<const Vec3> waypoints, std::span<const double> durations) {
  require(waypoints.size() >= 2, ErrorKind::kArgument, "min_snap: need at least two waypoints");
  require(durations.size() + 1 == waypoints.size(), ErrorKind::kArgument, "min_snap: one duration per leg");
  for (double d : durations) require(d > 0.0, ErrorKind::kArgument, "min_snap: durations must be > 0");

  const int m = static_cast<int>(durations.size());
  const int nvar = kCoeffs * m;
  const int ncon = 2 * m + kSnapOrder * (m - 1) + 6;
  const auto h0 = unit_snap_hessian();

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(nvar + ncon, nvar + ncon);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nvar + ncon, 3);
  for (int k = 0; k < m; ++k) {
    kkt.block(kCoeffs * k, kCoeffs * k, kCoeffs, kCoeffs) = h0 / std::pow(durations[k], 2 * kSnapOrder - 1);
  }

  int row = nvar;
  auto add_constraint = [&](int seg, int order, double at_end, double scale) {
    // Adds scale * (order-th derivative of segment `seg` at s = at_end) to the current row.
    for (int n = order; n < kCoeffs; ++n) {
      const double basis = falling(n, order) * std::pow(at_end, n - order) / std::pow(durations[seg], order);
      kkt(row, kCoeffs * seg + n) += scale * basis;
      kkt(kCoeffs * seg + n, row) += scale * basis;
    }
  };

  for (int k = 0; k < m; ++k) {
    add_constraint(k, 0, 0.0, 1.0);
    rhs.row(row++) = waypoints[k].transpose();
    add_constraint(k, 0, 1.0, 1.0);
    rhs.row(row++) = waypoints[k + 1].transpose();
  }
  for (int k = 0; k + 1 < m; ++k) {
    for (int r = 1; r <= kSnapOrder; ++r) {
      add_constraint(k, r, 1.0, 1.0);
      add_constraint(k + 1, r, 0.0, -1.0);
      ++row;
    }
  }
  for (int r = 1; r <= 3; ++r) {
    add_constraint(0, r, 0.0, 1.0);
    ++row;
    add_constraint(m - 1, r, 1.0, 1.0);
    ++row;
  }

  const Eigen::MatrixXd sol = kkt.fullPivLu().solve(rhs);
  std::vector<PolySegment> segs(m);
  for (int k = 0; k < m; ++k) {
    segs[k].duration = durations[k];
    for (int n = 0; n < kCoeffs; ++n) segs[k].coeffs.col(n) = sol.row(kCoeffs * k + n).transpose();
  }
  return PolyTrajectory(std::move(segs), std::vector<Vec3>(waypoints.begin(), waypoints.end()));
}

KinematicPeaks sample_peaks(const PolyTrajectory& traj, int samples_per_segment) {
  KinematicPeaks out;
  const auto starts = traj.segment_starts();
  for (std::size_t k = 0; k < traj.segments().size(); ++k) {
    const double d = traj.segments()[k].duration;
    for (int i = 0; i <= samples_per_segment; ++i) {
      const double t = starts[k] + d * i / samples_per_segment;
      out.velocity = std::max(out.velocity, traj.eval(t, 1).norm());
      out.acceleration = std::max(out.acceleration, traj.eval(t, 2).norm());
    }
  }
  return out;
}

PolyTrajectory fit_global(std::span<const Vec3> waypoints, double v_max, double a_max) {
  require(waypoints.size() >= 2, ErrorKind::kArgument, "fit_global: need at least two waypoints");
  require(v_max > 0.0 && a_max > 0.0, ErrorKind::kArgument, "fit_global: limits must be > 0");
  std::vector<double> durations;
  for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) {
    durations.push_back(std::max(0.5, (waypoints[k + 1] - waypoints[k]).norm() / (0.7 * v_max)));
  }
  PolyTrajectory traj = min_snap(waypoints, durations);
  for (int iter = 0; iter < 50; ++iter) {
    const auto peaks = sample_peaks(traj);
    if (peaks.velocity <= v_max && peaks.acceleration <= a_max) break;
    // Stretching time by s divides velocity by s and acceleration by s^2.
    const double scale = std::max({peaks.velocity / v_max, std::sqrt(peaks.acceleration / a_max), 1.0}) * (1.0 + 1e-6);
    for (double& d : durations) d *= scale;
    traj = min_snap(waypoints, durations);
  }
  return traj;
}

std::vector<WindowSample> sample_window(const PolyTrajectory& traj, double t0, double horizon, int n) {
  require(n >= 2, ErrorKind::kArgument, "sample_window: n must be >= 2");
  std::vector<WindowSample> out;
  out.reserve(n);
  const double end = traj.duration();
  for (int i = 0; i < n; ++i) {
    WindowSample s;
    s.t = t0 + horizon * i / (n - 1);
    if (s.t >= end) {
      s.position = traj.waypoints().back();
      s.velocity = Vec3::Zero();
    } else {
      s.position = traj.eval(s.t, 0);
      s.velocity = traj.eval(s.t, 1);
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace swarmnav::trajectory
