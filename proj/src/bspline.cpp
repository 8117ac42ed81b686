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

#include <algorithm>
#include <cmath>

namespace swarmnav::trajectory {

namespace {

constexpr double kDomainTolerance = 1e-9;

// de Boor recursion on one span of a uniform spline of degree q; d holds the
// q + 1 active coefficients and is overwritten.
template <typename T>
T de_boor(std::array<T, kMaxDegree + 1>& d, int q, double u) {
  for (int r = 1; r <= q; ++r) {
    for (int j = q; j >= r; --j) {
      const double alpha = (u + q - j) / (q + 1 - r);
      d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
    }
  }
  return d[q];
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

BsplineTrajectory::BsplineTrajectory(std::vector<Vec3> control_points, int degree, double segment_time,
                                     double t_start)
    : control_points_(std::move(control_points)), degree_(degree), segment_time_(segment_time), t_start_(t_start) {
  require(degree >= 1 && degree <= kMaxDegree, ErrorKind::kArgument, "bspline: degree must be in [1, 4]");
  require(static_cast<int>(control_points_.size()) >= degree + 1, ErrorKind::kArgument,
          "bspline: need at least degree + 1 control points");
  require(segment_time > 0.0, ErrorKind::kArgument, "bspline: segment time must be > 0");
}

void BsplineTrajectory::locate(double t, int& span, double& u) const {
  const double x = (t - t_start_) / segment_time_;
  span = std::clamp(static_cast<int>(std::floor(x)), 0, span_count() - 1);
  u = x - span;
}

Vec3 BsplineTrajectory::eval(double t, int order) const {
  require(order >= 0 && order <= degree_, ErrorKind::kArgument, "bspline: derivative order exceeds degree");
  require(t >= t_start_ - kDomainTolerance && t <= t_end() + kDomainTolerance, ErrorKind::kArgument,
          "bspline: t outside the spline domain");
  int span = 0;
  double u = 0.0;
  locate(t, span, u);

  // Difference the active control points `order` times, then run de Boor at
  // the reduced degree.
  std::array<Vec3, kMaxDegree + 1> d;
  for (int k = 0; k <= degree_; ++k) d[k] = control_points_[span + k];
  for (int r = 1; r <= order; ++r) {
    for (int k = 0; k <= degree_ - r; ++k) d[k] = (d[k + 1] - d[k]) / segment_time_;
  }
  return de_boor(d, degree_ - order, u);
}

Vec3 BsplineTrajectory::eval_clamped(double t, int order) const {
  return eval(std::clamp(t, t_start_, t_end()), order);
}

BasisWeights BsplineTrajectory::basis_local(int span, double u, int order) const {
  const int q = degree_ - order;
  std::array<double, kMaxDegree + 1> beta{};
  for (int i = 0; i <= q; ++i) {
    std::array<double, kMaxDegree + 1> unit{};
    unit[i] = 1.0;
    beta[i] = de_boor(unit, q, u);
  }
  BasisWeights out;
  out.first = span;
  const double scale = std::pow(segment_time_, -order);
  for (int i = 0; i <= q; ++i) {
    for (int m = 0; m <= order; ++m) {
      const double sign = ((order - m) % 2 == 0) ? 1.0 : -1.0;
      out.weights[i + m] += beta[i] * sign * binomial(order, m) * scale;
    }
  }
  return out;
}

BasisWeights BsplineTrajectory::basis(double t, int order) const {
  require(order >= 0 && order <= degree_, ErrorKind::kArgument, "bspline: derivative order exceeds degree");
  int span = 0;
  double u = 0.0;
  locate(std::clamp(t, t_start_, t_end()), span, u);
  return basis_local(span, u, order);
}

}  // namespace swarmnav::trajectory
