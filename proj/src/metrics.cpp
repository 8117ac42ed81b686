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

#include "swarmnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swarmnav::metrics {

namespace {

void require_paired(std::size_t a, std::size_t b, const char* what) {
  require(a == b, ErrorKind::kValidation,
          std::string(what) + ": sample count mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

Deviation summarize(const std::vector<double>& e) {
  Deviation d;
  if (e.empty()) return d;
  double sum = 0.0;
  for (double v : e) {
    sum += v;
    d.max = std::max(d.max, v);
  }
  d.mean = sum / static_cast<double>(e.size());
  return d;
}

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + s * ab)).norm();
}

}  // namespace

Deviation formation_deviation(std::span<const Vec3> agent, std::span<const Vec3> central, double d0) {
  require_paired(agent.size(), central.size(), "formation_deviation");
  require(d0 > 0.0, ErrorKind::kArgument, "formation_deviation: nominal distance must be > 0");
  std::vector<double> e(agent.size());
  for (std::size_t n = 0; n < agent.size(); ++n) e[n] = std::abs((agent[n] - central[n]).norm() - d0);
  Deviation d = summarize(e);
  d.mean_pct = d.mean / d0 * 100.0;
  return d;
}

Deviation trajectory_deviation(std::span<const Vec3> reference, std::span<const Vec3> replanned) {
  require_paired(reference.size(), replanned.size(), "trajectory_deviation");
  std::vector<double> e(reference.size());
  for (std::size_t n = 0; n < reference.size(); ++n) e[n] = (reference[n] - replanned[n]).norm();
  return summarize(e);
}

double path_length(std::span<const Vec3> path) {
  double len = 0.0;
  for (std::size_t n = 1; n < path.size(); ++n) len += (path[n] - path[n - 1]).norm();
  return len;
}

Raster::Raster(const Vec2& origin, double cell, int nx, int ny)
    : origin_(origin), cell_(cell), nx_(nx), ny_(ny), cells_(static_cast<std::size_t>(nx) * ny, 0) {
  require(cell > 0.0 && nx > 0 && ny > 0, ErrorKind::kArgument, "raster: bad geometry");
}

void Raster::sweep(const Vec2& a, const Vec2& b, double radius) {
  const Vec2 lo = a.cwiseMin(b).array() - radius;
  const Vec2 hi = a.cwiseMax(b).array() + radius;
  const int i0 = std::max(0, static_cast<int>(std::floor((lo.x() - origin_.x()) / cell_)));
  const int j0 = std::max(0, static_cast<int>(std::floor((lo.y() - origin_.y()) / cell_)));
  const int i1 = std::min(nx_ - 1, static_cast<int>(std::ceil((hi.x() - origin_.x()) / cell_)));
  const int j1 = std::min(ny_ - 1, static_cast<int>(std::ceil((hi.y() - origin_.y()) / cell_)));
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const Vec2 c = origin_ + cell_ * Vec2(i + 0.5, j + 0.5);
      if (segment_distance(c, a, b) <= radius) cells_[static_cast<std::size_t>(j) * nx_ + i] = 1;
    }
  }
}

void Raster::sweep_path(std::span<const Vec3> path, double radius) {
  if (path.empty()) return;
  if (path.size() == 1) sweep(path[0].head<2>(), path[0].head<2>(), radius);
  for (std::size_t n = 1; n < path.size(); ++n) sweep(path[n - 1].head<2>(), path[n].head<2>(), radius);
}

long Raster::count() const { return static_cast<long>(std::count(cells_.begin(), cells_.end(), 1)); }

long Raster::count_intersection(const Raster& other) const {
  require(nx_ == other.nx_ && ny_ == other.ny_, ErrorKind::kArgument, "raster: shape mismatch");
  long n = 0;
  for (std::size_t k = 0; k < cells_.size(); ++k) n += (cells_[k] && other.cells_[k]) ? 1 : 0;
  return n;
}

double coverage_ratio(const std::vector<std::vector<Vec3>>& actual, const std::vector<std::vector<Vec3>>& theoretical,
                      double footprint) {
  require(footprint > 0.0, ErrorKind::kArgument, "coverage_ratio: footprint must be > 0");
  double theory_len = 0.0;
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::max());
  Vec2 hi = Vec2::Constant(std::numeric_limits<double>::lowest());
  for (const auto* set : {&actual, &theoretical}) {
    for (const auto& path : *set) {
      for (const auto& p : path) {
        lo = lo.cwiseMin(p.head<2>());
        hi = hi.cwiseMax(p.head<2>());
      }
    }
  }
  for (const auto& path : theoretical) theory_len += path_length(path);
  require(theory_len > 0.0, ErrorKind::kValidation, "coverage_ratio: theoretical path has zero length");

  const double cell = footprint / 10.0;
  const Vec2 origin = lo.array() - footprint - cell;
  const int nx = static_cast<int>(std::ceil((hi.x() - origin.x() + footprint + cell) / cell));
  const int ny = static_cast<int>(std::ceil((hi.y() - origin.y() + footprint + cell) / cell));
  Raster covered(origin, cell, nx, ny);
  Raster expected(origin, cell, nx, ny);
  for (const auto& path : actual) covered.sweep_path(path, footprint);
  for (const auto& path : theoretical) expected.sweep_path(path, footprint);
  return static_cast<double>(covered.count_intersection(expected)) / static_cast<double>(expected.count());
}

MetricsReport compute_report(const MetricsInput& in) {
  const int n = static_cast<int>(in.agents.size());
  require(in.central_index >= 0 && in.central_index < n, ErrorKind::kValidation, "metrics: central index out of range");
  const auto& central = in.agents[in.central_index];
  MetricsReport report;
  std::vector<std::vector<Vec3>> actual;
  std::vector<std::vector<Vec3>> theoretical;
  for (int i = 0; i < n; ++i) {
    const auto& a = in.agents[i];
    AgentMetrics m;
    m.uav_id = a.uav_id;
    m.central = i == in.central_index;
    // Central agent: deviation from itself is zero by definition.
    if (!m.central) {
      m.formation = formation_deviation(a.actual, central.actual, (a.offset - central.offset).norm());
    }
    m.trajectory = trajectory_deviation(a.reference, a.replanned);
    m.path_length = path_length(a.actual);
    report.agents.push_back(m);

    actual.push_back(a.actual);
    std::vector<Vec3> line;
    for (const auto& w : in.waypoints) line.push_back(w + a.offset - central.offset);
    theoretical.push_back(std::move(line));
  }
  report.coverage_ratio = coverage_ratio(actual, theoretical, in.footprint);
  return report;
}

}  // namespace swarmnav::metrics
