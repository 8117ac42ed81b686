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

#include "swarmnav/esdf_map.hpp"

#include <algorithm>
#include <cmath>

namespace swarmnav::esdf {

double cylinder_distance(const Obstacle& o, const Vec3& p) {
  const double radial = std::max((p.head<2>() - o.center).norm() - o.radius, 0.0);
  const double vertical = std::max({p.z() - o.height, -p.z(), 0.0});
  return std::hypot(radial, vertical);
}

EsdfGrid::EsdfGrid(const Vec3& origin, double resolution, std::array<int, 3> dims, double d_max,
                   double window_extent)
    : origin_(origin), resolution_(resolution), dims_(dims), d_max_(d_max), window_extent_(window_extent) {
  require(resolution > 0.0, ErrorKind::kArgument, "esdf: resolution must be > 0");
  require(dims[0] > 0 && dims[1] > 0 && dims[2] > 0, ErrorKind::kArgument, "esdf: empty grid");
  distances_.assign(static_cast<std::size_t>(dims[0]) * dims[1] * dims[2], d_max);
}

Query EsdfGrid::query(const Vec3& p) const {
  Query q;
  q.distance = d_max_;
  Vec3 g = (p - origin_) / resolution_;
  for (int a = 0; a < 3; ++a) {
    // Voxel centres reconstructed in floating point land a few ulps off the lattice.
    const double r = std::round(g[a]);
    if (std::abs(g[a] - r) < 1e-9) g[a] = r;
  }
  int base[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    const double fl = std::floor(g[a]);
    if (!(fl >= 0.0) || fl + 1.0 > dims_[a] - 1) return q;
    base[a] = static_cast<int>(fl);
    frac[a] = g[a] - fl;
  }
  const int i = base[0], j = base[1], k = base[2];
  const double fx = frac[0], fy = frac[1], fz = frac[2];

  const double c000 = at(i, j, k), c100 = at(i + 1, j, k);
  const double c010 = at(i, j + 1, k), c110 = at(i + 1, j + 1, k);
  const double c001 = at(i, j, k + 1), c101 = at(i + 1, j, k + 1);
  const double c011 = at(i, j + 1, k + 1), c111 = at(i + 1, j + 1, k + 1);

  // Interpolate along x, then y, then z.
  const double c00 = c000 + fx * (c100 - c000);
  const double c10 = c010 + fx * (c110 - c010);
  const double c01 = c001 + fx * (c101 - c001);
  const double c11 = c011 + fx * (c111 - c011);
  const double c0 = c00 + fy * (c10 - c00);
  const double c1 = c01 + fy * (c11 - c01);
  q.distance = c0 + fz * (c1 - c0);

  const double dx0 = (1 - fy) * (c100 - c000) + fy * (c110 - c010);
  const double dx1 = (1 - fy) * (c101 - c001) + fy * (c111 - c011);
  q.gradient.x() = ((1 - fz) * dx0 + fz * dx1) / resolution_;
  q.gradient.y() = ((1 - fz) * (c10 - c00) + fz * (c11 - c01)) / resolution_;
  q.gradient.z() = (c1 - c0) / resolution_;
  q.in_bounds = true;
  return q;
}

void EsdfGrid::dump_slice(std::ostream& out, double z) const {
  int k = static_cast<int>(std::lround((z - origin_.z()) / resolution_));
  k = std::clamp(k, 0, dims_[2] - 1);
  out << "x,y,d\n";
  for (int j = 0; j < dims_[1]; ++j) {
    for (int i = 0; i < dims_[0]; ++i) {
      const Vec3 c = center(i, j, k);
      out << c.x() << ',' << c.y() << ',' << at(i, j, k) << '\n';
    }
  }
}

EsdfGrid build_local_esdf(std::span<const Obstacle> obstacles, const Vec3& agent_position, const EsdfConfig& cfg) {
  require(cfg.resolution > 0.0 && cfg.window_extent > 0.0 && cfg.window_height > 0.0, ErrorKind::kArgument,
          "build_local_esdf: resolution and window must be > 0");
  const double res = cfg.resolution;
  const Vec3 half(cfg.window_extent, cfg.window_extent, cfg.window_height);
  // Snap to the global lattice so windows of different agents agree.
  const Vec3 lo = ((agent_position - half) / res).array().floor() * res;
  const Vec3 hi = ((agent_position + half) / res).array().ceil() * res;
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) dims[a] = static_cast<int>(std::lround((hi[a] - lo[a]) / res)) + 1;
  EsdfGrid grid(lo, res, dims, cfg.d_max, cfg.window_extent);

  std::vector<double> vertical(dims[2]);
  for (const auto& o : obstacles) {
    const double reach = o.radius + cfg.d_max;
    const int i0 = std::max(0, static_cast<int>(std::floor((o.center.x() - reach - lo.x()) / res)));
    const int i1 = std::min(dims[0] - 1, static_cast<int>(std::ceil((o.center.x() + reach - lo.x()) / res)));
    const int j0 = std::max(0, static_cast<int>(std::floor((o.center.y() - reach - lo.y()) / res)));
    const int j1 = std::min(dims[1] - 1, static_cast<int>(std::ceil((o.center.y() + reach - lo.y()) / res)));
    if (i0 > i1 || j0 > j1) continue;
    for (int k = 0; k < dims[2]; ++k) {
      const double z = lo.z() + res * k;
      vertical[k] = std::max({z - o.height, -z, 0.0});
    }
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const Vec2 c(lo.x() + res * i, lo.y() + res * j);
        const double radial = std::max((c - o.center).norm() - o.radius, 0.0);
        if (radial >= cfg.d_max) continue;
        for (int k = 0; k < dims[2]; ++k) {
          const double d = std::min(std::hypot(radial, vertical[k]), cfg.d_max);
          double& cell = grid.at(i, j, k);
          if (d < cell) cell = d;
        }
      }
    }
  }
  return grid;
}

}  // namespace swarmnav::esdf
