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
#include "swarmnav/scenario.hpp"

#include <array>
#include <ostream>
#include <span>
#include <vector>

namespace swarmnav::esdf {

// Exact unsigned distance from `p` to the surface of a vertical cylinder
// standing on z = 0; zero inside.
double cylinder_distance(const Obstacle& o, const Vec3& p);

struct Query {
  double distance = 0.0;
  Vec3 gradient = Vec3::Zero();
  bool in_bounds = false;
};

// Truncated distance field sampled at voxel centres. Voxel (i, j, k) is
// centred at origin + resolution * (i, j, k).
class EsdfGrid {
 public:
  EsdfGrid() = default;
  EsdfGrid(const Vec3& origin, double resolution, std::array<int, 3> dims, double d_max, double window_extent);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const std::array<int, 3>& dims() const { return dims_; }
  double d_max() const { return d_max_; }
  double window_extent() const { return window_extent_; }
  std::size_t size() const { return distances_.size(); }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * dims_[1] + j) * dims_[0] + i;
  }
  Vec3 center(int i, int j, int k) const { return origin_ + resolution_ * Vec3(i, j, k); }
  double at(int i, int j, int k) const { return distances_[index(i, j, k)]; }
  double& at(int i, int j, int k) { return distances_[index(i, j, k)]; }
  std::span<const double> distances() const { return distances_; }

  // Trilinear interpolation of voxel values and its analytic gradient. Points
  // whose interpolation cell leaves the grid report d_max, zero gradient and
  // in_bounds = false.
  Query query(const Vec3& p) const;

  // CSV slice (x, y, d) through the voxel layer closest to height z.
  void dump_slice(std::ostream& out, double z) const;

 private:
  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 1.0;
  std::array<int, 3> dims_{0, 0, 0};
  double d_max_ = 0.0;
  double window_extent_ = 0.0;
  std::vector<double> distances_;
};

// Builds the window around `agent_position` by direct evaluation against the
// cylinders in range.
EsdfGrid build_local_esdf(std::span<const Obstacle> obstacles, const Vec3& agent_position, const EsdfConfig& cfg);

}  // namespace swarmnav::esdf
