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

#include <span>
#include <vector>

namespace swarmnav::metrics {

struct Deviation {
  double mean = 0.0;
  double max = 0.0;
  // Mean as a percentage of the nominal distance (formation deviation only).
  double mean_pct = 0.0;
};

// e_n = | |p_n - c_n| - d0 | over paired samples of an agent and the central
// agent.
Deviation formation_deviation(std::span<const Vec3> agent, std::span<const Vec3> central, double d0);

// |g_n - r_n| over paired samples of the reference and replanned paths.
Deviation trajectory_deviation(std::span<const Vec3> reference, std::span<const Vec3> replanned);

double path_length(std::span<const Vec3> path);

// Occupancy raster in the horizontal plane. Cell (i, j) is centred at
// origin + cell * (i + 0.5, j + 0.5).
class Raster {
 public:
  Raster(const Vec2& origin, double cell, int nx, int ny);

  // Marks every cell whose centre lies within `radius` of the segment a-b.
  void sweep(const Vec2& a, const Vec2& b, double radius);
  void sweep_path(std::span<const Vec3> path, double radius);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell() const { return cell_; }
  bool covered(int i, int j) const { return cells_[static_cast<std::size_t>(j) * nx_ + i] != 0; }
  long count() const;
  long count_intersection(const Raster& other) const;

 private:
  Vec2 origin_;
  double cell_;
  int nx_;
  int ny_;
  std::vector<unsigned char> cells_;
};

// |actual swath ∩ theoretical swath| / |theoretical swath|, swaths being the
// union over agents of discs of radius `footprint` swept along each path,
// rasterized with cell size footprint / 10.
double coverage_ratio(const std::vector<std::vector<Vec3>>& actual, const std::vector<std::vector<Vec3>>& theoretical,
                      double footprint);

struct AgentMetrics {
  int uav_id = 0;
  bool central = false;
  Deviation formation;
  Deviation trajectory;
  double path_length = 0.0;
};

struct MetricsReport {
  std::vector<AgentMetrics> agents;
  double coverage_ratio = 0.0;
};

// Per-agent sample tracks at common timestamps.
struct AgentTrack {
  int uav_id = 0;
  Vec3 offset = Vec3::Zero();
  std::vector<Vec3> actual;
  std::vector<Vec3> reference;
  std::vector<Vec3> replanned;
};

struct MetricsInput {
  std::vector<AgentTrack> agents;
  int central_index = 0;
  // Straight-line path through the tour waypoints, followed by the central
  // agent; followers fly it shifted by their offset.
  std::vector<Vec3> waypoints;
  double footprint = 2.5;
};

MetricsReport compute_report(const MetricsInput& input);

}  // namespace swarmnav::metrics
