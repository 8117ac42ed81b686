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
#include "swarmnav/scenario.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace swarmnav::pctsp {

// One node of the instance. Node 0 is conventionally the depot (home).
struct Node {
  int id = 0;
  double tw_open = 0.0;
  double tw_close = std::numeric_limits<double>::max();
  double prize = 0.0;
  // False when no agent of the swarm carries the sensor the POI needs.
  bool eligible = true;
};

// Prize-collecting TSP with time windows. Costs are travel times in seconds
// and already include the service duration.
struct PctspInstance {
  std::vector<Node> nodes;
  int depot = 0;
  Eigen::MatrixXd cost;
  double alpha = 0.01;
  // Upper bound on the tour's completion time (return to depot).
  double max_duration = std::numeric_limits<double>::max();
  // Largest |c_ij - c_ji| before symmetrization.
  double asymmetry = 0.0;

  int size() const { return static_cast<int>(nodes.size()); }
};

struct Tour {
  // Node indices, starting and ending at the depot.
  std::vector<int> visit_order;
  // Service start time per entry of visit_order (depot entries included).
  std::vector<double> arrival_times;
  double collected_prize = 0.0;
  double travel_cost = 0.0;
  double objective = 0.0;
  std::vector<int> skipped;
  bool optimal = false;
};

// c_ij = |pos_i - pos_j| / cruise_speed + service_j, symmetrized by averaging.
// Node 0 is the home position with prize 0.
PctspInstance build_instance(const ScenarioConfig& scenario, double cruise_speed, double service_time_default,
                             double alpha);

// Canonical objective evaluation: prizes summed in ascending node index,
// travel cost summed along the tour, objective = prize - alpha * cost. Every
// solver and checker reports objectives through this routine so equal tours
// compare bit-identically.
struct TourValue {
  double prize = 0.0;
  double cost = 0.0;
  double objective = 0.0;
};
TourValue evaluate(const PctspInstance& inst, const std::vector<int>& visit_order);

// Fills arrival times, prize, cost, objective and skipped list from
// visit_order. Returns false when a window or the duration cap is violated.
bool complete_tour(const PctspInstance& inst, Tour& tour);

struct ExactOptions {
  double deadline = 30.0;
  // Stops after this many search nodes when > 0 (deterministic budget).
  std::uint64_t node_limit = 0;
};

// Depth-first branch and bound over visit sequences with dominance pruning on
// (visited set, last node, time, cost) labels. Among optimal tours the
// lexicographically smallest visit order is returned.
Tour solve_exact(const PctspInstance& inst, const ExactOptions& opts = {});

// Exhaustive search over every feasible visit sequence (at most 12 nodes).
Tour solve_enumerate(const PctspInstance& inst);

// Greedy prize-per-cost insertion, then 2-opt and skip/unskip moves.
Tour solve_heuristic(const PctspInstance& inst);

struct Validation {
  bool ok = true;
  std::string message;
};
Validation validate_tour(const PctspInstance& inst, const Tour& tour);

// Two-table text format: table 1 holds "id tw_open tw_close prize" per node,
// table 2 the symmetric cost matrix. See docs/pctsp_format.md.
PctspInstance read_instance(std::istream& in);
PctspInstance load_instance(const std::string& path);
void write_instance(std::ostream& out, const PctspInstance& inst);
void save_instance(const PctspInstance& inst, const std::string& path);

void write_tour(std::ostream& out, const PctspInstance& inst, const Tour& tour);

}  // namespace swarmnav::pctsp
