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

#include "swarmnav/pctsp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

namespace swarmnav::pctsp {

PctspInstance build_instance(const ScenarioConfig& scenario, double cruise_speed, double service_time_default,
                             double alpha) {
  require(cruise_speed > 0.0, ErrorKind::kArgument, "build_instance: cruise speed must be > 0");
  PctspInstance inst;
  inst.alpha = alpha;
  inst.depot = 0;
  inst.max_duration = scenario.swarm.swarm_t_max;

  std::vector<Vec3> pos{scenario.home};
  std::vector<double> service{0.0};
  inst.nodes.push_back(Node{0, 0.0, scenario.swarm.swarm_t_max, 0.0, true});
  for (const auto& p : scenario.pois) {
    Node n;
    n.id = p.id;
    n.tw_open = p.tw_open;
    n.tw_close = p.tw_close;
    n.prize = p.prize;
    if (!p.required_sensor.empty()) {
      n.eligible = std::any_of(scenario.swarm.agents.begin(), scenario.swarm.agents.end(), [&](const auto& a) {
        return std::find(a.payload_sensors.begin(), a.payload_sensors.end(), p.required_sensor) !=
               a.payload_sensors.end();
      });
    }
    inst.nodes.push_back(n);
    pos.push_back(p.position);
    service.push_back(p.service_time > 0.0 ? p.service_time : service_time_default);
  }

  const int n = inst.size();
  inst.cost = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double travel = (pos[i] - pos[j]).norm() / cruise_speed;
      const double cij = travel + service[j];
      const double cji = travel + service[i];
      inst.asymmetry = std::max(inst.asymmetry, std::abs(cij - cji));
      inst.cost(i, j) = inst.cost(j, i) = 0.5 * (cij + cji);
    }
  }
  return inst;
}

TourValue evaluate(const PctspInstance& inst, const std::vector<int>& visit_order) {
  TourValue v;
  std::vector<int> visited;
  for (std::size_t k = 1; k + 1 < visit_order.size(); ++k) visited.push_back(visit_order[k]);
  std::sort(visited.begin(), visited.end());
  for (int i : visited) v.prize += inst.nodes[i].prize;
  for (std::size_t k = 0; k + 1 < visit_order.size(); ++k) v.cost += inst.cost(visit_order[k], visit_order[k + 1]);
  v.objective = v.prize - inst.alpha * v.cost;
  return v;
}

bool complete_tour(const PctspInstance& inst, Tour& tour) {
  const auto& order = tour.visit_order;
  tour.arrival_times.assign(order.size(), 0.0);
  bool ok = order.size() >= 2 && order.front() == inst.depot && order.back() == inst.depot;
  double t = std::max(0.0, inst.nodes[inst.depot].tw_open);
  if (!order.empty()) tour.arrival_times[0] = t;
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& node = inst.nodes[order[k]];
    t += inst.cost(order[k - 1], order[k]);
    if (k + 1 < order.size()) {
      t = std::max(t, node.tw_open);
      if (t > node.tw_close || !node.eligible) ok = false;
    } else if (t > node.tw_close || t > inst.max_duration) {
      ok = false;
    }
    tour.arrival_times[k] = t;
  }
  const TourValue v = evaluate(inst, order);
  tour.collected_prize = v.prize;
  tour.travel_cost = v.cost;
  tour.objective = v.objective;
  tour.skipped.clear();
  std::vector<bool> seen(inst.nodes.size(), false);
  for (int i : order) seen[i] = true;
  for (int i = 0; i < inst.size(); ++i) {
    if (i != inst.depot && !seen[i]) tour.skipped.push_back(i);
  }
  return ok;
}

// ---------------------------------------------------------------------------
// Exact search

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const PctspInstance& inst, const ExactOptions& opts)
      : inst_(inst), opts_(opts), n_(inst.size()), start_(std::chrono::steady_clock::now()) {
    min_in_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n_; ++i) {
        if (i != j) m = std::min(m, inst.cost(i, j));
      }
      min_in_[j] = std::isfinite(m) ? m : 0.0;
    }
  }

  Tour run() {
    path_.push_back(inst_.depot);
    const double t0 = std::max(0.0, inst_.nodes[inst_.depot].tw_open);
    best_order_ = {inst_.depot, inst_.depot};
    best_obj_ = -std::numeric_limits<double>::infinity();
    search(inst_.depot, t0, 0.0, std::uint64_t{1} << inst_.depot, 0.0);

    Tour tour;
    tour.visit_order = best_order_;
    complete_tour(inst_, tour);
    tour.optimal = !aborted_;
    return tour;
  }

 private:
  bool out_of_budget() {
    if (aborted_) return true;
    ++expanded_;
    if (opts_.node_limit > 0 && expanded_ > opts_.node_limit) aborted_ = true;
    if ((expanded_ & 1023u) == 0) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (elapsed > opts_.deadline) aborted_ = true;
    }
    return aborted_;
  }

  double prize_of(std::uint64_t mask) const {
    double p = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (i != inst_.depot && (mask >> i & 1u)) p += inst_.nodes[i].prize;
    }
    return p;
  }

  // True when an earlier label at (mask, last) is at least as good.
  bool dominated(std::uint64_t mask, int last, double time, double cost) {
    auto& labels = labels_[mask * static_cast<std::uint64_t>(n_) + static_cast<std::uint64_t>(last)];
    for (const auto& [t, c] : labels) {
      if (t <= time && c <= cost) return true;
    }
    std::erase_if(labels, [&](const auto& l) { return l.first >= time && l.second >= cost; });
    labels.emplace_back(time, cost);
    return false;
  }

  void search(int cur, double time, double cost, std::uint64_t mask, double prize_so_far) {
    if (out_of_budget()) return;
    const auto& depot = inst_.nodes[inst_.depot];

    // Close the tour here.
    if (path_.size() == 1 || cur != inst_.depot) {
      const double leg = (path_.size() == 1) ? 0.0 : inst_.cost(cur, inst_.depot);
      const double end = time + leg;
      if (end <= depot.tw_close && end <= inst_.max_duration) {
        const double obj = prize_of(mask) - inst_.alpha * (cost + leg);
        if (obj > best_obj_) {
          best_obj_ = obj;
          best_order_ = path_;
          best_order_.push_back(inst_.depot);
        }
      }
    }

    // Upper bound on any completion of this prefix.
    double optimistic = prize_so_far - inst_.alpha * cost;
    if (path_.size() > 1) optimistic -= inst_.alpha * min_in_[inst_.depot];
    for (int j = 0; j < n_; ++j) {
      if (j == inst_.depot || (mask >> j & 1u) || !inst_.nodes[j].eligible) continue;
      if (time + min_in_[j] > inst_.nodes[j].tw_close) continue;
      optimistic += std::max(0.0, inst_.nodes[j].prize - inst_.alpha * min_in_[j]);
    }
    if (optimistic < best_obj_ - 1e-9 * (1.0 + std::abs(best_obj_))) return;

    for (int j = 0; j < n_; ++j) {
      if (j == inst_.depot || (mask >> j & 1u) || !inst_.nodes[j].eligible) continue;
      const auto& node = inst_.nodes[j];
      const double arrive = std::max(node.tw_open, time + inst_.cost(cur, j));
      if (arrive > node.tw_close || arrive > inst_.max_duration) continue;
      const double next_cost = cost + inst_.cost(cur, j);
      const std::uint64_t next_mask = mask | (std::uint64_t{1} << j);
      if (dominated(next_mask, j, arrive, next_cost)) continue;
      path_.push_back(j);
      search(j, arrive, next_cost, next_mask, prize_so_far + node.prize);
      path_.pop_back();
      if (aborted_) return;
    }
  }

  const PctspInstance& inst_;
  ExactOptions opts_;
  int n_;
  std::chrono::steady_clock::time_point start_;
  std::vector<double> min_in_;
  std::vector<int> path_;
  std::vector<int> best_order_;
  double best_obj_ = 0.0;
  std::uint64_t expanded_ = 0;
  bool aborted_ = false;
  std::unordered_map<std::uint64_t, std::vector<std::pair<double, double>>> labels_;
};

}  // namespace

Tour solve_exact(const PctspInstance& inst, const ExactOptions& opts) {
  require(inst.size() >= 1, ErrorKind::kArgument, "solve_exact: instance has no depot");
  require(inst.size() <= 63, ErrorKind::kArgument, "solve_exact: at most 62 POIs supported");
  require(inst.cost.rows() == inst.size() && inst.cost.cols() == inst.size(), ErrorKind::kArgument,
          "solve_exact: cost matrix size mismatch");
  return BranchAndBound(inst, opts).run();
}

// ---------------------------------------------------------------------------
// Heuristic

namespace {

struct Candidate {
  bool feasible = false;
  double objective = 0.0;
};

Candidate score(const PctspInstance& inst, const std::vector<int>& order) {
  Tour t;
  t.visit_order = order;
  Candidate c;
  c.feasible = complete_tour(inst, t);
  c.objective = t.objective;
  return c;
}

bool improves(double candidate, double current) { return candidate > current + 1e-12 * (1.0 + std::abs(current)); }

}  // namespace

Tour solve_heuristic(const PctspInstance& inst) {
  const int n = inst.size();
  std::vector<int> order{inst.depot, inst.depot};
  double current = score(inst, order).objective;
  std::vector<bool> in_tour(n, false);
  in_tour[inst.depot] = true;

  // Greedy insertion by prize per added cost.
  for (;;) {
    int best_node = -1;
    std::size_t best_pos = 0;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (in_tour[j] || !inst.nodes[j].eligible) continue;
      for (std::size_t pos = 1; pos < order.size(); ++pos) {
        const double added = inst.cost(order[pos - 1], j) + inst.cost(j, order[pos]) -
                             inst.cost(order[pos - 1], order[pos]);
        if (inst.nodes[j].prize - inst.alpha * added <= 0.0) continue;
        const double ratio = inst.nodes[j].prize / std::max(added, 1e-9);
        if (ratio <= best_ratio) continue;
        std::vector<int> trial = order;
        trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), j);
        if (!score(inst, trial).feasible) continue;
        best_ratio = ratio;
        best_node = j;
        best_pos = pos;
      }
    }
    if (best_node < 0) break;
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(best_pos), best_node);
    in_tour[best_node] = true;
    current = score(inst, order).objective;
  }

  // Local search: 2-opt, drop, insert until no move improves.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 1; i + 2 < order.size() && !changed; ++i) {
      for (std::size_t k = i + 1; k + 1 < order.size(); ++k) {
        std::vector<int> trial = order;
        std::reverse(trial.begin() + static_cast<std::ptrdiff_t>(i), trial.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        const auto c = score(inst, trial);
        if (c.feasible && improves(c.objective, current)) {
          order = std::move(trial);
          current = c.objective;
          changed = true;
          break;
        }
      }
    }
    for (std::size_t i = 1; i + 1 < order.size() && !changed; ++i) {
      std::vector<int> trial = order;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      const auto c = score(inst, trial);
      if (c.feasible && improves(c.objective, current)) {
        in_tour[order[i]] = false;
        order = std::move(trial);
        current = c.objective;
        changed = true;
      }
    }
    for (int j = 0; j < n && !changed; ++j) {
      if (in_tour[j] || !inst.nodes[j].eligible) continue;
      for (std::size_t pos = 1; pos < order.size(); ++pos) {
        std::vector<int> trial = order;
        trial.insert(trial.begin() + static_cast<std::ptrdiff_t>(pos), j);
        const auto c = score(inst, trial);
        if (c.feasible && improves(c.objective, current)) {
          order = std::move(trial);
          in_tour[j] = true;
          current = c.objective;
          changed = true;
          break;
        }
      }
    }
  }

  Tour tour;
  tour.visit_order = order;
  complete_tour(inst, tour);
  tour.optimal = false;
  return tour;
}

// ---------------------------------------------------------------------------

Validation validate_tour(const PctspInstance& inst, const Tour& tour) {
  auto bad = [](std::string msg) { return Validation{false, std::move(msg)}; };
  const auto& order = tour.visit_order;
  if (order.size() < 2 || order.front() != inst.depot || order.back() != inst.depot) {
    return bad("tour must start and end at the depot");
  }
  if (tour.arrival_times.size() != order.size()) return bad("arrival_times length does not match visit_order");
  std::vector<bool> seen(inst.nodes.size(), false);
  double t = std::max(0.0, inst.nodes[inst.depot].tw_open);
  for (std::size_t k = 1; k < order.size(); ++k) {
    const int j = order[k];
    if (j < 0 || j >= inst.size()) return bad("node index out of range");
    const auto& node = inst.nodes[j];
    const std::string who = "POI " + std::to_string(node.id);
    t += inst.cost(order[k - 1], j);
    if (k + 1 < order.size()) {
      if (j == inst.depot) return bad("depot visited mid-tour");
      if (seen[j]) return bad(who + " visited twice");
      seen[j] = true;
      if (!node.eligible) return bad(who + " is not eligible for this swarm");
      t = std::max(t, node.tw_open);
      if (t > node.tw_close) return bad(who + " reached after its window closes");
    } else if (t > node.tw_close || t > inst.max_duration) {
      return bad("return to depot exceeds the available flight time");
    }
    if (std::abs(t - tour.arrival_times[k]) > 1e-9 * (1.0 + std::abs(t))) {
      return bad(who + " arrival time mismatch");
    }
  }
  const TourValue v = evaluate(inst, order);
  if (std::abs(v.cost - tour.travel_cost) > 1e-9 * (1.0 + v.cost)) return bad("travel cost mismatch");
  if (std::abs(v.prize - tour.collected_prize) > 1e-9 * (1.0 + v.prize)) return bad("collected prize mismatch");
  return {};
}

Tour solve_enumerate(const PctspInstance& inst) {
  const int n = inst.size();
  require(n <= 12, ErrorKind::kArgument, "solve_enumerate: instance too large (" + std::to_string(n) + " nodes)");
  Tour best;
  best.visit_order = {inst.depot, inst.depot};
  complete_tour(inst, best);
  std::vector<int> order{inst.depot};
  std::vector<bool> used(n, false);
  used[inst.depot] = true;
  Tour probe;
  auto visit = [&](auto&& self, double t) -> void {
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      const auto& node = inst.nodes[j];
      const double arrival = std::max(t + inst.cost(order.back(), j), node.tw_open);
      if (arrival > node.tw_close || !node.eligible) continue;
      order.push_back(j);
      probe.visit_order = order;
      probe.visit_order.push_back(inst.depot);
      if (complete_tour(inst, probe) &&
          (probe.objective > best.objective ||
           (probe.objective == best.objective && probe.visit_order < best.visit_order))) {
        best = probe;
      }
      used[j] = true;
      self(self, arrival);
      used[j] = false;
      order.pop_back();
    }
  };
  visit(visit, std::max(0.0, inst.nodes[inst.depot].tw_open));
  best.optimal = true;
  return best;
}

}  // namespace swarmnav::pctsp
