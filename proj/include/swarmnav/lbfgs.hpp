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

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace swarmnav::lbfgs {

struct Params {
  int memory = 8;
  int max_iterations = 100;
  double grad_tol = 1e-4;
  double rel_cost_tol = 1e-6;
  double armijo = 1e-4;
  int max_backtracks = 40;
};

enum class Stop { kGradient, kCostChange, kMaxIterations, kLineSearch };

struct Result {
  Eigen::VectorXd x;
  double cost = 0.0;
  int iterations = 0;
  Stop stop = Stop::kMaxIterations;
  bool converged() const { return stop == Stop::kGradient || stop == Stop::kCostChange; }
};

// Limited-memory BFGS with backtracking Armijo line search. `fn(x, grad)`
// returns the cost at x and writes its gradient. The returned point is the
// best iterate seen, so its cost never exceeds the cost at x0.
template <typename Fn>
Result minimize(Fn&& fn, Eigen::VectorXd x0, const Params& p = {}) {
  const auto n = x0.size();
  Result r;
  r.x = std::move(x0);
  Eigen::VectorXd g(n);
  r.cost = fn(r.x, g);
  if (n == 0 || g.norm() < p.grad_tol) {
    r.stop = Stop::kGradient;
    return r;
  }

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  Eigen::VectorXd x_new(n), g_new(n), d(n);

  for (r.iterations = 0; r.iterations < p.max_iterations;) {
    // Two-loop recursion.
    d = -g;
    std::vector<double> alpha(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(d);
      d -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(d);
      d += (alpha[i] - beta) * s_hist[i];
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
    }

    double step = s_hist.empty() ? std::min(1.0, 1.0 / d.lpNorm<Eigen::Infinity>()) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int k = 0; k < p.max_backtracks; ++k) {
      x_new = r.x + step * d;
      f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= r.cost + p.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++r.iterations;
    if (!accepted) {
      r.stop = Stop::kLineSearch;
      return r;
    }

    const Eigen::VectorXd s = x_new - r.x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > p.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }

    const double f_old = r.cost;
    r.x = x_new;
    g = g_new;
    r.cost = f_new;
    if (g.norm() < p.grad_tol) {
      r.stop = Stop::kGradient;
      return r;
    }
    if (std::abs(f_old - f_new) <= p.rel_cost_tol * std::max(1.0, std::abs(f_old))) {
      r.stop = Stop::kCostChange;
      return r;
    }
  }
  r.stop = Stop::kMaxIterations;
  return r;
}

}  // namespace swarmnav::lbfgs
