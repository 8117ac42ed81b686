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

#include "swarmnav/formation.hpp"

#include <cmath>

namespace swarmnav::formation {

namespace {

constexpr double kCoincident = 1e-12;

}  // namespace

Eigen::MatrixXd distance_weights(std::span<const Vec3> positions) {
  const auto n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      w(i, j) = w(j, i) = (positions[i] - positions[j]).norm();
    }
  }
  return w;
}

Eigen::MatrixXd normalized_laplacian(std::span<const Vec3> positions) {
  require(positions.size() >= 2, ErrorKind::kArgument, "normalized_laplacian: need at least two agents");
  const Eigen::MatrixXd w = distance_weights(positions);
  const auto n = w.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (w(i, j) < kCoincident) {
        fail(ErrorKind::kArgument, "normalized_laplacian: agents " + std::to_string(i) + " and " +
                                       std::to_string(j) + " coincide");
      }
    }
  }
  const Eigen::VectorXd inv_sqrt_deg = w.rowwise().sum().array().rsqrt();
  Eigen::MatrixXd l = -(inv_sqrt_deg.asDiagonal() * w * inv_sqrt_deg.asDiagonal());
  l.diagonal().setOnes();
  return l;
}

FormationGraph::FormationGraph(std::vector<Vec3> positions)
    : positions_(std::move(positions)),
      weights_(distance_weights(positions_)),
      laplacian_(normalized_laplacian(positions_)) {}

double similarity(const FormationGraph& current, const FormationGraph& desired) {
  require(current.size() == desired.size(), ErrorKind::kArgument, "similarity: agent count mismatch");
  return (current.laplacian() - desired.laplacian()).squaredNorm();
}

double similarity_trace(const FormationGraph& current, const FormationGraph& desired) {
  require(current.size() == desired.size(), ErrorKind::kArgument, "similarity: agent count mismatch");
  const Eigen::MatrixXd e = current.laplacian() - desired.laplacian();
  return (e.transpose() * e).trace();
}

SimilarityGrad similarity_with_gradient(std::span<const Vec3> positions, const Eigen::MatrixXd& desired_laplacian,
                                        int agent) {
  const int n = static_cast<int>(positions.size());
  require(desired_laplacian.rows() == n && desired_laplacian.cols() == n, ErrorKind::kArgument,
          "similarity: agent count mismatch");
  const Eigen::MatrixXd l = normalized_laplacian(positions);
  const Eigen::MatrixXd w = distance_weights(positions);
  const Eigen::VectorXd deg = w.rowwise().sum();
  const Eigen::MatrixXd e = l - desired_laplacian;

  SimilarityGrad out;
  out.value = e.squaredNorm();

  // d W_{a,j} / d p_a for every j, and d deg_i / d p_a for every i.
  std::vector<Vec3> unit(n, Vec3::Zero());
  std::vector<Vec3> ddeg(n, Vec3::Zero());
  for (int j = 0; j < n; ++j) {
    if (j == agent) continue;
    unit[j] = (positions[agent] - positions[j]) / w(agent, j);
    ddeg[agent] += unit[j];
    ddeg[j] = unit[j];
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Vec3 dl = -0.5 * l(i, j) * (ddeg[i] / deg(i) + ddeg[j] / deg(j));
      if (i == agent) dl -= unit[j] / std::sqrt(deg(i) * deg(j));
      if (j == agent) dl -= unit[i] / std::sqrt(deg(i) * deg(j));
      out.gradient += 2.0 * e(i, j) * dl;
    }
  }
  return out;
}

}  // namespace swarmnav::formation
