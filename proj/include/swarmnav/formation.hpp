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

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace swarmnav::formation {

// Complete graph over the agents, each edge weighted by the Euclidean
// distance between its endpoints. Agent correspondence is by index.
class FormationGraph {
 public:
  explicit FormationGraph(std::vector<Vec3> positions);

  const std::vector<Vec3>& positions() const { return positions_; }
  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::MatrixXd& laplacian() const { return laplacian_; }
  int size() const { return static_cast<int>(positions_.size()); }

 private:
  std::vector<Vec3> positions_;
  Eigen::MatrixXd weights_;
  Eigen::MatrixXd laplacian_;
};

Eigen::MatrixXd distance_weights(std::span<const Vec3> positions);

// I - D^{-1/2} W D^{-1/2}. Throws kArgument for fewer than two agents or for
// coincident agents.
Eigen::MatrixXd normalized_laplacian(std::span<const Vec3> positions);

// Squared Frobenius distance between the two normalized Laplacians.
double similarity(const FormationGraph& current, const FormationGraph& desired);
double similarity_trace(const FormationGraph& current, const FormationGraph& desired);

// Similarity between `positions` and the desired Laplacian, with the gradient
// of that value with respect to the position of agent `agent`.
struct SimilarityGrad {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
};
SimilarityGrad similarity_with_gradient(std::span<const Vec3> positions, const Eigen::MatrixXd& desired_laplacian,
                                        int agent);

}  // namespace swarmnav::formation
