// Copyright 2026 The usub Authors
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
#ifndef USUB_LABELSPREAD_HPP_
#define USUB_LABELSPREAD_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace usub {

struct SpreadConfig {
  double alpha = 0.01;  // weight of the propagated term; 1 - alpha clamps to seeds
  double gamma = 20.0;  // RBF width
  double tol = 1e-6;
  int max_iter = 1000;

  void validate() const;
};

struct SpreadResult {
  Eigen::MatrixXd scores;   // m x C
  std::vector<int> labels;  // seed label if seeded, else argmax; kUnlabeled on ties / zero rows
  int iterations = 0;
  bool converged = false;
};

inline constexpr std::size_t kClosedFormMaxPoints = 2000;

// W_ij = exp(-gamma |x_i - x_j|^2) off the diagonal, 0 on it.
Eigen::MatrixXd rbf_affinity(const Eigen::Ref<const Eigen::MatrixXd>& points,
                             double gamma);

// D^-1/2 W D^-1/2 with zero-degree vertices given a zero scaling.
Eigen::MatrixXd normalized_affinity(const Eigen::Ref<const Eigen::MatrixXd>& affinity);

// Row argmax with the sentinel rule: kUnlabeled if the maximum is attained
// more than once or the row is all zeros.
std::vector<int> argmax_labels(const Eigen::Ref<const Eigen::MatrixXd>& scores);

// Iterates F <- alpha S F + (1 - alpha) Y0 from F = Y0 until the largest
// elementwise change drops below config.tol.
SpreadResult spread_labels(const Eigen::Ref<const Eigen::MatrixXd>& points,
                           std::span<const int> seed_labels, int num_classes,
                           const SpreadConfig& config = {});

// F* = (1 - alpha) (I - alpha S)^-1 Y0 by dense LU. Limited to
// kClosedFormMaxPoints points.
SpreadResult spread_labels_closed_form(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                       std::span<const int> seed_labels,
                                       int num_classes,
                                       const SpreadConfig& config = {});

}  // namespace usub

#endif  // USUB_LABELSPREAD_HPP_
