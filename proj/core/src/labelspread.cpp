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
#include "usub/labelspread.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "usub/dataio.hpp"
#include "usub/error.hpp"

namespace usub {
namespace {

using Index = Eigen::Index;

Eigen::MatrixXd seed_matrix(std::span<const int> seed_labels, Index m, int num_classes) {
  if (num_classes < 1) throw DomainError("label spreading: num_classes must be >= 1");
  if (static_cast<Index>(seed_labels.size()) != m) {
    throw DomainError("label spreading: " + std::to_string(seed_labels.size()) +
                      " seed labels for " + std::to_string(m) + " points");
  }
  Eigen::MatrixXd y0 = Eigen::MatrixXd::Zero(m, num_classes);
  bool any = false;
  for (Index i = 0; i < m; ++i) {
    const int label = seed_labels[static_cast<std::size_t>(i)];
    if (label == kUnlabeled) continue;
    if (label < 0 || label >= num_classes) {
      throw DomainError("label spreading: seed label " + std::to_string(label) +
                        " outside [0, " + std::to_string(num_classes) + ")");
    }
    y0(i, label) = 1.0;
    any = true;
  }
  if (!any) throw DomainError("label spreading: no labeled samples");
  return y0;
}

Eigen::MatrixXd spreading_operator(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                   const SpreadConfig& config) {
  return normalized_affinity(rbf_affinity(points, config.gamma));
}

}  // namespace

void SpreadConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("spread: alpha must lie in (0, 1)");
  if (!(gamma > 0.0)) throw DomainError("spread: gamma must be positive");
  if (!(tol > 0.0)) throw DomainError("spread: tol must be positive");
  if (max_iter < 1) throw DomainError("spread: max_iter must be >= 1");
}

Eigen::MatrixXd rbf_affinity(const Eigen::Ref<const Eigen::MatrixXd>& points, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("rbf_affinity: gamma must be positive");
  const Index m = points.rows();
  if (m < 2) throw DomainError("rbf_affinity: need at least two points");
  Eigen::MatrixXd w(m, m);
  for (Index i = 0; i < m; ++i) {
    w(i, i) = 0.0;
    for (Index j = i + 1; j < m; ++j) {
      const double v = std::exp(-gamma * (points.row(i) - points.row(j)).squaredNorm());
      w(i, j) = v;
      w(j, i) = v;
    }
  }
  return w;
}

Eigen::MatrixXd normalized_affinity(const Eigen::Ref<const Eigen::MatrixXd>& affinity) {
  const Eigen::VectorXd degree = affinity.rowwise().sum();
  Eigen::VectorXd inv_sqrt(degree.size());
  for (Index i = 0; i < degree.size(); ++i) {
    inv_sqrt[i] = degree[i] > 0.0 ? 1.0 / std::sqrt(degree[i]) : 0.0;
  }
  return inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal();
}

std::vector<int> argmax_labels(const Eigen::Ref<const Eigen::MatrixXd>& scores) {
  std::vector<int> labels(static_cast<std::size_t>(scores.rows()), kUnlabeled);
  for (Index i = 0; i < scores.rows(); ++i) {
    Index arg = 0;
    const double best = scores.row(i).maxCoeff(&arg);
    if (!(best > 0.0)) continue;
    if ((scores.row(i).array() == best).count() > 1) continue;
    labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return labels;
}

namespace {

// Seeded rows keep their seed label; spreading only fills the rest.
std::vector<int> labels_with_seeds(const Eigen::MatrixXd& scores, std::span<const int> seeds) {
  std::vector<int> labels = argmax_labels(scores);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (seeds[i] != kUnlabeled) labels[i] = seeds[i];
  }
  return labels;
}

}  // namespace

SpreadResult spread_labels(const Eigen::Ref<const Eigen::MatrixXd>& points,
                           std::span<const int> seed_labels, int num_classes,
                           const SpreadConfig& config) {
  config.validate();
  const Eigen::MatrixXd y0 = seed_matrix(seed_labels, points.rows(), num_classes);
  const Eigen::MatrixXd s = spreading_operator(points, config);
  const Eigen::MatrixXd clamp = (1.0 - config.alpha) * y0;

  SpreadResult result;
  Eigen::MatrixXd f = y0;
  Eigen::MatrixXd next(f.rows(), f.cols());
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    next.noalias() = config.alpha * (s * f);
    next += clamp;
    const double change = (next - f).cwiseAbs().maxCoeff();
    f.swap(next);
    result.iterations = iter;
    if (change < config.tol) {
      result.converged = true;
      break;
    }
  }
  result.labels = labels_with_seeds(f, seed_labels);
  result.scores = std::move(f);
  return result;
}

SpreadResult spread_labels_closed_form(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                       std::span<const int> seed_labels, int num_classes,
                                       const SpreadConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(points.rows()) > kClosedFormMaxPoints) {
    throw DomainError("spread_labels_closed_form: " + std::to_string(points.rows()) +
                      " points exceed the dense-solve limit of " +
                      std::to_string(kClosedFormMaxPoints));
  }
  const Eigen::MatrixXd y0 = seed_matrix(seed_labels, points.rows(), num_classes);
  const Eigen::MatrixXd s = spreading_operator(points, config);
  const Index m = points.rows();
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(m, m) - config.alpha * s;

  SpreadResult result;
  result.scores = (1.0 - config.alpha) * system.partialPivLu().solve(y0);
  result.labels = labels_with_seeds(result.scores, seed_labels);
  result.converged = true;
  return result;
}

}  // namespace usub
