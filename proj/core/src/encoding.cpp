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
#include "usub/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "usub/error.hpp"

namespace usub {

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (u.size() != v.size()) {
    throw DomainError("cosine_similarity: length mismatch");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw DomainError("cosine_similarity: zero-norm vector");
  }
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

double nt_xent_loss(const Eigen::Ref<const Eigen::MatrixXd>& batch,
                    double temperature) {
  if (!(temperature > 0.0)) {
    throw DomainError("nt_xent_loss: temperature must be positive");
  }
  const Eigen::Index rows = batch.rows();
  if (rows < 2 || rows % 2 != 0) {
    throw DomainError("nt_xent_loss: batch needs an even, non-zero row count");
  }
  if (!batch.allFinite()) {
    throw DomainError("nt_xent_loss: non-finite latent entry");
  }

  Eigen::MatrixXd unit(rows, batch.cols());
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double norm = batch.row(i).norm();
    if (!(norm > 0.0)) throw DomainError("nt_xent_loss: zero-norm latent vector");
    unit.row(i) = batch.row(i) / norm;
  }
  const Eigen::MatrixXd logits = (unit * unit.transpose()) / temperature;

  double total = 0.0;
  for (Eigen::Index a = 0; a < rows; ++a) {
    const Eigen::Index b = a ^ 1;  // partner view
    double peak = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < rows; ++c) {
      if (c != a) peak = std::max(peak, logits(a, c));
    }
    double sum = 0.0;
    for (Eigen::Index c = 0; c < rows; ++c) {
      if (c != a) sum += std::exp(logits(a, c) - peak);
    }
    total += (peak + std::log(sum)) - logits(a, b);
  }
  return total / static_cast<double>(rows);
}

Eigen::VectorXd global_average_pool(const FeatureMap& map) {
  if (map.height == 0 || map.width == 0 || map.channels == 0) {
    throw DomainError("global_average_pool: empty feature map");
  }
  if (map.values.size() != map.height * map.width * map.channels) {
    throw DomainError("global_average_pool: value count does not match shape");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(map.channels));
  const std::size_t cells = map.height * map.width;
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::size_t ch = 0; ch < map.channels; ++ch) {
      out[static_cast<Eigen::Index>(ch)] += map.values[cell * map.channels + ch];
    }
  }
  return out / static_cast<double>(cells);
}

Eigen::VectorXd ProjectionModel::explained_variance_ratio() const {
  if (!(total_variance > 0.0)) return Eigen::VectorXd::Zero(explained_variance.size());
  return explained_variance / total_variance;
}

ProjectionModel pca_fit(const Eigen::Ref<const Eigen::MatrixXd>& data,
                        std::size_t dims) {
  const auto n = static_cast<std::size_t>(data.rows());
  const auto d_in = static_cast<std::size_t>(data.cols());
  if (n < 2) throw DomainError("pca_fit: need at least two samples");
  if (dims < 1 || dims > std::min(n - 1, d_in)) {
    throw DomainError("pca_fit: target dimension " + std::to_string(dims) +
                      " outside [1, " + std::to_string(std::min(n - 1, d_in)) + "]");
  }
  if (!data.allFinite()) throw DomainError("pca_fit: non-finite input");

  ProjectionModel model;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();
  const double denom = static_cast<double>(n - 1);
  model.total_variance = centered.squaredNorm() / denom;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::Index k = static_cast<Eigen::Index>(dims);
  model.components = svd.matrixV().leftCols(k).transpose();
  model.explained_variance = svd.singularValues().head(k).array().square() / denom;

  for (Eigen::Index r = 0; r < k; ++r) {
    Eigen::Index arg = 0;
    model.components.row(r).cwiseAbs().maxCoeff(&arg);
    if (model.components(r, arg) < 0.0) model.components.row(r) *= -1.0;
  }
  return model;
}

Eigen::MatrixXd pca_transform(const ProjectionModel& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& data) {
  if (static_cast<std::size_t>(data.cols()) != model.input_dims()) {
    throw DomainError("pca_transform: expected " + std::to_string(model.input_dims()) +
                      " columns, got " + std::to_string(data.cols()));
  }
  return (data.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Eigen::MatrixXd pca_reconstruct(const ProjectionModel& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& projected) {
  if (static_cast<std::size_t>(projected.cols()) != model.output_dims()) {
    throw DomainError("pca_reconstruct: dimension mismatch");
  }
  return (projected * model.components).rowwise() + model.mean.transpose();
}

}  // namespace usub
