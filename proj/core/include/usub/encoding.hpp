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
#ifndef USUB_ENCODING_HPP_
#define USUB_ENCODING_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace usub {

// Dense h x w x c activation tensor stored row-major, channel fastest.
struct FeatureMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j, std::size_t ch) const {
    return values[(i * width + j) * channels + ch];
  }
};

// Fitted principal-component projection.
//   components: d x D, orthonormal rows, largest-|entry| of each row positive
//   explained_variance: d, non-increasing (unbiased, n - 1 denominator)
struct ProjectionModel {
  Eigen::VectorXd mean;
  Eigen::MatrixXd components;
  Eigen::VectorXd explained_variance;
  // Sum of the variances of all D centered columns.
  double total_variance = 0.0;

  std::size_t input_dims() const { return static_cast<std::size_t>(mean.size()); }
  std::size_t output_dims() const {
    return static_cast<std::size_t>(components.rows());
  }
  Eigen::VectorXd explained_variance_ratio() const;
};

inline constexpr double kDefaultTemperature = 0.1;

double cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& u,
                         const Eigen::Ref<const Eigen::VectorXd>& v);

// Normalized temperature-scaled cross-entropy over a batch of 2n latent
// vectors where rows 2i and 2i+1 are the two views of image i. Returns the
// mean of the per-anchor loss over all 2n anchors; each anchor's
// denominator runs over the other 2n - 1 rows.
double nt_xent_loss(const Eigen::Ref<const Eigen::MatrixXd>& batch,
                    double temperature = kDefaultTemperature);

Eigen::VectorXd global_average_pool(const FeatureMap& map);

// Top-`dims` principal directions of `data` (rows are samples) via SVD of
// the column-centered matrix. Requires 1 <= dims <= min(n - 1, D).
ProjectionModel pca_fit(const Eigen::Ref<const Eigen::MatrixXd>& data,
                        std::size_t dims);

// (data - mean) * components^T
Eigen::MatrixXd pca_transform(const ProjectionModel& model,
                              const Eigen::Ref<const Eigen::MatrixXd>& data);

// Inverse map back to the input space: projected * components + mean.
Eigen::MatrixXd pca_reconstruct(const ProjectionModel& model,
                                const Eigen::Ref<const Eigen::MatrixXd>& projected);

}  // namespace usub

#endif  // USUB_ENCODING_HPP_
