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
#ifndef USUB_CLUSTERING_HPP_
#define USUB_CLUSTERING_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace usub {

enum class CovarianceMode { kFull, kDiagonal };

struct KMeansOptions {
  int max_iter = 300;
  // Added to every cluster covariance diagonal so densities stay defined for
  // degenerate clusters.
  double ridge = 1e-6;
  CovarianceMode covariance = CovarianceMode::kFull;
};

struct ClusterModel {
  int k = 0;
  Eigen::MatrixXd means;                     // k x d
  std::vector<Eigen::MatrixXd> covariances;  // k of d x d, SPD
  std::vector<int> assignments;              // n, in [0, k)
  // Within-cluster SSE after the initial assignment and after every Lloyd
  // iteration.
  std::vector<double> sse_history;
  int iterations = 0;
  bool converged = false;

  std::size_t dims() const { return static_cast<std::size_t>(means.cols()); }
  double sse() const { return sse_history.empty() ? 0.0 : sse_history.back(); }
};

// k-means++ seeding followed by Lloyd iterations until the assignment is
// stable or options.max_iter is reached. Clusters that empty out are reseeded
// at the point farthest from its current centroid.
ClusterModel kmeans_fit(const Eigen::Ref<const Eigen::MatrixXd>& data, int k,
                        std::uint64_t seed, const KMeansOptions& options = {});

double within_cluster_sse(const Eigen::Ref<const Eigen::MatrixXd>& data,
                          const Eigen::Ref<const Eigen::MatrixXd>& means,
                          const std::vector<int>& assignments);

// Multivariate normal density with a factorized covariance, reusable across
// many evaluations.
class GaussianDensity {
 public:
  // Throws DomainError if `cov` is not symmetric positive definite.
  GaussianDensity(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);

  double log_pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_norm_ = 0.0;
};

// exp(-1/2 (x-mu)^T Sigma^-1 (x-mu)) / sqrt((2 pi)^d |Sigma|)
double gaussian_pdf(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& mean,
                    const Eigen::Ref<const Eigen::MatrixXd>& cov);

// n x k matrix of per-cluster densities normalized to sum to 1 per row. A row
// whose densities all underflow becomes uniform 1/k (a warning is logged).
Eigen::MatrixXd membership_probabilities(const ClusterModel& model,
                                         const Eigen::Ref<const Eigen::MatrixXd>& data);

enum class BandMode {
  kAny,  // some membership entry lies in [lo, hi]
  kMax,  // the largest membership entry lies in [lo, hi]
};

struct Band {
  double lo = 0.4;
  double hi = 0.6;
  BandMode mode = BandMode::kAny;

  void validate() const;
};

// Cluster-peripheral samples.
struct UncertainSet {
  std::vector<std::size_t> indices;  // strictly increasing
  Band band;

  std::size_t size() const { return indices.size(); }
};

UncertainSet peripheral_select(const Eigen::Ref<const Eigen::MatrixXd>& probs,
                               const Band& band = {});

// Per-sample silhouette (b - a) / max(a, b); members of singleton clusters
// score 0. Requires at least two non-empty clusters.
Eigen::VectorXd silhouette_scores(const Eigen::Ref<const Eigen::MatrixXd>& data,
                                  const std::vector<int>& assignments);

}  // namespace usub

#endif  // USUB_CLUSTERING_HPP_
