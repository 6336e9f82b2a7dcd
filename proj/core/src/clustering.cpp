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
#include "usub/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <string>

#include <spdlog/spdlog.h>

#include "usub/error.hpp"
#include "usub/random.hpp"

namespace usub {
namespace {

using Index = Eigen::Index;

// Nearest mean by squared distance; ties go to the lower cluster index.
int nearest(const Eigen::Ref<const Eigen::MatrixXd>& means,
            const Eigen::Ref<const Eigen::RowVectorXd>& x, double* dist2 = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < means.rows(); ++c) {
    const double d = (means.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::Ref<const Eigen::MatrixXd>& data, int k,
                              Rng& rng) {
  const Index n = data.rows();
  Eigen::MatrixXd means(k, data.cols());
  means.row(0) = data.row(static_cast<Index>(rng.uniform_index(static_cast<std::size_t>(n))));
  Eigen::VectorXd d2(n);
  for (Index i = 0; i < n; ++i) d2[i] = (data.row(i) - means.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave the target past the last positive weight.
      while (d2[pick] == 0.0 && pick > 0) --pick;
    } else {
      pick = static_cast<Index>(rng.uniform_index(static_cast<std::size_t>(n)));
    }
    means.row(c) = data.row(pick);
    for (Index i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (data.row(i) - means.row(c)).squaredNorm());
    }
  }
  return means;
}

bool assign_all(const Eigen::Ref<const Eigen::MatrixXd>& data,
                const Eigen::MatrixXd& means, std::vector<int>& assignments) {
  bool changed = false;
  for (Index i = 0; i < data.rows(); ++i) {
    const int c = nearest(means, data.row(i));
    if (assignments[static_cast<std::size_t>(i)] != c) {
      assignments[static_cast<std::size_t>(i)] = c;
      changed = true;
    }
  }
  return changed;
}

// Moves the point farthest from its centroid into each empty cluster. Donor
// clusters keep at least one member.
void repair_empty(const Eigen::Ref<const Eigen::MatrixXd>& data, Eigen::MatrixXd& means,
                  std::vector<int>& assignments, std::vector<Index>& sizes) {
  for (Index c = 0; c < means.rows(); ++c) {
    if (sizes[static_cast<std::size_t>(c)] > 0) continue;
    Index far = -1;
    double far_d = -1.0;
    for (Index i = 0; i < data.rows(); ++i) {
      const int owner = assignments[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(owner)] < 2) continue;
      const double d = (data.row(i) - means.row(owner)).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far < 0) throw DomainError("kmeans_fit: not enough points to fill clusters");
    const int owner = assignments[static_cast<std::size_t>(far)];
    --sizes[static_cast<std::size_t>(owner)];
    ++sizes[static_cast<std::size_t>(c)];
    assignments[static_cast<std::size_t>(far)] = static_cast<int>(c);
    means.row(c) = data.row(far);
  }
}

void update_means(const Eigen::Ref<const Eigen::MatrixXd>& data, Eigen::MatrixXd& means,
                  std::vector<int>& assignments) {
  std::vector<Index> sizes(static_cast<std::size_t>(means.rows()), 0);
  for (const int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  repair_empty(data, means, assignments, sizes);

  means.setZero();
  for (Index i = 0; i < data.rows(); ++i) {
    means.row(assignments[static_cast<std::size_t>(i)]) += data.row(i);
  }
  for (Index c = 0; c < means.rows(); ++c) {
    means.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
  }
}

}  // namespace

double within_cluster_sse(const Eigen::Ref<const Eigen::MatrixXd>& data,
                          const Eigen::Ref<const Eigen::MatrixXd>& means,
                          const std::vector<int>& assignments) {
  double sse = 0.0;
  for (Index i = 0; i < data.rows(); ++i) {
    sse += (data.row(i) - means.row(assignments[static_cast<std::size_t>(i)])).squaredNorm();
  }
  return sse;
}

ClusterModel kmeans_fit(const Eigen::Ref<const Eigen::MatrixXd>& data, int k,
                        std::uint64_t seed, const KMeansOptions& options) {
  if (k < 2) throw DomainError("kmeans_fit: k must be at least 2");
  if (data.rows() < k) {
    throw DomainError("kmeans_fit: " + std::to_string(data.rows()) +
                      " samples cannot form " + std::to_string(k) + " clusters");
  }
  if (options.max_iter < 1) throw DomainError("kmeans_fit: max_iter must be >= 1");
  if (!(options.ridge >= 0.0)) throw DomainError("kmeans_fit: ridge must be >= 0");
  if (!data.allFinite()) throw DomainError("kmeans_fit: non-finite input");

  Rng rng(seed);
  ClusterModel model;
  model.k = k;
  model.means = kmeanspp_init(data, k, rng);
  model.assignments.assign(static_cast<std::size_t>(data.rows()), -1);
  assign_all(data, model.means, model.assignments);
  model.sse_history.push_back(within_cluster_sse(data, model.means, model.assignments));

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    update_means(data, model.means, model.assignments);
    const bool changed = assign_all(data, model.means, model.assignments);
    model.sse_history.push_back(within_cluster_sse(data, model.means, model.assignments));
    model.iterations = iter;
    if (!changed) {
      model.converged = true;
      break;
    }
  }
  if (!model.converged) {
    // Leave means consistent with the final assignment.
    update_means(data, model.means, model.assignments);
    model.sse_history.push_back(within_cluster_sse(data, model.means, model.assignments));
  }

  const Index d = data.cols();
  model.covariances.assign(static_cast<std::size_t>(k), Eigen::MatrixXd::Zero(d, d));
  std::vector<Index> sizes(static_cast<std::size_t>(k), 0);
  for (Index i = 0; i < data.rows(); ++i) {
    const int c = model.assignments[static_cast<std::size_t>(i)];
    const Eigen::VectorXd diff = (data.row(i) - model.means.row(c)).transpose();
    model.covariances[static_cast<std::size_t>(c)].noalias() += diff * diff.transpose();
    ++sizes[static_cast<std::size_t>(c)];
  }
  for (int c = 0; c < k; ++c) {
    auto& cov = model.covariances[static_cast<std::size_t>(c)];
    const Index size = sizes[static_cast<std::size_t>(c)];
    if (size > 1) cov /= static_cast<double>(size - 1);
    if (options.covariance == CovarianceMode::kDiagonal) {
      cov = Eigen::MatrixXd(cov.diagonal().asDiagonal());
    }
    cov = 0.5 * (cov + cov.transpose()).eval();
    cov.diagonal().array() += options.ridge;
  }
  return model;
}

GaussianDensity::GaussianDensity(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
    : mean_(std::move(mean)) {
  const Index d = mean_.size();
  if (cov.rows() != d || cov.cols() != d) {
    throw DomainError("gaussian density: covariance shape does not match mean");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (!cov.allFinite() || (cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("gaussian density: covariance is not symmetric");
  }
  llt_.compute(cov);
  if (llt_.info() != Eigen::Success ||
      (llt_.matrixLLT().diagonal().array() <= 0.0).any()) {
    throw DomainError("gaussian density: covariance is not positive definite");
  }
  const double log_det = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  log_norm_ = -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + log_det);
}

double GaussianDensity::log_pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::VectorXd z = llt_.matrixL().solve(x - mean_);
  return log_norm_ - 0.5 * z.squaredNorm();
}

double GaussianDensity::pdf(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  return std::exp(log_pdf(x));
}

double gaussian_pdf(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& mean,
                    const Eigen::Ref<const Eigen::MatrixXd>& cov) {
  if (x.size() != mean.size()) throw DomainError("gaussian_pdf: dimension mismatch");
  return GaussianDensity(mean, cov).pdf(x);
}

Eigen::MatrixXd membership_probabilities(const ClusterModel& model,
                                         const Eigen::Ref<const Eigen::MatrixXd>& data) {
  if (static_cast<std::size_t>(data.cols()) != model.dims()) {
    throw DomainError("membership_probabilities: data has " + std::to_string(data.cols()) +
                      " columns, model expects " + std::to_string(model.dims()));
  }
  std::vector<GaussianDensity> densities;
  densities.reserve(static_cast<std::size_t>(model.k));
  for (int c = 0; c < model.k; ++c) {
    densities.emplace_back(model.means.row(c).transpose(),
                           model.covariances[static_cast<std::size_t>(c)]);
  }
  Eigen::MatrixXd probs(data.rows(), model.k);
  std::size_t underflow = 0;
  for (Index i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd x = data.row(i).transpose();
    for (int c = 0; c < model.k; ++c) probs(i, c) = densities[static_cast<std::size_t>(c)].pdf(x);
    const double sum = probs.row(i).sum();
    if (sum > 0.0 && std::isfinite(sum)) {
      probs.row(i) /= sum;
    } else {
      probs.row(i).setConstant(1.0 / model.k);
      ++underflow;
    }
  }
  if (underflow > 0) {
    spdlog::warn("membership_probabilities: {} sample(s) with all densities underflowing; "
                 "assigned uniform membership",
                 underflow);
  }
  return probs;
}

void Band::validate() const {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw DomainError("band: require 0 <= lo < hi <= 1");
  }
}

UncertainSet peripheral_select(const Eigen::Ref<const Eigen::MatrixXd>& probs,
                               const Band& band) {
  band.validate();
  UncertainSet out;
  out.band = band;
  const auto in_band = [&](double p) { return p >= band.lo && p <= band.hi; };
  for (Index i = 0; i < probs.rows(); ++i) {
    bool hit = false;
    if (band.mode == BandMode::kMax) {
      hit = in_band(probs.row(i).maxCoeff());
    } else {
      for (Index c = 0; c < probs.cols() && !hit; ++c) hit = in_band(probs(i, c));
    }
    if (hit) out.indices.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

Eigen::VectorXd silhouette_scores(const Eigen::Ref<const Eigen::MatrixXd>& data,
                                  const std::vector<int>& assignments) {
  const Index n = data.rows();
  if (static_cast<std::size_t>(n) != assignments.size()) {
    throw DomainError("silhouette_scores: assignment count does not match data");
  }
  int clusters = 0;
  for (const int a : assignments) {
    if (a < 0) throw DomainError("silhouette_scores: negative cluster index");
    clusters = std::max(clusters, a + 1);
  }
  std::vector<Index> sizes(static_cast<std::size_t>(clusters), 0);
  for (const int a : assignments) ++sizes[static_cast<std::size_t>(a)];
  const auto populated = std::count_if(sizes.begin(), sizes.end(), [](Index s) { return s > 0; });
  if (populated < 2) throw DomainError("silhouette_scores: need at least two clusters");

  Eigen::VectorXd scores = Eigen::VectorXd::Zero(n);
  std::vector<double> sums(static_cast<std::size_t>(clusters));
  for (Index i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)]);
    if (sizes[own] < 2) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Index j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[static_cast<std::size_t>(assignments[static_cast<std::size_t>(j)])] +=
          (data.row(i) - data.row(j)).norm();
    }
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    scores[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return scores;
}

}  // namespace usub
