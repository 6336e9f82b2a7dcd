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
#ifndef USUB_EVAL_HPP_
#define USUB_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "usub/dataio.hpp"
#include "usub/pipeline.hpp"

namespace usub {

// Gaussian mixture with balanced classes, used as a stand-in for real
// embeddings when the true class posterior must be known.
struct SyntheticSpec {
  int num_classes = 4;
  std::size_t samples_per_class = 2500;
  std::size_t dims = 8;
  Eigen::MatrixXd means;                     // C x d
  std::vector<Eigen::MatrixXd> covariances;  // C of d x d
  std::uint64_t seed = 0;

  void validate() const;

  // Class c is centred at +-e_{c mod d} / sqrt(2), so adjacent means are one
  // unit apart, with isotropic covariance (overlap / 2)^2 I: `overlap` is the
  // per-axis standard deviation in units of half the mean spacing. A
  // vanishing variance is floored at kMinVariance. Requires C <= 2d.
  static SyntheticSpec isotropic(int num_classes, std::size_t samples_per_class,
                                 std::size_t dims, double overlap,
                                 std::uint64_t seed);

  static constexpr double kMinVariance = 1e-12;
};

// The standard overlapping fixture: 4 classes x 2500 samples, d = 8,
// overlap 0.5, seed 7.
SyntheticSpec standard_fixture(std::uint64_t seed = 7);

// Class-major draws; ids are "s" followed by a zero-padded row number, so
// lexicographic and row order agree.
EmbeddingDataset generate_mixture(const SyntheticSpec& spec);

// Bayes posterior under equal priors.
Eigen::VectorXd true_posterior(const SyntheticSpec& spec,
                               const Eigen::Ref<const Eigen::VectorXd>& x);

// A sample is ambiguous when its largest true posterior is below this.
inline constexpr double kAmbiguityCutoff = 0.75;

std::vector<bool> ambiguous_mask(const SyntheticSpec& spec,
                                 const Eigen::Ref<const Eigen::MatrixXd>& features);

// (ambiguous fraction among `selected`) / (ambiguous fraction overall).
// Returns +inf (with a warning) when the population has no ambiguous sample,
// and 0 for an empty selection.
double boundary_enrichment(const std::vector<std::size_t>& selected,
                           const SyntheticSpec& spec,
                           const EmbeddingDataset& dataset);

class NearestCentroid {
 public:
  // Throws PreconditionError naming the first class with no training row.
  static NearestCentroid fit(const Eigen::Ref<const Eigen::MatrixXd>& features,
                             const std::vector<int>& labels, int num_classes);

  // Ties go to the lowest class index.
  int predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  std::vector<int> predict_all(const Eigen::Ref<const Eigen::MatrixXd>& features) const;

  const Eigen::MatrixXd& centroids() const { return centroids_; }

 private:
  explicit NearestCentroid(Eigen::MatrixXd centroids) : centroids_(std::move(centroids)) {}
  Eigen::MatrixXd centroids_;
};

struct ConfusionMatrix {
  Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic> counts;  // true x predicted

  long long total() const { return counts.sum(); }
  Eigen::MatrixXd row_normalized() const;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
};

struct Evaluation {
  MetricsReport metrics;
  ConfusionMatrix confusion;
};

// Per-class precision/recall are 0 when their denominator is 0.
Evaluation compute_metrics(const std::vector<int>& truth,
                           const std::vector<int>& predicted, int num_classes);

struct CompareOptions {
  double test_fraction = 0.2;
  std::vector<double> fractions{0.01, 0.05, 0.10, 1.0};
  std::size_t seed_pool_per_class = 20;
  // Independent split/sample/selection repetitions averaged per regime.
  int repeats = 20;
};

struct RegimeResult {
  std::string name;  // "1%", ..., "proposed"
  double mean_train_size = 0.0;
  // Metrics averaged over repeats; confusion counts summed over repeats.
  Evaluation evaluation;
  std::vector<double> accuracies;  // one per repeat
};

struct CompareReport {
  int repeats = 0;
  std::size_t train_pool = 0;
  std::size_t test_size = 0;
  std::vector<RegimeResult> regimes;
};

// Per repeat: holds out a stratified test split, trains the nearest-centroid
// surrogate on stratified fractions of the remainder and on the pipeline's
// selection (run on the remainder with a stratified seed pool), and scores
// every regime on that repeat's test split. Rows follow options.fractions,
// then "proposed".
CompareReport compare_sampling(const EmbeddingDataset& dataset,
                               const std::vector<int>& truth, int num_classes,
                               const PipelineConfig& config,
                               const CompareOptions& options, std::uint64_t seed);

}  // namespace usub

#endif  // USUB_EVAL_HPP_
