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
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "unit/helpers.hpp"
#include "usub/dataio.hpp"
#include "usub/error.hpp"
#include "usub/eval.hpp"
#include "usub/random.hpp"

namespace usub {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(SyntheticSpec, IsotropicLayout) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 10, 8, 0.5, 1);
  EXPECT_EQ(s.means.rows(), 4);
  for (int c = 0; c < 4; ++c) {
    EXPECT_NEAR(s.means.row(c).norm(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_TRUE(s.covariances[c].isApprox(0.0625 * MatrixXd::Identity(8, 8)));
  }
  EXPECT_NEAR((s.means.row(0) - s.means.row(1)).norm(), 1.0, 1e-15);
  const SyntheticSpec w = SyntheticSpec::isotropic(4, 10, 2, 0.5, 1);
  EXPECT_NEAR((w.means.row(0) + w.means.row(2)).norm(), 0.0, 1e-15);
}

TEST(SyntheticSpec, Errors) {
  EXPECT_THROW(SyntheticSpec::isotropic(4, 10, 8, -0.1, 1), DomainError);
  EXPECT_THROW(SyntheticSpec::isotropic(4, 10, 8, std::nan(""), 1), DomainError);
  EXPECT_THROW(SyntheticSpec::isotropic(5, 10, 2, 0.5, 1), DomainError);
  EXPECT_THROW(SyntheticSpec::isotropic(1, 10, 2, 0.5, 1), DomainError);
  SyntheticSpec s = SyntheticSpec::isotropic(2, 10, 2, 0.5, 1);
  s.covariances[1](0, 0) = -1.0;
  EXPECT_THROW(generate_mixture(s), DomainError);
  s = SyntheticSpec::isotropic(2, 10, 2, 0.5, 1);
  s.samples_per_class = 0;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(GenerateMixture, CountsLabelsAndIds) {
  const EmbeddingDataset d = generate_mixture(standard_fixture());
  EXPECT_EQ(d.size(), 10000u);
  EXPECT_EQ(d.dims(), 8u);
  EXPECT_EQ(d.ids.front(), "s000000");
  EXPECT_EQ(d.ids.back(), "s009999");
  for (int c = 0; c < 4; ++c) EXPECT_EQ(std::count(d.labels.begin(), d.labels.end(), c), 2500);
  EXPECT_NO_THROW(d.validate());
}

TEST(GenerateMixture, DeterministicGivenSeed) {
  const EmbeddingDataset a = generate_mixture(SyntheticSpec::isotropic(3, 50, 4, 1.0, 9));
  const EmbeddingDataset b = generate_mixture(SyntheticSpec::isotropic(3, 50, 4, 1.0, 9));
  EXPECT_TRUE(a.features == b.features);
  EXPECT_EQ(a.ids, b.ids);
}

TEST(GenerateMixture, ZeroOverlapCollapsesToMeans) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 100, 8, 0.0, 2);
  const EmbeddingDataset d = generate_mixture(s);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_LT((d.features.row(i) - s.means.row(d.labels[i])).norm(), 1e-4);
  }
}

TEST(GenerateMixture, ClassMeansWithinFourStandardErrors) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 2000, 8, 0.8, 3);
  const EmbeddingDataset d = generate_mixture(s);
  const double se = 0.4 / std::sqrt(2000.0);
  for (int c = 0; c < 4; ++c) {
    const VectorXd mean = d.features.middleRows(c * 2000, 2000).colwise().mean().transpose();
    for (int j = 0; j < 8; ++j) EXPECT_LT(std::abs(mean(j) - s.means(c, j)), 4 * se);
  }
}

TEST(GenerateMixture, DisjointSeedsLookIndependent) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EmbeddingDataset a = generate_mixture(SyntheticSpec::isotropic(2, 500, 3, 1.0, seed));
    const EmbeddingDataset b =
        generate_mixture(SyntheticSpec::isotropic(2, 500, 3, 1.0, seed + 1000));
    EXPECT_FALSE(a.features == b.features);
    // Both draws share the class layout, so their column means differ only by noise.
    for (int j = 0; j < 3; ++j) {
      const double diff = a.features.col(j).mean() - b.features.col(j).mean();
      const double var_a = (a.features.col(j).array() - a.features.col(j).mean()).square().sum() / 999;
      const double var_b = (b.features.col(j).array() - b.features.col(j).mean()).square().sum() / 999;
      EXPECT_LT(std::abs(diff / std::sqrt(var_a / 1000 + var_b / 1000)), 4.0);
    }
  }
}

TEST(TruePosterior, OneHotAtSeparatedMean) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 1, 8, 0.05, 0);
  const VectorXd p = true_posterior(s, s.means.row(2).transpose());
  EXPECT_NEAR(p(2), 1.0, 1e-12);
}

TEST(TruePosterior, SymmetryPointSplitsEvenly) {
  const SyntheticSpec s = SyntheticSpec::isotropic(2, 1, 2, 0.5, 0);
  const VectorXd mid = 0.5 * (s.means.row(0) + s.means.row(1)).transpose();
  const VectorXd p = true_posterior(s, mid);
  EXPECT_NEAR(p(0), 0.5, 1e-15);
  EXPECT_NEAR(p(1), 0.5, 1e-15);
}

TEST(TruePosterior, NormalisedAndMatchesOracle) {
  const SyntheticSpec s = standard_fixture();
  const oracle::Mat means = usub_test::to_rows(s.means);
  const MatrixXd x = usub_test::random_matrix(200, 8, 4) * 0.6;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const VectorXd p = true_posterior(s, x.row(i).transpose());
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    const oracle::Vec ref = oracle::isotropic_posterior(means, 0.0625, usub_test::to_rows(x)[i]);
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(p(c), ref[c], 1e-12);
  }
}

TEST(AmbiguousMask, AgreesWithPosteriorCutoff) {
  const SyntheticSpec s = standard_fixture();
  const EmbeddingDataset d = generate_mixture(SyntheticSpec::isotropic(4, 200, 8, 0.5, 7));
  const std::vector<bool> mask = ambiguous_mask(s, d.features);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_EQ(mask[i], true_posterior(s, d.features.row(i).transpose()).maxCoeff() < 0.75);
  }
}

TEST(BoundaryEnrichment, AllSamplesGivesExactlyOne) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 500, 8, 0.5, 1);
  const EmbeddingDataset d = generate_mixture(s);
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(boundary_enrichment(all, s, d), 1.0);
}

TEST(BoundaryEnrichment, ConfidentSelectionGivesZero) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 500, 8, 0.5, 1);
  const EmbeddingDataset d = generate_mixture(s);
  std::vector<std::size_t> sure;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (true_posterior(s, d.features.row(i).transpose()).maxCoeff() >= 0.99) sure.push_back(i);
  }
  ASSERT_FALSE(sure.empty());
  EXPECT_EQ(boundary_enrichment(sure, s, d), 0.0);
  EXPECT_EQ(boundary_enrichment({}, s, d), 0.0);
}

TEST(BoundaryEnrichment, RandomSelectionNearOne) {
  const SyntheticSpec s = standard_fixture();
  const EmbeddingDataset d = generate_mixture(s);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto pick = Rng(seed).sample_without_replacement(d.size(), 2000);
    std::sort(pick.begin(), pick.end());
    EXPECT_NEAR(boundary_enrichment(pick, s, d), 1.0, 0.2);
  }
}

TEST(BoundaryEnrichment, NoAmbiguousPopulationIsInfinite) {
  const SyntheticSpec s = SyntheticSpec::isotropic(2, 50, 2, 0.01, 1);
  const EmbeddingDataset d = generate_mixture(s);
  EXPECT_EQ(boundary_enrichment({0, 1}, s, d), std::numeric_limits<double>::infinity());
}

TEST(NearestCentroid, SeparableDataPerfectAccuracy) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 100, 8, 0.1, 2);
  const EmbeddingDataset d = generate_mixture(s);
  const NearestCentroid nc = NearestCentroid::fit(d.features, d.labels, 4);
  EXPECT_EQ(nc.predict_all(d.features), d.labels);
}

TEST(NearestCentroid, SingleSamplePerClassIsCentroid) {
  MatrixXd x(3, 2);
  x << 1, 2, -3, 0.5, 7, 7;
  const NearestCentroid nc = NearestCentroid::fit(x, {2, 0, 1}, 3);
  EXPECT_EQ(nc.centroids().row(0), x.row(1));
  EXPECT_EQ(nc.centroids().row(1), x.row(2));
  EXPECT_EQ(nc.centroids().row(2), x.row(0));
}

TEST(NearestCentroid, AgreesWithExhaustiveOracle) {
  const MatrixXd train = usub_test::random_matrix(60, 3, 5);
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) labels[i] = i % 4;
  const NearestCentroid nc = NearestCentroid::fit(train, labels, 4);
  const oracle::Mat centroids = usub_test::to_rows(nc.centroids());
  const MatrixXd query = usub_test::random_matrix(100, 3, 6);
  const std::vector<int> got = nc.predict_all(query);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(got[i], oracle::nearest(centroids, usub_test::to_rows(query)[i]));
  }
  // Centroids are plain class means.
  for (int c = 0; c < 4; ++c) {
    VectorXd mean = VectorXd::Zero(3);
    for (int i = c; i < 60; i += 4) mean += train.row(i).transpose();
    EXPECT_LT((nc.centroids().row(c).transpose() - mean / 15.0).norm(), 1e-14);
  }
}

TEST(NearestCentroid, TiesGoToLowestClass) {
  MatrixXd x(2, 1);
  x << -1, 1;
  const NearestCentroid nc = NearestCentroid::fit(x, {1, 0}, 2);
  EXPECT_EQ(nc.predict(VectorXd::Zero(1)), 0);
}

TEST(NearestCentroid, MissingClassNamed) {
  try {
    NearestCentroid::fit(MatrixXd::Zero(2, 1), {0, 2}, 3);
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("class 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(NearestCentroid::fit(MatrixXd::Zero(2, 1), {0}, 2), DomainError);
  EXPECT_THROW(NearestCentroid::fit(MatrixXd::Zero(2, 1), {0, 5}, 2), DomainError);
}

TEST(ComputeMetrics, PerfectPredictions) {
  const std::vector<int> y = {0, 1, 2, 3, 3, 2};
  const Evaluation e = compute_metrics(y, y, 4);
  EXPECT_EQ(e.metrics.accuracy, 1.0);
  EXPECT_EQ(e.metrics.macro_f1, 1.0);
  const MatrixXd c = e.confusion.counts.cast<double>();
  EXPECT_EQ(c, MatrixXd(c.diagonal().asDiagonal()));
  EXPECT_EQ(e.confusion.total(), 6);
}

TEST(ComputeMetrics, ConstantPredictorOnBalancedSet) {
  std::vector<int> truth;
  for (int i = 0; i < 40; ++i) truth.push_back(i % 4);
  const Evaluation e = compute_metrics(truth, std::vector<int>(40, 0), 4);
  EXPECT_EQ(e.metrics.accuracy, 0.25);
  EXPECT_EQ(e.metrics.macro_recall, 0.25);
  EXPECT_EQ(e.metrics.precision[1], 0.0);
  EXPECT_EQ(e.metrics.f1[1], 0.0);
  EXPECT_DOUBLE_EQ(e.metrics.f1[0], 0.4);
}

TEST(ComputeMetrics, InvariantsOnRandomPredictions) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> truth(300), pred(300);
    for (int i = 0; i < 300; ++i) {
      truth[i] = static_cast<int>(rng.uniform_index(4));
      pred[i] = rng.uniform() < 0.7 ? truth[i] : static_cast<int>(rng.uniform_index(4));
    }
    const Evaluation e = compute_metrics(truth, pred, 4);
    const auto& m = e.metrics;
    EXPECT_EQ(m.accuracy, static_cast<double>(e.confusion.counts.trace()) /
                              static_cast<double>(e.confusion.total()));
    EXPECT_EQ(e.confusion.total(), 300);
    EXPECT_LE(m.macro_f1, *std::max_element(m.f1.begin(), m.f1.end()));
    EXPECT_GE(m.macro_f1, *std::min_element(m.f1.begin(), m.f1.end()));
    for (int c = 0; c < 4; ++c) {
      const double p = m.precision[c], r = m.recall[c];
      EXPECT_NEAR(m.f1[c], (p + r) > 0 ? 2 * p * r / (p + r) : 0.0, 1e-15);
    }
    const MatrixXd rn = e.confusion.row_normalized();
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(rn.row(c).sum(), 1.0, 1e-12);
  }
}

TEST(ComputeMetrics, Errors) {
  EXPECT_THROW(compute_metrics({0, 1}, {0}, 2), DomainError);
  EXPECT_THROW(compute_metrics({0, 2}, {0, 1}, 2), DomainError);
}

TEST(CompareSampling, FiveRegimesDeterministic) {
  const SyntheticSpec s = SyntheticSpec::isotropic(4, 300, 8, 0.5, 3);
  const EmbeddingDataset d = generate_mixture(s);
  CompareOptions opt;
  opt.repeats = 3;
  const CompareReport a = compare_sampling(d, d.labels, 4, PipelineConfig{}, opt, 5);
  const CompareReport b = compare_sampling(d, d.labels, 4, PipelineConfig{}, opt, 5);
  std::vector<std::string> names;
  for (const auto& r : a.regimes) names.push_back(r.name);
  EXPECT_EQ(names, (std::vector<std::string>{"1%", "5%", "10%", "100%", "proposed"}));
  EXPECT_EQ(a.test_size, 240u);
  EXPECT_EQ(a.train_pool, 960u);
  for (std::size_t i = 0; i < a.regimes.size(); ++i) {
    EXPECT_EQ(a.regimes[i].accuracies, b.regimes[i].accuracies);
    EXPECT_EQ(a.regimes[i].accuracies.size(), 3u);
    EXPECT_EQ(a.regimes[i].evaluation.confusion.total(), 3 * 240);
  }
  EXPECT_EQ(a.regimes[3].mean_train_size, 960.0);
}

TEST(CompareSampling, FullTrainingAtLeastOnePercentOnStandardFixture) {
  const EmbeddingDataset d = generate_mixture(standard_fixture());
  const CompareReport r = compare_sampling(d, d.labels, 4, PipelineConfig{}, CompareOptions{}, 7);
  EXPECT_GE(r.regimes[3].evaluation.metrics.accuracy, r.regimes[0].evaluation.metrics.accuracy);
}

TEST(CompareSampling, BadOptions) {
  const EmbeddingDataset d = generate_mixture(SyntheticSpec::isotropic(4, 50, 8, 0.5, 3));
  CompareOptions opt;
  opt.test_fraction = 1.0;
  EXPECT_THROW(compare_sampling(d, d.labels, 4, PipelineConfig{}, opt, 1), ConfigError);
  EXPECT_THROW(compare_sampling(d, {0, 1}, 4, PipelineConfig{}, CompareOptions{}, 1),
               ValidationError);
}

}  // namespace
}  // namespace usub
