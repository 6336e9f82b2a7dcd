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
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "unit/helpers.hpp"
#include "usub/encoding.hpp"
#include "usub/error.hpp"

namespace usub {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// log(1 + 2/e): each anchor sees its partner at similarity 1 and two
// orthogonal rows at similarity 0.
constexpr double kTwoPairLoss = 0.55144471393205108;

MatrixXd two_pair_batch() {
  MatrixXd z(4, 2);
  z << 1, 0, 1, 0, 0, 1, 0, 1;
  return z;
}

MatrixXd fixed_10x4() {
  MatrixXd x(10, 4);
  x << 2.5, 2.4, 0.5, 1.1,
       0.5, 0.7, 2.2, 2.9,
       2.2, 2.9, 1.9, 2.2,
       1.9, 2.2, 3.1, 3.0,
       3.1, 3.0, 2.3, 2.7,
       2.3, 2.7, 2.0, 1.6,
       2.0, 1.6, 1.0, 1.1,
       1.0, 1.1, 1.5, 1.6,
       1.5, 1.6, 1.1, 0.9,
       1.1, 0.9, 2.5, 2.4;
  return x;
}

TEST(CosineSimilarity, IdentityAntipodalOrthogonal) {
  VectorXd u(3);
  u << 0.3, -1.2, 2.0;
  EXPECT_NEAR(cosine_similarity(u, u), 1.0, 1e-15);
  EXPECT_NEAR(cosine_similarity(u, -u), -1.0, 1e-15);
  EXPECT_EQ(cosine_similarity(VectorXd::Unit(2, 0), VectorXd::Unit(2, 1)), 0.0);
}

TEST(CosineSimilarity, StaysInClosedUnitInterval) {
  const MatrixXd m = usub_test::random_matrix(200, 5, 21);
  for (Eigen::Index i = 0; i + 1 < m.rows(); ++i) {
    const double c = cosine_similarity(m.row(i).transpose(), m.row(i + 1).transpose());
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    EXPECT_NEAR(c, oracle::cosine(usub_test::to_rows(m)[i], usub_test::to_rows(m)[i + 1]),
                1e-14);
  }
}

TEST(CosineSimilarity, ZeroNormIsDomainError) {
  EXPECT_THROW(cosine_similarity(VectorXd::Zero(2), VectorXd::Ones(2)), DomainError);
  EXPECT_THROW(cosine_similarity(VectorXd::Ones(2), VectorXd::Ones(3)), DomainError);
}

TEST(NtXent, SinglePairIsExactlyZero) {
  MatrixXd z(2, 3);
  z << 0.2, -1.0, 3.0, 5.0, 0.1, -0.7;
  EXPECT_EQ(nt_xent_loss(z, 0.1), 0.0);
  EXPECT_EQ(nt_xent_loss(z, 1.0), 0.0);
}

TEST(NtXent, TwoPairFixtureMatchesFrozenAndBruteForce) {
  const MatrixXd z = two_pair_batch();
  EXPECT_NEAR(oracle::nt_xent_brute(usub_test::to_rows(z), 1.0), kTwoPairLoss, 1e-15);
  EXPECT_NEAR(nt_xent_loss(z, 1.0), kTwoPairLoss, 1e-12);
}

TEST(NtXent, RandomBatchesMatchBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MatrixXd z = usub_test::random_matrix(8, 6, 100 + seed);
    for (const double tau : {0.1, 0.5, 2.0}) {
      EXPECT_NEAR(nt_xent_loss(z, tau), oracle::nt_xent_brute(usub_test::to_rows(z), tau),
                  1e-12);
    }
  }
}

TEST(NtXent, ScaleInvariant) {
  const MatrixXd z = usub_test::random_matrix(6, 4, 3);
  EXPECT_NEAR(nt_xent_loss(10.0 * z, 0.5), nt_xent_loss(z, 0.5), 1e-12);
}

TEST(NtXent, InvariantUnderPairPermutation) {
  const MatrixXd z = usub_test::random_matrix(10, 3, 4);
  const std::vector<int> order = {3, 0, 4, 2, 1};
  MatrixXd p(10, 3);
  for (int i = 0; i < 5; ++i) {
    p.row(2 * i) = z.row(2 * order[i]);
    p.row(2 * i + 1) = z.row(2 * order[i] + 1);
  }
  EXPECT_NEAR(nt_xent_loss(p, 0.3), nt_xent_loss(z, 0.3), 1e-12);
}

TEST(NtXent, DecreasesAsViewsConverge) {
  MatrixXd z(4, 2);
  z << 1, 0, 0.2, 1, 0, 1, -1, 0.3;
  double previous = nt_xent_loss(z, 0.5);
  for (int step = 1; step <= 10; ++step) {
    const double t = step / 10.0;
    MatrixXd moved = z;
    moved.row(1) = (1 - t) * z.row(1) + t * z.row(0);
    const double loss = nt_xent_loss(moved, 0.5);
    EXPECT_LT(loss, previous);
    previous = loss;
  }
}

TEST(NtXent, RejectsBadInput) {
  EXPECT_THROW(nt_xent_loss(two_pair_batch(), 0.0), DomainError);
  EXPECT_THROW(nt_xent_loss(two_pair_batch(), -1.0), DomainError);
  EXPECT_THROW(nt_xent_loss(MatrixXd::Ones(3, 2), 1.0), DomainError);
  EXPECT_THROW(nt_xent_loss(MatrixXd(0, 2), 1.0), DomainError);
  MatrixXd z = two_pair_batch();
  z.row(2).setZero();
  EXPECT_THROW(nt_xent_loss(z, 1.0), DomainError);
}

TEST(NtXent, DefaultTemperature) { EXPECT_EQ(kDefaultTemperature, 0.1); }

TEST(GlobalAveragePool, OnesMap) {
  FeatureMap m{7, 7, 512, std::vector<double>(7 * 7 * 512, 1.0)};
  const VectorXd v = global_average_pool(m);
  ASSERT_EQ(v.size(), 512);
  EXPECT_TRUE(v.isOnes(0.0));
}

TEST(GlobalAveragePool, ArithmeticMeanAndIdentity) {
  EXPECT_EQ(global_average_pool(FeatureMap{2, 1, 1, {2.0, 4.0}})(0), 3.0);
  const VectorXd v = global_average_pool(FeatureMap{1, 1, 3, {1.5, -2.0, 7.0}});
  EXPECT_EQ(v, (VectorXd(3) << 1.5, -2.0, 7.0).finished());
}

TEST(GlobalAveragePool, ChannelsAreIndependent) {
  FeatureMap m{2, 2, 2, {1, 10, 2, 20, 3, 30, 4, 40}};
  const VectorXd v = global_average_pool(m);
  EXPECT_DOUBLE_EQ(v(0), 2.5);
  EXPECT_DOUBLE_EQ(v(1), 25.0);
}

TEST(GlobalAveragePool, EmptyIsDomainError) {
  EXPECT_THROW(global_average_pool(FeatureMap{0, 1, 1, {}}), DomainError);
  EXPECT_THROW(global_average_pool(FeatureMap{1, 1, 2, {1.0}}), DomainError);
}

TEST(Pca, LineYEqualsX) {
  MatrixXd x(5, 2);
  x << 0, 0, 1, 1, 2, 2, -1, -1, 3, 3;
  const ProjectionModel m = pca_fit(x, 1);
  EXPECT_NEAR(m.components(0, 0), 1.0 / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(m.components(0, 1), 1.0 / std::numbers::sqrt2, 1e-12);
  EXPECT_NEAR(m.explained_variance_ratio()(0), 1.0, 1e-12);
}

TEST(Pca, FixedMatrixMatchesJacobiOracle) {
  const MatrixXd x = fixed_10x4();
  const auto eig = oracle::jacobi_eigen(oracle::sample_covariance(usub_test::to_rows(x)));
  const ProjectionModel m = pca_fit(x, 2);
  for (int k = 0; k < 2; ++k) {
    EXPECT_NEAR(m.explained_variance(k), eig.values[k], 1e-9);
    double same = 0.0, flipped = 0.0;
    for (int j = 0; j < 4; ++j) {
      same = std::max(same, std::abs(m.components(k, j) - eig.vectors[k][j]));
      flipped = std::max(flipped, std::abs(m.components(k, j) + eig.vectors[k][j]));
    }
    EXPECT_LT(std::min(same, flipped), 1e-9) << "component " << k;
  }
}

TEST(Pca, SignConventionLargestEntryPositive) {
  const ProjectionModel m = pca_fit(usub_test::random_matrix(40, 6, 8), 4);
  for (Eigen::Index k = 0; k < m.components.rows(); ++k) {
    Eigen::Index arg = 0;
    m.components.row(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(m.components(k, arg), 0.0);
  }
}

TEST(Pca, FullRankPreservesPairwiseDistances) {
  const MatrixXd x = usub_test::random_matrix(50, 6, 9);
  const ProjectionModel m = pca_fit(x, 6);
  const MatrixXd y = pca_transform(m, x);
  for (Eigen::Index i = 0; i < 50; ++i)
    for (Eigen::Index j = i + 1; j < 50; ++j) {
      EXPECT_NEAR((y.row(i) - y.row(j)).norm(), (x.row(i) - x.row(j)).norm(), 1e-9);
    }
}

TEST(Pca, ComponentsOrthonormalVariancesSorted) {
  const ProjectionModel m = pca_fit(usub_test::random_matrix(30, 7, 10), 5);
  const MatrixXd gram = m.components * m.components.transpose();
  EXPECT_TRUE(gram.isApprox(MatrixXd::Identity(5, 5), 1e-9));
  EXPECT_LT((gram - MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-9);
  for (Eigen::Index k = 1; k < 5; ++k) {
    EXPECT_GE(m.explained_variance(k - 1), m.explained_variance(k));
    EXPECT_GE(m.explained_variance(k), 0.0);
  }
}

TEST(Pca, ExplainedVarianceEqualsProjectedVariance) {
  const MatrixXd x = usub_test::random_matrix(60, 5, 12);
  const ProjectionModel m = pca_fit(x, 3);
  const MatrixXd y = pca_transform(m, x);
  for (Eigen::Index k = 0; k < 3; ++k) {
    const double mean = y.col(k).mean();
    const double var = (y.col(k).array() - mean).square().sum() / (y.rows() - 1);
    EXPECT_NEAR(var, m.explained_variance(k), 1e-9);
    EXPECT_NEAR(mean, 0.0, 1e-9);
  }
}

TEST(Pca, TransformOfMeanIsZero) {
  const MatrixXd x = usub_test::random_matrix(20, 4, 13);
  const ProjectionModel m = pca_fit(x, 2);
  EXPECT_LT(pca_transform(m, m.mean.transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pca, FullRankReconstructionRecoversInput) {
  const MatrixXd x = usub_test::random_matrix(25, 5, 14);
  const ProjectionModel m = pca_fit(x, 5);
  EXPECT_LT((pca_reconstruct(m, pca_transform(m, x)) - x).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Pca, HighDimensionalInputToEight) {
  const MatrixXd x = usub_test::random_matrix(100, 512, 15);
  const ProjectionModel m = pca_fit(x, 8);
  EXPECT_EQ(m.input_dims(), 512u);
  EXPECT_EQ(pca_transform(m, x).cols(), 8);
}

TEST(Pca, RatioSumsToOneAtFullRank) {
  const ProjectionModel m = pca_fit(usub_test::random_matrix(30, 4, 16), 4);
  EXPECT_NEAR(m.explained_variance_ratio().sum(), 1.0, 1e-12);
}

TEST(Pca, RangeErrors) {
  const MatrixXd x = usub_test::random_matrix(5, 3, 17);
  EXPECT_THROW(pca_fit(x, 0), DomainError);
  EXPECT_THROW(pca_fit(x, 4), DomainError);
  EXPECT_THROW(pca_fit(usub_test::random_matrix(3, 6, 1), 3), DomainError);
  EXPECT_THROW(pca_fit(x.topRows(1), 1), DomainError);
  const ProjectionModel m = pca_fit(x, 2);
  EXPECT_THROW(pca_transform(m, MatrixXd::Zero(2, 4)), DomainError);
  EXPECT_THROW(pca_reconstruct(m, MatrixXd::Zero(2, 3)), DomainError);
}

}  // namespace
}  // namespace usub
