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
#include "usub/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <spdlog/spdlog.h>

#include "usub/clustering.hpp"
#include "usub/error.hpp"
#include "usub/random.hpp"
#include "usub/selector.hpp"

namespace usub {
namespace {

using Index = Eigen::Index;

std::string percent_name(double fraction) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), fraction * 100.0);
  (void)ec;
  return std::string(buf, ptr) + "%";
}

Evaluation evaluate(const NearestCentroid& model, const EmbeddingDataset& test,
                    int num_classes) {
  return compute_metrics(test.labels, model.predict_all(test.features), num_classes);
}

NearestCentroid fit_rows(const EmbeddingDataset& train, const std::vector<std::size_t>& rows,
                         int num_classes) {
  const EmbeddingDataset part = train.subset(rows);
  return NearestCentroid::fit(part.features, part.labels, num_classes);
}

}  // namespace

void SyntheticSpec::validate() const {
  if (num_classes < 2) throw DomainError("synthetic: need at least two classes");
  if (samples_per_class < 1) throw DomainError("synthetic: samples_per_class must be >= 1");
  if (dims < 1) throw DomainError("synthetic: dims must be >= 1");
  const auto d = static_cast<Index>(dims);
  if (means.rows() != num_classes || means.cols() != d) {
    throw DomainError("synthetic: means must be C x d");
  }
  if (covariances.size() != static_cast<std::size_t>(num_classes)) {
    throw DomainError("synthetic: one covariance per class required");
  }
  for (int c = 0; c < num_classes; ++c) {
    // Throws DomainError for non-SPD input.
    GaussianDensity(means.row(c).transpose(), covariances[static_cast<std::size_t>(c)]);
  }
}

SyntheticSpec SyntheticSpec::isotropic(int num_classes, std::size_t samples_per_class,
                                       std::size_t dims, double overlap,
                                       std::uint64_t seed) {
  if (!(overlap >= 0.0) || !std::isfinite(overlap)) {
    throw DomainError("synthetic: overlap must be a finite value >= 0");
  }
  if (num_classes < 2 || dims < 1 || static_cast<std::size_t>(num_classes) > 2 * dims) {
    throw DomainError("synthetic: need 2 <= classes <= 2 * dims");
  }
  SyntheticSpec spec;
  spec.num_classes = num_classes;
  spec.samples_per_class = samples_per_class;
  spec.dims = dims;
  spec.seed = seed;
  const auto d = static_cast<Index>(dims);
  spec.means = Eigen::MatrixXd::Zero(num_classes, d);
  const double sigma = overlap / 2.0;
  const double variance = std::max(sigma * sigma, kMinVariance);
  for (int c = 0; c < num_classes; ++c) {
    const Index axis = static_cast<Index>(c) % d;
    const double sign = static_cast<Index>(c) < d ? 1.0 : -1.0;
    spec.means(c, axis) = sign / std::sqrt(2.0);
    spec.covariances.push_back(variance * Eigen::MatrixXd::Identity(d, d));
  }
  spec.validate();
  return spec;
}

SyntheticSpec standard_fixture(std::uint64_t seed) {
  return SyntheticSpec::isotropic(4, 2500, 8, 0.5, seed);
}

EmbeddingDataset generate_mixture(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.samples_per_class * static_cast<std::size_t>(spec.num_classes);
  const auto d = static_cast<Index>(spec.dims);
  const std::size_t width = std::max<std::size_t>(6, std::to_string(n - 1).size());

  EmbeddingDataset out;
  out.features.resize(static_cast<Index>(n), d);
  out.ids.reserve(n);
  out.labels.reserve(n);
  Rng rng(spec.seed);
  Eigen::VectorXd z(d);
  std::size_t row = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    const Eigen::MatrixXd chol =
        Eigen::LLT<Eigen::MatrixXd>(spec.covariances[static_cast<std::size_t>(c)]).matrixL();
    for (std::size_t s = 0; s < spec.samples_per_class; ++s, ++row) {
      for (Index j = 0; j < d; ++j) z[j] = rng.normal();
      out.features.row(static_cast<Index>(row)) =
          spec.means.row(c) + (chol * z).transpose();
      std::string id = std::to_string(row);
      out.ids.push_back("s" + std::string(width - id.size(), '0') + id);
      out.labels.push_back(c);
    }
  }
  return out;
}

Eigen::VectorXd true_posterior(const SyntheticSpec& spec,
                               const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd logp(spec.num_classes);
  for (int c = 0; c < spec.num_classes; ++c) {
    logp[c] = GaussianDensity(spec.means.row(c).transpose(),
                              spec.covariances[static_cast<std::size_t>(c)])
                  .log_pdf(x);
  }
  const double peak = logp.maxCoeff();
  Eigen::VectorXd p = (logp.array() - peak).exp();
  return p / p.sum();
}

std::vector<bool> ambiguous_mask(const SyntheticSpec& spec,
                                 const Eigen::Ref<const Eigen::MatrixXd>& features) {
  std::vector<GaussianDensity> densities;
  for (int c = 0; c < spec.num_classes; ++c) {
    densities.emplace_back(spec.means.row(c).transpose(),
                           spec.covariances[static_cast<std::size_t>(c)]);
  }
  std::vector<bool> mask(static_cast<std::size_t>(features.rows()));
  Eigen::VectorXd logp(spec.num_classes);
  for (Index i = 0; i < features.rows(); ++i) {
    const Eigen::VectorXd x = features.row(i).transpose();
    for (int c = 0; c < spec.num_classes; ++c) {
      logp[c] = densities[static_cast<std::size_t>(c)].log_pdf(x);
    }
    const double peak = logp.maxCoeff();
    const double max_posterior = 1.0 / (logp.array() - peak).exp().sum();
    mask[static_cast<std::size_t>(i)] = max_posterior < kAmbiguityCutoff;
  }
  return mask;
}

double boundary_enrichment(const std::vector<std::size_t>& selected,
                           const SyntheticSpec& spec, const EmbeddingDataset& dataset) {
  const std::vector<bool> mask = ambiguous_mask(spec, dataset.features);
  const auto ambiguous = static_cast<double>(std::count(mask.begin(), mask.end(), true));
  if (ambiguous == 0.0) {
    spdlog::warn("boundary_enrichment: population has no ambiguous samples");
    return std::numeric_limits<double>::infinity();
  }
  if (selected.empty()) return 0.0;
  double hits = 0.0;
  for (const std::size_t row : selected) hits += mask.at(row) ? 1.0 : 0.0;
  const double selected_rate = hits / static_cast<double>(selected.size());
  const double population_rate = ambiguous / static_cast<double>(mask.size());
  return selected_rate / population_rate;
}

NearestCentroid NearestCentroid::fit(const Eigen::Ref<const Eigen::MatrixXd>& features,
                                     const std::vector<int>& labels, int num_classes) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DomainError("nearest centroid: label count does not match rows");
  }
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(num_classes, features.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label == kUnlabeled) continue;
    if (label < 0 || label >= num_classes) {
      throw DomainError("nearest centroid: label out of range");
    }
    sums.row(label) += features.row(static_cast<Index>(i));
    ++counts[static_cast<std::size_t>(label)];
  }
  for (int c = 0; c < num_classes; ++c) {
    const std::size_t count = counts[static_cast<std::size_t>(c)];
    if (count == 0) {
      throw PreconditionError("nearest centroid: class " + std::to_string(c) +
                              " has no training samples");
    }
    sums.row(c) /= static_cast<double>(count);
  }
  return NearestCentroid(std::move(sums));
}

int NearestCentroid::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index c = 0; c < centroids_.rows(); ++c) {
    const double d = (centroids_.row(c).transpose() - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<int> NearestCentroid::predict_all(
    const Eigen::Ref<const Eigen::MatrixXd>& features) const {
  std::vector<int> out(static_cast<std::size_t>(features.rows()));
  for (Index i = 0; i < features.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = predict(features.row(i).transpose());
  }
  return out;
}

Eigen::MatrixXd ConfusionMatrix::row_normalized() const {
  Eigen::MatrixXd out = counts.cast<double>();
  for (Index r = 0; r < out.rows(); ++r) {
    const double sum = out.row(r).sum();
    if (sum > 0.0) out.row(r) /= sum;
  }
  return out;
}

Evaluation compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted,
                           int num_classes) {
  if (truth.size() != predicted.size()) {
    throw DomainError("compute_metrics: " + std::to_string(truth.size()) + " true vs " +
                      std::to_string(predicted.size()) + " predicted labels");
  }
  if (num_classes < 1) throw DomainError("compute_metrics: num_classes must be >= 1");
  Evaluation out;
  auto& cm = out.confusion.counts;
  cm.setZero(num_classes, num_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predicted[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
      throw DomainError("compute_metrics: label outside [0, " + std::to_string(num_classes) +
                        ")");
    }
    ++cm(t, p);
  }

  auto& m = out.metrics;
  const double total = static_cast<double>(cm.sum());
  m.accuracy = total > 0.0 ? static_cast<double>(cm.trace()) / total : 0.0;
  for (int c = 0; c < num_classes; ++c) {
    const double tp = static_cast<double>(cm(c, c));
    const double predicted_c = static_cast<double>(cm.col(c).sum());
    const double actual_c = static_cast<double>(cm.row(c).sum());
    const double precision = predicted_c > 0.0 ? tp / predicted_c : 0.0;
    const double recall = actual_c > 0.0 ? tp / actual_c : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.precision.push_back(precision);
    m.recall.push_back(recall);
    m.f1.push_back(f1);
  }
  const auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  m.macro_precision = mean(m.precision);
  m.macro_recall = mean(m.recall);
  m.macro_f1 = mean(m.f1);
  return out;
}

CompareReport compare_sampling(const EmbeddingDataset& dataset, const std::vector<int>& truth,
                               int num_classes, const PipelineConfig& config,
                               const CompareOptions& options, std::uint64_t seed) {
  if (truth.size() != dataset.size()) {
    throw ValidationError("compare: truth labels do not cover the dataset");
  }
  if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0)) {
    throw ConfigError("compare: test_fraction must lie in (0, 1)");
  }
  if (options.repeats < 1) throw ConfigError("compare: repeats must be >= 1");
  EmbeddingDataset labeled = dataset;
  labeled.labels = truth;

  CompareReport report;
  report.repeats = options.repeats;
  const std::size_t rows_total = options.fractions.size() + 1;
  report.regimes.resize(rows_total);
  for (std::size_t i = 0; i < options.fractions.size(); ++i) {
    report.regimes[i].name = percent_name(options.fractions[i]);
  }
  report.regimes.back().name = "proposed";
  for (auto& regime : report.regimes) {
    regime.evaluation.confusion.counts.setZero(num_classes, num_classes);
  }

  const auto accumulate = [&](RegimeResult& regime, std::size_t train_size,
                              const Evaluation& eval) {
    regime.mean_train_size += static_cast<double>(train_size);
    regime.accuracies.push_back(eval.metrics.accuracy);
    regime.evaluation.confusion.counts += eval.confusion.counts;
    auto& m = regime.evaluation.metrics;
    m.accuracy += eval.metrics.accuracy;
    m.macro_precision += eval.metrics.macro_precision;
    m.macro_recall += eval.metrics.macro_recall;
    m.macro_f1 += eval.metrics.macro_f1;
    m.precision.resize(eval.metrics.precision.size(), 0.0);
    m.recall.resize(eval.metrics.recall.size(), 0.0);
    m.f1.resize(eval.metrics.f1.size(), 0.0);
    for (std::size_t c = 0; c < eval.metrics.precision.size(); ++c) {
      m.precision[c] += eval.metrics.precision[c];
      m.recall[c] += eval.metrics.recall[c];
      m.f1[c] += eval.metrics.f1[c];
    }
  };

  for (int rep = 0; rep < options.repeats; ++rep) {
    const std::uint64_t rep_seed =
        derive_seed(seed, Stream::kRun, static_cast<std::uint64_t>(rep));
    const std::vector<std::size_t> test_rows = stratified_sample(
        truth, num_classes, options.test_fraction, derive_seed(rep_seed, Stream::kSplit));
    std::vector<std::size_t> train_rows;
    {
      std::vector<bool> is_test(dataset.size(), false);
      for (const std::size_t r : test_rows) is_test[r] = true;
      for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (!is_test[r] && truth[r] != kUnlabeled) train_rows.push_back(r);
      }
    }
    const EmbeddingDataset test = labeled.subset(test_rows);
    const EmbeddingDataset train = labeled.subset(train_rows);
    report.train_pool = train.size();
    report.test_size = test.size();

    for (std::size_t i = 0; i < options.fractions.size(); ++i) {
      const std::vector<std::size_t> rows =
          stratified_sample(train.labels, num_classes, options.fractions[i],
                            derive_seed(rep_seed, Stream::kStratified, i));
      accumulate(report.regimes[i], rows.size(),
                 evaluate(fit_rows(train, rows, num_classes), test, num_classes));
    }

    const SeedPool pool =
        draw_seed_pool(train.labels, num_classes, options.seed_pool_per_class,
                       derive_seed(rep_seed, Stream::kSeedPool));
    const PipelineResult run = run_pipeline(train.features, pool, config, rep_seed);
    accumulate(report.regimes.back(), run.selection.size(),
               evaluate(fit_rows(train, run.selection.indices, num_classes), test,
                        num_classes));
  }

  const double r = static_cast<double>(options.repeats);
  for (auto& regime : report.regimes) {
    regime.mean_train_size /= r;
    auto& m = regime.evaluation.metrics;
    m.accuracy /= r;
    m.macro_precision /= r;
    m.macro_recall /= r;
    m.macro_f1 /= r;
    for (auto* v : {&m.precision, &m.recall, &m.f1}) {
      for (double& x : *v) x /= r;
    }
  }
  return report;
}

}  // namespace usub
