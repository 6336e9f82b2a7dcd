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
#include "usub/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "usub/random.hpp"

namespace usub {
namespace {

template <typename Fn>
auto timed_stage(const char* stage, std::vector<StageTiming>& timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    auto value = fn();
    const std::chrono::duration<double, std::milli> took =
        std::chrono::steady_clock::now() - start;
    timings.push_back({stage, took.count()});
    return value;
  } catch (const Error& e) {
    throw StageError(stage, std::current_exception(), e.what());
  }
}

}  // namespace

StageError::StageError(std::string stage, std::exception_ptr cause, const std::string& what)
    : Error(stage + ": " + what), stage_(std::move(stage)), cause_(std::move(cause)) {}

void PipelineConfig::validate(std::size_t input_dims, int num_classes) const {
  if (pca_dims < 1 || pca_dims > input_dims) {
    throw ConfigError("pca_dims must lie in [1, " + std::to_string(input_dims) + "]");
  }
  if (k < 2) throw ConfigError("k must be at least 2");
  try {
    band.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (kmeans.max_iter < 1) throw ConfigError("kmeans max_iter must be >= 1");
  selection.validate(num_classes);
}

PipelineResult run_pipeline(const Eigen::Ref<const Eigen::MatrixXd>& features,
                            const SeedPool& pool, const PipelineConfig& config,
                            std::uint64_t seed) {
  config.validate(static_cast<std::size_t>(features.cols()), pool.num_classes);
  PipelineResult out;

  out.projection = timed_stage("pca", out.timings,
                               [&] { return pca_fit(features, config.pca_dims); });
  out.reduced = timed_stage("project", out.timings,
                            [&] { return pca_transform(out.projection, features); });
  out.clusters = timed_stage("kmeans", out.timings, [&] {
    return kmeans_fit(out.reduced, config.k, derive_seed(seed, Stream::kKMeans),
                      config.kmeans);
  });
  out.uncertain = timed_stage("peripheral", out.timings, [&] {
    return peripheral_select(membership_probabilities(out.clusters, out.reduced),
                             config.band);
  });
  SelectionConfig selection = config.selection;
  selection.master_seed = derive_seed(seed, Stream::kSelection);
  out.selection = timed_stage("selection", out.timings, [&] {
    return run_selection(out.reduced, out.uncertain, pool, selection);
  });
  return out;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

RepeatabilityReport repeatability_from_seeds(const EmbeddingDataset& dataset,
                                             const std::vector<int>& truth,
                                             const std::vector<std::string>& class_names,
                                             const SeedPool& pool,
                                             const PipelineConfig& config,
                                             const std::vector<std::uint64_t>& seeds) {
  if (truth.size() != dataset.size()) {
    throw ValidationError("repeatability: truth labels do not cover the dataset");
  }
  const std::size_t classes = class_names.size();
  RepeatabilityReport report;
  report.runs = static_cast<int>(seeds.size());
  report.n = dataset.size();
  report.class_names = class_names;

  std::vector<std::vector<double>> per_class(classes);
  std::vector<double> totals;
  for (const std::uint64_t seed : seeds) {
    const PipelineResult result = run_pipeline(dataset.features, pool, config, seed);
    std::vector<std::size_t> counts(classes, 0);
    for (const std::size_t row : result.selection.indices) {
      const int label = truth[row];
      if (label >= 0 && static_cast<std::size_t>(label) < classes) {
        ++counts[static_cast<std::size_t>(label)];
      }
    }
    for (std::size_t c = 0; c < classes; ++c) {
      per_class[c].push_back(static_cast<double>(counts[c]));
    }
    totals.push_back(static_cast<double>(result.selection.size()));
    report.counts.push_back(std::move(counts));
  }
  for (const auto& values : per_class) report.per_class.push_back(mean_std(values));
  report.total = mean_std(totals);
  report.fraction_of_n =
      report.n > 0 ? report.total.mean / static_cast<double>(report.n) : 0.0;
  return report;
}

RepeatabilityReport repeatability_report(const EmbeddingDataset& dataset,
                                         const std::vector<int>& truth,
                                         const std::vector<std::string>& class_names,
                                         const SeedPool& pool,
                                         const PipelineConfig& config, int runs,
                                         std::uint64_t master_seed) {
  if (runs < 1) throw ConfigError("repeatability: runs must be >= 1");
  std::vector<std::uint64_t> seeds;
  for (int r = 0; r < runs; ++r) {
    seeds.push_back(derive_seed(master_seed, Stream::kRun, static_cast<std::uint64_t>(r)));
  }
  return repeatability_from_seeds(dataset, truth, class_names, pool, config, seeds);
}

}  // namespace usub
