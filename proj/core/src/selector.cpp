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
#include "usub/selector.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "usub/dataio.hpp"
#include "usub/error.hpp"
#include "usub/random.hpp"

namespace usub {
namespace {

using Index = Eigen::Index;

std::vector<std::vector<std::size_t>> rows_by_class(const std::vector<int>& labels,
                                                    int num_classes) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int label = labels[i];
    if (label == kUnlabeled) continue;
    if (label < 0 || label >= num_classes) {
      throw ValidationError("label " + std::to_string(label) + " outside [0, " +
                            std::to_string(num_classes) + ")");
    }
    by_class[static_cast<std::size_t>(label)].push_back(i);
  }
  return by_class;
}

void check_pool(const SeedPool& pool, const SelectionConfig& config) {
  for (int c = 0; c < pool.num_classes; ++c) {
    const std::size_t have = pool.members_of(c).size();
    if (have < static_cast<std::size_t>(config.seeds_per_class)) {
      throw PreconditionError("class " + std::to_string(c) + " has " + std::to_string(have) +
                              " labeled sample(s); " + std::to_string(config.seeds_per_class) +
                              " seeds per class are required");
    }
  }
}

}  // namespace

void SelectionConfig::validate(int num_classes) const {
  if (epochs < 1) throw ConfigError("selection: epochs must be >= 1");
  if (seeds_per_class < 1) throw ConfigError("selection: seeds_per_class must be >= 1");
  if (diversity_threshold < 1 || diversity_threshold > num_classes + 1) {
    throw ConfigError("selection: diversity_threshold must lie in [1, " +
                      std::to_string(num_classes + 1) + "]");
  }
  try {
    spread.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> SeedPool::members_of(int cls) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cls) out.push_back(indices[i]);
  }
  return out;
}

SeedPool seed_pool_from_labels(const std::vector<int>& labels, int num_classes) {
  SeedPool pool;
  pool.num_classes = num_classes;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnlabeled) continue;
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw ValidationError("seed pool: label " + std::to_string(labels[i]) + " out of range");
    }
    pool.indices.push_back(i);
    pool.labels.push_back(labels[i]);
  }
  return pool;
}

SeedPool draw_seed_pool(const std::vector<int>& labels, int num_classes,
                        std::size_t per_class, std::uint64_t seed) {
  const auto by_class = rows_by_class(labels, num_classes);
  Rng rng(seed);
  std::vector<std::pair<std::size_t, int>> picked;
  for (int c = 0; c < num_classes; ++c) {
    const auto& rows = by_class[static_cast<std::size_t>(c)];
    for (const std::size_t k : rng.sample_without_replacement(rows.size(), per_class)) {
      picked.emplace_back(rows[k], c);
    }
  }
  std::sort(picked.begin(), picked.end());
  SeedPool pool;
  pool.num_classes = num_classes;
  for (const auto& [row, c] : picked) {
    pool.indices.push_back(row);
    pool.labels.push_back(c);
  }
  return pool;
}

int LabelRunMatrix::diversity(std::size_t row) const {
  std::vector<int> values(entries.cols());
  for (Index e = 0; e < entries.cols(); ++e) {
    values[static_cast<std::size_t>(e)] = entries(static_cast<Index>(row), e);
  }
  std::sort(values.begin(), values.end());
  return static_cast<int>(std::unique(values.begin(), values.end()) - values.begin());
}

std::vector<int> run_epoch(const Eigen::Ref<const Eigen::MatrixXd>& data,
                           const std::vector<std::size_t>& candidates,
                           const SeedPool& pool, const SelectionConfig& config, int epoch) {
  Rng rng(derive_seed(config.master_seed, Stream::kSelection,
                      static_cast<std::uint64_t>(epoch)));

  // Seed rows in class order; a row may only be drawn once per epoch.
  std::vector<std::pair<std::size_t, int>> seeds;
  for (int c = 0; c < pool.num_classes; ++c) {
    const auto members = pool.members_of(c);
    if (members.size() < static_cast<std::size_t>(config.seeds_per_class)) {
      throw PreconditionError("class " + std::to_string(c) + " has too few labeled samples");
    }
    for (const std::size_t k : rng.sample_without_replacement(
             members.size(), static_cast<std::size_t>(config.seeds_per_class))) {
      seeds.emplace_back(members[k], c);
    }
  }

  std::unordered_map<std::size_t, Index> candidate_slot;
  candidate_slot.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    candidate_slot.emplace(candidates[i], static_cast<Index>(i));
  }

  std::vector<std::size_t> rows(candidates);
  std::vector<int> labels(candidates.size(), kUnlabeled);
  for (const auto& [row, c] : seeds) {
    const auto it = candidate_slot.find(row);
    if (it != candidate_slot.end()) {
      labels[static_cast<std::size_t>(it->second)] = c;
    } else {
      rows.push_back(row);
      labels.push_back(c);
    }
  }

  Eigen::MatrixXd points(static_cast<Index>(rows.size()), data.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    points.row(static_cast<Index>(i)) = data.row(static_cast<Index>(rows[i]));
  }
  const SpreadResult spread = spread_labels(points, labels, pool.num_classes, config.spread);
  if (!spread.converged) {
    spdlog::warn("selection epoch {}: label spreading stopped at max_iter={} before converging",
                 epoch, config.spread.max_iter);
  }
  return {spread.labels.begin(),
          spread.labels.begin() + static_cast<std::ptrdiff_t>(candidates.size())};
}

SelectionResult filter_by_diversity(LabelRunMatrix run_matrix, int threshold) {
  SelectionResult result;
  for (std::size_t r = 0; r < run_matrix.candidates(); ++r) {
    const int diversity = run_matrix.diversity(r);
    if (diversity >= threshold) {
      result.indices.push_back(run_matrix.rows[r]);
      result.diversity.push_back(diversity);
    }
  }
  result.run_matrix = std::move(run_matrix);
  return result;
}

SelectionResult run_selection(const Eigen::Ref<const Eigen::MatrixXd>& data,
                              const UncertainSet& uncertain, const SeedPool& pool,
                              const SelectionConfig& config) {
  config.validate(pool.num_classes);
  check_pool(pool, config);
  for (const std::size_t row : uncertain.indices) {
    if (row >= static_cast<std::size_t>(data.rows())) {
      throw DomainError("run_selection: uncertain index " + std::to_string(row) +
                        " out of range");
    }
  }

  LabelRunMatrix u;
  u.rows = uncertain.indices;
  u.entries.resize(static_cast<Index>(u.rows.size()), config.epochs);
  if (!u.rows.empty()) {
    for (int e = 0; e < config.epochs; ++e) {
      const std::vector<int> column = run_epoch(data, u.rows, pool, config, e);
      for (std::size_t r = 0; r < column.size(); ++r) {
        u.entries(static_cast<Index>(r), e) = column[r];
      }
    }
  }
  return filter_by_diversity(std::move(u), config.diversity_threshold);
}

std::vector<std::size_t> stratified_sample(const std::vector<int>& labels, int num_classes,
                                           double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw DomainError("stratified_sample: fraction must lie in (0, 1]");
  }
  const auto by_class = rows_by_class(labels, num_classes);
  Rng rng(seed);
  std::vector<std::size_t> out;
  for (int c = 0; c < num_classes; ++c) {
    const auto& rows = by_class[static_cast<std::size_t>(c)];
    if (rows.empty()) {
      spdlog::warn("stratified_sample: class {} is empty; skipped", c);
      continue;
    }
    auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows.size())));
    take = std::clamp<std::size_t>(take, 1, rows.size());
    for (const std::size_t k : rng.sample_without_replacement(rows.size(), take)) {
      out.push_back(rows[k]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace usub
