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
#ifndef USUB_SELECTOR_HPP_
#define USUB_SELECTOR_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "usub/clustering.hpp"
#include "usub/labelspread.hpp"

namespace usub {

struct SelectionConfig {
  int epochs = 10;
  int seeds_per_class = 5;
  // Minimum number of distinct labels (kUnlabeled counts as one) a candidate
  // must collect across epochs to be selected. 1 selects every candidate.
  int diversity_threshold = 3;
  SpreadConfig spread;
  std::uint64_t master_seed = 0;

  void validate(int num_classes) const;
};

// Labeled samples available as spreading seeds.
struct SeedPool {
  std::vector<std::size_t> indices;  // rows of the data matrix
  std::vector<int> labels;           // parallel to indices, in [0, num_classes)
  int num_classes = 0;

  std::size_t size() const { return indices.size(); }
  std::vector<std::size_t> members_of(int cls) const;
};

// Every labeled row (label != kUnlabeled) of `labels`.
SeedPool seed_pool_from_labels(const std::vector<int>& labels, int num_classes);

// Stratified draw of `per_class` labeled rows per class (all of a class if it
// has fewer).
SeedPool draw_seed_pool(const std::vector<int>& labels, int num_classes,
                        std::size_t per_class, std::uint64_t seed);

// U: one row per candidate, one column per epoch.
struct LabelRunMatrix {
  std::vector<std::size_t> rows;  // parent-data index of each candidate
  Eigen::MatrixXi entries;        // rows.size() x epochs

  std::size_t candidates() const { return rows.size(); }
  int epochs() const { return static_cast<int>(entries.cols()); }
  int diversity(std::size_t row) const;
};

struct SelectionResult {
  std::vector<std::size_t> indices;  // parent-data indices, increasing
  std::vector<int> diversity;        // parallel to indices
  LabelRunMatrix run_matrix;

  std::size_t size() const { return indices.size(); }
};

// One epoch: draw seeds_per_class seeds per class from the pool with the
// epoch's derived stream, spread over seeds + candidates, and return the
// candidates' labels. A candidate that was drawn as a seed is spread as a
// labeled point (it appears once) and reports its spread label.
std::vector<int> run_epoch(const Eigen::Ref<const Eigen::MatrixXd>& data,
                           const std::vector<std::size_t>& candidates,
                           const SeedPool& pool, const SelectionConfig& config,
                           int epoch);

// Repeated seeded label spreading over the uncertain set followed by the
// label-diversity filter.
SelectionResult run_selection(const Eigen::Ref<const Eigen::MatrixXd>& data,
                              const UncertainSet& uncertain, const SeedPool& pool,
                              const SelectionConfig& config);

// Diversity filter alone, over an already computed run matrix.
SelectionResult filter_by_diversity(LabelRunMatrix run_matrix, int threshold);

// Per class round(fraction * count) rows, at least one per non-empty class,
// uniformly without replacement. Returned sorted.
std::vector<std::size_t> stratified_sample(const std::vector<int>& labels,
                                           int num_classes, double fraction,
                                           std::uint64_t seed);

}  // namespace usub

#endif  // USUB_SELECTOR_HPP_
