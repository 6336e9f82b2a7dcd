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
#ifndef USUB_DATAIO_HPP_
#define USUB_DATAIO_HPP_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace usub {

struct SelectionResult;
struct FeatureMap;

inline constexpr int kUnlabeled = -1;

// n x D per-sample feature vectors. Row order is the canonical sample index
// used everywhere downstream.
struct EmbeddingDataset {
  std::vector<std::string> ids;
  Eigen::MatrixXd features;
  // Either empty (no labels) or one entry per row, kUnlabeled for unknown.
  std::vector<int> labels;

  std::size_t size() const { return ids.size(); }
  std::size_t dims() const { return static_cast<std::size_t>(features.cols()); }
  bool has_labels() const { return !labels.empty(); }

  // Throws ValidationError on duplicate ids, shape mismatch or non-finite
  // features.
  void validate() const;

  // Rows `rows` as a new dataset (ids, features and labels kept aligned).
  EmbeddingDataset subset(const std::vector<std::size_t>& rows) const;
};

struct LabelTable {
  std::map<std::string, int> labels;
  std::vector<std::string> class_names;

  int num_classes() const { return static_cast<int>(class_names.size()); }
};

// Class names "0".."C-1".
std::vector<std::string> default_class_names(int num_classes);

// Always 17 significant digits (printf %.17g), locale independent.
std::string format_double(double value);

EmbeddingDataset load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingDataset& dataset,
                     const std::filesystem::path& path);

// Reads an id,label CSV and attaches the labels to `dataset` (ids not in the
// file become kUnlabeled). When `num_classes` is empty it is inferred as
// max(2, max label + 1).
LabelTable load_labels(const std::filesystem::path& path,
                       EmbeddingDataset& dataset,
                       std::optional<int> num_classes = std::nullopt);

// Writes every labeled sample of `dataset` in row order.
void save_labels(const EmbeddingDataset& dataset,
                 const std::filesystem::path& path);

// id,diversity rows sorted by diversity descending, then id ascending.
void save_selection(const SelectionResult& result,
                    const std::vector<std::string>& ids,
                    const std::filesystem::path& path);

// id,e0..e{E-1}: one row per candidate of the label-run matrix.
void save_run_matrix(const SelectionResult& result,
                     const std::vector<std::string>& ids,
                     const std::filesystem::path& path);

// Flat tensor CSV: first line "h,w,c", then h*w*c values in row-major
// (h, w, c) order, separated by commas and/or newlines.
FeatureMap load_feature_map(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace usub

#endif  // USUB_DATAIO_HPP_
