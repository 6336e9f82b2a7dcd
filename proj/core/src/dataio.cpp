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
#include "usub/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "usub/encoding.hpp"
#include "usub/error.hpp"
#include "usub/selector.hpp"

namespace usub {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

double parse_double(std::string_view cell, const std::string& path, std::size_t line) {
  double value = 0.0;
  const char* end = cell.data() + cell.size();
  // from_chars rejects a leading '+', which some writers emit.
  const char* begin = cell.data();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(path, line, "not a number: '" + std::string(cell) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(path, line, "non-finite value: '" + std::string(cell) + "'");
  }
  return value;
}

long long parse_integer(std::string_view cell, const std::string& path, std::size_t line) {
  long long value = 0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (cell.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(path, line, "not an integer: '" + std::string(cell) + "'");
  }
  return value;
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> default_class_names(int num_classes) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(std::max(num_classes, 0)));
  for (int c = 0; c < num_classes; ++c) names.push_back(std::to_string(c));
  return names;
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  if (ec != std::errc()) throw IoError("format_double: conversion failed");
  return std::string(buf, ptr);
}

void EmbeddingDataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != ids.size()) {
    throw ValidationError("dataset: " + std::to_string(ids.size()) + " ids but " +
                          std::to_string(features.rows()) + " feature rows");
  }
  if (!labels.empty() && labels.size() != ids.size()) {
    throw ValidationError("dataset: label count does not match sample count");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw ValidationError("dataset: duplicate id '" + id + "'");
  }
  if (!features.allFinite()) throw ValidationError("dataset: non-finite feature value");
}

EmbeddingDataset EmbeddingDataset::subset(const std::vector<std::size_t>& rows) const {
  EmbeddingDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.ids.reserve(rows.size());
  if (has_labels()) out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    out.ids.push_back(ids.at(r));
    out.features.row(static_cast<Eigen::Index>(i)) =
        features.row(static_cast<Eigen::Index>(r));
    if (has_labels()) out.labels.push_back(labels[r]);
  }
  return out;
}

EmbeddingDataset load_embeddings(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  const std::string name = path.string();
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) {
    throw ParseError(name, 1, "missing header");
  }
  const auto header = split_commas(line);
  if (header.size() < 2 || header[0] != "id") {
    throw ParseError(name, line_no, "header must be id,f0,...,f{D-1}");
  }
  for (std::size_t j = 1; j < header.size(); ++j) {
    if (header[j] != "f" + std::to_string(j - 1)) {
      throw ParseError(name, line_no, "unexpected header column '" +
                                          std::string(header[j]) + "'");
    }
  }
  const std::size_t dims = header.size() - 1;

  std::vector<std::string> ids;
  std::vector<double> values;
  while (next_content_line(in, line, line_no)) {
    const auto cells = split_commas(line);
    if (cells.size() != dims + 1) {
      throw ParseError(name, line_no, "expected " + std::to_string(dims + 1) +
                                          " columns, got " + std::to_string(cells.size()));
    }
    if (cells[0].empty()) throw ParseError(name, line_no, "empty id");
    ids.emplace_back(cells[0]);
    for (std::size_t j = 1; j <= dims; ++j) {
      values.push_back(parse_double(cells[j], name, line_no));
    }
  }

  EmbeddingDataset dataset;
  dataset.ids = std::move(ids);
  dataset.features = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                    Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(dataset.ids.size()),
      static_cast<Eigen::Index>(dims));
  dataset.validate();
  return dataset;
}

void save_embeddings(const EmbeddingDataset& dataset, const std::filesystem::path& path) {
  dataset.validate();
  std::ostringstream os;
  os << "id";
  for (std::size_t j = 0; j < dataset.dims(); ++j) os << ",f" << j;
  os << '\n';
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    os << dataset.ids[i];
    for (std::size_t j = 0; j < dataset.dims(); ++j) {
      os << ',' << format_double(dataset.features(static_cast<Eigen::Index>(i),
                                                  static_cast<Eigen::Index>(j)));
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

LabelTable load_labels(const std::filesystem::path& path, EmbeddingDataset& dataset,
                       std::optional<int> num_classes) {
  if (num_classes && *num_classes < 2) {
    throw ValidationError("labels: need at least two classes");
  }
  auto in = open_for_read(path);
  const std::string name = path.string();

  std::unordered_map<std::string_view, std::size_t> row_of;
  row_of.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) row_of.emplace(dataset.ids[i], i);

  LabelTable table;
  std::string line;
  std::size_t line_no = 0;
  if (next_content_line(in, line, line_no)) {
    const auto header = split_commas(line);
    if (header.size() != 2 || header[0] != "id" || header[1] != "label") {
      throw ParseError(name, line_no, "header must be id,label");
    }
    while (next_content_line(in, line, line_no)) {
      const auto cells = split_commas(line);
      if (cells.size() != 2) {
        throw ParseError(name, line_no, "expected 2 columns, got " +
                                            std::to_string(cells.size()));
      }
      const std::string id(cells[0]);
      const long long label = parse_integer(cells[1], name, line_no);
      if (!row_of.contains(id)) {
        throw ValidationError(name + ":" + std::to_string(line_no) + ": unknown id '" +
                              id + "'");
      }
      if (label < 0 || (num_classes && label >= *num_classes) || label > 1'000'000) {
        throw ValidationError(name + ":" + std::to_string(line_no) + ": label " +
                              std::to_string(label) + " out of range");
      }
      if (!table.labels.emplace(id, static_cast<int>(label)).second) {
        throw ValidationError(name + ":" + std::to_string(line_no) +
                              ": duplicate id '" + id + "'");
      }
    }
  }

  int classes = num_classes.value_or(2);
  if (!num_classes) {
    for (const auto& [id, label] : table.labels) classes = std::max(classes, label + 1);
  }
  table.class_names = default_class_names(classes);

  dataset.labels.assign(dataset.size(), kUnlabeled);
  for (const auto& [id, label] : table.labels) dataset.labels[row_of.at(id)] = label;
  return table;
}

void save_labels(const EmbeddingDataset& dataset, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "id,label\n";
  if (dataset.has_labels()) {
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.labels[i] != kUnlabeled) os << dataset.ids[i] << ',' << dataset.labels[i] << '\n';
    }
  }
  write_text_file(path, os.str());
}

void save_selection(const SelectionResult& result, const std::vector<std::string>& ids,
                    const std::filesystem::path& path) {
  std::vector<std::size_t> order(result.indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (result.diversity[a] != result.diversity[b]) {
      return result.diversity[a] > result.diversity[b];
    }
    return ids.at(result.indices[a]) < ids.at(result.indices[b]);
  });
  std::ostringstream os;
  os << "id,diversity\n";
  for (const std::size_t o : order) {
    os << ids.at(result.indices[o]) << ',' << result.diversity[o] << '\n';
  }
  write_text_file(path, os.str());
}

void save_run_matrix(const SelectionResult& result, const std::vector<std::string>& ids,
                     const std::filesystem::path& path) {
  const auto& u = result.run_matrix;
  std::ostringstream os;
  os << "id";
  for (int e = 0; e < u.epochs(); ++e) os << ",e" << e;
  os << '\n';
  for (std::size_t r = 0; r < u.candidates(); ++r) {
    os << ids.at(u.rows[r]);
    for (int e = 0; e < u.epochs(); ++e) {
      os << ',' << u.entries(static_cast<Eigen::Index>(r), e);
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

FeatureMap load_feature_map(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  const std::string name = path.string();
  std::string line;
  std::size_t line_no = 0;
  if (!next_content_line(in, line, line_no)) throw ParseError(name, 1, "missing shape line");
  const auto shape = split_commas(line);
  if (shape.size() != 3) throw ParseError(name, line_no, "shape line must be h,w,c");
  FeatureMap map;
  const auto dim = [&](std::string_view cell) {
    const long long v = parse_integer(cell, name, line_no);
    if (v < 1) throw ParseError(name, line_no, "shape entries must be >= 1");
    return static_cast<std::size_t>(v);
  };
  map.height = dim(shape[0]);
  map.width = dim(shape[1]);
  map.channels = dim(shape[2]);
  const std::size_t expected = map.height * map.width * map.channels;
  map.values.reserve(expected);
  while (next_content_line(in, line, line_no)) {
    for (const auto cell : split_commas(line)) {
      if (cell.empty()) continue;
      map.values.push_back(parse_double(cell, name, line_no));
    }
  }
  if (map.values.size() != expected) {
    throw ParseError(name, line_no, "expected " + std::to_string(expected) +
                                        " values, got " + std::to_string(map.values.size()));
  }
  return map;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto out = open_for_write(path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  finish_write(out, path);
}

}  // namespace usub
