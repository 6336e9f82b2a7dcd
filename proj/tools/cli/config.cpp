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
#include "cli/config.hpp"

#include <fstream>

#include "usub/error.hpp"

namespace usub::cli {
namespace {

using nlohmann::json;

template <typename T>
void read(const json& obj, const char* key, T& into) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void read_path(const json& obj, const char* key, const std::filesystem::path& base,
               std::filesystem::path& into) {
  std::string raw;
  read(obj, key, raw);
  if (raw.empty()) return;
  const std::filesystem::path p(raw);
  into = p.is_absolute() ? p : base / p;
}

const json& section(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  if (!doc.at(key).is_object()) throw ConfigError(std::string("config: '") + key + "' must be an object");
  return doc.at(key);
}

void require_existing(const std::filesystem::path& path, const char* what) {
  if (!path.empty() && !std::filesystem::exists(path)) {
    throw ConfigError(std::string(what) + " file not found: " + path.string());
  }
}

}  // namespace

std::string band_mode_name(BandMode mode) { return mode == BandMode::kMax ? "max" : "any"; }

BandMode parse_band_mode(const std::string& name) {
  if (name == "any") return BandMode::kAny;
  if (name == "max") return BandMode::kMax;
  throw ConfigError("band mode must be 'any' or 'max', got '" + name + "'");
}

std::string covariance_mode_name(CovarianceMode mode) {
  return mode == CovarianceMode::kDiagonal ? "diagonal" : "full";
}

CovarianceMode parse_covariance_mode(const std::string& name) {
  if (name == "full") return CovarianceMode::kFull;
  if (name == "diagonal") return CovarianceMode::kDiagonal;
  throw ConfigError("covariance mode must be 'full' or 'diagonal', got '" + name + "'");
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig run_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  RunConfig c;
  read_path(doc, "embeddings", base_dir, c.embeddings);
  read_path(doc, "labels", base_dir, c.labels);
  read_path(doc, "truth", base_dir, c.truth);
  read_path(doc, "out_dir", base_dir, c.out_dir);
  read(doc, "seed", c.seed);
  if (doc.contains("num_classes") && !doc.at("num_classes").is_null()) {
    int classes = 0;
    read(doc, "num_classes", classes);
    c.num_classes = classes;
  }
  read(doc, "class_names", c.class_names);
  read(doc, "pca_dims", c.pipeline.pca_dims);
  read(doc, "k", c.pipeline.k);
  read(doc, "runs", c.runs);

  const json& band = section(doc, "band");
  read(band, "lo", c.pipeline.band.lo);
  read(band, "hi", c.pipeline.band.hi);
  std::string mode = band_mode_name(c.pipeline.band.mode);
  read(band, "mode", mode);
  c.pipeline.band.mode = parse_band_mode(mode);

  std::string covariance = covariance_mode_name(c.pipeline.kmeans.covariance);
  read(doc, "covariance", covariance);
  c.pipeline.kmeans.covariance = parse_covariance_mode(covariance);

  const json& spread = section(doc, "spread");
  read(spread, "alpha", c.pipeline.selection.spread.alpha);
  read(spread, "gamma", c.pipeline.selection.spread.gamma);
  read(spread, "tol", c.pipeline.selection.spread.tol);
  read(spread, "max_iter", c.pipeline.selection.spread.max_iter);

  const json& selection = section(doc, "selection");
  read(selection, "epochs", c.pipeline.selection.epochs);
  read(selection, "seeds_per_class", c.pipeline.selection.seeds_per_class);
  read(selection, "diversity_threshold", c.pipeline.selection.diversity_threshold);

  const json& compare = section(doc, "compare");
  read(compare, "test_fraction", c.compare.test_fraction);
  read(compare, "fractions", c.compare.fractions);
  read(compare, "seed_pool_per_class", c.compare.seed_pool_per_class);
  read(compare, "repeats", c.compare.repeats);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(doc, path.parent_path());
}

void RunConfig::validate() const {
  require_existing(embeddings, "embeddings");
  require_existing(labels, "labels");
  require_existing(truth, "truth");
  if (num_classes && *num_classes < 2) throw ConfigError("num_classes must be >= 2");
  if (pipeline.pca_dims < 1) throw ConfigError("pca_dims must be >= 1");
  if (pipeline.k < 2) throw ConfigError("k must be >= 2");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  try {
    pipeline.band.validate();
    pipeline.selection.spread.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (pipeline.selection.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (pipeline.selection.seeds_per_class < 1) throw ConfigError("seeds_per_class must be >= 1");
  if (pipeline.selection.diversity_threshold < 1) {
    throw ConfigError("diversity_threshold must be >= 1");
  }
  if (!(compare.test_fraction > 0.0 && compare.test_fraction < 1.0)) {
    throw ConfigError("compare.test_fraction must lie in (0, 1)");
  }
  for (const double f : compare.fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("compare.fractions must lie in (0, 1]");
  }
  if (compare.repeats < 1) throw ConfigError("compare.repeats must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  json doc;
  doc["embeddings"] = c.embeddings.generic_string();
  doc["labels"] = c.labels.generic_string();
  doc["truth"] = c.truth.generic_string();
  doc["out_dir"] = c.out_dir.generic_string();
  doc["seed"] = c.seed;
  doc["num_classes"] = c.num_classes ? json(*c.num_classes) : json(nullptr);
  doc["class_names"] = c.class_names;
  doc["pca_dims"] = c.pipeline.pca_dims;
  doc["k"] = c.pipeline.k;
  doc["band"] = {{"lo", c.pipeline.band.lo},
                 {"hi", c.pipeline.band.hi},
                 {"mode", band_mode_name(c.pipeline.band.mode)}};
  doc["covariance"] = covariance_mode_name(c.pipeline.kmeans.covariance);
  const auto& s = c.pipeline.selection;
  doc["spread"] = {{"alpha", s.spread.alpha},
                   {"gamma", s.spread.gamma},
                   {"tol", s.spread.tol},
                   {"max_iter", s.spread.max_iter}};
  doc["selection"] = {{"epochs", s.epochs},
                      {"seeds_per_class", s.seeds_per_class},
                      {"diversity_threshold", s.diversity_threshold}};
  doc["runs"] = c.runs;
  doc["compare"] = {{"test_fraction", c.compare.test_fraction},
                    {"fractions", c.compare.fractions},
                    {"seed_pool_per_class", c.compare.seed_pool_per_class},
                    {"repeats", c.compare.repeats}};
  return doc;
}

}  // namespace usub::cli
