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
#ifndef USUB_TOOLS_CLI_CONFIG_HPP_
#define USUB_TOOLS_CLI_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "usub/eval.hpp"
#include "usub/pipeline.hpp"

namespace usub::cli {

// Everything a subsample / compare / repeat invocation needs. Loaded from a
// JSON document; command-line flags override individual fields.
struct RunConfig {
  std::filesystem::path embeddings;
  std::filesystem::path labels;  // seed pool L
  std::filesystem::path truth;   // full labels, for compare / repeat
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  std::optional<int> num_classes;
  std::vector<std::string> class_names;
  PipelineConfig pipeline;
  int runs = 20;
  CompareOptions compare;
  bool quiet = false;

  // Checks numeric ranges and that every non-empty path exists.
  void validate() const;
};

RunConfig default_run_config();

// Relative paths inside the document resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& doc,
                               const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Full resolved snapshot, embedded in every report.
nlohmann::json to_json(const RunConfig& config);

std::string band_mode_name(BandMode mode);
BandMode parse_band_mode(const std::string& name);
std::string covariance_mode_name(CovarianceMode mode);
CovarianceMode parse_covariance_mode(const std::string& name);

}  // namespace usub::cli

#endif  // USUB_TOOLS_CLI_CONFIG_HPP_
