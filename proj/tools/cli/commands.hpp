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
#ifndef USUB_TOOLS_CLI_COMMANDS_HPP_
#define USUB_TOOLS_CLI_COMMANDS_HPP_

#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>

#include "cli/config.hpp"

namespace usub::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitUnexpected = 1;

struct SynthArgs {
  int classes = 4;
  std::size_t per_class = 2500;
  std::size_t dims = 8;
  double overlap = 0.5;
  std::uint64_t seed = 7;
  std::size_t seed_pool_per_class = 20;
  std::filesystem::path out_dir = "out";
  bool quiet = false;
};

// Each command writes its files under the configured output directory and
// throws on failure; main() maps the exception to an exit code.
void cmd_synth(const SynthArgs& args);
void cmd_subsample(const RunConfig& config);
void cmd_compare(const RunConfig& config);
void cmd_repeat(const RunConfig& config);
void cmd_pool(const std::filesystem::path& tensor, const std::filesystem::path& out);

// Looks through StageError to the original cause.
int exit_code_for(const std::exception_ptr& error);

// Stage failures already carry the stage name in their message.
std::string describe_error(const std::exception_ptr& error);

}  // namespace usub::cli

#endif  // USUB_TOOLS_CLI_COMMANDS_HPP_
