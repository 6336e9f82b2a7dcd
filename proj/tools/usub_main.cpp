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
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "cli/commands.hpp"
#include "cli/config.hpp"

namespace {

using usub::cli::RunConfig;

// Flags that override the JSON config. Unset flags leave the config alone.
struct Overrides {
  std::optional<std::string> embeddings, labels, truth;
  std::optional<int> num_classes;
  std::optional<std::size_t> pca_dims;
  std::optional<int> k;
  std::optional<double> band_lo, band_hi;
  std::optional<std::string> band_mode, covariance;
  std::optional<double> alpha, gamma, tol;
  std::optional<int> max_iter;
  std::optional<int> epochs, seeds_per_class, diversity_threshold, runs;
  std::optional<int> repeats;
  std::optional<double> test_fraction;
};

struct Globals {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> master_seed;
  std::optional<std::string> out_dir;
  bool quiet = false;
};

void add_run_flags(CLI::App& cmd, Overrides& o) {
  cmd.add_option("--embeddings", o.embeddings, "Embeddings CSV (id,f0,...)");
  cmd.add_option("--labels", o.labels, "Seed label CSV (id,label)");
  cmd.add_option("--truth", o.truth, "Ground-truth label CSV (id,label)");
  cmd.add_option("--num-classes", o.num_classes, "Number of classes");
  cmd.add_option("--pca-dims", o.pca_dims, "Retained principal components");
  cmd.add_option("--k", o.k, "Number of clusters");
  cmd.add_option("--band-lo", o.band_lo, "Lower membership band edge");
  cmd.add_option("--band-hi", o.band_hi, "Upper membership band edge");
  cmd.add_option("--band-mode", o.band_mode, "any|max")->check(CLI::IsMember({"any", "max"}));
  cmd.add_option("--covariance", o.covariance, "full|diagonal")
      ->check(CLI::IsMember({"full", "diagonal"}));
  cmd.add_option("--alpha", o.alpha, "Label spreading clamping factor");
  cmd.add_option("--gamma", o.gamma, "RBF kernel width");
  cmd.add_option("--tol", o.tol, "Spreading convergence tolerance");
  cmd.add_option("--max-iter", o.max_iter, "Spreading iteration cap");
  cmd.add_option("--epochs", o.epochs, "Label spreading epochs");
  cmd.add_option("--seeds-per-class", o.seeds_per_class, "Seeds drawn per class per epoch");
  cmd.add_option("--diversity-threshold", o.diversity_threshold,
                 "Minimum distinct labels for selection");
  cmd.add_option("--runs", o.runs, "Repeatability runs");
  cmd.add_option("--repeats", o.repeats, "Comparison repeats");
  cmd.add_option("--test-fraction", o.test_fraction, "Held-out test fraction");
}

RunConfig resolve(const Globals& g, const Overrides& o) {
  RunConfig c = g.config ? usub::cli::load_run_config(*g.config) : usub::cli::default_run_config();
  if (o.embeddings) c.embeddings = *o.embeddings;
  if (o.labels) c.labels = *o.labels;
  if (o.truth) c.truth = *o.truth;
  if (o.num_classes) c.num_classes = *o.num_classes;
  if (g.out_dir) c.out_dir = *g.out_dir;
  if (g.seed) c.seed = *g.seed;
  if (g.master_seed) c.seed = *g.master_seed;
  c.quiet = g.quiet;
  if (o.pca_dims) c.pipeline.pca_dims = *o.pca_dims;
  if (o.k) c.pipeline.k = *o.k;
  if (o.band_lo) c.pipeline.band.lo = *o.band_lo;
  if (o.band_hi) c.pipeline.band.hi = *o.band_hi;
  if (o.band_mode) c.pipeline.band.mode = usub::cli::parse_band_mode(*o.band_mode);
  if (o.covariance) {
    c.pipeline.kmeans.covariance = usub::cli::parse_covariance_mode(*o.covariance);
  }
  auto& s = c.pipeline.selection;
  if (o.alpha) s.spread.alpha = *o.alpha;
  if (o.gamma) s.spread.gamma = *o.gamma;
  if (o.tol) s.spread.tol = *o.tol;
  if (o.max_iter) s.spread.max_iter = *o.max_iter;
  if (o.epochs) s.epochs = *o.epochs;
  if (o.seeds_per_class) s.seeds_per_class = *o.seeds_per_class;
  if (o.diversity_threshold) s.diversity_threshold = *o.diversity_threshold;
  if (o.runs) c.runs = *o.runs;
  if (o.repeats) c.compare.repeats = *o.repeats;
  if (o.test_fraction) c.compare.test_fraction = *o.test_fraction;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty sub-sampling of embedding sets"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--master-seed", g.master_seed, "Alias of --seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_flag("--quiet", g.quiet, "Suppress informational logging");

  usub::cli::SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic Gaussian mixture");
  synth_cmd->add_option("--classes", synth.classes, "Number of classes")->capture_default_str();
  synth_cmd->add_option("--per-class", synth.per_class, "Samples per class")->capture_default_str();
  synth_cmd->add_option("--dims", synth.dims, "Feature dimensions")->capture_default_str();
  synth_cmd->add_option("--overlap", synth.overlap, "Per-axis std is overlap/2")
      ->capture_default_str();
  synth_cmd->add_option("--pool-per-class", synth.seed_pool_per_class,
                        "Seed labels written per class")
      ->capture_default_str();

  Overrides sub_o, cmp_o, rep_o;
  CLI::App* sub_cmd = app.add_subcommand("subsample", "Select the most uncertain samples");
  add_run_flags(*sub_cmd, sub_o);
  CLI::App* cmp_cmd = app.add_subcommand("compare", "Stratified vs selected training sets");
  add_run_flags(*cmp_cmd, cmp_o);
  CLI::App* rep_cmd = app.add_subcommand("repeat", "Selection counts across seeded runs");
  add_run_flags(*rep_cmd, rep_o);

  std::string tensor_in, tensor_out = "pooled.csv";
  CLI::App* pool_cmd = app.add_subcommand("pool", "Global-average-pool an h,w,c tensor CSV");
  pool_cmd->add_option("--input", tensor_in, "Tensor CSV")->required();
  pool_cmd->add_option("--output", tensor_out, "Pooled vector CSV")->capture_default_str();

  // Global flags are accepted after the subcommand too.
  for (CLI::App* cmd : {synth_cmd, sub_cmd, cmp_cmd, rep_cmd, pool_cmd}) cmd->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : usub::cli::kExitConfig;
  }

  spdlog::set_level(g.quiet ? spdlog::level::warn : spdlog::level::info);
  spdlog::set_pattern("%^%l%$: %v");

  try {
    if (*synth_cmd) {
      if (g.seed) synth.seed = *g.seed;
      if (g.master_seed) synth.seed = *g.master_seed;
      if (g.out_dir) synth.out_dir = *g.out_dir;
      synth.quiet = g.quiet;
      usub::cli::cmd_synth(synth);
    } else if (*sub_cmd) {
      usub::cli::cmd_subsample(resolve(g, sub_o));
    } else if (*cmp_cmd) {
      usub::cli::cmd_compare(resolve(g, cmp_o));
    } else if (*rep_cmd) {
      usub::cli::cmd_repeat(resolve(g, rep_o));
    } else if (*pool_cmd) {
      usub::cli::cmd_pool(tensor_in, tensor_out);
    }
  } catch (...) {
    const std::exception_ptr error = std::current_exception();
    std::cerr << "error: " << usub::cli::describe_error(error) << '\n';
    return usub::cli::exit_code_for(error);
  }
  return usub::cli::kExitOk;
}
