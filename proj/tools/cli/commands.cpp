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
#include "cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "usub/dataio.hpp"
#include "usub/encoding.hpp"
#include "usub/error.hpp"
#include "usub/eval.hpp"
#include "usub/pipeline.hpp"
#include "usub/random.hpp"
#include "usub/selector.hpp"

namespace usub::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_json(const fs::path& path, const json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

struct LoadedData {
  EmbeddingDataset dataset;
  std::vector<int> seeds;  // kUnlabeled outside the pool
  std::vector<int> truth;  // empty when no truth file was given
  int num_classes = 0;
  std::vector<std::string> class_names;
};

int max_label(const std::vector<int>& labels) {
  int best = kUnlabeled;
  for (const int l : labels) best = std::max(best, l);
  return best;
}

LoadedData load_inputs(const RunConfig& config, bool need_seeds, bool need_truth) {
  if (config.embeddings.empty()) throw ConfigError("no embeddings file configured");
  if (need_seeds && config.labels.empty()) throw ConfigError("no seed label file configured");
  if (need_truth && config.truth.empty()) throw ConfigError("no truth label file configured");

  LoadedData out;
  out.dataset = load_embeddings(config.embeddings);
  if (!config.truth.empty()) {
    load_labels(config.truth, out.dataset, config.num_classes);
    out.truth = out.dataset.labels;
  }
  if (!config.labels.empty()) {
    load_labels(config.labels, out.dataset, config.num_classes);
    out.seeds = out.dataset.labels;
  }

  int classes = config.num_classes.value_or(
      std::max({2, max_label(out.truth) + 1, max_label(out.seeds) + 1}));
  out.num_classes = classes;
  if (config.class_names.empty()) {
    out.class_names = default_class_names(classes);
  } else {
    if (static_cast<int>(config.class_names.size()) != classes) {
      throw ConfigError("class_names has " + std::to_string(config.class_names.size()) +
                        " entries for " + std::to_string(classes) + " classes");
    }
    out.class_names = config.class_names;
  }
  out.dataset.labels = out.truth;
  return out;
}

PipelineConfig resolved_pipeline(const RunConfig& config, const LoadedData& data) {
  PipelineConfig p = config.pipeline;
  try {
    p.validate(data.dataset.dims(), data.num_classes);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return p;
}

json metrics_row(const std::string& name, double train_size, const Evaluation& ev,
                 const std::vector<double>& accuracies,
                 const std::vector<std::string>& class_names) {
  const MetricsReport& m = ev.metrics;
  json per_class = json::array();
  for (std::size_t c = 0; c < m.precision.size(); ++c) {
    per_class.push_back({{"class", class_names.at(c)},
                         {"precision", m.precision[c]},
                         {"recall", m.recall[c]},
                         {"f1", m.f1[c]}});
  }
  json confusion = json::array();
  for (Eigen::Index r = 0; r < ev.confusion.counts.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < ev.confusion.counts.cols(); ++c) {
      row.push_back(ev.confusion.counts(r, c));
    }
    confusion.push_back(std::move(row));
  }
  return {{"regime", name},
          {"train_size", train_size},
          {"accuracy", m.accuracy},
          {"macro",
           {{"precision", m.macro_precision}, {"recall", m.macro_recall}, {"f1", m.macro_f1}}},
          {"per_class", std::move(per_class)},
          {"confusion", std::move(confusion)},
          {"accuracy_per_repeat", accuracies}};
}

std::exception_ptr unwrap_stage(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const StageError& e) {
    if (e.cause()) return e.cause();
  } catch (...) {
  }
  return error;
}

}  // namespace

void cmd_synth(const SynthArgs& args) {
  if (!(args.overlap >= 0.0)) throw ConfigError("--overlap must be >= 0");
  if (args.classes < 2) throw ConfigError("--classes must be >= 2");
  if (args.per_class < 1) throw ConfigError("--per-class must be >= 1");
  if (args.dims < 1) throw ConfigError("--dims must be >= 1");
  if (static_cast<std::size_t>(args.classes) > 2 * args.dims) {
    throw ConfigError("--classes must not exceed twice --dims");
  }

  SyntheticSpec spec;
  try {
    spec = SyntheticSpec::isotropic(args.classes, args.per_class, args.dims, args.overlap,
                                    args.seed);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const EmbeddingDataset data = generate_mixture(spec);

  ensure_dir(args.out_dir);
  save_embeddings(data, args.out_dir / "embeddings.csv");
  save_labels(data, args.out_dir / "labels.csv");

  const std::size_t pool_size = std::min(args.seed_pool_per_class, args.per_class);
  const SeedPool pool = draw_seed_pool(data.labels, args.classes, pool_size,
                                       derive_seed(args.seed, Stream::kSeedPool));
  EmbeddingDataset seeds = data;
  seeds.labels.assign(data.size(), kUnlabeled);
  for (std::size_t i = 0; i < pool.size(); ++i) seeds.labels[pool.indices[i]] = pool.labels[i];
  save_labels(seeds, args.out_dir / "seeds.csv");

  RunConfig run;
  run.embeddings = "embeddings.csv";
  run.labels = "seeds.csv";
  run.truth = "labels.csv";
  run.out_dir = ".";
  run.seed = args.seed;
  run.num_classes = args.classes;
  run.pipeline.k = args.classes;
  run.pipeline.pca_dims = std::min<std::size_t>(run.pipeline.pca_dims, args.dims);
  write_json(args.out_dir / "config.json", to_json(run));

  if (!args.quiet) {
    spdlog::info("synth: wrote {} rows x {} dims to {}", data.size(), data.dims(),
                 args.out_dir.string());
  }
}

void cmd_subsample(const RunConfig& config) {
  config.validate();
  LoadedData data = load_inputs(config, true, false);
  const PipelineConfig pipeline = resolved_pipeline(config, data);
  const SeedPool pool = seed_pool_from_labels(data.seeds, data.num_classes);
  if (pool.size() == 0) throw ValidationError("seed label file labels no samples");

  const PipelineResult result = run_pipeline(data.dataset.features, pool, pipeline, config.seed);

  ensure_dir(config.out_dir);
  save_selection(result.selection, data.dataset.ids, config.out_dir / "selection.csv");
  save_run_matrix(result.selection, data.dataset.ids, config.out_dir / "run_matrix.csv");

  const ClusterModel& clusters = result.clusters;
  const Eigen::VectorXd ratio = result.projection.explained_variance_ratio();
  json report = {
      {"config", to_json(config)},
      {"n", data.dataset.size()},
      {"m", result.uncertain.size()},
      {"r", result.selection.size()},
      {"seed_pool", pool.size()},
      {"num_classes", data.num_classes},
      {"explained_variance_ratio",
       std::vector<double>(ratio.begin(), ratio.end())},
      {"kmeans",
       {{"iterations", clusters.iterations},
        {"converged", clusters.converged},
        {"sse", clusters.sse()}}},
  };
  write_json(config.out_dir / "report.json", report);

  json timings = json::array();
  double total = 0.0;
  for (const StageTiming& t : result.timings) {
    timings.push_back({{"stage", t.stage}, {"ms", t.milliseconds}});
    total += t.milliseconds;
  }
  write_json(config.out_dir / "timings.json", {{"stages", timings}, {"total_ms", total}});

  if (!config.quiet) {
    spdlog::info("subsample: n={} m={} r={} ({:.1f} ms)", data.dataset.size(),
                 result.uncertain.size(), result.selection.size(), total);
  }
}

void cmd_compare(const RunConfig& config) {
  config.validate();
  LoadedData data = load_inputs(config, false, true);
  const PipelineConfig pipeline = resolved_pipeline(config, data);

  const CompareReport report = compare_sampling(data.dataset, data.truth, data.num_classes,
                                                pipeline, config.compare, config.seed);
  json rows = json::array();
  for (const RegimeResult& r : report.regimes) {
    rows.push_back(metrics_row(r.name, r.mean_train_size, r.evaluation, r.accuracies,
                               data.class_names));
  }
  json doc = {{"config", to_json(config)},
              {"repeats", report.repeats},
              {"train_pool", report.train_pool},
              {"test_size", report.test_size},
              {"rows", std::move(rows)}};
  ensure_dir(config.out_dir);
  write_json(config.out_dir / "compare.json", doc);

  if (!config.quiet) {
    for (const RegimeResult& r : report.regimes) {
      spdlog::info("compare: {:>8} train={:.1f} accuracy={:.4f}", r.name, r.mean_train_size,
                   r.evaluation.metrics.accuracy);
    }
  }
}

void cmd_repeat(const RunConfig& config) {
  config.validate();
  LoadedData data = load_inputs(config, false, true);
  const PipelineConfig pipeline = resolved_pipeline(config, data);
  const SeedPool pool =
      config.labels.empty()
          ? draw_seed_pool(data.truth, data.num_classes, config.compare.seed_pool_per_class,
                           derive_seed(config.seed, Stream::kSeedPool))
          : seed_pool_from_labels(data.seeds, data.num_classes);

  const RepeatabilityReport rep = repeatability_report(
      data.dataset, data.truth, data.class_names, pool, pipeline, config.runs, config.seed);

  json per_class = json::object();
  for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
    per_class[rep.class_names[c]] = {{"mean", rep.per_class[c].mean},
                                     {"std", rep.per_class[c].std}};
  }
  json doc = {{"runs", rep.runs},
              {"per_class", std::move(per_class)},
              {"total", {{"mean", rep.total.mean}, {"std", rep.total.std}}},
              {"fraction_of_n", rep.fraction_of_n},
              {"n", rep.n},
              {"counts", rep.counts},
              {"config", to_json(config)}};
  ensure_dir(config.out_dir);
  write_json(config.out_dir / "repeat.json", doc);

  if (!config.quiet) {
    spdlog::info("repeat: {} runs, total {:.1f} +/- {:.1f} ({:.2f}% of n)", rep.runs,
                 rep.total.mean, rep.total.std, 100.0 * rep.fraction_of_n);
  }
}

void cmd_pool(const fs::path& tensor, const fs::path& out) {
  const FeatureMap map = load_feature_map(tensor);
  const Eigen::VectorXd pooled = global_average_pool(map);
  std::string text;
  for (Eigen::Index c = 0; c < pooled.size(); ++c) {
    text += (c ? ",f" : "f") + std::to_string(c);
  }
  text += '\n';
  for (Eigen::Index c = 0; c < pooled.size(); ++c) {
    if (c) text += ',';
    text += format_double(pooled[c]);
  }
  text += '\n';
  write_text_file(out, text);
}

int exit_code_for(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(unwrap_stage(error));
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const ParseError&) {
    return kExitData;
  } catch (const ValidationError&) {
    return kExitData;
  } catch (const IoError&) {
    return kExitData;
  } catch (const PreconditionError&) {
    return kExitData;
  } catch (const DomainError&) {
    return kExitNumerical;
  } catch (...) {
    return kExitUnexpected;
  }
}

std::string describe_error(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
  }
  return "unknown error";
}

}  // namespace usub::cli
