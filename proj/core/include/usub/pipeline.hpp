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
#ifndef USUB_PIPELINE_HPP_
#define USUB_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "usub/clustering.hpp"
#include "usub/dataio.hpp"
#include "usub/encoding.hpp"
#include "usub/error.hpp"
#include "usub/selector.hpp"

namespace usub {

struct PipelineConfig {
  std::size_t pca_dims = 8;
  int k = 4;
  Band band;
  KMeansOptions kmeans;
  SelectionConfig selection;  // master_seed is overwritten per run

  void validate(std::size_t input_dims, int num_classes) const;
};

struct StageTiming {
  std::string stage;
  double milliseconds = 0.0;
};

struct PipelineResult {
  ProjectionModel projection;
  Eigen::MatrixXd reduced;
  ClusterModel clusters;
  UncertainSet uncertain;
  SelectionResult selection;
  std::vector<StageTiming> timings;
};

// pca -> k-means -> peripheral band -> repeated label spreading. Stage seeds
// are derived from `seed`. Errors are rethrown as StageError naming the
// stage.
PipelineResult run_pipeline(const Eigen::Ref<const Eigen::MatrixXd>& features,
                            const SeedPool& pool, const PipelineConfig& config,
                            std::uint64_t seed);

// Wraps a library error with the pipeline stage that raised it. The original
// exception is kept so callers can still dispatch on its type.
class StageError : public Error {
 public:
  StageError(std::string stage, std::exception_ptr cause, const std::string& what);

  const std::string& stage() const { return stage_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  std::string stage_;
  std::exception_ptr cause_;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample mean and standard deviation (n - 1 denominator; 0 for one value).
MeanStd mean_std(const std::vector<double>& values);

struct RepeatabilityReport {
  int runs = 0;
  std::size_t n = 0;
  std::vector<std::string> class_names;
  std::vector<MeanStd> per_class;
  MeanStd total;
  double fraction_of_n = 0.0;  // total.mean / n
  // counts[run][class]
  std::vector<std::vector<std::size_t>> counts;
};

// Runs the full pipeline once per seed and tallies selected samples by true
// class.
RepeatabilityReport repeatability_from_seeds(const EmbeddingDataset& dataset,
                                             const std::vector<int>& truth,
                                             const std::vector<std::string>& class_names,
                                             const SeedPool& pool,
                                             const PipelineConfig& config,
                                             const std::vector<std::uint64_t>& seeds);

// `runs` pipeline executions with seeds derived from `master_seed`.
RepeatabilityReport repeatability_report(const EmbeddingDataset& dataset,
                                         const std::vector<int>& truth,
                                         const std::vector<std::string>& class_names,
                                         const SeedPool& pool,
                                         const PipelineConfig& config, int runs,
                                         std::uint64_t master_seed);

}  // namespace usub

#endif  // USUB_PIPELINE_HPP_
