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
#include <benchmark/benchmark.h>

#include <vector>

#include "usub/clustering.hpp"
#include "usub/dataio.hpp"
#include "usub/encoding.hpp"
#include "usub/eval.hpp"
#include "usub/labelspread.hpp"
#include "usub/pipeline.hpp"
#include "usub/random.hpp"
#include "usub/selector.hpp"

namespace {

Eigen::MatrixXd points(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  usub::Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

std::vector<int> sparse_seeds(Eigen::Index n, int classes) {
  std::vector<int> seeds(static_cast<std::size_t>(n), usub::kUnlabeled);
  for (Eigen::Index i = 0; i < n; i += 10) seeds[i] = static_cast<int>(i / 10 % classes);
  return seeds;
}

void BM_SpreadIterative(benchmark::State& state) {
  const Eigen::MatrixXd p = points(state.range(0), 2, 1);
  const auto seeds = sparse_seeds(p.rows(), 4);
  usub::SpreadConfig cfg;
  cfg.gamma = 2.0;
  for (auto _ : state) benchmark::DoNotOptimize(usub::spread_labels(p, seeds, 4, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpreadIterative)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_SpreadClosedForm(benchmark::State& state) {
  const Eigen::MatrixXd p = points(state.range(0), 2, 1);
  const auto seeds = sparse_seeds(p.rows(), 4);
  usub::SpreadConfig cfg;
  cfg.gamma = 2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(usub::spread_labels_closed_form(p, seeds, 4, cfg));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpreadClosedForm)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_KMeans(benchmark::State& state) {
  const Eigen::MatrixXd p = points(state.range(0), 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(usub::kmeans_fit(p, 4, 3));
}
BENCHMARK(BM_KMeans)->Arg(1000)->Arg(10000);

void BM_Membership(benchmark::State& state) {
  const Eigen::MatrixXd p = points(10000, 2, 2);
  const usub::ClusterModel model = usub::kmeans_fit(p, 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(usub::membership_probabilities(model, p));
}
BENCHMARK(BM_Membership);

void BM_Pca(benchmark::State& state) {
  const Eigen::MatrixXd x = points(10000, state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(usub::pca_fit(x, 2));
}
BENCHMARK(BM_Pca)->Arg(8)->Arg(128);

void BM_Pipeline(benchmark::State& state) {
  const usub::EmbeddingDataset data = usub::generate_mixture(usub::standard_fixture(7));
  const usub::SeedPool pool = usub::draw_seed_pool(data.labels, 4, 20, 11);
  const usub::PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(usub::run_pipeline(data.features, pool, cfg, 7));
}
BENCHMARK(BM_Pipeline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
