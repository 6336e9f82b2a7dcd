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

#ifndef USUB_RANDOM_HPP_
#define USUB_RANDOM_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace usub {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for stream `stream` under `master`. Distinct streams give
// statistically independent generators, and derivation is order-free, so
// work items can be executed in any order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// Named stream tags so pipeline stages never share a stream by accident.
enum class Stream : std::uint64_t {
  kKMeans = 0x6b6d65616e73ULL,
  kSelection = 0x73656c656374ULL,
  kSeedPool = 0x706f6f6cULL,
  kSplit = 0x73706c6974ULL,
  kStratified = 0x737472617461ULL,
  kRun = 0x72756eULL,
};

std::uint64_t derive_seed(std::uint64_t master, Stream tag, std::uint64_t index = 0);

// Deterministic generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the distributions are implemented here
// because the standard library ones are implementation-defined and would
// break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();

  // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::size_t uniform_index(std::size_t bound);

  double normal();

  // `count` distinct indices drawn uniformly from [0, population), in draw
  // order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t population,
                                                      std::size_t count);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace usub

#endif  // USUB_RANDOM_HPP_
