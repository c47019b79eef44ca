// Copyright 2026 The Authors.
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

#pragma once

#include <cstdint>
#include <random>

namespace mcm {

// splitmix64, used to derive independent stream seeds from a master seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0,1). Hand-rolled so results do not depend on the
// standard library's distribution implementations.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) via rejection.
inline std::uint64_t uniform_index(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = gen();
  } while (v >= limit);
  return v % n;
}

// Binomial(n, p) by direct Bernoulli draws. Counts in this project are
// desk-scale, so the O(n) cost is irrelevant next to portability.
inline long long binomial_draw(std::mt19937_64& gen, long long n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    if (uniform01(gen) < p) ++hits;
  }
  return hits;
}

}  // namespace mcm
