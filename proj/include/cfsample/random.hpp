/*
 * Copyright 2026 The cfsample Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cfsample {

using Rng = std::mt19937_64;

// Child seed for a named component of a parent stream. Every random decision
// in the toolkit descends from one root seed through this function, so any
// cell of an experiment can be re-derived in isolation.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label);

// round-half-up(percent / 100 * n). Exact for integral percents.
std::size_t scaled_count(double percent, std::size_t n);

// Interaction budget of a percent-sample: scaled_count with a floor of 1.
std::size_t budget_for(double percent, std::size_t n);

// Uniform index in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Uniformly chosen subset of `count` elements of `pool`; the pool is permuted
// in place and the chosen elements occupy its prefix.
template <typename T>
void partial_shuffle(std::vector<T>& pool, std::size_t count, Rng& rng) {
  for (std::size_t k = 0; k < count && k + 1 < pool.size(); ++k) {
    std::size_t j = k + uniform_index(rng, pool.size() - k);
    std::swap(pool[k], pool[j]);
  }
}

}  // namespace cfsample
