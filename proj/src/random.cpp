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

#include "cfsample/random.hpp"

#include <cmath>
#include <stdexcept>

namespace cfsample {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) {
  // FNV-1a over the label, then mixed with the parent.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(splitmix64(parent) ^ h);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t label) {
  return splitmix64(splitmix64(parent) ^ splitmix64(label + 0x51ed270b2f8a1c3dULL));
}

std::size_t scaled_count(double percent, std::size_t n) {
  if (!(percent >= 0.0)) throw std::invalid_argument("percent must be non-negative");
  double whole = std::nearbyint(percent);
  if (whole == percent && percent <= 1e9) {
    auto p = static_cast<unsigned long long>(whole);
    return static_cast<std::size_t>((p * n * 2 + 100) / 200);
  }
  return static_cast<std::size_t>(std::floor(percent / 100.0 * static_cast<double>(n) + 0.5));
}

std::size_t budget_for(double percent, std::size_t n) {
  std::size_t b = scaled_count(percent, n);
  return b == 0 ? 1 : b;
}

}  // namespace cfsample
