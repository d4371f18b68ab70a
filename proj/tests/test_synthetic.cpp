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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "cfsample/error.hpp"
#include "cfsample/synthetic.hpp"

namespace cfsample {
namespace {

SyntheticConfig small(std::uint64_t seed = 0) {
  SyntheticConfig c;
  c.users = 200;
  c.items = 80;
  c.interactions = 2000;
  c.seed = seed;
  return c;
}

TEST(Synthetic, DeterministicPerSeed) {
  const auto a = generate_synthetic(small(3));
  const auto b = generate_synthetic(small(3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) ASSERT_EQ(a[k], b[k]);
  const auto c = generate_synthetic(small(4));
  bool differs = c.size() != a.size();
  for (std::size_t k = 0; !differs && k < a.size(); ++k) differs = !(a[k] == c[k]);
  EXPECT_TRUE(differs);
}

TEST(Synthetic, ExactTotalAndMinimumHistory) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const auto d = generate_synthetic(small(seed));
    EXPECT_EQ(d.size(), 2000u);
    EXPECT_EQ(d.num_users(), 200u);
    for (UserId u = 0; u < d.num_users(); ++u) {
      auto h = d.history(u);
      EXPECT_GE(h.size(), 3u);
      std::set<ItemId> items;
      for (std::size_t k : h) items.insert(d[k].item);
      EXPECT_EQ(items.size(), h.size()) << "items repeat within a history";
      for (std::size_t j = 1; j < h.size(); ++j) EXPECT_LT(d[h[j - 1]].timestamp, d[h[j]].timestamp);
    }
  }
}

TEST(Synthetic, RatingsOnTheFivePointScale) {
  const auto d = generate_synthetic(small());
  std::set<double> seen;
  for (const auto& x : d.interactions()) {
    EXPECT_GE(x.rating, 1.0);
    EXPECT_LE(x.rating, 5.0);
    EXPECT_EQ(x.rating, std::round(x.rating));
    seen.insert(x.rating);
  }
  EXPECT_GE(seen.size(), 4u);
}

double max_over_mean(const std::vector<std::size_t>& counts) {
  const double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / counts.size();
  return *std::max_element(counts.begin(), counts.end()) / mean;
}

TEST(Synthetic, PopularityExponentControlsSkew) {
  auto flat = small();
  flat.popularity_exponent = 0.0;
  flat.affinity = 0.0;
  flat.users = 400;
  flat.interactions = 8000;
  const auto uniform = generate_synthetic(flat);
  // 100 expected per item; Poisson-like spread keeps the max well under 1.5x.
  EXPECT_LT(max_over_mean(uniform.item_counts()), 1.5);
  EXPECT_EQ(uniform.num_items(), 80u);
  auto skewed = flat;
  skewed.popularity_exponent = 1.0;
  EXPECT_GT(max_over_mean(generate_synthetic(skewed).item_counts()), 3.0);
}

TEST(Synthetic, InfeasibleConfigsThrow) {
  auto c = small();
  c.interactions = c.users * 2;  // below 3 per user
  EXPECT_THROW(generate_synthetic(c), ParameterError);
  c = small();
  c.interactions = c.users * c.items + 1;
  EXPECT_THROW(generate_synthetic(c), ParameterError);
  c = small();
  c.items = 2;
  EXPECT_THROW(generate_synthetic(c), ParameterError);
  c = small();
  c.users = 0;
  EXPECT_THROW(generate_synthetic(c), ParameterError);
  c = small();
  c.noise = -1;
  EXPECT_THROW(generate_synthetic(c), ParameterError);
}

TEST(Synthetic, DenseCornerCase) {
  auto c = small();
  c.users = 10;
  c.items = 5;
  c.interactions = 50;
  const auto d = generate_synthetic(c);
  EXPECT_EQ(d.size(), 50u);
  for (UserId u = 0; u < 10; ++u) EXPECT_EQ(d.history(u).size(), 5u);
}

TEST(Synthetic, MnarThinsTheLogButKeepsMinimum) {
  auto c = small(5);
  c.mnar = true;
  const auto d = generate_synthetic(c);
  EXPECT_LT(d.size(), 2000u);
  EXPECT_GE(d.size(), 600u);
  for (UserId u = 0; u < d.num_users(); ++u) EXPECT_GE(d.history(u).size(), 3u);
}

}  // namespace
}  // namespace cfsample
