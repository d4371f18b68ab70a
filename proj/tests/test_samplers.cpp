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
#include <map>
#include <set>

#include "cfsample/error.hpp"
#include "cfsample/samplers.hpp"
#include "test_helpers.hpp"

namespace cfsample {
namespace {

using testing::make_dataset;

constexpr BaseStrategy kAll[] = {
    BaseStrategy::kRandomInteraction, BaseStrategy::kStratifiedUserHistory,
    BaseStrategy::kTemporalUserHistory, BaseStrategy::kRandomUser,
    BaseStrategy::kHeadUser, BaseStrategy::kCentrality,
    BaseStrategy::kRandomWalk, BaseStrategy::kForestFire};

// Users with `counts[u]` interactions, timestamps increasing per user.
Dataset with_counts(const std::vector<std::size_t>& counts, std::size_t items = 9) {
  std::vector<Interaction> rows;
  std::size_t k = 0;
  for (UserId u = 0; u < counts.size(); ++u) {
    for (std::size_t j = 0; j < counts[u]; ++j, ++k) {
      rows.push_back({u, static_cast<ItemId>((k * 5 + u) % items), 1, static_cast<std::int64_t>(j)});
    }
  }
  return make_dataset(rows);
}

Dataset random_train(std::uint64_t seed, std::size_t users = 40, std::size_t items = 30,
                     std::size_t n = 400) {
  Rng rng(seed);
  std::vector<Interaction> rows;
  for (std::size_t k = 0; k < n; ++k) {
    rows.push_back({static_cast<UserId>(uniform_index(rng, users)),
                    static_cast<ItemId>(uniform_index(rng, items)),
                    static_cast<double>(1 + uniform_index(rng, 5)),
                    static_cast<std::int64_t>(uniform_index(rng, 50))});
  }
  return make_dataset(rows, users, items);
}

std::map<UserId, std::size_t> per_user(const SampleResult& r, const Dataset& train) {
  std::map<UserId, std::size_t> out;
  for (std::size_t k : r.kept) ++out[train[k].user];
  return out;
}

SampleSpec at(double percent, std::uint64_t seed = 0) {
  SampleSpec s;
  s.percent = percent;
  s.seed = seed;
  return s;
}

TEST(Budget, RoundsHalfUpWithFloorOfOne) {
  const auto d = with_counts({10});
  EXPECT_EQ(sample_budget(d, at(50)), 5u);
  EXPECT_EQ(sample_budget(d, at(1)), 1u);
  EXPECT_EQ(sample_budget(d, at(15)), 2u);
  EXPECT_THROW(sample_budget(d, at(0)), ParameterError);
  EXPECT_THROW(sample_budget(d, at(100.5)), ParameterError);
}

class EveryStrategy : public ::testing::TestWithParam<BaseStrategy> {};

TEST_P(EveryStrategy, ExactBudgetSubsetAndDeterminism) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto train = random_train(seed);
    for (double p : {80.0, 60.0, 40.0, 20.0, 10.0, 1.0, 33.3}) {
      const auto r = sample(GetParam(), train, at(p, seed));
      const std::size_t budget = budget_for(p, train.size());
      ASSERT_EQ(r.kept.size(), budget) << to_string(GetParam()) << " p=" << p;
      ASSERT_EQ(r.retained.size(), budget);
      EXPECT_TRUE(std::is_sorted(r.kept.begin(), r.kept.end()));
      EXPECT_EQ(std::set<std::size_t>(r.kept.begin(), r.kept.end()).size(), budget);
      for (std::size_t j = 0; j < r.kept.size(); ++j) {
        EXPECT_EQ(r.retained[j], train[r.kept[j]]);
      }
      EXPECT_EQ(r.provenance.budget, budget);
      EXPECT_EQ(r.provenance.strategy, to_string(GetParam()));
      const auto again = sample(GetParam(), train, at(p, seed));
      EXPECT_EQ(again.kept, r.kept);
    }
  }
}

TEST_P(EveryStrategy, FullPercentIsIdentity) {
  const auto train = random_train(9);
  const auto r = sample(GetParam(), train, at(100, 5));
  std::vector<std::size_t> all(train.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  EXPECT_EQ(r.kept, all);
}

INSTANTIATE_TEST_SUITE_P(Samplers, EveryStrategy, ::testing::ValuesIn(kAll),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           std::replace(name.begin(), name.end(), '-', '_');
                           return name;
                         });

TEST(Samplers, SeedChangesRandomizedStrategies) {
  const auto train = random_train(2);
  for (BaseStrategy s : {BaseStrategy::kRandomInteraction, BaseStrategy::kStratifiedUserHistory,
                         BaseStrategy::kRandomUser, BaseStrategy::kRandomWalk,
                         BaseStrategy::kForestFire}) {
    bool differs = false;
    const auto base = sample(s, train, at(30, 0)).kept;
    for (std::uint64_t seed = 1; seed < 10 && !differs; ++seed) {
      differs = sample(s, train, at(30, seed)).kept != base;
    }
    EXPECT_TRUE(differs) << to_string(s);
  }
}

TEST(RandomInteractions, HalfOfTen) {
  EXPECT_EQ(sample_random_interactions(with_counts({4, 6}), at(50, 3)).retained.size(), 5u);
}

TEST(RandomInteractions, RoughlyUniformInclusion) {
  const auto train = with_counts({10});
  std::vector<int> hits(10, 0);
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    for (std::size_t k : sample_random_interactions(train, at(30, seed)).kept) ++hits[k];
  }
  for (int h : hits) EXPECT_NEAR(h, 1200, 120);
}

TEST(Stratified, TwoEqualUsersSplitEvenly) {
  const auto train = with_counts({4, 4});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto counts = per_user(sample_stratified_user_history(train, at(50, seed)), train);
    EXPECT_EQ(counts.at(0), 2u);
    EXPECT_EQ(counts.at(1), 2u);
  }
}

TEST(Stratified, TenAtHalfKeepsFive) {
  const auto train = with_counts({10});
  EXPECT_EQ(per_user(sample_stratified_user_history(train, at(50)), train).at(0), 5u);
}

TEST(Stratified, PerUserDeviationAtMostOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto train = random_train(seed + 100, 60, 40, 700);
    for (double p : {80.0, 60.0, 40.0, 20.0, 10.0, 1.0}) {
      const auto counts = per_user(sample_stratified_user_history(train, at(p, seed)), train);
      for (UserId u = 0; u < train.num_users(); ++u) {
        const auto target = static_cast<long>(scaled_count(p, train.history(u).size()));
        const auto got = counts.count(u) ? static_cast<long>(counts.at(u)) : 0L;
        EXPECT_LE(std::abs(got - target), 1) << "user " << u << " p=" << p;
      }
    }
  }
}

TEST(Temporal, KeepsMostRecent) {
  const auto train = make_dataset({{0, 0, 1, 1}, {0, 1, 1, 2}, {0, 2, 1, 3}, {0, 3, 1, 4}});
  EXPECT_EQ(sample_temporal_user_history(train, at(50)).kept,
            (std::vector<std::size_t>{2, 3}));
}

TEST(Temporal, TiesPreferLaterRow) {
  const auto train = make_dataset({{0, 0, 1, 1}, {0, 1, 1, 7}, {0, 2, 1, 7}, {0, 3, 1, 2}});
  // Budget 1 (25% of 4): the later of the two latest rows.
  EXPECT_EQ(sample_temporal_user_history(train, at(25)).kept, (std::vector<std::size_t>{2}));
}

TEST(Temporal, AdjustmentStaysAtRecencyBoundary) {
  const auto train = random_train(77, 30, 20, 300);
  const auto r = sample_temporal_user_history(train, at(40, 1));
  const std::set<std::size_t> kept(r.kept.begin(), r.kept.end());
  for (UserId u = 0; u < train.num_users(); ++u) {
    auto h = train.history(u);
    // Kept interactions form a suffix of the time-ordered history.
    bool seen_kept = false;
    for (std::size_t k : h) {
      if (kept.count(k)) {
        seen_kept = true;
      } else {
        EXPECT_FALSE(seen_kept) << "gap in user " << u;
      }
    }
  }
}

TEST(RandomUsers, WholeUserWhenItFitsExactly) {
  const auto train = with_counts({5, 5});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto counts = per_user(sample_random_users(train, at(50, seed)), train);
    ASSERT_EQ(counts.size(), 1u);
    EXPECT_EQ(counts.begin()->second, 5u);
  }
}

TEST(RandomUsers, AtMostOneUserIsPartial) {
  const auto train = random_train(5);
  const auto counts = per_user(sample_random_users(train, at(37, 4)), train);
  int partial = 0;
  for (const auto& [u, c] : counts) partial += c < train.history(u).size() ? 1 : 0;
  EXPECT_LE(partial, 1);
}

TEST(HeadUsers, LargestUserFirst) {
  const auto train = with_counts({5, 3, 2});
  const auto counts = per_user(sample_head_users(train, at(50)), train);
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.at(0), 5u);
}

TEST(HeadUsers, TiesFavorLowerIndex) {
  const auto train = with_counts({2, 3, 3});
  const auto counts = per_user(sample_head_users(train, at(38)), train);  // budget 3
  ASSERT_EQ(counts.size(), 1u);
  EXPECT_EQ(counts.count(1), 1u);
}

TEST(HeadUsers, KeptUsersAreNeverShorterThanDropped) {
  const auto train = random_train(12, 50, 30, 600);
  for (double p : {80.0, 40.0, 10.0}) {
    const auto counts = per_user(sample_head_users(train, at(p)), train);
    std::size_t min_full = SIZE_MAX, max_dropped = 0;
    for (UserId u = 0; u < train.num_users(); ++u) {
      const std::size_t n = train.history(u).size();
      if (n == 0) continue;
      const std::size_t c = counts.count(u) ? counts.at(u) : 0;
      if (c == n) min_full = std::min(min_full, n);
      if (c == 0) max_dropped = std::max(max_dropped, n);
    }
    EXPECT_GE(min_full, max_dropped) << "p=" << p;
  }
}

TEST(Centrality, StarCenterKeptFirst) {
  std::vector<Interaction> rows;
  for (UserId u = 0; u < 6; ++u) rows.push_back({u, 0, 1, 0});
  rows.push_back({0, 1, 1, 0});
  rows.push_back({1, 2, 1, 0});
  const auto train = make_dataset(rows);
  const auto r = sample_centrality(train, BipartiteGraph(train), at(75));  // budget 6
  for (std::size_t k : r.kept) EXPECT_EQ(train[k].item, 0u);
}

TEST(Centrality, NonConvergenceIsFlaggedNotFatal) {
  const auto train = random_train(3);
  SampleSpec spec = at(40);
  spec.params.max_iterations = 1;
  spec.params.tolerance = 0;
  const auto r = sample_centrality(train, BipartiteGraph(train), spec);
  EXPECT_FALSE(r.provenance.converged);
  EXPECT_EQ(r.provenance.iterations, 1);
  EXPECT_EQ(r.kept.size(), budget_for(40, train.size()));
}

TEST(GraphStrategies, RejectForeignGraph) {
  const auto train = random_train(3);
  const BipartiteGraph other(random_train(4, 40, 30, 399));
  EXPECT_THROW(sample_centrality(train, other, at(40)), PreconditionError);
  EXPECT_THROW(sample_random_walk(train, other, at(40)), PreconditionError);
}

TEST(RandomWalk, SingleEdgeRetained) {
  const auto train = make_dataset({{0, 0, 1, 0}});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_EQ(sample_random_walk(train, BipartiteGraph(train), at(100, seed)).kept.size(), 1u);
  }
}

TEST(RandomWalk, CoversDisconnectedComponents) {
  // Two components; the budget needs both.
  const auto train = make_dataset({{0, 0, 1, 0}, {0, 1, 1, 0}, {1, 2, 1, 0}, {2, 2, 1, 0}});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_EQ(sample_random_walk(train, BipartiteGraph(train), at(100, seed)).kept.size(), 4u);
  }
}

TEST(RandomWalk, RetainedEdgesJoinVisitedNodes) {
  // A sample below the budget boundary keeps whole induced edge sets except
  // for the final trim, so every retained edge touches a retained user.
  const auto train = random_train(8);
  const auto r = sample_random_walk(train, BipartiteGraph(train), at(20, 2));
  std::set<UserId> users;
  for (std::size_t k : r.kept) users.insert(train[k].user);
  EXPECT_GE(users.size(), 2u);
}

TEST(ForestFire, CertainBurnTakesWholePath) {
  // Path u0-i0-u1-i1-u2.
  const auto train = make_dataset({{0, 0, 1, 0}, {1, 0, 1, 0}, {1, 1, 1, 0}, {2, 1, 1, 0}});
  SampleSpec spec = at(100, 3);
  spec.params.burn_probability = 0.999;
  EXPECT_EQ(sample_forest_fire(train, BipartiteGraph(train), spec).kept.size(), 4u);
  spec.params.burn_probability = 1.0;
  EXPECT_THROW(sample_forest_fire(train, BipartiteGraph(train), spec), ParameterError);
}

TEST(UnitFiller, TruncatesFinalUnitUniformly) {
  std::vector<int> hits(4, 0);
  const std::vector<std::size_t> first{0, 1}, second{2, 3, 4, 5};
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    detail::UnitFiller f(6, 3, seed);
    EXPECT_FALSE(f.add_unit(first));
    EXPECT_TRUE(f.add_unit(second));
    auto kept = f.take();
    ASSERT_EQ(kept.size(), 3u);
    ++hits[kept[2] - 2];
  }
  for (int h : hits) EXPECT_NEAR(h, 1000, 120);
}

TEST(UnitFiller, SkipsAlreadyTakenMembers) {
  detail::UnitFiller f(4, 4, 0);
  const std::vector<std::size_t> a{0, 1}, b{1, 2};
  f.add_unit(a);
  f.add_unit(b);
  EXPECT_EQ(f.take(), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Samplers, InputDatasetUnchanged) {
  const auto train = random_train(21);
  const std::vector<Interaction> before(train.interactions().begin(), train.interactions().end());
  for (BaseStrategy s : kAll) sample(s, train, at(10, 1));
  EXPECT_TRUE(std::equal(before.begin(), before.end(), train.interactions().begin(),
                         train.interactions().end()));
}

}  // namespace
}  // namespace cfsample
