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

#include <cmath>
#include <numeric>

#include "cfsample/graph.hpp"
#include "cfsample/random.hpp"
#include "test_helpers.hpp"

namespace cfsample {
namespace {

using testing::make_dataset;

TEST(Graph, OneUserTwoItems) {
  const BipartiteGraph g(make_dataset({{0, 0, 1, 0}, {0, 1, 1, 1}}));
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.degree(g.user_node(0)), 2u);
  EXPECT_EQ(g.degree(g.item_node(1)), 1u);
  EXPECT_FALSE(g.is_user(g.item_node(0)));
}

TEST(Graph, DuplicatePairsCollapseIntoOneEdge) {
  const BipartiteGraph g(make_dataset({{0, 0, 1, 0}, {0, 0, 3, 1}, {1, 0, 1, 2}}));
  EXPECT_EQ(g.num_edges(), 2u);
  std::size_t found = 0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (g.edge_user(e) == 0) {
      EXPECT_EQ(g.multiplicity(e), 2u);
      auto members = g.edge_interactions(e);
      EXPECT_EQ(std::vector<std::size_t>(members.begin(), members.end()),
                (std::vector<std::size_t>{0, 1}));
      ++found;
    }
  }
  EXPECT_EQ(found, 1u);
  EXPECT_EQ(g.degree(g.item_node(0)), 3u);
}

TEST(Graph, MultiplicitiesSumToTrainSize) {
  Rng rng(4);
  std::vector<Interaction> rows;
  for (int k = 0; k < 300; ++k) {
    rows.push_back({static_cast<UserId>(uniform_index(rng, 20)),
                    static_cast<ItemId>(uniform_index(rng, 15)), 1, k});
  }
  const auto d = make_dataset(rows);
  const BipartiteGraph g(d);
  std::size_t total = 0, degrees = 0;
  for (std::size_t e = 0; e < g.num_edges(); ++e) total += g.multiplicity(e);
  for (NodeId v = 0; v < g.num_nodes(); ++v) degrees += g.degree(v);
  EXPECT_EQ(total, d.size());
  EXPECT_EQ(degrees, 2 * d.size());
}

TEST(PageRank, SingleEdgeIsSymmetric) {
  const auto r = pagerank(BipartiteGraph(make_dataset({{0, 0, 1, 0}})));
  ASSERT_EQ(r.scores.size(), 2u);
  EXPECT_NEAR(r.scores[0], 0.5, 1e-12);
  EXPECT_NEAR(r.scores[1], 0.5, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(PageRank, StarCenterScoresHighest) {
  std::vector<Interaction> rows;
  for (UserId u = 0; u < 6; ++u) rows.push_back({u, 0, 1, 0});
  const BipartiteGraph g(make_dataset(rows));
  const auto r = pagerank(g);
  const NodeId center = g.item_node(0);
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (v == center) continue;
    EXPECT_GT(r.scores[center], r.scores[v]);
  }
}

TEST(PageRank, IterationCapIsReported) {
  std::vector<Interaction> rows;
  for (UserId u = 0; u < 5; ++u) rows.push_back({u, u % 2, 1, 0});
  rows.push_back({0, 1, 1, 0});
  PageRankOptions options;
  options.max_iterations = 2;
  options.tolerance = 0.0;
  const auto r = pagerank(BipartiteGraph(make_dataset(rows)), options);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 1.0, 1e-12);
}

// Solves (I - d G) r = (1 - d)/n directly, with G the column-stochastic
// transition matrix (multiplicity-weighted, isolated nodes jump uniformly).
std::vector<double> dense_pagerank(const std::vector<Interaction>& rows, std::size_t users,
                                   std::size_t items, double d) {
  const std::size_t n = users + items;
  std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
  for (const auto& x : rows) {
    w[x.user][users + x.item] += 1;
    w[users + x.item][x.user] += 1;
  }
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    const double deg = std::accumulate(w[j].begin(), w[j].end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double g = deg == 0 ? 1.0 / n : w[j][i] / deg;
      a[i][j] = (i == j ? 1.0 : 0.0) - d * g;
    }
  }
  for (std::size_t i = 0; i < n; ++i) a[i][n] = (1 - d) / n;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
    }
    std::swap(a[c], a[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = a[i][n] / a[i][i];
  const double total = std::accumulate(r.begin(), r.end(), 0.0);
  for (double& v : r) v /= total;
  return r;
}

TEST(PageRank, AgreesWithDenseSolveOnRandomGraphs) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t users = 3 + uniform_index(rng, 10);
    const std::size_t items = 2 + uniform_index(rng, 10);
    const std::size_t m = 1 + uniform_index(rng, 3 * (users + items));
    std::vector<Interaction> rows;
    for (std::size_t k = 0; k < m; ++k) {
      rows.push_back({static_cast<UserId>(uniform_index(rng, users)),
                      static_cast<ItemId>(uniform_index(rng, items)), 1, 0});
    }
    // Declared slots may stay isolated.
    const auto d = make_dataset(rows, users, items);
    const auto got = pagerank(BipartiteGraph(d), {0.85, 1e-12, 1000});
    const auto want = dense_pagerank(rows, users, items, 0.85);
    ASSERT_EQ(got.scores.size(), want.size());
    EXPECT_NEAR(std::accumulate(got.scores.begin(), got.scores.end(), 0.0), 1.0, 1e-6);
    for (std::size_t v = 0; v < want.size(); ++v) {
      EXPECT_NEAR(got.scores[v], want[v], 1e-6) << "trial " << trial << " node " << v;
    }
  }
}

}  // namespace
}  // namespace cfsample
