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

#include "cfsample/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfsample/error.hpp"

namespace cfsample {

BipartiteGraph::BipartiteGraph(const Dataset& train)
    : num_users_(train.num_users()), num_items_(train.num_items()) {
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = train[a];
    const auto& y = train[b];
    return x.user != y.user ? x.user < y.user : x.item < y.item;
  });

  edge_offsets_.push_back(0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& x = train[order[k]];
    if (k == 0 || x.user != train[order[k - 1]].user || x.item != train[order[k - 1]].item) {
      if (k != 0) edge_offsets_.push_back(k);
      edge_user_.push_back(x.user);
      edge_item_.push_back(x.item);
    }
    edge_members_.push_back(order[k]);
  }
  if (!order.empty()) edge_offsets_.push_back(order.size());

  degree_.assign(num_nodes(), 0);
  std::vector<std::size_t> counts(num_nodes() + 1, 0);
  for (std::size_t e = 0; e < num_edges(); ++e) {
    ++counts[user_node(edge_user_[e]) + 1];
    ++counts[item_node(edge_item_[e]) + 1];
    degree_[user_node(edge_user_[e])] += multiplicity(e);
    degree_[item_node(edge_item_[e])] += multiplicity(e);
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  adjacency_offsets_ = counts;
  adjacency_.resize(2 * num_edges());
  std::vector<std::size_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t e = 0; e < num_edges(); ++e) {
    NodeId u = user_node(edge_user_[e]);
    NodeId i = item_node(edge_item_[e]);
    adjacency_[cursor[u]++] = Neighbor{i, e};
    adjacency_[cursor[i]++] = Neighbor{u, e};
  }
}

std::span<const BipartiteGraph::Neighbor> BipartiteGraph::neighbors(NodeId node) const {
  return std::span<const Neighbor>(adjacency_)
      .subspan(adjacency_offsets_[node], adjacency_offsets_[node + 1] - adjacency_offsets_[node]);
}

std::span<const std::size_t> BipartiteGraph::edge_interactions(std::size_t edge) const {
  return std::span<const std::size_t>(edge_members_)
      .subspan(edge_offsets_[edge], multiplicity(edge));
}

PageRankResult pagerank(const BipartiteGraph& graph, const PageRankOptions& options) {
  if (!(options.damping >= 0.0 && options.damping < 1.0)) {
    throw ParameterError("samplers", "pagerank damping must lie in [0, 1)");
  }
  const std::size_t n = graph.num_nodes();
  PageRankResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  const double uniform = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, uniform);
  std::vector<double> next(n, 0.0);

  while (result.iterations < options.max_iterations) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (graph.degree(v) == 0) dangling += rank[v];
    }
    const double base = (1.0 - options.damping + options.damping * dangling) * uniform;
    for (NodeId v = 0; v < n; ++v) {
      double inflow = 0.0;
      for (const auto& nb : graph.neighbors(v)) {
        inflow += rank[nb.node] * static_cast<double>(graph.multiplicity(nb.edge)) /
                  static_cast<double>(graph.degree(nb.node));
      }
      next[v] = base + options.damping * inflow;
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - rank[v]);
    rank.swap(next);
    ++result.iterations;
    if (change <= options.tolerance) {
      result.converged = true;
      break;
    }
  }

  const double total = std::accumulate(rank.begin(), rank.end(), 0.0);
  for (double& r : rank) r /= total;
  result.scores = std::move(rank);
  return result;
}

}  // namespace cfsample
