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
#include <span>
#include <vector>

#include "cfsample/dataset.hpp"

namespace cfsample {

using NodeId = std::uint32_t;

// Undirected user-item graph of a train set. Users occupy nodes
// [0, num_users) and items [num_users, num_users + num_items). Repeated
// (user, item) interactions collapse into one edge whose multiplicity is the
// repeat count; the edge keeps the indices of the interactions it stands for.
class BipartiteGraph {
 public:
  struct Neighbor {
    NodeId node;
    std::size_t edge;
  };

  explicit BipartiteGraph(const Dataset& train);

  std::size_t num_nodes() const { return num_users_ + num_items_; }
  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  std::size_t num_edges() const { return edge_user_.size(); }

  NodeId user_node(UserId user) const { return user; }
  NodeId item_node(ItemId item) const { return static_cast<NodeId>(num_users_ + item); }
  bool is_user(NodeId node) const { return node < num_users_; }

  std::span<const Neighbor> neighbors(NodeId node) const;
  // Sum of incident edge multiplicities.
  std::size_t degree(NodeId node) const { return degree_[node]; }

  UserId edge_user(std::size_t edge) const { return edge_user_[edge]; }
  ItemId edge_item(std::size_t edge) const { return edge_item_[edge]; }
  std::size_t multiplicity(std::size_t edge) const {
    return edge_offsets_[edge + 1] - edge_offsets_[edge];
  }
  std::span<const std::size_t> edge_interactions(std::size_t edge) const;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<UserId> edge_user_;
  std::vector<ItemId> edge_item_;
  std::vector<std::size_t> edge_offsets_;
  std::vector<std::size_t> edge_members_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<std::size_t> degree_;
};

struct PageRankOptions {
  double damping = 0.85;
  double tolerance = 1e-8;  // L1 change between iterates
  int max_iterations = 100;
};

struct PageRankResult {
  std::vector<double> scores;
  int iterations = 0;
  bool converged = false;
};

// Power iteration over the multiplicity-weighted graph. Dangling (isolated)
// nodes spread their mass uniformly; scores sum to one.
PageRankResult pagerank(const BipartiteGraph& graph, const PageRankOptions& options = {});

}  // namespace cfsample
