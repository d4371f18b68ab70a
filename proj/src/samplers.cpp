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

#include "cfsample/samplers.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "cfsample/error.hpp"

namespace cfsample {

std::string_view to_string(BaseStrategy strategy) {
  switch (strategy) {
    case BaseStrategy::kRandomInteraction:
      return "random-interaction";
    case BaseStrategy::kStratifiedUserHistory:
      return "stratified";
    case BaseStrategy::kTemporalUserHistory:
      return "temporal";
    case BaseStrategy::kRandomUser:
      return "random-user";
    case BaseStrategy::kHeadUser:
      return "head-user";
    case BaseStrategy::kCentrality:
      return "centrality";
    case BaseStrategy::kRandomWalk:
      return "random-walk";
    case BaseStrategy::kForestFire:
      return "forest-fire";
  }
  return "unknown";
}

std::size_t sample_budget(const Dataset& train, const SampleSpec& spec) {
  if (!(spec.percent > 0.0 && spec.percent <= 100.0)) {
    throw ParameterError("samplers", "percent must lie in (0, 100]");
  }
  std::size_t budget = budget_for(spec.percent, train.size());
  if (budget > train.size()) {
    throw PreconditionError("samplers", "budget " + std::to_string(budget) +
                                            " exceeds train size " +
                                            std::to_string(train.size()));
  }
  return budget;
}

namespace detail {

SampleResult finish(const Dataset& train, std::vector<std::size_t> kept, std::string strategy,
                    const SampleSpec& spec, std::size_t budget) {
  std::sort(kept.begin(), kept.end());
  SampleResult result;
  result.retained = train.subset(kept);
  result.kept = std::move(kept);
  result.provenance.strategy = std::move(strategy);
  result.provenance.seed = spec.seed;
  result.provenance.percent = spec.percent;
  result.provenance.budget = budget;
  return result;
}

UnitFiller::UnitFiller(std::size_t universe, std::size_t budget, std::uint64_t seed)
    : taken_(universe, false), budget_(budget), rng_(seed) {
  kept_.reserve(budget);
}

bool UnitFiller::add_unit(std::span<const std::size_t> members) {
  if (full()) return true;
  std::vector<std::size_t> fresh;
  for (std::size_t k : members) {
    if (!taken_[k]) fresh.push_back(k);
  }
  const std::size_t room = budget_ - kept_.size();
  if (fresh.size() > room) {
    partial_shuffle(fresh, room, rng_);
    fresh.resize(room);
  }
  for (std::size_t k : fresh) {
    taken_[k] = true;
    kept_.push_back(k);
  }
  return full();
}

}  // namespace detail

SampleResult sample_random_interactions(const Dataset& train, const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  Rng rng(spec.seed);
  std::vector<std::size_t> pool(train.size());
  std::iota(pool.begin(), pool.end(), 0);
  partial_shuffle(pool, budget, rng);
  pool.resize(budget);
  return detail::finish(train, std::move(pool), "random-interaction", spec, budget);
}

namespace {

// Per-user prefix sampling shared by the stratified and temporal strategies.
// `orders[u]` lists the user's interactions in preference order; the user
// keeps the first round-half-up(p * N_u) of them. A single global pass then
// adds or removes one interaction per user (users visited in random order)
// until the total equals the budget. Removals prefer users that keep at least
// one interaction.
std::vector<std::size_t> per_user_prefixes(const std::vector<std::vector<std::size_t>>& orders,
                                           double percent, std::size_t budget, Rng& rng) {
  const std::size_t users = orders.size();
  std::vector<std::size_t> count(users, 0);
  std::size_t total = 0;
  for (std::size_t u = 0; u < users; ++u) {
    count[u] = scaled_count(percent, orders[u].size());
    total += count[u];
  }

  std::vector<std::size_t> visit(users);
  std::iota(visit.begin(), visit.end(), 0);
  std::shuffle(visit.begin(), visit.end(), rng);

  if (total > budget) {
    std::vector<bool> adjusted(users, false);
    for (std::size_t floor : {std::size_t{2}, std::size_t{1}}) {
      for (std::size_t u : visit) {
        if (total == budget) break;
        if (!adjusted[u] && count[u] >= floor) {
          --count[u];
          --total;
          adjusted[u] = true;
        }
      }
    }
  } else if (total < budget) {
    for (std::size_t u : visit) {
      if (total == budget) break;
      if (count[u] < orders[u].size()) {
        ++count[u];
        ++total;
      }
    }
  }
  // Not reached with round-half-up per-user counts.
  while (total > budget) {
    for (std::size_t u : visit) {
      if (total > budget && count[u] > 0) --count[u], --total;
    }
  }
  while (total < budget) {
    for (std::size_t u : visit) {
      if (total < budget && count[u] < orders[u].size()) ++count[u], ++total;
    }
  }

  std::vector<std::size_t> kept;
  kept.reserve(budget);
  for (std::size_t u = 0; u < users; ++u) {
    kept.insert(kept.end(), orders[u].begin(),
                orders[u].begin() + static_cast<std::ptrdiff_t>(count[u]));
  }
  return kept;
}

}  // namespace

SampleResult sample_stratified_user_history(const Dataset& train, const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  Rng rng(spec.seed);
  std::vector<std::vector<std::size_t>> orders(train.num_users());
  for (UserId u = 0; u < train.num_users(); ++u) {
    auto history = train.history(u);
    orders[u].assign(history.begin(), history.end());
    std::shuffle(orders[u].begin(), orders[u].end(), rng);
  }
  auto kept = per_user_prefixes(orders, spec.percent, budget, rng);
  return detail::finish(train, std::move(kept), "stratified", spec, budget);
}

SampleResult sample_temporal_user_history(const Dataset& train, const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  Rng rng(spec.seed);
  std::vector<std::vector<std::size_t>> orders(train.num_users());
  for (UserId u = 0; u < train.num_users(); ++u) {
    auto history = train.history(u);
    // Most recent first; among equal timestamps the later row comes first.
    orders[u].assign(history.rbegin(), history.rend());
  }
  auto kept = per_user_prefixes(orders, spec.percent, budget, rng);
  return detail::finish(train, std::move(kept), "temporal", spec, budget);
}

SampleResult sample_random_users(const Dataset& train, const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  Rng rng(spec.seed);
  std::vector<UserId> users;
  for (UserId u = 0; u < train.num_users(); ++u) {
    if (!train.history(u).empty()) users.push_back(u);
  }
  std::shuffle(users.begin(), users.end(), rng);
  detail::UnitFiller filler(train.size(), budget, derive_seed(spec.seed, "truncate"));
  for (UserId u : users) {
    if (filler.add_unit(train.history(u))) break;
  }
  return detail::finish(train, filler.take(), "random-user", spec, budget);
}

SampleResult sample_head_users(const Dataset& train, const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  std::vector<UserId> users;
  for (UserId u = 0; u < train.num_users(); ++u) {
    if (!train.history(u).empty()) users.push_back(u);
  }
  std::stable_sort(users.begin(), users.end(), [&](UserId a, UserId b) {
    return train.history(a).size() > train.history(b).size();
  });
  detail::UnitFiller filler(train.size(), budget, derive_seed(spec.seed, "truncate"));
  for (UserId u : users) {
    if (filler.add_unit(train.history(u))) break;
  }
  return detail::finish(train, filler.take(), "head-user", spec, budget);
}

namespace {

std::vector<std::size_t> incident_interactions(const BipartiteGraph& graph, NodeId node) {
  std::vector<std::size_t> members;
  for (const auto& nb : graph.neighbors(node)) {
    auto edge = graph.edge_interactions(nb.edge);
    members.insert(members.end(), edge.begin(), edge.end());
  }
  return members;
}

void require_matching_graph(const Dataset& train, const BipartiteGraph& graph) {
  std::size_t edges_total = 0;
  for (std::size_t e = 0; e < graph.num_edges(); ++e) edges_total += graph.multiplicity(e);
  if (graph.num_users() != train.num_users() || graph.num_items() != train.num_items() ||
      edges_total != train.size()) {
    throw PreconditionError("samplers", "graph was not built from this train set");
  }
}

// Grows a visited-node set and keeps every interaction whose endpoints are
// both visited.
class InducedCollector {
 public:
  InducedCollector(const Dataset& train, const BipartiteGraph& graph, std::size_t budget,
                   std::uint64_t seed)
      : graph_(graph),
        visited_(graph.num_nodes(), false),
        filler_(train.size(), budget, seed) {
    for (NodeId v = 0; v < graph.num_nodes(); ++v) {
      if (graph.degree(v) > 0) {
        position_.push_back(unvisited_.size());
        unvisited_.push_back(v);
      } else {
        position_.push_back(kNone);
      }
    }
  }

  bool visited(NodeId v) const { return visited_[v]; }
  bool full() const { return filler_.full(); }

  NodeId random_unvisited(Rng& rng) const {
    return unvisited_[uniform_index(rng, unvisited_.size())];
  }

  // Marks `v` visited and keeps its edges to already-visited nodes.
  void visit(NodeId v) {
    visited_[v] = true;
    std::size_t slot = position_[v];
    if (slot != kNone) {
      NodeId last = unvisited_.back();
      unvisited_[slot] = last;
      position_[last] = slot;
      unvisited_.pop_back();
      position_[v] = kNone;
    }
    std::vector<std::size_t> members;
    for (const auto& nb : graph_.neighbors(v)) {
      if (!visited_[nb.node]) continue;
      auto edge = graph_.edge_interactions(nb.edge);
      members.insert(members.end(), edge.begin(), edge.end());
    }
    filler_.add_unit(members);
  }

  std::vector<std::size_t> take() { return filler_.take(); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  const BipartiteGraph& graph_;
  std::vector<bool> visited_;
  std::vector<NodeId> unvisited_;
  std::vector<std::size_t> position_;
  detail::UnitFiller filler_;
};

}  // namespace

SampleResult sample_centrality(const Dataset& train, const BipartiteGraph& graph,
                               const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  require_matching_graph(train, graph);
  PageRankOptions options;
  options.damping = spec.params.damping;
  options.tolerance = spec.params.tolerance;
  options.max_iterations = spec.params.max_iterations;
  auto ranks = pagerank(graph, options);

  std::vector<NodeId> nodes;
  for (NodeId v = 0; v < graph.num_nodes(); ++v) {
    if (graph.degree(v) > 0) nodes.push_back(v);
  }
  std::stable_sort(nodes.begin(), nodes.end(),
                   [&](NodeId a, NodeId b) { return ranks.scores[a] > ranks.scores[b]; });

  detail::UnitFiller filler(train.size(), budget, derive_seed(spec.seed, "truncate"));
  for (NodeId v : nodes) {
    if (filler.add_unit(incident_interactions(graph, v))) break;
  }
  auto result = detail::finish(train, filler.take(), "centrality", spec, budget);
  result.provenance.converged = ranks.converged;
  result.provenance.iterations = ranks.iterations;
  return result;
}

SampleResult sample_random_walk(const Dataset& train, const BipartiteGraph& graph,
                                const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  require_matching_graph(train, graph);
  const double restart = spec.params.restart_probability;
  if (!(restart >= 0.0 && restart <= 1.0)) {
    throw ParameterError("samplers", "restart probability must lie in [0, 1]");
  }

  // Connected components, to notice when a walk has nothing left to find.
  const std::size_t n = graph.num_nodes();
  std::vector<std::size_t> component(n, static_cast<std::size_t>(-1));
  std::vector<std::size_t> component_unvisited;
  for (NodeId root = 0; root < n; ++root) {
    if (component[root] != static_cast<std::size_t>(-1)) continue;
    const std::size_t id = component_unvisited.size();
    std::size_t members = 0;
    std::vector<NodeId> stack{root};
    component[root] = id;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      ++members;
      for (const auto& nb : graph.neighbors(v)) {
        if (component[nb.node] == static_cast<std::size_t>(-1)) {
          component[nb.node] = id;
          stack.push_back(nb.node);
        }
      }
    }
    component_unvisited.push_back(members);
  }

  Rng rng(spec.seed);
  InducedCollector collector(train, graph, budget, derive_seed(spec.seed, "truncate"));
  auto visit = [&](NodeId v) {
    collector.visit(v);
    --component_unvisited[component[v]];
  };

  while (!collector.full()) {
    const NodeId start = collector.random_unvisited(rng);
    visit(start);
    NodeId current = start;
    std::size_t stall = 0;
    while (!collector.full() && component_unvisited[component[start]] > 0 &&
           stall < spec.params.stall_limit) {
      if (uniform01(rng) < restart) {
        current = start;
      } else {
        auto nbs = graph.neighbors(current);
        current = nbs[uniform_index(rng, nbs.size())].node;
      }
      if (collector.visited(current)) {
        ++stall;
      } else {
        visit(current);
        stall = 0;
      }
    }
  }
  return detail::finish(train, collector.take(), "random-walk", spec, budget);
}

SampleResult sample_forest_fire(const Dataset& train, const BipartiteGraph& graph,
                                const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  require_matching_graph(train, graph);
  const double burn = spec.params.burn_probability;
  if (!(burn >= 0.0 && burn < 1.0)) {
    throw ParameterError("samplers", "burn probability must lie in [0, 1)");
  }
  // Failures before the first success: mean burn / (1 - burn).
  std::geometric_distribution<std::size_t> spread(1.0 - burn);

  Rng rng(spec.seed);
  InducedCollector collector(train, graph, budget, derive_seed(spec.seed, "truncate"));
  while (!collector.full()) {
    std::deque<NodeId> frontier{collector.random_unvisited(rng)};
    collector.visit(frontier.front());
    while (!frontier.empty() && !collector.full()) {
      NodeId v = frontier.front();
      frontier.pop_front();
      const std::size_t count = spread(rng);
      std::vector<NodeId> fresh;
      for (const auto& nb : graph.neighbors(v)) {
        if (!collector.visited(nb.node)) fresh.push_back(nb.node);
      }
      const std::size_t burned = std::min(count, fresh.size());
      partial_shuffle(fresh, burned, rng);
      for (std::size_t k = 0; k < burned && !collector.full(); ++k) {
        collector.visit(fresh[k]);
        frontier.push_back(fresh[k]);
      }
    }
  }
  return detail::finish(train, collector.take(), "forest-fire", spec, budget);
}

SampleResult sample(BaseStrategy strategy, const Dataset& train, const SampleSpec& spec) {
  switch (strategy) {
    case BaseStrategy::kRandomInteraction:
      return sample_random_interactions(train, spec);
    case BaseStrategy::kStratifiedUserHistory:
      return sample_stratified_user_history(train, spec);
    case BaseStrategy::kTemporalUserHistory:
      return sample_temporal_user_history(train, spec);
    case BaseStrategy::kRandomUser:
      return sample_random_users(train, spec);
    case BaseStrategy::kHeadUser:
      return sample_head_users(train, spec);
    case BaseStrategy::kCentrality:
      return sample_centrality(train, BipartiteGraph(train), spec);
    case BaseStrategy::kRandomWalk:
      return sample_random_walk(train, BipartiteGraph(train), spec);
    case BaseStrategy::kForestFire:
      return sample_forest_fire(train, BipartiteGraph(train), spec);
  }
  throw ParameterError("samplers", "unknown strategy");
}

}  // namespace cfsample
