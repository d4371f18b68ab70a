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
#include <string>
#include <span>
#include <string_view>
#include <vector>

#include "cfsample/dataset.hpp"
#include "cfsample/graph.hpp"
#include "cfsample/random.hpp"

namespace cfsample {

// Knobs of the graph-based strategies. The defaults follow the usual graph
// sampling literature; none of them are canonical.
struct SamplerParams {
  double restart_probability = 0.15;
  double burn_probability = 0.7;
  double damping = 0.85;
  double tolerance = 1e-8;
  int max_iterations = 100;
  // Random-walk steps without discovering a node before jumping to a fresh
  // unvisited start node.
  std::size_t stall_limit = 1000;
};

struct SampleSpec {
  double percent = 100.0;  // in (0, 100]
  std::uint64_t seed = 0;
  SamplerParams params;
};

struct SampleProvenance {
  std::string strategy;
  std::uint64_t seed = 0;
  double percent = 100.0;
  std::size_t budget = 0;
  // Pagerank diagnostics; `converged` stays true for other strategies.
  bool converged = true;
  int iterations = 0;
};

struct SampleResult {
  Dataset retained;
  std::vector<std::size_t> kept;  // sorted indices into the train set
  SampleProvenance provenance;
};

enum class BaseStrategy {
  kRandomInteraction,
  kStratifiedUserHistory,
  kTemporalUserHistory,
  kRandomUser,
  kHeadUser,
  kCentrality,
  kRandomWalk,
  kForestFire,
};

std::string_view to_string(BaseStrategy strategy);

// Validated budget round-half-up(percent/100 * |train|), at least 1.
std::size_t sample_budget(const Dataset& train, const SampleSpec& spec);

SampleResult sample_random_interactions(const Dataset& train, const SampleSpec& spec);
SampleResult sample_stratified_user_history(const Dataset& train, const SampleSpec& spec);
SampleResult sample_temporal_user_history(const Dataset& train, const SampleSpec& spec);
SampleResult sample_random_users(const Dataset& train, const SampleSpec& spec);
SampleResult sample_head_users(const Dataset& train, const SampleSpec& spec);
SampleResult sample_centrality(const Dataset& train, const BipartiteGraph& graph,
                               const SampleSpec& spec);
SampleResult sample_random_walk(const Dataset& train, const BipartiteGraph& graph,
                                const SampleSpec& spec);
SampleResult sample_forest_fire(const Dataset& train, const BipartiteGraph& graph,
                                const SampleSpec& spec);

// Dispatches to the strategy; graph strategies build the graph themselves.
SampleResult sample(BaseStrategy strategy, const Dataset& train, const SampleSpec& spec);

namespace detail {

// Builds a SampleResult from unsorted train indices.
SampleResult finish(const Dataset& train, std::vector<std::size_t> kept, std::string strategy,
                    const SampleSpec& spec, std::size_t budget);

// Greedily takes whole units (a user's history, a node's edges) in order until
// the budget is reached; the last unit is cut down to the exact budget by a
// uniform random choice among its members.
class UnitFiller {
 public:
  UnitFiller(std::size_t universe, std::size_t budget, std::uint64_t seed);

  // Adds the not-yet-kept members of one unit. Returns true once full.
  bool add_unit(std::span<const std::size_t> members);
  bool full() const { return kept_.size() >= budget_; }
  std::vector<std::size_t> take() { return std::move(kept_); }

 private:
  std::vector<bool> taken_;
  std::vector<std::size_t> kept_;
  std::size_t budget_;
  Rng rng_;
};

}  // namespace detail

}  // namespace cfsample
