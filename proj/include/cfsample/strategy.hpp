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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cfsample/dataset.hpp"
#include "cfsample/graph.hpp"
#include "cfsample/samplers.hpp"
#include "cfsample/svp.hpp"

namespace cfsample {

// One of the sixteen sampling strategies: a base strategy, or proxy-importance
// selection parameterised by proxy model, granularity and propensity
// correction.
struct StrategyId {
  std::optional<BaseStrategy> base;
  ModelKind proxy = ModelKind::kMF;
  Granularity granularity = Granularity::kInteraction;
  bool propensity = false;

  bool is_svp() const { return !base.has_value(); }
  std::string name() const;

  friend bool operator==(const StrategyId&, const StrategyId&) = default;
};

// Names look like "random-walk" or "svp-cf-prop-user-bias-only".
StrategyId parse_strategy(std::string_view name);
const std::vector<StrategyId>& all_strategies();

struct SvpSettings {
  ProxyConfig proxy;
  PropensityParams propensity;
  double smoothing = 1.0;
};

// Samples one train set under any strategy. prepare() trains the proxies and
// builds the graph needed by a strategy list; afterwards sample() is const and
// safe to call from several threads.
class StrategyRunner {
 public:
  StrategyRunner(const Dataset& train, Scenario scenario, SvpSettings settings,
                 std::uint64_t seed);

  void prepare(const std::vector<StrategyId>& strategies);
  SampleResult sample(const StrategyId& strategy, const SampleSpec& spec) const;

  // Builds on demand when not prepared.
  const ImportanceTable& importance(ModelKind proxy, Granularity granularity, bool propensity);

 private:
  const ImportanceTable* find_table(ModelKind proxy, Granularity granularity,
                                    bool propensity) const;

  const Dataset& train_;
  Scenario scenario_;
  SvpSettings settings_;
  std::uint64_t seed_;
  std::optional<BipartiteGraph> graph_;
  std::map<std::tuple<ModelKind, Granularity, bool>, ImportanceTable> tables_;
};

}  // namespace cfsample
