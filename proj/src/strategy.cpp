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

#include "cfsample/strategy.hpp"

#include <tuple>

#include "cfsample/error.hpp"
#include "cfsample/random.hpp"

namespace cfsample {
namespace {

constexpr BaseStrategy kBase[] = {
    BaseStrategy::kRandomInteraction, BaseStrategy::kStratifiedUserHistory,
    BaseStrategy::kTemporalUserHistory, BaseStrategy::kRandomUser,
    BaseStrategy::kHeadUser, BaseStrategy::kCentrality,
    BaseStrategy::kRandomWalk, BaseStrategy::kForestFire,
};

bool needs_graph(BaseStrategy s) {
  return s == BaseStrategy::kCentrality || s == BaseStrategy::kRandomWalk ||
         s == BaseStrategy::kForestFire;
}

}  // namespace

std::string StrategyId::name() const {
  if (base) return std::string(to_string(*base));
  std::string out = propensity ? "svp-cf-prop-" : "svp-cf-";
  out += to_string(granularity);
  out += '-';
  out += proxy == ModelKind::kBiasOnly ? "bias-only" : "mf";
  return out;
}

const std::vector<StrategyId>& all_strategies() {
  static const std::vector<StrategyId> strategies = [] {
    std::vector<StrategyId> out;
    for (BaseStrategy b : kBase) out.push_back(StrategyId{.base = b});
    for (bool prop : {false, true}) {
      for (Granularity g : {Granularity::kInteraction, Granularity::kUser}) {
        for (ModelKind proxy : {ModelKind::kMF, ModelKind::kBiasOnly}) {
          out.push_back(StrategyId{.base = std::nullopt, .proxy = proxy, .granularity = g, .propensity = prop});
        }
      }
    }
    return out;
  }();
  return strategies;
}

StrategyId parse_strategy(std::string_view name) {
  for (const auto& s : all_strategies()) {
    if (s.name() == name) return s;
  }
  throw ParameterError("samplers", "unknown strategy '" + std::string(name) + "'");
}

StrategyRunner::StrategyRunner(const Dataset& train, Scenario scenario, SvpSettings settings,
                               std::uint64_t seed)
    : train_(train), scenario_(scenario), settings_(std::move(settings)), seed_(seed) {}

void StrategyRunner::prepare(const std::vector<StrategyId>& strategies) {
  for (const auto& s : strategies) {
    if (s.is_svp()) {
      importance(s.proxy, s.granularity, s.propensity);
    } else if (needs_graph(*s.base) && !graph_) {
      graph_.emplace(train_);
    }
  }
}

const ImportanceTable* StrategyRunner::find_table(ModelKind proxy, Granularity granularity,
                                                  bool propensity) const {
  auto it = tables_.find({proxy, granularity, propensity});
  return it == tables_.end() ? nullptr : &it->second;
}

const ImportanceTable& StrategyRunner::importance(ModelKind proxy, Granularity granularity,
                                                  bool propensity) {
  if (const auto* table = find_table(proxy, granularity, propensity)) return *table;

  // Both granularities and both corrections share one proxy run.
  const ImportanceTable* plain = find_table(proxy, Granularity::kInteraction, false);
  if (!plain) {
    const EpochTrace trace = train_proxy(train_, proxy, scenario_, settings_.proxy,
                                         derive_seed(seed_, to_string(proxy)));
    ImportanceTable table = scenario_ == Scenario::kExplicit
                                ? importance_explicit(trace, train_)
                                : importance_implicit(trace, train_, settings_.smoothing);
    plain = &tables_.emplace(std::make_tuple(proxy, Granularity::kInteraction, false),
                             std::move(table))
                 .first->second;
  }
  ImportanceTable table = *plain;
  if (propensity) {
    table = importance_prop(table, PropensityModel(train_, settings_.propensity), train_);
  }
  table.granularity = granularity;
  return tables_.insert_or_assign({proxy, granularity, propensity}, std::move(table))
      .first->second;
}

SampleResult StrategyRunner::sample(const StrategyId& strategy, const SampleSpec& spec) const {
  if (strategy.is_svp()) {
    const auto* table = find_table(strategy.proxy, strategy.granularity, strategy.propensity);
    if (!table) throw PreconditionError("samplers", strategy.name() + " was not prepared");
    SampleResult result = svp_sample(train_, *table, spec);
    result.provenance.strategy = strategy.name();
    return result;
  }
  const BaseStrategy base = *strategy.base;
  if (!needs_graph(base)) return cfsample::sample(base, train_, spec);
  if (!graph_) throw PreconditionError("samplers", strategy.name() + " was not prepared");
  switch (base) {
    case BaseStrategy::kCentrality:
      return sample_centrality(train_, *graph_, spec);
    case BaseStrategy::kRandomWalk:
      return sample_random_walk(train_, *graph_, spec);
    default:
      return sample_forest_fire(train_, *graph_, spec);
  }
}

}  // namespace cfsample
