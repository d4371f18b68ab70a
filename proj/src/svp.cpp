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

#include "cfsample/svp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cfsample/error.hpp"
#include "cfsample/random.hpp"

namespace cfsample {

std::string_view to_string(Granularity granularity) {
  return granularity == Granularity::kUser ? "user" : "interaction";
}

Granularity parse_granularity(std::string_view name) {
  if (name == "interaction") return Granularity::kInteraction;
  if (name == "user") return Granularity::kUser;
  throw ParameterError("svp", "unknown granularity '" + std::string(name) + "'");
}

EpochTrace train_proxy(const Dataset& train, ModelKind proxy, Scenario scenario,
                       const ProxyConfig& config, std::uint64_t seed) {
  if (proxy != ModelKind::kBiasOnly && proxy != ModelKind::kMF) {
    throw ParameterError("svp", "proxy must be bias-only or mf");
  }
  if (config.train.epochs < 1) throw ParameterError("svp", "proxy needs at least one epoch");
  if (train.empty()) throw PreconditionError("svp", "empty train set");

  TrainConfig tc = config.train;
  tc.seed = derive_seed(seed, "proxy");
  EpochTrace trace;
  trace.scenario = scenario;
  trace.epochs = tc.epochs;
  trace.interactions = train.size();
  trace.records.assign(static_cast<std::size_t>(tc.epochs) * train.size(), 0.0);

  if (scenario == Scenario::kExplicit) {
    train_explicit(train, proxy, tc, [&](int epoch, const ModelParams& params) {
      double* row = trace.records.data() + static_cast<std::size_t>(epoch - 1) * train.size();
      for (std::size_t k = 0; k < train.size(); ++k) {
        const auto& x = train[k];
        const double err = predict(params, x.user, x.item) - x.rating;
        row[k] = err * err;
      }
    });
    return trace;
  }

  if (config.scoring_negatives < 1) {
    throw ParameterError("svp", "scoring needs at least one negative");
  }
  trace.negatives = config.scoring_negatives;
  const auto positives = train.user_item_sets();
  const std::size_t items = train.num_items();
  Rng rng(derive_seed(seed, "scoring"));
  train_bpr(train, proxy, tc, [&](int epoch, const ModelParams& params) {
    double* row = trace.records.data() + static_cast<std::size_t>(epoch - 1) * train.size();
    for (std::size_t k = 0; k < train.size(); ++k) {
      const auto& x = train[k];
      const auto& seen = positives[x.user];
      if (seen.size() >= items) {
        // Nothing to misrank against.
        row[k] = config.scoring_negatives;
        continue;
      }
      const double positive = predict(params, x.user, x.item);
      int correct = 0;
      for (int n = 0; n < config.scoring_negatives; ++n) {
        ItemId neg;
        do {
          neg = static_cast<ItemId>(uniform_index(rng, items));
        } while (std::binary_search(seen.begin(), seen.end(), neg));
        if (positive > predict(params, x.user, neg)) ++correct;
      }
      row[k] = correct;
    }
  });
  return trace;
}

namespace {

void fill_user_means(ImportanceTable& table, const Dataset& train) {
  table.user.assign(train.num_users(), 0.0);
  for (UserId u = 0; u < train.num_users(); ++u) {
    auto history = train.history(u);
    if (history.empty()) continue;
    double sum = 0.0;
    for (std::size_t k : history) sum += table.interaction[k];
    table.user[u] = sum / static_cast<double>(history.size());
  }
}

void require_trace_matches(const EpochTrace& trace, const Dataset& train) {
  if (trace.interactions != train.size() || trace.epochs < 1) {
    throw PreconditionError("svp", "trace does not match the train set");
  }
}

}  // namespace

ImportanceTable importance_explicit(const EpochTrace& trace, const Dataset& train) {
  require_trace_matches(trace, train);
  if (trace.scenario != Scenario::kExplicit) {
    throw PreconditionError("svp", "squared-error importance needs an explicit trace");
  }
  ImportanceTable table;
  table.interaction.assign(train.size(), 0.0);
  for (int e = 0; e < trace.epochs; ++e) {
    for (std::size_t k = 0; k < train.size(); ++k) table.interaction[k] += trace.at(e, k);
  }
  for (double& v : table.interaction) v /= trace.epochs;
  table.propensity.assign(train.size(), 1.0);
  fill_user_means(table, train);
  return table;
}

ImportanceTable importance_implicit(const EpochTrace& trace, const Dataset& train,
                                    double smoothing) {
  require_trace_matches(trace, train);
  if (trace.scenario == Scenario::kExplicit || trace.negatives < 1) {
    throw PreconditionError("svp", "ranking importance needs an implicit or sequential trace");
  }
  if (!(smoothing > 0.0)) throw ParameterError("svp", "smoothing must be positive");
  const double numerator = trace.negatives + 2.0 * smoothing;
  ImportanceTable table;
  table.interaction.assign(train.size(), 0.0);
  for (int e = 0; e < trace.epochs; ++e) {
    for (std::size_t k = 0; k < train.size(); ++k) {
      table.interaction[k] += numerator / (trace.at(e, k) + smoothing);
    }
  }
  for (double& v : table.interaction) v /= trace.epochs;
  table.propensity.assign(train.size(), 1.0);
  fill_user_means(table, train);
  return table;
}

double sigmoid_propensity(double count, std::size_t population, const PropensityParams& params) {
  const double scale = std::log(static_cast<double>(population)) - 1.0;
  if (!(scale > 0.0)) {
    throw ParameterError("svp", "propensity needs a population of at least 3, got " +
                                    std::to_string(population));
  }
  if (!(count >= 0.0) || !(params.b > 0.0) || !(params.a >= 0.0)) {
    throw ParameterError("svp", "propensity needs N >= 0, B > 0 and A >= 0");
  }
  const double c = scale * std::pow(params.b + 1.0, params.a);
  return 1.0 / (1.0 + c * std::exp(-params.a * std::log(count + params.b)));
}

PropensityModel::PropensityModel(const Dataset& train, const PropensityParams& params)
    : PropensityModel(train.user_counts(), train.item_counts(), params) {}

PropensityModel::PropensityModel(std::vector<std::size_t> user_counts,
                                 std::vector<std::size_t> item_counts,
                                 const PropensityParams& params) {
  user_.reserve(user_counts.size());
  for (std::size_t n : user_counts) {
    user_.push_back(sigmoid_propensity(static_cast<double>(n), user_counts.size(), params));
  }
  item_.reserve(item_counts.size());
  for (std::size_t n : item_counts) {
    item_.push_back(sigmoid_propensity(static_cast<double>(n), item_counts.size(), params));
  }
}

ImportanceTable importance_prop(const ImportanceTable& table, const PropensityModel& model,
                                const Dataset& train) {
  if (table.interaction.size() != train.size()) {
    throw PreconditionError("svp", "importance table does not match the train set");
  }
  ImportanceTable out = table;
  out.propensity_corrected = true;
  for (std::size_t k = 0; k < train.size(); ++k) {
    const auto& x = train[k];
    const double p = model(x.user, x.item);
    out.propensity[k] = p;
    out.interaction[k] = table.interaction[k] / p;
  }
  fill_user_means(out, train);
  return out;
}

SampleResult svp_sample(const Dataset& train, const ImportanceTable& table,
                        const SampleSpec& spec) {
  const std::size_t budget = sample_budget(train, spec);
  if (table.interaction.size() != train.size() || table.user.size() != train.num_users()) {
    throw PreconditionError("svp", "importance table does not match the train set");
  }
  std::string name = table.propensity_corrected ? "svp-cf-prop-" : "svp-cf-";
  name += to_string(table.granularity);
  Rng rng(spec.seed);

  if (table.granularity == Granularity::kInteraction) {
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return table.interaction[a] > table.interaction[b];
    });
    order.resize(budget);
    return detail::finish(train, std::move(order), name, spec, budget);
  }

  std::vector<UserId> users;
  for (UserId u = 0; u < train.num_users(); ++u) {
    if (!train.history(u).empty()) users.push_back(u);
  }
  std::shuffle(users.begin(), users.end(), rng);
  std::stable_sort(users.begin(), users.end(),
                   [&](UserId a, UserId b) { return table.user[a] > table.user[b]; });
  detail::UnitFiller filler(train.size(), budget, derive_seed(spec.seed, "truncate"));
  for (UserId u : users) {
    if (filler.add_unit(train.history(u))) break;
  }
  return detail::finish(train, filler.take(), name, spec, budget);
}

UnbiasednessReport check_unbiasedness(const UnbiasednessConfig& config, std::size_t trials,
                                      double tolerance) {
  if (config.users == 0 || config.items == 0 || trials == 0) {
    throw ParameterError("svp", "simulation needs users, items and trials");
  }
  Rng rng(config.seed);
  struct Pair {
    UserId user;
    ItemId item;
    double delta;
    double propensity;
  };
  std::vector<Pair> positives;
  std::vector<std::size_t> user_counts(config.users, 0), item_counts(config.items, 0);
  for (UserId u = 0; u < config.users; ++u) {
    for (ItemId i = 0; i < config.items; ++i) {
      if (uniform01(rng) < config.density) {
        positives.push_back({u, i, 0.0, 1.0});
        ++user_counts[u];
        ++item_counts[i];
      }
    }
  }
  if (positives.empty()) throw PreconditionError("svp", "simulation has no true positives");

  std::optional<PropensityModel> model;
  if (!config.constant_propensity) {
    model.emplace(user_counts, item_counts, config.propensity);
  } else if (!(*config.constant_propensity > 0.0 && *config.constant_propensity <= 1.0)) {
    throw ParameterError("svp", "constant propensity must lie in (0, 1]");
  }
  std::uniform_real_distribution<double> delta_dist(config.delta_min, config.delta_max);
  for (auto& pair : positives) {
    pair.delta = config.constant_delta ? *config.constant_delta : delta_dist(rng);
    pair.propensity =
        model ? (*model)(pair.user, pair.item) : *config.constant_propensity;
  }

  // Each trial reveals every true positive with its propensity and averages
  // Δ/p over the observed ones, spread over the full matrix. Per-pair reveal
  // counts give the mean over trials without accumulating round-off.
  const double cells = static_cast<double>(config.users * config.items);
  UnbiasednessReport report;
  report.trials = trials;
  double estimate = 0.0, target = 0.0;
  for (const auto& pair : positives) {
    std::size_t seen = 0;
    for (std::size_t t = 0; t < trials; ++t) seen += uniform01(rng) < pair.propensity ? 1 : 0;
    report.observed += seen;
    const double rate = static_cast<double>(seen) / static_cast<double>(trials);
    estimate += pair.delta / pair.propensity * rate;
    target += pair.delta;
  }
  if (report.observed == 0) throw PreconditionError("svp", "no interaction was ever observed");
  report.estimate = estimate / cells;
  report.target = target / cells;
  report.relative_error = std::abs(report.estimate - report.target) / report.target;
  report.passed = report.relative_error < tolerance;
  return report;
}

}  // namespace cfsample
