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
#include <optional>
#include <string_view>
#include <vector>

#include "cfsample/dataset.hpp"
#include "cfsample/models.hpp"
#include "cfsample/samplers.hpp"

namespace cfsample {

// Settings of the proxy used to score data-point difficulty. The proxy's
// TrainConfig seed is ignored; train_proxy takes the seed explicitly.
struct ProxyConfig {
  TrainConfig train{.latent_size = 8,
                    .learning_rate = 0.02,
                    .dropout = 0.0,
                    .l2_reg = 1e-4,
                    .epochs = 10,
                    .n_neg = 1,
                    .seed = 0};
  int scoring_negatives = 4;  // negatives per positive per epoch when scoring
};

// Per-epoch difficulty records of a proxy, one row per epoch and one column
// per train interaction. Explicit traces hold squared errors; implicit and
// sequential traces hold the number of sampled negatives the positive beat.
struct EpochTrace {
  Scenario scenario = Scenario::kExplicit;
  int epochs = 0;
  int negatives = 0;  // implicit/sequential only
  std::size_t interactions = 0;
  std::vector<double> records;

  double at(int epoch, std::size_t interaction) const {
    return records[static_cast<std::size_t>(epoch) * interactions + interaction];
  }
};

EpochTrace train_proxy(const Dataset& train, ModelKind proxy, Scenario scenario,
                       const ProxyConfig& config, std::uint64_t seed);

enum class Granularity { kInteraction, kUser };

std::string_view to_string(Granularity granularity);
Granularity parse_granularity(std::string_view name);

struct ImportanceTable {
  Granularity granularity = Granularity::kInteraction;
  bool propensity_corrected = false;
  std::vector<double> interaction;  // indexed like the train set
  std::vector<double> propensity;   // p_{u,i} per interaction; 1 when uncorrected
  std::vector<double> user;         // mean over the user's interactions; 0 if none
};

// Mean squared error over epochs, per interaction.
ImportanceTable importance_explicit(const EpochTrace& trace, const Dataset& train);

// Mean over epochs of (n + 2s) / (correct + s): the inverse of the sampled AUC
// with additive smoothing s, bounded where a literal inverse indicator is not.
ImportanceTable importance_implicit(const EpochTrace& trace, const Dataset& train,
                                    double smoothing = 1.0);

struct PropensityParams {
  double a = 0.55;
  double b = 1.5;
};

// Sigmoid propensity p = 1 / (1 + C * exp(-A * ln(N + B))) with
// C = (ln(population) - 1) * (B + 1)^A, natural logarithms throughout.
double sigmoid_propensity(double count, std::size_t population, const PropensityParams& params);

// p_{u,i} = p_u * p_i with counts taken from the full train set.
class PropensityModel {
 public:
  PropensityModel(const Dataset& train, const PropensityParams& params);
  PropensityModel(std::vector<std::size_t> user_counts, std::vector<std::size_t> item_counts,
                  const PropensityParams& params);

  double user(UserId u) const { return user_.at(u); }
  double item(ItemId i) const { return item_.at(i); }
  double operator()(UserId u, ItemId i) const { return user(u) * item(i); }

 private:
  std::vector<double> user_;
  std::vector<double> item_;
};

// Divides every interaction importance by its propensity and recomputes the
// user means.
ImportanceTable importance_prop(const ImportanceTable& table, const PropensityModel& model,
                                const Dataset& train);

// Keeps the most important interactions, or whole histories of the most
// important users with the last one cut to the exact budget. Ties in
// importance are ordered by a seeded shuffle.
SampleResult svp_sample(const Dataset& train, const ImportanceTable& table,
                        const SampleSpec& spec);

// Monte-Carlo check that the propensity-corrected importance is an unbiased
// estimate of the uncorrected one when observations are revealed with exactly
// the model's propensities.
struct UnbiasednessConfig {
  std::size_t users = 30;
  std::size_t items = 40;
  double density = 0.3;  // fraction of pairs that are true positives
  PropensityParams propensity;
  double delta_min = 0.1;
  double delta_max = 5.0;
  std::optional<double> constant_delta;       // overrides the Δ range
  std::optional<double> constant_propensity;  // overrides the sigmoid model
  std::uint64_t seed = 0;
};

struct UnbiasednessReport {
  double estimate = 0.0;  // mean over trials of the corrected estimator
  double target = 0.0;    // mean Δ over the full matrix
  double relative_error = 0.0;
  std::size_t trials = 0;
  std::size_t observed = 0;  // total revealed interactions over all trials
  bool passed = false;
};

UnbiasednessReport check_unbiasedness(const UnbiasednessConfig& config, std::size_t trials,
                                      double tolerance);

}  // namespace cfsample
