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
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "cfsample/dataset.hpp"

namespace cfsample {

enum class ModelKind { kPopRec, kBiasOnly, kMF, kNeuMF };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct TrainConfig {
  int latent_size = 8;
  double learning_rate = 0.02;
  double dropout = 0.0;  // NeuMF hidden layers only
  double l2_reg = 1e-4;
  int epochs = 10;
  int n_neg = 1;  // BPR negatives per positive per epoch
  std::uint64_t seed = 0;
};

// Weights of NeuMF's scoring network f: R^{3d} -> R with ReLU hidden layers
// of width 2d and d. Matrices are row-major, output-by-input.
struct Mlp {
  std::size_t dim = 0;
  std::vector<double> w1;  // 2d x 3d
  std::vector<double> b1;  // 2d
  std::vector<double> w2;  // d x 2d
  std::vector<double> b2;  // d
  std::vector<double> w3;  // d
  double b3 = 0.0;

  static Mlp zeros(std::size_t dim);
};

struct ModelParams {
  ModelKind kind = ModelKind::kBiasOnly;
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t latent_size = 0;  // 0 for Bias-only
  double alpha = 0.0;
  std::vector<double> user_bias;
  std::vector<double> item_bias;
  std::vector<double> user_factors;  // num_users x latent_size
  std::vector<double> item_factors;  // num_items x latent_size
  Mlp mlp;                           // empty unless NeuMF

  static ModelParams zeros(ModelKind kind, std::size_t users, std::size_t items,
                           std::size_t latent_size);

  std::span<const double> user_vector(UserId u) const {
    return {user_factors.data() + u * latent_size, latent_size};
  }
  std::span<const double> item_vector(ItemId i) const {
    return {item_factors.data() + i * latent_size, latent_size};
  }

  // Visits every scalar parameter in a fixed order.
  template <typename Fn>
  void for_each_scalar(Fn&& fn) {
    fn(alpha);
    for (auto* block : {&user_bias, &item_bias, &user_factors, &item_factors, &mlp.w1, &mlp.b1,
                        &mlp.w2, &mlp.b2, &mlp.w3}) {
      for (double& v : *block) fn(v);
    }
    if (kind == ModelKind::kNeuMF) fn(mlp.b3);
  }
};

// Biases zero; factors drawn from Normal(0, 0.01) and network weights from
// He-scaled normals (std sqrt(2 / fan_in), sqrt(1 / d) for the output layer).
ModelParams init_params(ModelKind kind, std::size_t users, std::size_t items,
                        const TrainConfig& config);

// Deterministic score (no dropout).
double predict(const ModelParams& params, UserId user, ItemId item);

// Per-example objectives. The l2 term covers the biases and factors of the
// touched users/items and NeuMF's weight matrices; the global bias and the
// network's bias vectors are unregularized.
double squared_error_loss(const ModelParams& params, const Interaction& x, double l2);
double bpr_loss(const ModelParams& params, UserId user, ItemId positive, ItemId negative,
                double l2);

// Analytic gradients of the objectives above, shaped like the parameters.
ModelParams squared_error_gradient(const ModelParams& params, const Interaction& x, double l2);
ModelParams bpr_gradient(const ModelParams& params, UserId user, ItemId positive,
                         ItemId negative, double l2);

// Called after every completed epoch (1-based) with the current parameters.
using EpochCallback = std::function<void(int epoch, const ModelParams& params)>;

// Per-interaction SGD on the squared error.
ModelParams train_explicit(const Dataset& train, ModelKind kind, const TrainConfig& config,
                           const EpochCallback& on_epoch = {});

// Per-interaction SGD on the BPR loss with negatives drawn uniformly from the
// items the user has not interacted with in `train`.
ModelParams train_bpr(const Dataset& train, ModelKind kind, const TrainConfig& config,
                      const EpochCallback& on_epoch = {});

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::size_t num_users() const = 0;
  virtual std::size_t num_items() const = 0;
  // Throws std::out_of_range for unknown indices.
  virtual double score(UserId user, ItemId item) const = 0;
  // Scores of every item for `user`; `out` has num_items() entries.
  virtual void score_items(UserId user, std::span<double> out) const;
};

// Train-set popularity; identical ranking for every user.
class PopularityModel final : public Scorer {
 public:
  static PopularityModel fit(const Dataset& train);
  static PopularityModel from_counts(std::size_t num_users, std::vector<double> counts);

  std::size_t num_users() const override { return num_users_; }
  std::size_t num_items() const override { return counts_.size(); }
  double score(UserId user, ItemId item) const override;
  void score_items(UserId user, std::span<double> out) const override;

  std::span<const double> counts() const { return counts_; }

 private:
  std::size_t num_users_ = 0;
  std::vector<double> counts_;
};

class FactorModel final : public Scorer {
 public:
  explicit FactorModel(ModelParams params);

  std::size_t num_users() const override { return params_.num_users; }
  std::size_t num_items() const override { return params_.num_items; }
  double score(UserId user, ItemId item) const override;
  void score_items(UserId user, std::span<double> out) const override;

  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  // NeuMF: first-layer contribution of each item (item block of w1 times the
  // item vector, plus b1), cached for full-catalogue scoring.
  std::vector<double> item_first_layer_;
};

// Every item not in `exclude` (sorted ascending), by score descending with
// ties broken by ascending item index.
std::vector<ItemId> rank_all_items(const Scorer& model, UserId user,
                                   std::span<const ItemId> exclude);

}  // namespace cfsample
