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

#include "cfsample/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cfsample/error.hpp"
#include "cfsample/random.hpp"

namespace cfsample {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPopRec:
      return "poprec";
    case ModelKind::kBiasOnly:
      return "bias-only";
    case ModelKind::kMF:
      return "mf";
    case ModelKind::kNeuMF:
      return "neumf";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "poprec") return ModelKind::kPopRec;
  if (name == "bias-only" || name == "bias") return ModelKind::kBiasOnly;
  if (name == "mf") return ModelKind::kMF;
  if (name == "neumf") return ModelKind::kNeuMF;
  throw ParameterError("algorithms", "unknown model kind '" + std::string(name) + "'");
}

Mlp Mlp::zeros(std::size_t dim) {
  Mlp m;
  m.dim = dim;
  m.w1.assign(2 * dim * 3 * dim, 0.0);
  m.b1.assign(2 * dim, 0.0);
  m.w2.assign(dim * 2 * dim, 0.0);
  m.b2.assign(dim, 0.0);
  m.w3.assign(dim, 0.0);
  return m;
}

ModelParams ModelParams::zeros(ModelKind kind, std::size_t users, std::size_t items,
                               std::size_t latent_size) {
  if (kind == ModelKind::kPopRec) {
    throw ParameterError("algorithms", "PopRec has no trainable parameters");
  }
  ModelParams p;
  p.kind = kind;
  p.num_users = users;
  p.num_items = items;
  p.latent_size = kind == ModelKind::kBiasOnly ? 0 : latent_size;
  p.user_bias.assign(users, 0.0);
  p.item_bias.assign(items, 0.0);
  p.user_factors.assign(users * p.latent_size, 0.0);
  p.item_factors.assign(items * p.latent_size, 0.0);
  if (kind == ModelKind::kNeuMF) p.mlp = Mlp::zeros(p.latent_size);
  return p;
}

ModelParams init_params(ModelKind kind, std::size_t users, std::size_t items,
                        const TrainConfig& config) {
  if (kind != ModelKind::kBiasOnly && config.latent_size < 1) {
    throw ParameterError("algorithms", "latent size must be positive");
  }
  auto p = ModelParams::zeros(kind, users, items, static_cast<std::size_t>(config.latent_size));
  Rng rng(derive_seed(config.seed, "init"));
  std::normal_distribution<double> normal(0.0, 0.01);
  for (auto* block : {&p.user_factors, &p.item_factors}) {
    for (double& v : *block) v = normal(rng);
  }
  // He scaling for the network; at 0.01 the stacked layers starve the
  // embeddings of gradient.
  auto he = [&](std::vector<double>& block, std::size_t fan_in, double gain) {
    std::normal_distribution<double> dist(0.0, std::sqrt(gain / static_cast<double>(fan_in)));
    for (double& v : block) v = dist(rng);
  };
  const std::size_t d = p.mlp.dim;
  if (d > 0) {
    he(p.mlp.w1, 3 * d, 2.0);
    he(p.mlp.w2, 2 * d, 2.0);
    he(p.mlp.w3, d, 1.0);
  }
  return p;
}

namespace {

// Activations of one pass through the scoring network.
struct MlpTrace {
  std::vector<double> input;   // 3d
  std::vector<double> hidden1;  // 2d pre-activation
  std::vector<double> mask1;    // 2d, 0 or 1/(1-dropout)
  std::vector<double> out1;     // 2d
  std::vector<double> hidden2;  // d pre-activation
  std::vector<double> mask2;
  std::vector<double> out2;  // d
};

double mlp_forward(const Mlp& mlp, std::span<const double> gu, std::span<const double> gi,
                   MlpTrace& t, Rng* dropout_rng, double dropout) {
  const std::size_t d = mlp.dim;
  t.input.resize(3 * d);
  for (std::size_t k = 0; k < d; ++k) {
    t.input[k] = gu[k];
    t.input[d + k] = gi[k];
    t.input[2 * d + k] = gu[k] * gi[k];
  }
  auto draw_mask = [&](std::vector<double>& mask, std::size_t n) {
    mask.assign(n, 1.0);
    if (dropout_rng == nullptr || dropout <= 0.0) return;
    const double keep = 1.0 / (1.0 - dropout);
    for (double& m : mask) m = uniform01(*dropout_rng) < dropout ? 0.0 : keep;
  };

  t.hidden1.resize(2 * d);
  t.out1.resize(2 * d);
  draw_mask(t.mask1, 2 * d);
  for (std::size_t r = 0; r < 2 * d; ++r) {
    const double* row = mlp.w1.data() + r * 3 * d;
    double a = mlp.b1[r];
    for (std::size_t c = 0; c < 3 * d; ++c) a += row[c] * t.input[c];
    t.hidden1[r] = a;
    t.out1[r] = (a > 0.0 ? a : 0.0) * t.mask1[r];
  }
  t.hidden2.resize(d);
  t.out2.resize(d);
  draw_mask(t.mask2, d);
  double out = mlp.b3;
  for (std::size_t r = 0; r < d; ++r) {
    const double* row = mlp.w2.data() + r * 2 * d;
    double a = mlp.b2[r];
    for (std::size_t c = 0; c < 2 * d; ++c) a += row[c] * t.out1[c];
    t.hidden2[r] = a;
    t.out2[r] = (a > 0.0 ? a : 0.0) * t.mask2[r];
    out += mlp.w3[r] * t.out2[r];
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_index(const ModelParams& p, UserId u, ItemId i) {
  if (u >= p.num_users || i >= p.num_items) throw std::out_of_range("score index out of range");
}

// Gradient of one user's or item's parameters.
struct RowGrad {
  std::uint32_t id = 0;
  double bias = 0.0;
  std::vector<double> factors;

  void reset(std::uint32_t row, std::size_t d) {
    id = row;
    bias = 0.0;
    factors.assign(d, 0.0);
  }
};

// Sparse gradient of one SGD example: at most one user and two items.
struct ExampleGrad {
  double alpha = 0.0;
  RowGrad user;
  RowGrad item_a;
  RowGrad item_b;
  bool has_b = false;
  Mlp mlp;

  void reset(const ModelParams& p, UserId u, ItemId a) {
    alpha = 0.0;
    user.reset(u, p.latent_size);
    item_a.reset(a, p.latent_size);
    has_b = false;
    if (p.kind == ModelKind::kNeuMF) {
      if (mlp.dim != p.latent_size) {
        mlp = Mlp::zeros(p.latent_size);
      } else {
        for (auto* v : {&mlp.w1, &mlp.b1, &mlp.w2, &mlp.b2, &mlp.w3}) {
          std::fill(v->begin(), v->end(), 0.0);
        }
        mlp.b3 = 0.0;
      }
    }
  }

  void add_item_b(const ModelParams& p, ItemId b) {
    item_b.reset(b, p.latent_size);
    has_b = true;
  }
};

struct Forward {
  double score = 0.0;
  MlpTrace trace;
};

double forward(const ModelParams& p, UserId u, ItemId i, Forward& f, Rng* dropout_rng,
               double dropout) {
  double s = p.alpha + p.user_bias[u] + p.item_bias[i];
  if (p.kind == ModelKind::kMF) {
    s += dot(p.user_vector(u), p.item_vector(i));
  } else if (p.kind == ModelKind::kNeuMF) {
    s += mlp_forward(p.mlp, p.user_vector(u), p.item_vector(i), f.trace, dropout_rng, dropout);
  }
  f.score = s;
  return s;
}

// Accumulates upstream * d(score)/d(params) for the pair (u, row.id).
void backward(const ModelParams& p, UserId u, ItemId i, double upstream, const Forward& f,
              ExampleGrad& g, RowGrad& item_row) {
  g.alpha += upstream;
  g.user.bias += upstream;
  item_row.bias += upstream;
  const std::size_t d = p.latent_size;
  auto gu = p.user_vector(u);
  auto gi = p.item_vector(i);
  if (p.kind == ModelKind::kMF) {
    for (std::size_t k = 0; k < d; ++k) {
      g.user.factors[k] += upstream * gi[k];
      item_row.factors[k] += upstream * gu[k];
    }
  } else if (p.kind == ModelKind::kNeuMF) {
    const auto& t = f.trace;
    const Mlp& m = p.mlp;
    g.mlp.b3 += upstream;
    std::vector<double> d_hidden2(d);
    for (std::size_t r = 0; r < d; ++r) {
      g.mlp.w3[r] += upstream * t.out2[r];
      const double d_out2 = upstream * m.w3[r];
      d_hidden2[r] = t.hidden2[r] > 0.0 ? d_out2 * t.mask2[r] : 0.0;
    }
    std::vector<double> d_out1(2 * d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
      if (d_hidden2[r] == 0.0) continue;
      g.mlp.b2[r] += d_hidden2[r];
      const double* row = m.w2.data() + r * 2 * d;
      double* grow = g.mlp.w2.data() + r * 2 * d;
      for (std::size_t c = 0; c < 2 * d; ++c) {
        grow[c] += d_hidden2[r] * t.out1[c];
        d_out1[c] += d_hidden2[r] * row[c];
      }
    }
    std::vector<double> d_input(3 * d, 0.0);
    for (std::size_t r = 0; r < 2 * d; ++r) {
      const double d_hidden1 = t.hidden1[r] > 0.0 ? d_out1[r] * t.mask1[r] : 0.0;
      if (d_hidden1 == 0.0) continue;
      g.mlp.b1[r] += d_hidden1;
      const double* row = m.w1.data() + r * 3 * d;
      double* grow = g.mlp.w1.data() + r * 3 * d;
      for (std::size_t c = 0; c < 3 * d; ++c) {
        grow[c] += d_hidden1 * t.input[c];
        d_input[c] += d_hidden1 * row[c];
      }
    }
    for (std::size_t k = 0; k < d; ++k) {
      g.user.factors[k] += d_input[k] + d_input[2 * d + k] * gi[k];
      item_row.factors[k] += d_input[d + k] + d_input[2 * d + k] * gu[k];
    }
  }
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double regularizer(const ModelParams& p, UserId u, std::initializer_list<ItemId> items) {
  double r = p.user_bias[u] * p.user_bias[u] + squared_norm(p.user_vector(u));
  for (ItemId i : items) r += p.item_bias[i] * p.item_bias[i] + squared_norm(p.item_vector(i));
  if (p.kind == ModelKind::kNeuMF) {
    r += squared_norm(p.mlp.w1) + squared_norm(p.mlp.w2) + squared_norm(p.mlp.w3);
  }
  return r;
}

void add_row_regularizer(double l2, double bias, std::span<const double> factors, RowGrad& row) {
  row.bias += 2.0 * l2 * bias;
  for (std::size_t k = 0; k < factors.size(); ++k) row.factors[k] += 2.0 * l2 * factors[k];
}

void add_regularizer(const ModelParams& p, double l2, ExampleGrad& g) {
  if (l2 == 0.0) return;
  add_row_regularizer(l2, p.user_bias[g.user.id], p.user_vector(g.user.id), g.user);
  add_row_regularizer(l2, p.item_bias[g.item_a.id], p.item_vector(g.item_a.id), g.item_a);
  if (g.has_b) {
    add_row_regularizer(l2, p.item_bias[g.item_b.id], p.item_vector(g.item_b.id), g.item_b);
  }
  if (p.kind == ModelKind::kNeuMF) {
    for (auto [w, gw] : {std::pair{&p.mlp.w1, &g.mlp.w1}, std::pair{&p.mlp.w2, &g.mlp.w2},
                         std::pair{&p.mlp.w3, &g.mlp.w3}}) {
      for (std::size_t k = 0; k < w->size(); ++k) (*gw)[k] += 2.0 * l2 * (*w)[k];
    }
  }
}

void apply_row(double lr, const RowGrad& row, double& bias, double* factors) {
  bias -= lr * row.bias;
  for (std::size_t k = 0; k < row.factors.size(); ++k) factors[k] -= lr * row.factors[k];
}

void apply(ModelParams& p, const ExampleGrad& g, double lr) {
  const std::size_t d = p.latent_size;
  p.alpha -= lr * g.alpha;
  apply_row(lr, g.user, p.user_bias[g.user.id], p.user_factors.data() + g.user.id * d);
  apply_row(lr, g.item_a, p.item_bias[g.item_a.id], p.item_factors.data() + g.item_a.id * d);
  if (g.has_b) {
    apply_row(lr, g.item_b, p.item_bias[g.item_b.id], p.item_factors.data() + g.item_b.id * d);
  }
  if (p.kind == ModelKind::kNeuMF) {
    for (auto [w, gw] :
         {std::pair{&p.mlp.w1, &g.mlp.w1}, std::pair{&p.mlp.b1, &g.mlp.b1},
          std::pair{&p.mlp.w2, &g.mlp.w2}, std::pair{&p.mlp.b2, &g.mlp.b2},
          std::pair{&p.mlp.w3, &g.mlp.w3}}) {
      for (std::size_t k = 0; k < w->size(); ++k) (*w)[k] -= lr * (*gw)[k];
    }
    p.mlp.b3 -= lr * g.mlp.b3;
  }
}

void scatter(const RowGrad& row, std::size_t d, std::vector<double>& bias,
             std::vector<double>& factors) {
  bias[row.id] += row.bias;
  for (std::size_t k = 0; k < d; ++k) factors[row.id * d + k] += row.factors[k];
}

ModelParams densify(const ModelParams& p, const ExampleGrad& g) {
  auto dense = ModelParams::zeros(p.kind, p.num_users, p.num_items, p.latent_size);
  dense.alpha = g.alpha;
  scatter(g.user, p.latent_size, dense.user_bias, dense.user_factors);
  scatter(g.item_a, p.latent_size, dense.item_bias, dense.item_factors);
  if (g.has_b) scatter(g.item_b, p.latent_size, dense.item_bias, dense.item_factors);
  if (p.kind == ModelKind::kNeuMF) dense.mlp = g.mlp;
  return dense;
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Fills `g` for one squared-error example and returns the data term.
double squared_error_step(const ModelParams& p, const Interaction& x, double l2, ExampleGrad& g,
                          Forward& f, Rng* dropout_rng, double dropout) {
  g.reset(p, x.user, x.item);
  const double err = forward(p, x.user, x.item, f, dropout_rng, dropout) - x.rating;
  backward(p, x.user, x.item, 2.0 * err, f, g, g.item_a);
  add_regularizer(p, l2, g);
  return err * err;
}

// Fills `g` for one BPR triple and returns -log sigmoid(s_pos - s_neg).
double bpr_step(const ModelParams& p, UserId u, ItemId pos, ItemId neg, double l2,
                ExampleGrad& g, Forward& fp, Forward& fn, Rng* dropout_rng, double dropout) {
  if (pos == neg) throw PreconditionError("algorithms", "BPR negative equals the positive");
  g.reset(p, u, pos);
  g.add_item_b(p, neg);
  const double margin = forward(p, u, pos, fp, dropout_rng, dropout) -
                        forward(p, u, neg, fn, dropout_rng, dropout);
  const double d_margin = -sigmoid(-margin);
  backward(p, u, pos, d_margin, fp, g, g.item_a);
  backward(p, u, neg, -d_margin, fn, g, g.item_b);
  add_regularizer(p, l2, g);
  return softplus(-margin);
}

void validate_config(const Dataset& train, ModelKind kind, const TrainConfig& config) {
  if (kind == ModelKind::kPopRec) {
    throw ParameterError("algorithms", "PopRec is fitted with PopularityModel::fit");
  }
  if (config.epochs < 0) throw ParameterError("algorithms", "epochs must be non-negative");
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
    throw ParameterError("algorithms", "dropout must lie in [0, 1)");
  }
  if (!(config.learning_rate > 0.0)) {
    throw ParameterError("algorithms", "learning rate must be positive");
  }
  if (train.num_users() == 0 || train.num_items() == 0) {
    throw PreconditionError("algorithms", "empty index space");
  }
}

}  // namespace

double predict(const ModelParams& params, UserId user, ItemId item) {
  check_index(params, user, item);
  Forward f;
  return forward(params, user, item, f, nullptr, 0.0);
}

double squared_error_loss(const ModelParams& params, const Interaction& x, double l2) {
  const double err = predict(params, x.user, x.item) - x.rating;
  return err * err + l2 * regularizer(params, x.user, {x.item});
}

double bpr_loss(const ModelParams& params, UserId user, ItemId positive, ItemId negative,
                double l2) {
  const double margin = predict(params, user, positive) - predict(params, user, negative);
  return softplus(-margin) + l2 * regularizer(params, user, {positive, negative});
}

ModelParams squared_error_gradient(const ModelParams& params, const Interaction& x, double l2) {
  check_index(params, x.user, x.item);
  ExampleGrad g;
  Forward f;
  squared_error_step(params, x, l2, g, f, nullptr, 0.0);
  return densify(params, g);
}

ModelParams bpr_gradient(const ModelParams& params, UserId user, ItemId positive,
                         ItemId negative, double l2) {
  check_index(params, user, positive);
  check_index(params, user, negative);
  ExampleGrad g;
  Forward fp, fn;
  bpr_step(params, user, positive, negative, l2, g, fp, fn, nullptr, 0.0);
  return densify(params, g);
}

ModelParams train_explicit(const Dataset& train, ModelKind kind, const TrainConfig& config,
                           const EpochCallback& on_epoch) {
  validate_config(train, kind, config);
  auto params = init_params(kind, train.num_users(), train.num_items(), config);
  Rng order_rng(derive_seed(config.seed, "order"));
  Rng dropout_rng(derive_seed(config.seed, "dropout"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  ExampleGrad g;
  Forward f;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double loss = 0.0;
    for (std::size_t k : order) {
      loss += squared_error_step(params, train[k], config.l2_reg, g, f, &dropout_rng,
                                 config.dropout);
      apply(params, g, config.learning_rate);
    }
    if (!std::isfinite(loss)) throw DivergenceError("algorithms", epoch);
    if (on_epoch) on_epoch(epoch, params);
  }
  return params;
}

ModelParams train_bpr(const Dataset& train, ModelKind kind, const TrainConfig& config,
                      const EpochCallback& on_epoch) {
  validate_config(train, kind, config);
  if (config.n_neg < 1) throw ParameterError("algorithms", "n_neg must be at least 1");
  auto params = init_params(kind, train.num_users(), train.num_items(), config);
  const auto positives = train.user_item_sets();
  const std::size_t items = train.num_items();
  Rng order_rng(derive_seed(config.seed, "order"));
  Rng negative_rng(derive_seed(config.seed, "negatives"));
  Rng dropout_rng(derive_seed(config.seed, "dropout"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  ExampleGrad g;
  Forward fp, fn;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double loss = 0.0;
    for (std::size_t k : order) {
      const auto& x = train[k];
      const auto& seen = positives[x.user];
      if (seen.size() >= items) continue;
      for (int n = 0; n < config.n_neg; ++n) {
        ItemId neg;
        do {
          neg = static_cast<ItemId>(uniform_index(negative_rng, items));
        } while (std::binary_search(seen.begin(), seen.end(), neg));
        loss += bpr_step(params, x.user, x.item, neg, config.l2_reg, g, fp, fn, &dropout_rng,
                         config.dropout);
        apply(params, g, config.learning_rate);
      }
    }
    if (!std::isfinite(loss)) throw DivergenceError("algorithms", epoch);
    if (on_epoch) on_epoch(epoch, params);
  }
  return params;
}

void Scorer::score_items(UserId user, std::span<double> out) const {
  for (ItemId i = 0; i < out.size(); ++i) out[i] = score(user, i);
}

PopularityModel PopularityModel::fit(const Dataset& train) {
  PopularityModel m;
  m.num_users_ = train.num_users();
  auto counts = train.item_counts();
  m.counts_.assign(counts.begin(), counts.end());
  return m;
}

PopularityModel PopularityModel::from_counts(std::size_t num_users, std::vector<double> counts) {
  PopularityModel m;
  m.num_users_ = num_users;
  m.counts_ = std::move(counts);
  return m;
}

double PopularityModel::score(UserId user, ItemId item) const {
  if (user >= num_users_ || item >= counts_.size()) {
    throw std::out_of_range("score index out of range");
  }
  return counts_[item];
}

void PopularityModel::score_items(UserId user, std::span<double> out) const {
  if (user >= num_users_) throw std::out_of_range("score index out of range");
  std::copy(counts_.begin(), counts_.end(), out.begin());
}

FactorModel::FactorModel(ModelParams params) : params_(std::move(params)) {
  if (params_.kind == ModelKind::kNeuMF) {
    const std::size_t d = params_.latent_size;
    item_first_layer_.assign(params_.num_items * 2 * d, 0.0);
    for (ItemId i = 0; i < params_.num_items; ++i) {
      auto gi = params_.item_vector(i);
      for (std::size_t r = 0; r < 2 * d; ++r) {
        const double* row = params_.mlp.w1.data() + r * 3 * d + d;
        double a = params_.mlp.b1[r];
        for (std::size_t c = 0; c < d; ++c) a += row[c] * gi[c];
        item_first_layer_[i * 2 * d + r] = a;
      }
    }
  }
}

double FactorModel::score(UserId user, ItemId item) const {
  return predict(params_, user, item);
}

void FactorModel::score_items(UserId user, std::span<double> out) const {
  if (user >= params_.num_users) throw std::out_of_range("score index out of range");
  const auto& p = params_;
  const double base = p.alpha + p.user_bias[user];
  if (p.kind == ModelKind::kBiasOnly) {
    for (ItemId i = 0; i < p.num_items; ++i) out[i] = base + p.item_bias[i];
    return;
  }
  auto gu = p.user_vector(user);
  if (p.kind == ModelKind::kMF) {
    for (ItemId i = 0; i < p.num_items; ++i) {
      out[i] = base + p.item_bias[i] + dot(gu, p.item_vector(i));
    }
    return;
  }
  const std::size_t d = p.latent_size;
  const auto& m = p.mlp;
  std::vector<double> user_part(2 * d, 0.0);
  for (std::size_t r = 0; r < 2 * d; ++r) {
    const double* row = m.w1.data() + r * 3 * d;
    for (std::size_t c = 0; c < d; ++c) user_part[r] += row[c] * gu[c];
  }
  std::vector<double> product(d), h1(2 * d);
  for (ItemId i = 0; i < p.num_items; ++i) {
    auto gi = p.item_vector(i);
    for (std::size_t c = 0; c < d; ++c) product[c] = gu[c] * gi[c];
    const double* item_part = item_first_layer_.data() + i * 2 * d;
    for (std::size_t r = 0; r < 2 * d; ++r) {
      const double* row = m.w1.data() + r * 3 * d + 2 * d;
      double a = user_part[r] + item_part[r];
      for (std::size_t c = 0; c < d; ++c) a += row[c] * product[c];
      h1[r] = a > 0.0 ? a : 0.0;
    }
    double s = m.b3;
    for (std::size_t r = 0; r < d; ++r) {
      const double* row = m.w2.data() + r * 2 * d;
      double a = m.b2[r];
      for (std::size_t c = 0; c < 2 * d; ++c) a += row[c] * h1[c];
      if (a > 0.0) s += m.w3[r] * a;
    }
    out[i] = base + p.item_bias[i] + s;
  }
}

std::vector<ItemId> rank_all_items(const Scorer& model, UserId user,
                                   std::span<const ItemId> exclude) {
  std::vector<double> scores(model.num_items());
  model.score_items(user, scores);
  std::vector<ItemId> ranked;
  ranked.reserve(scores.size());
  for (ItemId i = 0; i < scores.size(); ++i) {
    if (!std::binary_search(exclude.begin(), exclude.end(), i)) ranked.push_back(i);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](ItemId a, ItemId b) { return scores[a] > scores[b]; });
  return ranked;
}

}  // namespace cfsample
