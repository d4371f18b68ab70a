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

#include "cfsample/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cfsample/error.hpp"
#include "cfsample/random.hpp"

namespace cfsample {
namespace {

// Per-user history lengths: min_per_user plus a largest-remainder share of the
// rest, proportional to lognormal activity weights and capped by the catalogue.
std::vector<std::size_t> history_lengths(const SyntheticConfig& c, Rng& rng) {
  std::lognormal_distribution<double> activity(0.0, c.activity_sigma);
  std::vector<double> weight(c.users);
  for (double& w : weight) w = activity(rng);

  std::vector<std::size_t> length(c.users, c.min_per_user);
  std::size_t remaining = c.interactions - c.users * c.min_per_user;
  std::vector<bool> capped(c.users, false);
  while (remaining > 0) {
    double total = 0.0;
    for (std::size_t u = 0; u < c.users; ++u) {
      if (!capped[u]) total += weight[u];
    }
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t u = 0; u < c.users; ++u) {
      if (capped[u]) continue;
      const double share = static_cast<double>(remaining) * weight[u] / total;
      auto whole = static_cast<std::size_t>(std::floor(share));
      whole = std::min(whole, c.items - length[u]);
      length[u] += whole;
      assigned += whole;
      remainders.emplace_back(share - std::floor(share), u);
    }
    remaining -= assigned;
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [fraction, u] : remainders) {
      if (remaining == 0) break;
      if (length[u] < c.items) {
        ++length[u];
        --remaining;
      }
    }
    for (std::size_t u = 0; u < c.users; ++u) capped[u] = length[u] >= c.items;
  }
  return length;
}

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& c) {
  if (c.users == 0 || c.items == 0 || c.latent_dim == 0) {
    throw ParameterError("synthetic", "users, items and latent_dim must be at least 1");
  }
  if (c.min_per_user > c.items || c.interactions < c.users * c.min_per_user ||
      c.interactions > c.users * c.items) {
    throw ParameterError("synthetic", "cannot place " + std::to_string(c.interactions) +
                                          " interactions over " + std::to_string(c.users) +
                                          " users and " + std::to_string(c.items) + " items");
  }
  if (!(c.noise >= 0.0) || !(c.popularity_exponent >= 0.0)) {
    throw ParameterError("synthetic", "noise and popularity exponent must be non-negative");
  }
  Rng rng(c.seed);

  // Popularity ranks are a random permutation of the items.
  std::vector<std::size_t> rank(c.items);
  std::iota(rank.begin(), rank.end(), 0);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::vector<double> log_popularity(c.items);
  for (std::size_t i = 0; i < c.items; ++i) {
    log_popularity[i] = -c.popularity_exponent * std::log(static_cast<double>(rank[i]) + 1.0);
  }
  const double mean_log_pop =
      std::accumulate(log_popularity.begin(), log_popularity.end(), 0.0) / c.items;

  // Coordinates with variance d^{-1/2} give unit-variance affinities.
  std::normal_distribution<double> coordinate(0.0, std::pow(static_cast<double>(c.latent_dim), -0.25));
  std::normal_distribution<double> bias(0.0, 0.3);
  std::vector<double> user_vec(c.users * c.latent_dim), item_vec(c.items * c.latent_dim);
  for (double& v : user_vec) v = coordinate(rng);
  for (double& v : item_vec) v = coordinate(rng);
  std::vector<double> user_bias(c.users), item_bias(c.items);
  for (double& b : user_bias) b = bias(rng);
  for (std::size_t i = 0; i < c.items; ++i) {
    // Popular items are rated a little higher.
    item_bias[i] = bias(rng) + 0.1 * (log_popularity[i] - mean_log_pop);
  }

  const auto lengths = history_lengths(c, rng);
  std::normal_distribution<double> noise(0.0, c.noise);
  std::extreme_value_distribution<double> gumbel(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> start(0, 1'000'000);
  std::uniform_int_distribution<std::int64_t> gap(1, 1000);

  std::vector<std::vector<Interaction>> histories(c.users);
  std::vector<std::pair<double, ItemId>> keys(c.items);
  for (UserId u = 0; u < c.users; ++u) {
    const double* pu = user_vec.data() + u * c.latent_dim;
    std::vector<double> affinity(c.items);
    for (ItemId i = 0; i < c.items; ++i) {
      const double* qi = item_vec.data() + i * c.latent_dim;
      affinity[i] = std::inner_product(pu, pu + c.latent_dim, qi, 0.0);
      // Gumbel-top-k draws a weighted sample without replacement.
      keys[i] = {log_popularity[i] + c.affinity * affinity[i] + gumbel(rng), i};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(lengths[u]),
                      keys.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<ItemId> chosen;
    for (std::size_t k = 0; k < lengths[u]; ++k) chosen.push_back(keys[k].second);
    std::shuffle(chosen.begin(), chosen.end(), rng);

    std::int64_t t = start(rng);
    for (ItemId i : chosen) {
      t += gap(rng);
      double r = 3.5 + user_bias[u] + item_bias[i] + affinity[i] + noise(rng);
      r = std::clamp(std::round(r), 1.0, 5.0);
      histories[u].push_back(Interaction{u, i, r, t});
    }
  }

  if (c.mnar) {
    std::vector<std::size_t> user_counts(c.users), item_counts(c.items, 0);
    for (UserId u = 0; u < c.users; ++u) {
      user_counts[u] = histories[u].size();
      for (const auto& x : histories[u]) ++item_counts[x.item];
    }
    PropensityModel observe(user_counts, item_counts, c.propensity);
    for (auto& h : histories) {
      std::vector<Interaction> kept;
      for (std::size_t k = 0; k < h.size(); ++k) {
        if (k < c.min_per_user || uniform01(rng) < observe(h[k].user, h[k].item)) {
          kept.push_back(h[k]);
        }
      }
      h = std::move(kept);
    }
  }

  auto ids = std::make_shared<IdMaps>();
  for (UserId u = 0; u < c.users; ++u) ids->users.intern("u" + std::to_string(u));
  for (ItemId i = 0; i < c.items; ++i) ids->items.intern("i" + std::to_string(i));
  std::vector<Interaction> all;
  all.reserve(c.interactions);
  for (auto& h : histories) all.insert(all.end(), h.begin(), h.end());
  return Dataset(std::move(all), std::move(ids));
}

}  // namespace cfsample
