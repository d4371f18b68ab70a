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

#include "cfsample/dataset.hpp"
#include "cfsample/svp.hpp"

namespace cfsample {

// Latent-factor ground truth with Zipf item popularity. Each user consumes a
// distinct set of items drawn without replacement with probability
// proportional to popularity * exp(affinity * <user, item>); ratings are the
// rounded, clamped sum of a global mean, biases, the affinity and Gaussian
// noise on a 1..5 scale. Timestamps increase along each history.
struct SyntheticConfig {
  std::size_t users = 2000;
  std::size_t items = 500;
  std::size_t interactions = 20000;
  std::size_t latent_dim = 8;
  double popularity_exponent = 1.0;
  double affinity = 1.0;
  double noise = 0.5;
  std::size_t min_per_user = 3;
  // History-length skew: lognormal sigma of the per-user activity weights.
  double activity_sigma = 1.0;
  // Drop each interaction unless observed with probability p_u * p_i (keeping
  // each user's first min_per_user), simulating missing-not-at-random logs.
  bool mnar = false;
  PropensityParams propensity;
  std::uint64_t seed = 0;
};

Dataset generate_synthetic(const SyntheticConfig& config);

}  // namespace cfsample
