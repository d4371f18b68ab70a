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

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfsample/dataset.hpp"
#include "cfsample/metrics.hpp"

namespace cfsample {

// Tie-corrected Kendall tau-b between two score vectors over the same items:
// (C - D) / sqrt((C + D + X) (C + D + Y)), where X (Y) counts pairs tied only
// in the second (first) vector. Defined as 1 when both vectors are constant
// and 0 when exactly one is.
double kendall_tau(std::span<const double> first, std::span<const double> second);

// Algorithms ranked on one (scenario, metric) pair; rank 1 is best and exact
// metric ties share the average of their positions.
struct Leaderboard {
  Scenario scenario = Scenario::kImplicit;
  MetricName metric = MetricName::kAUC;
  std::vector<std::string> algorithms;
  std::vector<double> values;
  std::vector<double> ranks;

  double rank_of(const std::string& algorithm) const;
};

Leaderboard make_leaderboard(Scenario scenario, MetricName metric,
                             std::vector<std::string> algorithms, std::vector<double> values);

// Tau between two leaderboards over the same algorithm set (matched by name).
double leaderboard_tau(const Leaderboard& full, const Leaderboard& sampled);

// The metrics that apply to each scenario: MSE for explicit feedback, AUC,
// Recall and nDCG for implicit and sequential feedback.
std::vector<MetricName> scenario_metrics(Scenario scenario);

using BoardKey = std::pair<Scenario, MetricName>;

struct CellKey {
  Scenario scenario = Scenario::kImplicit;
  MetricName metric = MetricName::kAUC;
  double percent = 100.0;

  auto operator<=>(const CellKey&) const = default;
};

std::string describe(const CellKey& cell);

// Leaderboards of one dataset: on the full train set, and per strategy on
// each percent-sample of it.
struct LeaderboardSet {
  std::map<BoardKey, Leaderboard> full;
  std::map<std::string, std::map<CellKey, Leaderboard>> sampled;
};

struct PsiGrid {
  std::vector<Scenario> scenarios{Scenario::kExplicit, Scenario::kImplicit,
                                  Scenario::kSequential};
  std::vector<double> percents{80, 60, 40, 20, 10, 1};
};

struct PsiResult {
  double psi = 0.0;
  std::map<CellKey, double> taus;
  std::size_t expected_cells = 0;
  bool partial = false;
};

// Mean tau over every (scenario, metric, percent) cell of the grid. A missing
// cell is an error unless `allow_partial`, in which case the mean runs over
// the cells present and the result is flagged partial.
PsiResult compute_psi(const LeaderboardSet& boards, const std::string& strategy,
                      const PsiGrid& grid, bool allow_partial);

// 0.5 + (full_rank - sampled_rank) / (2 (n - 1)).
double p_mle_term(double full_rank, double sampled_rank, std::size_t n);

// Mean of p_mle_term over datasets, strategies and the scenario's metrics.
double compute_p_mle(std::span<const LeaderboardSet> datasets, const std::string& algorithm,
                     Scenario scenario, double percent);

}  // namespace cfsample
