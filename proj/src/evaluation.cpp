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

#include "cfsample/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cfsample/error.hpp"

namespace cfsample {

double kendall_tau(std::span<const double> first, std::span<const double> second) {
  if (first.size() != second.size()) {
    throw PreconditionError("evaluation", "rankings differ in length");
  }
  const std::size_t n = first.size();
  if (n < 2) throw PreconditionError("evaluation", "Kendall tau needs at least two items");

  long long concordant = 0, discordant = 0, tied_first_only = 0, tied_second_only = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = first[i] - first[j];
      const double b = second[i] - second[j];
      if (a == 0.0 && b == 0.0) continue;
      if (a == 0.0) {
        ++tied_first_only;
      } else if (b == 0.0) {
        ++tied_second_only;
      } else if ((a > 0.0) == (b > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double untied_first = static_cast<double>(concordant + discordant + tied_second_only);
  const double untied_second = static_cast<double>(concordant + discordant + tied_first_only);
  if (untied_first == 0.0 && untied_second == 0.0) return 1.0;
  if (untied_first == 0.0 || untied_second == 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / std::sqrt(untied_first * untied_second);
}

double Leaderboard::rank_of(const std::string& algorithm) const {
  auto it = std::find(algorithms.begin(), algorithms.end(), algorithm);
  if (it == algorithms.end()) {
    throw PreconditionError("evaluation", "algorithm '" + algorithm + "' not on leaderboard");
  }
  return ranks[static_cast<std::size_t>(it - algorithms.begin())];
}

Leaderboard make_leaderboard(Scenario scenario, MetricName metric,
                             std::vector<std::string> algorithms, std::vector<double> values) {
  if (algorithms.size() != values.size()) {
    throw PreconditionError("evaluation", "leaderboard names and values differ in length");
  }
  Leaderboard board;
  board.scenario = scenario;
  board.metric = metric;
  const bool higher = higher_is_better(metric);
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher ? values[a] > values[b] : values[a] < values[b];
  });
  board.ranks.assign(values.size(), 0.0);
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    // Positions start+1 .. end share their mean.
    const double shared = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = start; k < end; ++k) board.ranks[order[k]] = shared;
    start = end;
  }
  board.algorithms = std::move(algorithms);
  board.values = std::move(values);
  return board;
}

double leaderboard_tau(const Leaderboard& full, const Leaderboard& sampled) {
  if (full.algorithms.size() != sampled.algorithms.size()) {
    throw PreconditionError("evaluation", "leaderboards rank different algorithm sets");
  }
  std::vector<double> aligned;
  aligned.reserve(full.algorithms.size());
  for (const auto& name : full.algorithms) aligned.push_back(sampled.rank_of(name));
  return kendall_tau(full.ranks, aligned);
}

std::vector<MetricName> scenario_metrics(Scenario scenario) {
  if (scenario == Scenario::kExplicit) return {MetricName::kMSE};
  return {MetricName::kAUC, MetricName::kRecall, MetricName::kNDCG};
}

std::string describe(const CellKey& cell) {
  std::ostringstream out;
  out << to_string(cell.scenario) << '/' << to_string(cell.metric) << '/' << cell.percent << '%';
  return out.str();
}

PsiResult compute_psi(const LeaderboardSet& boards, const std::string& strategy,
                      const PsiGrid& grid, bool allow_partial) {
  PsiResult result;
  static const std::map<CellKey, Leaderboard> kNone;
  auto found = boards.sampled.find(strategy);
  const auto& sampled = found == boards.sampled.end() ? kNone : found->second;

  double sum = 0.0;
  for (Scenario f : grid.scenarios) {
    for (MetricName m : scenario_metrics(f)) {
      for (double p : grid.percents) {
        ++result.expected_cells;
        CellKey key{f, m, p};
        auto full = boards.full.find({f, m});
        auto cell = sampled.find(key);
        if (full == boards.full.end() || cell == sampled.end()) {
          if (!allow_partial) {
            throw PreconditionError("evaluation", "missing leaderboard for " + strategy + " at " +
                                                      describe(key));
          }
          result.partial = true;
          continue;
        }
        const double tau = leaderboard_tau(full->second, cell->second);
        result.taus[key] = tau;
        sum += tau;
      }
    }
  }
  if (result.taus.empty()) {
    throw PreconditionError("evaluation", "no leaderboard cells for " + strategy);
  }
  result.psi = sum / static_cast<double>(result.taus.size());
  return result;
}

double p_mle_term(double full_rank, double sampled_rank, std::size_t n) {
  if (n < 2) throw PreconditionError("evaluation", "P_MLE needs at least two algorithms");
  return 0.5 + (full_rank - sampled_rank) / (2.0 * static_cast<double>(n - 1));
}

double compute_p_mle(std::span<const LeaderboardSet> datasets, const std::string& algorithm,
                     Scenario scenario, double percent) {
  double sum = 0.0;
  std::size_t terms = 0;
  for (const auto& boards : datasets) {
    for (const auto& [strategy, cells] : boards.sampled) {
      for (MetricName m : scenario_metrics(scenario)) {
        auto full = boards.full.find({scenario, m});
        auto cell = cells.find(CellKey{scenario, m, percent});
        if (full == boards.full.end() || cell == cells.end()) continue;
        const auto& names = full->second.algorithms;
        if (std::find(names.begin(), names.end(), algorithm) == names.end()) continue;
        sum += p_mle_term(full->second.rank_of(algorithm), cell->second.rank_of(algorithm),
                          names.size());
        ++terms;
      }
    }
  }
  if (terms == 0) {
    throw PreconditionError("evaluation", "no observations of '" + algorithm + "' for P_MLE");
  }
  return sum / static_cast<double>(terms);
}

}  // namespace cfsample
