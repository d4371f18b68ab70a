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

#include "cfsample/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cfsample/error.hpp"

namespace cfsample {

std::string_view to_string(MetricName name) {
  switch (name) {
    case MetricName::kMSE:
      return "mse";
    case MetricName::kAUC:
      return "auc";
    case MetricName::kRecall:
      return "recall";
    case MetricName::kNDCG:
      return "ndcg";
  }
  return "unknown";
}

MetricName parse_metric_name(std::string_view name) {
  if (name == "mse") return MetricName::kMSE;
  if (name == "auc") return MetricName::kAUC;
  if (name == "recall") return MetricName::kRecall;
  if (name == "ndcg") return MetricName::kNDCG;
  throw ParameterError("metrics", "unknown metric '" + std::string(name) + "'");
}

bool higher_is_better(MetricName name) { return name != MetricName::kMSE; }

std::string MetricValue::label() const {
  switch (name) {
    case MetricName::kMSE:
      return "MSE";
    case MetricName::kAUC:
      return "AUC";
    case MetricName::kRecall:
      return "Recall@" + std::to_string(k);
    case MetricName::kNDCG:
      return "nDCG@" + std::to_string(k);
  }
  return "unknown";
}

MetricValue mse(const Scorer& model, const Dataset& test) {
  if (test.empty()) throw PreconditionError("metrics", "MSE over an empty test set");
  double total = 0.0;
  for (const auto& x : test.interactions()) {
    const double err = model.score(x.user, x.item) - x.rating;
    total += err * err;
  }
  MetricValue v;
  v.name = MetricName::kMSE;
  v.value = total / static_cast<double>(test.size());
  v.users = test.size();
  return v;
}

RankingContext::RankingContext(const Dataset& target, std::initializer_list<const Dataset*> seen)
    : num_items_(target.num_items()),
      targets_(target.user_item_sets()),
      excluded_(target.num_users()) {
  for (const Dataset* d : seen) {
    for (const auto& x : d->interactions()) excluded_[x.user].push_back(x.item);
  }
  for (UserId u = 0; u < excluded_.size(); ++u) {
    auto& ex = excluded_[u];
    std::sort(ex.begin(), ex.end());
    ex.erase(std::unique(ex.begin(), ex.end()), ex.end());
    // Re-consumed items are targets, not exclusions.
    std::vector<ItemId> kept;
    std::set_difference(ex.begin(), ex.end(), targets_[u].begin(), targets_[u].end(),
                        std::back_inserter(kept));
    ex = std::move(kept);
    if (!targets_[u].empty()) ++target_users_;
  }
}

RankingContext RankingContext::for_test(const SplitBundle& split) {
  return RankingContext(split.test, {&split.train, &split.validation});
}

RankingContext RankingContext::for_validation(const SplitBundle& split) {
  return RankingContext(split.validation, {&split.train});
}

namespace {

struct UserRanking {
  double auc = 0.0;
  bool auc_defined = false;
  double recall = 0.0;
  double ndcg = 0.0;
};

// Ranks of the targets among the candidates (1-based; ties by item index) and
// the pairwise AUC against the non-target candidates.
UserRanking rank_user(std::span<const double> scores, const std::vector<ItemId>& targets,
                      const std::vector<ItemId>& excluded, int recall_k, int ndcg_k) {
  UserRanking r;
  const std::size_t items = scores.size();
  std::vector<ItemId> negatives;
  negatives.reserve(items);
  for (ItemId i = 0; i < items; ++i) {
    if (!std::binary_search(excluded.begin(), excluded.end(), i) &&
        !std::binary_search(targets.begin(), targets.end(), i)) {
      negatives.push_back(i);
    }
  }

  if (!negatives.empty() && targets.size() <= 16) {
    // Few targets: one pass over the negatives per target beats sorting.
    double sum = 0.0;
    for (ItemId t : targets) {
      std::size_t below = 0, ties = 0;
      for (ItemId j : negatives) {
        below += scores[j] < scores[t] ? 1 : 0;
        ties += scores[j] == scores[t] ? 1 : 0;
      }
      sum += static_cast<double>(below) + 0.5 * static_cast<double>(ties);
    }
    r.auc = sum / static_cast<double>(targets.size()) / static_cast<double>(negatives.size());
    r.auc_defined = true;
  } else if (!negatives.empty()) {
    std::vector<double> negative_scores;
    negative_scores.reserve(negatives.size());
    for (ItemId j : negatives) negative_scores.push_back(scores[j]);
    std::sort(negative_scores.begin(), negative_scores.end());
    double sum = 0.0;
    for (ItemId t : targets) {
      auto lo = std::lower_bound(negative_scores.begin(), negative_scores.end(), scores[t]);
      auto hi = std::upper_bound(lo, negative_scores.end(), scores[t]);
      sum += static_cast<double>(lo - negative_scores.begin()) +
             0.5 * static_cast<double>(hi - lo);
    }
    r.auc = sum / static_cast<double>(targets.size()) / static_cast<double>(negatives.size());
    r.auc_defined = true;
  }

  // A candidate c outranks target t if its score is higher, or equal with a
  // smaller index.
  auto outranks = [&](ItemId c, ItemId t) {
    return scores[c] > scores[t] || (scores[c] == scores[t] && c < t);
  };
  std::size_t recall_hits = 0;
  double dcg = 0.0;
  for (ItemId t : targets) {
    std::size_t rank = 1;
    for (ItemId c : negatives) rank += outranks(c, t) ? 1 : 0;
    for (ItemId other : targets) rank += (other != t && outranks(other, t)) ? 1 : 0;
    if (rank <= static_cast<std::size_t>(recall_k)) ++recall_hits;
    if (rank <= static_cast<std::size_t>(ndcg_k)) dcg += 1.0 / std::log2(rank + 1.0);
  }
  double ideal = 0.0;
  const std::size_t ideal_hits = std::min<std::size_t>(ndcg_k, targets.size());
  for (std::size_t k = 1; k <= ideal_hits; ++k) ideal += 1.0 / std::log2(k + 1.0);
  r.recall = static_cast<double>(recall_hits) / static_cast<double>(targets.size());
  r.ndcg = ideal > 0.0 ? dcg / ideal : 0.0;
  return r;
}

}  // namespace

RankingMetrics evaluate_ranking(const Scorer& model, const RankingContext& context,
                                int recall_k, int ndcg_k) {
  if (!context.has_targets()) throw PreconditionError("metrics", "no target interactions");
  if (recall_k < 1 || ndcg_k < 1) throw ParameterError("metrics", "cutoff must be positive");
  if (model.num_items() != context.num_items()) {
    throw PreconditionError("metrics", "model and context disagree on the item count");
  }
  RankingMetrics out;
  out.auc.name = MetricName::kAUC;
  out.recall.name = MetricName::kRecall;
  out.recall.k = recall_k;
  out.ndcg.name = MetricName::kNDCG;
  out.ndcg.k = ndcg_k;

  std::vector<double> scores(context.num_items());
  double auc_sum = 0.0, recall_sum = 0.0, ndcg_sum = 0.0;
  for (UserId u = 0; u < context.num_users(); ++u) {
    const auto& targets = context.targets(u);
    if (targets.empty()) continue;
    model.score_items(u, scores);
    auto r = rank_user(scores, targets, context.excluded(u), recall_k, ndcg_k);
    recall_sum += r.recall;
    ndcg_sum += r.ndcg;
    ++out.recall.users;
    if (r.auc_defined) {
      auc_sum += r.auc;
      ++out.auc.users;
    } else {
      ++out.auc.skipped_users;
    }
  }
  out.recall.value = recall_sum / static_cast<double>(out.recall.users);
  out.ndcg.value = ndcg_sum / static_cast<double>(out.recall.users);
  out.ndcg.users = out.recall.users;
  out.auc.value = out.auc.users > 0 ? auc_sum / static_cast<double>(out.auc.users) : 0.0;
  return out;
}

MetricValue auc(const Scorer& model, const RankingContext& context) {
  return evaluate_ranking(model, context).auc;
}

MetricValue recall_at_k(const Scorer& model, const RankingContext& context, int k) {
  return evaluate_ranking(model, context, k, 10).recall;
}

MetricValue ndcg_at_k(const Scorer& model, const RankingContext& context, int k) {
  return evaluate_ranking(model, context, 100, k).ndcg;
}

}  // namespace cfsample
