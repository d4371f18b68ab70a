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
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "cfsample/dataset.hpp"
#include "cfsample/models.hpp"

namespace cfsample {

enum class MetricName { kMSE, kAUC, kRecall, kNDCG };

std::string_view to_string(MetricName name);
MetricName parse_metric_name(std::string_view name);
bool higher_is_better(MetricName name);

struct MetricValue {
  MetricName name = MetricName::kMSE;
  int k = 0;  // cutoff for Recall/nDCG, 0 otherwise
  double value = 0.0;
  std::size_t users = 0;          // users (or interactions, for MSE) averaged over
  std::size_t skipped_users = 0;  // AUC: users without candidate negatives

  // "MSE", "AUC", "Recall@100", "nDCG@10".
  std::string label() const;
};

// Mean squared error of the model's scores over `test`.
MetricValue mse(const Scorer& model, const Dataset& test);

// Per-user ranking targets. Candidates for user u are all items except those
// seen in any `seen` dataset, but u's target items always stay candidates. AUC
// negatives are the candidates that are not targets.
class RankingContext {
 public:
  RankingContext(const Dataset& target, std::initializer_list<const Dataset*> seen);

  // Context for final evaluation: targets = test, seen = train + validation.
  static RankingContext for_test(const SplitBundle& split);
  // Context for model selection: targets = validation, seen = train.
  static RankingContext for_validation(const SplitBundle& split);

  std::size_t num_users() const { return targets_.size(); }
  std::size_t num_items() const { return num_items_; }
  const std::vector<ItemId>& targets(UserId u) const { return targets_[u]; }
  // Sorted items removed from u's candidate list.
  const std::vector<ItemId>& excluded(UserId u) const { return excluded_[u]; }
  bool has_targets() const { return target_users_ > 0; }

 private:
  std::size_t num_items_ = 0;
  std::size_t target_users_ = 0;
  std::vector<std::vector<ItemId>> targets_;
  std::vector<std::vector<ItemId>> excluded_;
};

MetricValue auc(const Scorer& model, const RankingContext& context);
MetricValue recall_at_k(const Scorer& model, const RankingContext& context, int k = 100);
MetricValue ndcg_at_k(const Scorer& model, const RankingContext& context, int k = 10);

struct RankingMetrics {
  MetricValue auc;
  MetricValue recall;
  MetricValue ndcg;
};

// All three ranking metrics from one scoring pass per user.
RankingMetrics evaluate_ranking(const Scorer& model, const RankingContext& context,
                                int recall_k = 100, int ndcg_k = 10);

}  // namespace cfsample
