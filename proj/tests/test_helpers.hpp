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

#include <memory>
#include <string>
#include <vector>

#include "cfsample/dataset.hpp"
#include "cfsample/models.hpp"

namespace cfsample::testing {

// Builds a dataset over "u<k>"/"i<k>" ids from (user, item, rating, time)
// rows, declaring `users` and `items` index slots up front.
inline Dataset make_dataset(const std::vector<Interaction>& rows, std::size_t users = 0,
                            std::size_t items = 0) {
  auto ids = std::make_shared<IdMaps>();
  for (const auto& x : rows) {
    users = std::max<std::size_t>(users, x.user + 1);
    items = std::max<std::size_t>(items, x.item + 1);
  }
  for (std::size_t u = 0; u < users; ++u) ids->users.intern("u" + std::to_string(u));
  for (std::size_t i = 0; i < items; ++i) ids->items.intern("i" + std::to_string(i));
  return Dataset(rows, ids);
}

// Scores from an explicit users x items table.
class TableScorer final : public Scorer {
 public:
  explicit TableScorer(std::vector<std::vector<double>> table) : table_(std::move(table)) {}
  std::size_t num_users() const override { return table_.size(); }
  std::size_t num_items() const override { return table_.empty() ? 0 : table_[0].size(); }
  double score(UserId u, ItemId i) const override { return table_.at(u).at(i); }

 private:
  std::vector<std::vector<double>> table_;
};

}  // namespace cfsample::testing
