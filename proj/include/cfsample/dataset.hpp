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
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cfsample {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;

struct Interaction {
  UserId user = 0;
  ItemId item = 0;
  double rating = 1.0;
  std::int64_t timestamp = 0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

enum class Scenario { kExplicit, kImplicit, kSequential };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view name);

// Bijection between raw string identifiers and dense 0-based indices.
class IdMap {
 public:
  // Index of `raw`, assigning the next dense index on first sight.
  std::uint32_t intern(std::string_view raw);
  std::optional<std::uint32_t> find(std::string_view raw) const;
  const std::string& raw(std::uint32_t index) const { return raw_.at(index); }
  std::size_t size() const { return raw_.size(); }

 private:
  std::vector<std::string> raw_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

struct IdMaps {
  IdMap users;
  IdMap items;
};

// Immutable interaction log over a fixed user/item index space.
//
// Datasets produced by ingestion or filtering have at least one interaction
// per user. Splits and samples are subsets that share the parent's id maps,
// so some users or items may have no interactions there.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<Interaction> interactions, std::shared_ptr<const IdMaps> ids);

  std::span<const Interaction> interactions() const { return interactions_; }
  const Interaction& operator[](std::size_t index) const { return interactions_[index]; }
  std::size_t size() const { return interactions_.size(); }
  bool empty() const { return interactions_.empty(); }
  std::size_t num_users() const { return ids_ ? ids_->users.size() : 0; }
  std::size_t num_items() const { return ids_ ? ids_->items.size() : 0; }

  // Interaction indices of `user` ordered by timestamp, ties by position.
  std::span<const std::size_t> history(UserId user) const;

  const IdMaps& ids() const { return *ids_; }
  const std::shared_ptr<const IdMaps>& shared_ids() const { return ids_; }

  // Interactions at `indices`, in the order given, over the same index space.
  Dataset subset(std::span<const std::size_t> indices) const;

  std::vector<std::size_t> user_counts() const;
  std::vector<std::size_t> item_counts() const;

  // Distinct items of each user, sorted ascending.
  std::vector<std::vector<ItemId>> user_item_sets() const;

 private:
  std::vector<Interaction> interactions_;
  std::shared_ptr<const IdMaps> ids_;
  std::vector<std::size_t> history_offsets_;
  std::vector<std::size_t> history_order_;
};

// Column layout of an interaction CSV. Absent rating defaults to 1.0 and an
// absent timestamp to the 0-based data-row index.
struct CsvSchema {
  char delimiter = ',';
  bool header = true;
  int user_column = 0;
  int item_column = 1;
  int rating_column = 2;     // -1 when absent
  int timestamp_column = 3;  // -1 when absent

  // Parses a comma-separated column order such as "user,item,timestamp".
  static CsvSchema from_columns(std::string_view order, char delimiter, bool header);
};

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
Dataset ingest_csv(std::istream& in, const CsvSchema& schema, const std::string& source);

// Writes user,item,rating,timestamp with raw ids and a header row.
void export_csv(const Dataset& dataset, std::ostream& out, char delimiter = ',');
void export_csv(const Dataset& dataset, const std::filesystem::path& path, char delimiter = ',');

// Two-column raw_id,index CSV.
void export_id_map(const IdMap& map, const std::filesystem::path& path);

// Drops users with fewer than `min_count` interactions in a single pass and
// re-densifies both index spaces, preserving relative index order.
Dataset filter_min_interactions(const Dataset& dataset, std::size_t min_count);

struct SplitBundle {
  Dataset train;
  Dataset validation;
  Dataset test;
  Scenario scenario = Scenario::kExplicit;
};

// Per-user 80/10/10 split; test and validation each take
// max(1, round-half-up(0.1 * N_u)) interactions chosen uniformly at random.
SplitBundle split_random(const Dataset& dataset, std::uint64_t seed,
                         Scenario scenario = Scenario::kExplicit);

// Per-user leave-one-last: latest interaction to test, second latest to
// validation.
SplitBundle split_leave_one_last(const Dataset& dataset);

// The split each scenario uses: random for explicit/implicit, leave-one-last
// for sequential.
SplitBundle split_for_scenario(const Dataset& dataset, Scenario scenario, std::uint64_t seed);

}  // namespace cfsample
