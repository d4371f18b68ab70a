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

#include "cfsample/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "cfsample/error.hpp"
#include "cfsample/random.hpp"

namespace cfsample {

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kExplicit:
      return "explicit";
    case Scenario::kImplicit:
      return "implicit";
    case Scenario::kSequential:
      return "sequential";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "explicit") return Scenario::kExplicit;
  if (name == "implicit") return Scenario::kImplicit;
  if (name == "sequential") return Scenario::kSequential;
  throw ParameterError("data", "unknown scenario '" + std::string(name) + "'");
}

std::uint32_t IdMap::intern(std::string_view raw) {
  auto [it, inserted] =
      index_.try_emplace(std::string(raw), static_cast<std::uint32_t>(raw_.size()));
  if (inserted) raw_.emplace_back(raw);
  return it->second;
}

std::optional<std::uint32_t> IdMap::find(std::string_view raw) const {
  auto it = index_.find(std::string(raw));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Dataset::Dataset(std::vector<Interaction> interactions, std::shared_ptr<const IdMaps> ids)
    : interactions_(std::move(interactions)), ids_(std::move(ids)) {
  if (!ids_) ids_ = std::make_shared<const IdMaps>();
  const std::size_t users = ids_->users.size();
  for (const auto& x : interactions_) {
    if (x.user >= users || x.item >= ids_->items.size()) {
      throw PreconditionError("data", "interaction index outside the id maps");
    }
    if (x.timestamp < 0) throw PreconditionError("data", "negative timestamp");
  }

  history_offsets_.assign(users + 1, 0);
  for (const auto& x : interactions_) ++history_offsets_[x.user + 1];
  std::partial_sum(history_offsets_.begin(), history_offsets_.end(), history_offsets_.begin());

  history_order_.resize(interactions_.size());
  std::vector<std::size_t> cursor(history_offsets_.begin(), history_offsets_.end() - 1);
  for (std::size_t k = 0; k < interactions_.size(); ++k) {
    history_order_[cursor[interactions_[k].user]++] = k;
  }
  for (std::size_t u = 0; u < users; ++u) {
    auto first = history_order_.begin() + static_cast<std::ptrdiff_t>(history_offsets_[u]);
    auto last = history_order_.begin() + static_cast<std::ptrdiff_t>(history_offsets_[u + 1]);
    std::stable_sort(first, last, [this](std::size_t a, std::size_t b) {
      return interactions_[a].timestamp < interactions_[b].timestamp;
    });
  }
}

std::span<const std::size_t> Dataset::history(UserId user) const {
  if (user >= num_users()) throw std::out_of_range("user index out of range");
  return std::span<const std::size_t>(history_order_)
      .subspan(history_offsets_[user], history_offsets_[user + 1] - history_offsets_[user]);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Interaction> picked;
  picked.reserve(indices.size());
  for (std::size_t k : indices) picked.push_back(interactions_.at(k));
  return Dataset(std::move(picked), ids_);
}

std::vector<std::size_t> Dataset::user_counts() const {
  std::vector<std::size_t> counts(num_users(), 0);
  for (const auto& x : interactions_) ++counts[x.user];
  return counts;
}

std::vector<std::size_t> Dataset::item_counts() const {
  std::vector<std::size_t> counts(num_items(), 0);
  for (const auto& x : interactions_) ++counts[x.item];
  return counts;
}

std::vector<std::vector<ItemId>> Dataset::user_item_sets() const {
  std::vector<std::vector<ItemId>> sets(num_users());
  for (const auto& x : interactions_) sets[x.user].push_back(x.item);
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return sets;
}

CsvSchema CsvSchema::from_columns(std::string_view order, char delimiter, bool header) {
  CsvSchema schema;
  schema.delimiter = delimiter;
  schema.header = header;
  schema.user_column = schema.item_column = schema.rating_column = schema.timestamp_column = -1;
  int position = 0;
  while (true) {
    auto comma = order.find(',');
    std::string_view name = order.substr(0, comma);
    if (name == "user") {
      schema.user_column = position;
    } else if (name == "item") {
      schema.item_column = position;
    } else if (name == "rating") {
      schema.rating_column = position;
    } else if (name == "timestamp") {
      schema.timestamp_column = position;
    } else if (name != "_" && !name.empty()) {
      throw ParameterError("data", "unknown column '" + std::string(name) + "'");
    }
    ++position;
    if (comma == std::string_view::npos) break;
    order.remove_prefix(comma + 1);
  }
  if (schema.user_column < 0 || schema.item_column < 0) {
    throw ParameterError("data", "column order must name both user and item");
  }
  return schema;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  while (true) {
    auto pos = line.find(delimiter);
    fields.push_back(line.substr(0, pos));
    if (pos == std::string_view::npos) break;
    line.remove_prefix(pos + 1);
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && end == text.data() + text.size();
}

}  // namespace

Dataset ingest_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
  auto ids = std::make_shared<IdMaps>();
  std::vector<Interaction> rows;
  std::string line;
  std::size_t line_number = 0;
  bool header_pending = schema.header;
  const int needed = std::max({schema.user_column, schema.item_column, schema.rating_column,
                               schema.timestamp_column}) + 1;

  while (std::getline(in, line)) {
    ++line_number;
    // Whitespace-delimited files must not have their delimiters trimmed away.
    std::string_view view = schema.delimiter == '\t' || schema.delimiter == ' '
                                ? std::string_view(line)
                                : trim(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    auto fields = split_fields(view, schema.delimiter);
    if (static_cast<int>(fields.size()) < needed) {
      throw ParseError(source, line_number,
                       "expected at least " + std::to_string(needed) + " fields, got " +
                           std::to_string(fields.size()));
    }
    Interaction x;
    auto user = trim(fields[static_cast<std::size_t>(schema.user_column)]);
    auto item = trim(fields[static_cast<std::size_t>(schema.item_column)]);
    if (user.empty() || item.empty()) throw ParseError(source, line_number, "empty id");
    x.user = ids->users.intern(user);
    x.item = ids->items.intern(item);
    if (schema.rating_column >= 0) {
      auto text = trim(fields[static_cast<std::size_t>(schema.rating_column)]);
      if (!parse_number(text, x.rating) || !std::isfinite(x.rating)) {
        throw ParseError(source, line_number, "bad rating '" + std::string(text) + "'");
      }
    }
    if (schema.timestamp_column >= 0) {
      auto text = trim(fields[static_cast<std::size_t>(schema.timestamp_column)]);
      if (!parse_number(text, x.timestamp) || x.timestamp < 0) {
        // Some public logs store fractional epoch seconds.
        double seconds = 0;
        if (!parse_number(text, seconds) || !(seconds >= 0)) {
          throw ParseError(source, line_number, "bad timestamp '" + std::string(text) + "'");
        }
        x.timestamp = static_cast<std::int64_t>(seconds);
      }
    } else {
      x.timestamp = static_cast<std::int64_t>(rows.size());
    }
    rows.push_back(x);
  }
  if (rows.empty()) throw EmptyDatasetError(source + " has no data rows");
  return Dataset(std::move(rows), std::move(ids));
}

Dataset ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("data", "cannot open " + path.string());
  return ingest_csv(in, schema, path.string());
}

void export_csv(const Dataset& dataset, std::ostream& out, char delimiter) {
  out << "user" << delimiter << "item" << delimiter << "rating" << delimiter << "timestamp\n";
  char buffer[64];
  for (const auto& x : dataset.interactions()) {
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), x.rating);
    out << dataset.ids().users.raw(x.user) << delimiter << dataset.ids().items.raw(x.item)
        << delimiter << std::string_view(buffer, static_cast<std::size_t>(end - buffer))
        << delimiter << x.timestamp << '\n';
  }
}

void export_csv(const Dataset& dataset, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw Error("data", "cannot write " + path.string());
  export_csv(dataset, out, delimiter);
}

void export_id_map(const IdMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("data", "cannot write " + path.string());
  out << "raw_id,index\n";
  for (std::uint32_t k = 0; k < map.size(); ++k) out << map.raw(k) << ',' << k << '\n';
}

Dataset filter_min_interactions(const Dataset& dataset, std::size_t min_count) {
  if (min_count < 1) throw PreconditionError("data", "filter threshold must be at least 1");
  auto counts = dataset.user_counts();
  std::vector<bool> keep_item(dataset.num_items(), false);
  for (const auto& x : dataset.interactions()) {
    if (counts[x.user] >= min_count) keep_item[x.item] = true;
  }

  auto ids = std::make_shared<IdMaps>();
  std::vector<std::uint32_t> user_map(dataset.num_users(), 0);
  std::vector<std::uint32_t> item_map(dataset.num_items(), 0);
  for (UserId u = 0; u < dataset.num_users(); ++u) {
    if (counts[u] >= min_count) user_map[u] = ids->users.intern(dataset.ids().users.raw(u));
  }
  for (ItemId i = 0; i < dataset.num_items(); ++i) {
    if (keep_item[i]) item_map[i] = ids->items.intern(dataset.ids().items.raw(i));
  }

  std::vector<Interaction> kept;
  kept.reserve(dataset.size());
  for (const auto& x : dataset.interactions()) {
    if (counts[x.user] < min_count) continue;
    Interaction y = x;
    y.user = user_map[x.user];
    y.item = item_map[x.item];
    kept.push_back(y);
  }
  if (kept.empty()) {
    throw EmptyDatasetError("no user has at least " + std::to_string(min_count) +
                            " interactions");
  }
  return Dataset(std::move(kept), std::move(ids));
}

namespace {

void require_min_history(const Dataset& dataset) {
  for (UserId u = 0; u < dataset.num_users(); ++u) {
    auto n = dataset.history(u).size();
    if (n > 0 && n < 3) {
      throw PreconditionError("data", "user '" + dataset.ids().users.raw(u) + "' has " +
                                          std::to_string(n) + " interactions; splits need 3");
    }
  }
}

SplitBundle assemble(const Dataset& dataset, std::vector<std::size_t> train,
                     std::vector<std::size_t> validation, std::vector<std::size_t> test,
                     Scenario scenario) {
  // Keep every part in source order.
  std::sort(train.begin(), train.end());
  std::sort(validation.begin(), validation.end());
  std::sort(test.begin(), test.end());
  return SplitBundle{dataset.subset(train), dataset.subset(validation), dataset.subset(test),
                     scenario};
}

}  // namespace

SplitBundle split_random(const Dataset& dataset, std::uint64_t seed, Scenario scenario) {
  require_min_history(dataset);
  Rng rng(seed);
  std::vector<std::size_t> train, validation, test;
  for (UserId u = 0; u < dataset.num_users(); ++u) {
    auto history = dataset.history(u);
    std::vector<std::size_t> order(history.begin(), history.end());
    const std::size_t n = order.size();
    if (n == 0) continue;
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_test = std::max<std::size_t>(1, scaled_count(10, n));
    const std::size_t n_val = std::max<std::size_t>(1, scaled_count(10, n));
    for (std::size_t k = 0; k < n; ++k) {
      if (k < n_test) {
        test.push_back(order[k]);
      } else if (k < n_test + n_val) {
        validation.push_back(order[k]);
      } else {
        train.push_back(order[k]);
      }
    }
  }
  return assemble(dataset, std::move(train), std::move(validation), std::move(test), scenario);
}

SplitBundle split_leave_one_last(const Dataset& dataset) {
  require_min_history(dataset);
  std::vector<std::size_t> train, validation, test;
  for (UserId u = 0; u < dataset.num_users(); ++u) {
    auto history = dataset.history(u);
    const std::size_t n = history.size();
    if (n == 0) continue;
    test.push_back(history[n - 1]);
    validation.push_back(history[n - 2]);
    train.insert(train.end(), history.begin(), history.end() - 2);
  }
  return assemble(dataset, std::move(train), std::move(validation), std::move(test),
                  Scenario::kSequential);
}

SplitBundle split_for_scenario(const Dataset& dataset, Scenario scenario, std::uint64_t seed) {
  if (scenario == Scenario::kSequential) return split_leave_one_last(dataset);
  return split_random(dataset, seed, scenario);
}

}  // namespace cfsample
