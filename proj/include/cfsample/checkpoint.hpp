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

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfsample/models.hpp"

namespace cfsample {

// A trained model with the configuration and seed that produced it. PopRec
// checkpoints hold item counts instead of parameters.
struct Checkpoint {
  ModelKind kind = ModelKind::kMF;
  TrainConfig config;
  ModelParams params;
  std::size_t num_users = 0;
  std::vector<double> popularity;
  // Raw ids by dense index, used to map other files onto the model's index
  // space. Optional.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
};

Checkpoint make_checkpoint(const ModelParams& params, const TrainConfig& config);
Checkpoint make_checkpoint(const PopularityModel& model);

nlohmann::json to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const nlohmann::json& json);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::unique_ptr<Scorer> make_scorer(const Checkpoint& checkpoint);

}  // namespace cfsample
