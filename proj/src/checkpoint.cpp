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

#include "cfsample/checkpoint.hpp"

#include <fstream>

#include "cfsample/error.hpp"

namespace cfsample {

using nlohmann::json;

Checkpoint make_checkpoint(const ModelParams& params, const TrainConfig& config) {
  Checkpoint c;
  c.kind = params.kind;
  c.config = config;
  c.params = params;
  c.num_users = params.num_users;
  return c;
}

Checkpoint make_checkpoint(const PopularityModel& model) {
  Checkpoint c;
  c.kind = ModelKind::kPopRec;
  c.num_users = model.num_users();
  c.popularity.assign(model.counts().begin(), model.counts().end());
  return c;
}

json to_json(const Checkpoint& c) {
  json out;
  out["format"] = "cfsample-checkpoint-1";
  out["kind"] = to_string(c.kind);
  out["config"] = {{"latent_size", c.config.latent_size}, {"learning_rate", c.config.learning_rate},
                   {"dropout", c.config.dropout},         {"l2_reg", c.config.l2_reg},
                   {"epochs", c.config.epochs},           {"n_neg", c.config.n_neg},
                   {"seed", c.config.seed}};
  out["num_users"] = c.num_users;
  if (!c.user_ids.empty()) out["user_ids"] = c.user_ids;
  if (!c.item_ids.empty()) out["item_ids"] = c.item_ids;
  if (c.kind == ModelKind::kPopRec) {
    out["popularity"] = c.popularity;
    return out;
  }
  const ModelParams& p = c.params;
  out["num_items"] = p.num_items;
  out["latent_size"] = p.latent_size;
  out["alpha"] = p.alpha;
  out["user_bias"] = p.user_bias;
  out["item_bias"] = p.item_bias;
  out["user_factors"] = p.user_factors;
  out["item_factors"] = p.item_factors;
  if (p.kind == ModelKind::kNeuMF) {
    out["mlp"] = {{"w1", p.mlp.w1}, {"b1", p.mlp.b1}, {"w2", p.mlp.w2},
                  {"b2", p.mlp.b2}, {"w3", p.mlp.w3}, {"b3", p.mlp.b3}};
  }
  return out;
}

Checkpoint checkpoint_from_json(const json& in) {
  try {
    if (in.at("format") != "cfsample-checkpoint-1") {
      throw ParameterError("algorithms", "unsupported checkpoint format");
    }
    Checkpoint c;
    c.kind = parse_model_kind(in.at("kind").get<std::string>());
    const json& cfg = in.at("config");
    c.config.latent_size = cfg.at("latent_size");
    c.config.learning_rate = cfg.at("learning_rate");
    c.config.dropout = cfg.at("dropout");
    c.config.l2_reg = cfg.at("l2_reg");
    c.config.epochs = cfg.at("epochs");
    c.config.n_neg = cfg.at("n_neg");
    c.config.seed = cfg.at("seed");
    c.num_users = in.at("num_users");
    if (in.contains("user_ids")) c.user_ids = in.at("user_ids").get<std::vector<std::string>>();
    if (in.contains("item_ids")) c.item_ids = in.at("item_ids").get<std::vector<std::string>>();
    if (c.kind == ModelKind::kPopRec) {
      c.popularity = in.at("popularity").get<std::vector<double>>();
      return c;
    }
    ModelParams p = ModelParams::zeros(c.kind, c.num_users, in.at("num_items"),
                                       in.at("latent_size"));
    auto fill = [](std::vector<double>& dst, const json& src) {
      auto values = src.get<std::vector<double>>();
      if (values.size() != dst.size()) {
        throw ParameterError("algorithms", "checkpoint block has the wrong size");
      }
      dst = std::move(values);
    };
    p.alpha = in.at("alpha");
    fill(p.user_bias, in.at("user_bias"));
    fill(p.item_bias, in.at("item_bias"));
    fill(p.user_factors, in.at("user_factors"));
    fill(p.item_factors, in.at("item_factors"));
    if (c.kind == ModelKind::kNeuMF) {
      const json& mlp = in.at("mlp");
      fill(p.mlp.w1, mlp.at("w1"));
      fill(p.mlp.b1, mlp.at("b1"));
      fill(p.mlp.w2, mlp.at("w2"));
      fill(p.mlp.b2, mlp.at("b2"));
      fill(p.mlp.w3, mlp.at("w3"));
      p.mlp.b3 = mlp.at("b3");
    }
    c.params = std::move(p);
    return c;
  } catch (const json::exception& e) {
    throw ParameterError("algorithms", std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("algorithms", "cannot write " + path.string());
  out << to_json(checkpoint).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("algorithms", "cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError("algorithms", path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

std::unique_ptr<Scorer> make_scorer(const Checkpoint& c) {
  if (c.kind == ModelKind::kPopRec) {
    return std::make_unique<PopularityModel>(PopularityModel::from_counts(c.num_users, c.popularity));
  }
  return std::make_unique<FactorModel>(c.params);
}

}  // namespace cfsample
