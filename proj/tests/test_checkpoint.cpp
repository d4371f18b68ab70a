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

#include <gtest/gtest.h>

#include <filesystem>

#include "cfsample/checkpoint.hpp"
#include "cfsample/error.hpp"
#include "test_helpers.hpp"

namespace cfsample {
namespace {

using testing::make_dataset;

Dataset train_set() {
  std::vector<Interaction> rows;
  for (UserId u = 0; u < 6; ++u) {
    for (ItemId i = 0; i < 7; ++i) {
      if ((u + 2 * i) % 3 == 0) rows.push_back({u, i, 1.0 + (u + i) % 5, 0});
    }
  }
  return make_dataset(rows);
}

class RoundTrip : public ::testing::TestWithParam<ModelKind> {};

TEST_P(RoundTrip, ScoresAndParametersSurviveExactly) {
  const auto train = train_set();
  TrainConfig config;
  config.latent_size = 3;
  config.epochs = 3;
  config.dropout = GetParam() == ModelKind::kNeuMF ? 0.3 : 0.0;
  config.seed = 99;
  const auto params = train_bpr(train, GetParam(), config);
  const auto checkpoint = make_checkpoint(params, config);
  const auto path = std::filesystem::temp_directory_path() /
                    ("cfsample_ckpt_" + std::string(to_string(GetParam())) + ".json");
  save_checkpoint(checkpoint, path);
  const auto loaded = load_checkpoint(path);
  std::filesystem::remove(path);

  EXPECT_EQ(loaded.kind, GetParam());
  EXPECT_EQ(loaded.config.seed, 99u);
  EXPECT_EQ(loaded.config.dropout, config.dropout);
  EXPECT_EQ(loaded.params.user_factors, params.user_factors);
  EXPECT_EQ(loaded.params.item_bias, params.item_bias);
  EXPECT_EQ(loaded.params.mlp.w1, params.mlp.w1);
  EXPECT_EQ(loaded.params.mlp.b3, params.mlp.b3);
  const auto original = make_scorer(checkpoint);
  const auto restored = make_scorer(loaded);
  for (UserId u = 0; u < train.num_users(); ++u) {
    for (ItemId i = 0; i < train.num_items(); ++i) {
      ASSERT_EQ(restored->score(u, i), original->score(u, i));
      ASSERT_EQ(restored->score(u, i), predict(params, u, i));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Models, RoundTrip,
                         ::testing::Values(ModelKind::kBiasOnly, ModelKind::kMF,
                                           ModelKind::kNeuMF),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           return name == "bias-only" ? std::string("bias_only") : name;
                         });

TEST(Checkpoint, PopularityRoundTrip) {
  const auto model = PopularityModel::fit(train_set());
  auto checkpoint = make_checkpoint(model);
  checkpoint.item_ids = {"a", "b", "c", "d", "e", "f", "g"};
  const auto loaded = checkpoint_from_json(to_json(checkpoint));
  EXPECT_EQ(loaded.kind, ModelKind::kPopRec);
  EXPECT_EQ(loaded.item_ids, checkpoint.item_ids);
  const auto scorer = make_scorer(loaded);
  for (ItemId i = 0; i < 7; ++i) EXPECT_EQ(scorer->score(2, i), model.score(2, i));
}

TEST(Checkpoint, RejectsMalformedDocuments) {
  TrainConfig config;
  config.latent_size = 2;
  const auto good = to_json(make_checkpoint(
      init_params(ModelKind::kMF, 3, 4, config), config));
  EXPECT_NO_THROW(checkpoint_from_json(good));
  auto wrong_format = good;
  wrong_format["format"] = "something-else";
  EXPECT_THROW(checkpoint_from_json(wrong_format), ParameterError);
  auto short_factors = good;
  short_factors["user_factors"].erase(0);
  EXPECT_THROW(checkpoint_from_json(short_factors), ParameterError);
  EXPECT_THROW(load_checkpoint("/nonexistent/checkpoint.json"), Error);
}

}  // namespace
}  // namespace cfsample
