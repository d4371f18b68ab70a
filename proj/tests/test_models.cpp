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

#include <cmath>
#include <random>

#include "cfsample/error.hpp"
#include "cfsample/models.hpp"
#include "gradient_check.hpp"
#include "test_helpers.hpp"

namespace cfsample {
namespace {

using testing::flatten;
using testing::make_dataset;
using testing::numeric_gradient;
using testing::random_point;
using testing::relative_error;

class GradientTest : public ::testing::TestWithParam<ModelKind> {};

TEST_P(GradientTest, SquaredErrorMatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  for (int point = 0; point < 20; ++point) {
    const auto p = random_point(GetParam(), 3, 4, 3, rng);
    const Interaction x{1, 2, 4.0, 0};
    const double l2 = 0.05;
    const auto analytic = flatten(squared_error_gradient(p, x, l2));
    const auto numeric =
        numeric_gradient(p, [&](const ModelParams& q) { return squared_error_loss(q, x, l2); });
    EXPECT_LT(relative_error(analytic, numeric), 1e-4) << "point " << point;
  }
}

TEST_P(GradientTest, BprMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int point = 0; point < 20; ++point) {
    const auto p = random_point(GetParam(), 3, 4, 3, rng);
    const double l2 = 0.05;
    const auto analytic = flatten(bpr_gradient(p, 2, 0, 3, l2));
    const auto numeric =
        numeric_gradient(p, [&](const ModelParams& q) { return bpr_loss(q, 2, 0, 3, l2); });
    EXPECT_LT(relative_error(analytic, numeric), 1e-4) << "point " << point;
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, GradientTest,
                         ::testing::Values(ModelKind::kBiasOnly, ModelKind::kMF,
                                           ModelKind::kNeuMF),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           name.erase(std::remove(name.begin(), name.end(), '-'), name.end());
                           return name;
                         });

TEST(TrainExplicit, BiasOnlySingleInteractionConvergesToRating) {
  const auto d = make_dataset({{0, 0, 4.0, 0}});
  TrainConfig c;
  c.learning_rate = 0.05;
  c.l2_reg = 0.0;
  c.epochs = 400;
  const auto p = train_explicit(d, ModelKind::kBiasOnly, c);
  EXPECT_NEAR(predict(p, 0, 0), 4.0, 1e-6);
}

TEST(TrainExplicit, ZeroEpochsReturnsInitialization) {
  const auto d = make_dataset({{0, 0, 4.0, 0}, {1, 1, 2.0, 0}});
  TrainConfig c;
  c.epochs = 0;
  c.seed = 9;
  for (ModelKind kind : {ModelKind::kBiasOnly, ModelKind::kMF, ModelKind::kNeuMF}) {
    EXPECT_EQ(flatten(train_explicit(d, kind, c)), flatten(init_params(kind, 2, 2, c)));
  }
}

TEST(TrainExplicit, DeterministicPerSeed) {
  const auto d = make_dataset({{0, 0, 4.0, 0}, {1, 1, 2.0, 0}, {0, 1, 3.0, 0}, {1, 0, 5.0, 0}});
  TrainConfig c;
  c.seed = 3;
  c.dropout = 0.3;
  const auto a = train_explicit(d, ModelKind::kNeuMF, c);
  const auto b = train_explicit(d, ModelKind::kNeuMF, c);
  EXPECT_EQ(flatten(a), flatten(b));
  c.seed = 4;
  EXPECT_NE(flatten(a), flatten(train_explicit(d, ModelKind::kNeuMF, c)));
}

TEST(TrainExplicit, DivergenceNamesEpoch) {
  const auto d = make_dataset({{0, 0, 1e150, 0}, {1, 1, -1e150, 0}});
  TrainConfig c;
  c.learning_rate = 10.0;
  c.epochs = 50;
  try {
    train_explicit(d, ModelKind::kMF, c);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.epoch(), 1);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    EXPECT_EQ(std::string(e.what()).rfind("algorithms: ", 0), 0u);
  }
}

TEST(TrainExplicit, StrongRegularizationShrinksParameters) {
  std::vector<Interaction> rows;
  for (UserId u = 0; u < 5; ++u) {
    for (ItemId i = 0; i < 5; ++i) rows.push_back({u, i, 1.0 + (u + i) % 5, 0});
  }
  const auto d = make_dataset(rows);
  TrainConfig weak, strong;
  weak.l2_reg = 0.0;
  strong.l2_reg = 4.0;  // 1 - 2 * lr * l2 stays inside (0, 1)
  weak.epochs = strong.epochs = 50;
  auto norm = [](const ModelParams& p) {
    double s = 0.0;
    for (const auto* v : {&p.user_bias, &p.item_bias, &p.user_factors, &p.item_factors}) {
      for (double x : *v) s += x * x;
    }
    return s;
  };
  const double w = norm(train_explicit(d, ModelKind::kMF, weak));
  const double s = norm(train_explicit(d, ModelKind::kMF, strong));
  EXPECT_LT(s, 1e-3 * w);
}

TEST(TrainBpr, SinglePositiveEndsAboveNegative) {
  // One user, item 0 consumed, item 1 the only negative.
  const auto d = make_dataset({{0, 0, 1.0, 0}}, 1, 2);
  TrainConfig c;
  c.epochs = 200;
  c.learning_rate = 0.05;
  for (ModelKind kind : {ModelKind::kBiasOnly, ModelKind::kMF, ModelKind::kNeuMF}) {
    const auto p = train_bpr(d, kind, c);
    EXPECT_GT(predict(p, 0, 0), predict(p, 0, 1)) << to_string(kind);
  }
}

TEST(TrainBpr, DeterministicPerSeed) {
  const auto d = make_dataset({{0, 0, 1, 0}, {0, 1, 1, 1}, {1, 2, 1, 0}, {2, 3, 1, 0}}, 3, 6);
  TrainConfig c;
  c.seed = 11;
  c.n_neg = 2;
  EXPECT_EQ(flatten(train_bpr(d, ModelKind::kMF, c)), flatten(train_bpr(d, ModelKind::kMF, c)));
}

TEST(TrainBpr, UserOwningEveryItemIsSkipped) {
  const auto d = make_dataset({{0, 0, 1, 0}, {0, 1, 1, 0}, {1, 0, 1, 0}});
  TrainConfig c;
  c.epochs = 3;
  EXPECT_NO_THROW(train_bpr(d, ModelKind::kMF, c));
}

TEST(Score, BiasOnlyZeroParamsScoresZero) {
  const auto p = ModelParams::zeros(ModelKind::kBiasOnly, 2, 2, 0);
  EXPECT_EQ(predict(p, 1, 1), 0.0);
}

TEST(Score, MfDotProduct) {
  auto p = ModelParams::zeros(ModelKind::kMF, 1, 1, 2);
  p.user_factors = {1.0, 1.0};
  p.item_factors = {1.0, 1.0};
  EXPECT_EQ(predict(p, 0, 0), 2.0);
  EXPECT_EQ(FactorModel(p).score(0, 0), 2.0);
}

TEST(Score, UnknownIndexThrows) {
  const auto p = ModelParams::zeros(ModelKind::kMF, 2, 2, 2);
  EXPECT_THROW(predict(p, 2, 0), std::out_of_range);
  EXPECT_THROW(FactorModel(p).score(0, 5), std::out_of_range);
  const auto pop = PopularityModel::fit(make_dataset({{0, 0, 1, 0}}));
  EXPECT_THROW(pop.score(0, 3), std::out_of_range);
}

TEST(Score, FullCatalogueScoringMatchesPointScores) {
  std::mt19937_64 rng(5);
  for (ModelKind kind : {ModelKind::kBiasOnly, ModelKind::kMF, ModelKind::kNeuMF}) {
    const FactorModel m(random_point(kind, 3, 6, 4, rng));
    std::vector<double> all(6);
    for (UserId u = 0; u < 3; ++u) {
      m.score_items(u, all);
      for (ItemId i = 0; i < 6; ++i) EXPECT_NEAR(all[i], m.score(u, i), 1e-12);
    }
  }
}

TEST(PopRec, SameForEveryUserAndIgnoresRatings) {
  const auto a = make_dataset({{0, 0, 5, 0}, {1, 0, 1, 0}, {1, 1, 2, 0}, {2, 2, 3, 0}});
  const auto b = make_dataset({{0, 0, 1, 0}, {1, 0, 1, 0}, {1, 1, 1, 0}, {2, 2, 1, 0}});
  const auto pa = PopularityModel::fit(a);
  const auto pb = PopularityModel::fit(b);
  for (ItemId i = 0; i < 3; ++i) {
    for (UserId u = 1; u < 3; ++u) EXPECT_EQ(pa.score(0, i), pa.score(u, i));
    EXPECT_EQ(pa.score(0, i), pb.score(0, i));
  }
  EXPECT_EQ(pa.score(0, 0), 2.0);
  EXPECT_EQ(rank_all_items(pa, 0, {}), rank_all_items(pa, 2, {}));
}

// Scores are fixed per item for this helper.
class FixedScorer final : public Scorer {
 public:
  explicit FixedScorer(std::vector<double> s) : s_(std::move(s)) {}
  std::size_t num_users() const override { return 1; }
  std::size_t num_items() const override { return s_.size(); }
  double score(UserId, ItemId i) const override { return s_.at(i); }

 private:
  std::vector<double> s_;
};

TEST(RankAllItems, DescendingByScore) {
  EXPECT_EQ(rank_all_items(FixedScorer({1.0, 2.0}), 0, {}), (std::vector<ItemId>{1, 0}));
}

TEST(RankAllItems, ExcludeAllButOne) {
  const std::vector<ItemId> exclude{0, 2, 3};
  EXPECT_EQ(rank_all_items(FixedScorer({1, 2, 3, 4}), 0, exclude), (std::vector<ItemId>{1}));
}

TEST(RankAllItems, TiesByAscendingIndex) {
  EXPECT_EQ(rank_all_items(FixedScorer({1, 3, 1, 3}), 0, {}), (std::vector<ItemId>{1, 3, 0, 2}));
}

TEST(ModelKindNames, RoundTrip) {
  for (ModelKind k : {ModelKind::kPopRec, ModelKind::kBiasOnly, ModelKind::kMF, ModelKind::kNeuMF}) {
    EXPECT_EQ(parse_model_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_model_kind("bias"), ModelKind::kBiasOnly);
  EXPECT_THROW(parse_model_kind("sasrec"), ParameterError);
}

}  // namespace
}  // namespace cfsample
