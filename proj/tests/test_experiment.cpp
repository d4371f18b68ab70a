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
#include <fstream>

#include "cfsample/error.hpp"
#include "cfsample/experiment.hpp"

namespace cfsample {
namespace {

using nlohmann::json;

json small_config() {
  return json::parse(R"({
    "datasets": [{"name": "toy", "synthetic": {"users": 80, "items": 40, "interactions": 900,
                                               "affinity": 2.5, "seed": 3}}],
    "strategies": ["random-interaction", "head-user", "svp-cf-interaction-mf"],
    "percents": [100],
    "scenarios": ["explicit", "implicit"],
    "algorithms": [{"kind": "poprec"},
                   {"kind": "bias-only", "epochs": 3},
                   {"name": "mf-4", "kind": "mf", "latent_sizes": [4], "epochs": 3}],
    "svp": {"proxy_epochs": 2, "proxy_latent_size": 4},
    "seeds": [0]
  })");
}

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TEST(Experiment, FullPercentGivesPerfectPsi) {
  const auto result = run_experiment(ExperimentConfig::from_json(small_config()));
  EXPECT_FALSE(result.partial);
  EXPECT_TRUE(result.failures.empty());
  ASSERT_EQ(result.psi.size(), 3u);
  for (const auto& [name, psi] : result.psi) EXPECT_DOUBLE_EQ(psi, 1.0) << name;
  const auto& sampled = result.boards.at(0).sampled;
  // Explicit/MSE plus implicit AUC, Recall and nDCG, at one percent.
  for (const auto& [name, cells] : sampled) EXPECT_EQ(cells.size(), 4u) << name;
  // PopRec only on the ranking boards.
  EXPECT_EQ(result.boards[0].full.at({Scenario::kExplicit, MetricName::kMSE}).algorithms.size(),
            2u);
  EXPECT_EQ(result.boards[0].full.at({Scenario::kImplicit, MetricName::kAUC}).algorithms.size(),
            3u);
}

TEST(Experiment, ReportIsDeterministicAndCacheReuseIsExact) {
  auto j = small_config();
  j["percents"] = {50, 10};
  j["scenarios"] = {"implicit"};
  const auto config = ExperimentConfig::from_json(j);
  const auto plain = run_experiment(config);
  const auto again = run_experiment(config, {2, {}});
  EXPECT_EQ(plain.report.dump(), again.report.dump());

  const auto cache = fresh_dir("cfsample_cache_test");
  const auto first = run_experiment(config, {1, cache});
  EXPECT_EQ(first.provenance["cache_hits"], 0);
  const auto second = run_experiment(config, {1, cache});
  EXPECT_EQ(second.provenance["cache_misses"], 0);
  EXPECT_GT(second.provenance["cache_hits"].get<int>(), 0);
  EXPECT_EQ(first.report.dump(), second.report.dump());
  EXPECT_EQ(plain.report.dump(), second.report.dump());
  EXPECT_EQ(plain.report["config_hash"], config.hash());
  std::filesystem::remove_all(cache);
}

TEST(Experiment, SamplingLeavesEvaluationSplitsAlone) {
  auto j = small_config();
  j["percents"] = {20};
  j["scenarios"] = {"sequential"};
  const auto result = run_experiment(ExperimentConfig::from_json(j));
  const auto& scenario = result.report["datasets"][0]["replicates"][0]["scenarios"]["sequential"];
  // Leave-one-last: one validation and one test interaction per user.
  EXPECT_EQ(scenario["validation"], 80);
  EXPECT_EQ(scenario["test"], 80);
  EXPECT_EQ(scenario["train"].get<int>() + 160, 900);
}

TEST(Experiment, FailedCellIsRecordedAndPsiMarkedPartial) {
  auto j = small_config();
  j["scenarios"] = {"explicit"};
  j["percents"] = {50};
  // Diverges on the first epoch.
  j["algorithms"].push_back({{"name", "unstable"}, {"kind", "mf"}, {"learning_rates", {1e200}},
                             {"epochs", 2}});
  const auto result = run_experiment(ExperimentConfig::from_json(j));
  EXPECT_TRUE(result.partial);
  ASSERT_FALSE(result.failures.empty());
  EXPECT_NE(result.failures[0].where.find("unstable"), std::string::npos);
  EXPECT_NE(result.failures[0].message.find("epoch"), std::string::npos);
  EXPECT_TRUE(result.report["partial"].get<bool>());
  EXPECT_FALSE(result.report["failures"].empty());
}

TEST(Experiment, ArtifactsAndPlotTables) {
  auto j = small_config();
  j["percents"] = {50};
  j["scenarios"] = {"implicit"};
  const auto result = run_experiment(ExperimentConfig::from_json(j));
  const auto dir = fresh_dir("cfsample_artifacts_test");
  write_experiment_artifacts(result, dir);
  for (const char* f : {"report.json", "provenance.json", "tau_vs_percent.csv",
                        "tau_by_metric.csv", "p_mle.csv", "psi.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "report.json");
  EXPECT_EQ(json::parse(in).dump(), result.report.dump());
  std::filesystem::remove_all(dir);
}

TEST(ExperimentConfig, RoundTripAndHash) {
  const auto config = ExperimentConfig::from_json(small_config());
  const auto again = ExperimentConfig::from_json(config.to_json());
  EXPECT_EQ(config.to_json().dump(), again.to_json().dump());
  EXPECT_EQ(config.hash(), again.hash());
  EXPECT_EQ(config.hash().size(), 64u);
  auto other = small_config();
  other["seeds"] = {1};
  EXPECT_NE(ExperimentConfig::from_json(other).hash(), config.hash());
}

TEST(ExperimentConfig, Defaults) {
  const auto config = ExperimentConfig::from_json(
      json::parse(R"({"datasets": [{"name": "d", "synthetic": {}}]})"));
  EXPECT_EQ(config.strategies.size(), 16u);
  EXPECT_EQ(config.percents, (std::vector<double>{80, 60, 40, 20, 10, 1}));
  EXPECT_EQ(config.scenarios.size(), 3u);
  EXPECT_EQ(config.algorithms.size(), 5u);
}

TEST(ExperimentConfig, RejectsBadInput) {
  auto unknown = small_config();
  unknown["colour"] = "blue";
  EXPECT_THROW(ExperimentConfig::from_json(unknown), ParameterError);
  auto bad_percent = small_config();
  bad_percent["percents"] = {0};
  EXPECT_THROW(ExperimentConfig::from_json(bad_percent), ParameterError);
  auto bad_strategy = small_config();
  bad_strategy["strategies"] = {"snowball"};
  EXPECT_THROW(ExperimentConfig::from_json(bad_strategy), ParameterError);
  auto duplicate = small_config();
  duplicate["algorithms"].push_back({{"kind", "poprec"}});
  EXPECT_THROW(ExperimentConfig::from_json(duplicate), ParameterError);
  EXPECT_THROW(ExperimentConfig::from_json(json::parse(R"({"datasets": []})")), ParameterError);
}

TEST(AlgorithmSpec, GridSkipsIrrelevantAxes) {
  const auto mf = full_grid("mf", ModelKind::kMF);
  EXPECT_EQ(mf.grid().size(), 15u);
  EXPECT_EQ(full_grid("neumf", ModelKind::kNeuMF).grid().size(), 45u);
  EXPECT_EQ(full_grid("bias", ModelKind::kBiasOnly).grid().size(), 3u);
  EXPECT_EQ(full_grid("pop", ModelKind::kPopRec).grid().size(), 1u);
}

TEST(TrainAndSelect, PicksAValidatedEpoch) {
  SyntheticConfig s;
  s.users = 60;
  s.items = 30;
  s.interactions = 600;
  s.seed = 1;
  const auto data = generate_synthetic(s);
  const auto split = split_random(data, 2);
  AlgorithmSpec alg;
  alg.name = "mf";
  alg.learning_rates = {0.001, 0.02};
  alg.epochs = 6;
  const auto picked = train_and_select(split.train, split, alg, 5, 2);
  EXPECT_TRUE(picked.epoch == 2 || picked.epoch == 4 || picked.epoch == 6);
  // Explicit split: the score is the negated validation MSE.
  EXPECT_LT(picked.validation, 0.0);
  const auto again = train_and_select(split.train, split, alg, 5, 2);
  EXPECT_EQ(again.epoch, picked.epoch);
  EXPECT_EQ(again.config.learning_rate, picked.config.learning_rate);
  EXPECT_EQ(again.validation, picked.validation);
}

}  // namespace
}  // namespace cfsample
