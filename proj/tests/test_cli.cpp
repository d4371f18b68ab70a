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
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace cfsample {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cfsample_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::dispatch(args, out_, err_);
  }

  fs::path write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path;
  }

  static std::size_t data_rows(const fs::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::size_t n = 0;
    std::getline(in, line);  // header
    while (std::getline(in, line)) n += line.empty() ? 0 : 1;
    return n;
  }

  static json read_json(const fs::path& path) {
    std::ifstream in(path);
    return json::parse(in);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::string ten_rows() {
  std::string csv = "user,item,rating,timestamp\n";
  for (int k = 0; k < 10; ++k) {
    csv += "u" + std::to_string(k % 3) + ",i" + std::to_string(k % 4) + "," +
           std::to_string(1 + k % 5) + "," + std::to_string(100 + k) + "\n";
  }
  return csv;
}

TEST_F(Cli, SampleKeepsHalfOfTenRows) {
  const auto input = write("train.csv", ten_rows());
  const auto out = dir_ / "sample";
  ASSERT_EQ(run({"sample", "--input", input.string(), "--out", out.string(), "--strategy",
                 "random-interaction", "--percent", "50", "--seed", "1"}),
            0)
      << err_.str();
  EXPECT_EQ(data_rows(out / "sample.csv"), 5u);
  const auto prov = read_json(out / "provenance.json");
  EXPECT_EQ(prov["command"], "sample");
  EXPECT_TRUE(prov.contains("input_sha256"));
  EXPECT_TRUE(prov.contains("version"));
}

TEST_F(Cli, EveryStrategyIsAccepted) {
  const auto input = write("train.csv", ten_rows());
  for (const char* s : {"stratified", "temporal", "random-user", "head-user", "centrality",
                        "random-walk", "forest-fire", "svp-cf-interaction-mf",
                        "svp-cf-prop-user-bias-only"}) {
    const auto out = dir_ / s;
    ASSERT_EQ(run({"sample", "--input", input.string(), "--out", out.string(), "--strategy", s,
                   "--percent", "40"}),
              0)
        << s << ": " << err_.str();
    EXPECT_EQ(data_rows(out / "sample.csv"), 4u) << s;
  }
}

TEST_F(Cli, MalformedFlagWritesNothing) {
  const auto input = write("train.csv", ten_rows());
  const auto out = dir_ / "bad";
  EXPECT_NE(run({"sample", "--input", input.string(), "--out", out.string(), "--strategy",
                 "random-interaction", "--percent", "fifty"}),
            0);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(run({"sample", "--input", input.string(), "--out", out.string(), "--strategy",
                 "snowball", "--percent", "50"}),
            0);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_NE(run({"sample", "--input", input.string(), "--out", out.string(), "--strategy",
                 "random-interaction", "--percent", "50", "--params", "restart_probability"}),
            0);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({}), 2);
}

TEST_F(Cli, RuntimeErrorsNameTheModule) {
  const auto input = write("empty.csv", "user,item,rating,timestamp\n");
  const auto out = dir_ / "x";
  EXPECT_EQ(run({"ingest", "--input", input.string(), "--out", out.string()}), 1);
  EXPECT_NE(err_.str().find("error: data:"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(out / "interactions.csv"));
}

TEST_F(Cli, IngestTrainEvaluatePipeline) {
  const auto synth = dir_ / "synth";
  ASSERT_EQ(run({"synth", "--out", synth.string(), "--users", "60", "--items", "30",
                 "--interactions", "600", "--seed", "4"}),
            0)
      << err_.str();
  const auto data = dir_ / "data";
  ASSERT_EQ(run({"ingest", "--input", (synth / "interactions.csv").string(), "--out",
                 data.string(), "--scenario", "implicit", "--seed", "2"}),
            0)
      << err_.str();
  for (const char* f : {"interactions.csv", "users.csv", "items.csv", "train.csv",
                        "validation.csv", "test.csv"}) {
    EXPECT_TRUE(fs::exists(data / f)) << f;
  }
  EXPECT_EQ(data_rows(data / "train.csv") + data_rows(data / "validation.csv") +
                data_rows(data / "test.csv"),
            600u);

  const auto model = dir_ / "model";
  ASSERT_EQ(run({"train", "--input", (data / "train.csv").string(), "--out", model.string(),
                 "--model", "mf", "--scenario", "implicit", "--epochs", "3", "--latent", "4"}),
            0)
      << err_.str();
  const auto eval = dir_ / "eval";
  ASSERT_EQ(run({"evaluate", "--checkpoint", (model / "checkpoint.json").string(), "--test",
                 (data / "test.csv").string(), "--train", (data / "train.csv").string(),
                 "--validation", (data / "validation.csv").string(), "--out", eval.string(),
                 "--scenario", "implicit"}),
            0)
      << err_.str();
  const auto metrics = read_json(eval / "metrics.json");
  const std::string text = metrics.dump();
  for (const char* m : {"AUC", "Recall@100", "nDCG@10"}) {
    EXPECT_NE(text.find(m), std::string::npos) << m << " in " << text;
  }
}

TEST_F(Cli, SvpWritesImportanceTable) {
  const auto synth = dir_ / "synth";
  ASSERT_EQ(run({"synth", "--out", synth.string(), "--users", "40", "--items", "20",
                 "--interactions", "300"}),
            0);
  const auto out = dir_ / "svp";
  ASSERT_EQ(run({"svp", "--input", (synth / "interactions.csv").string(), "--out", out.string(),
                 "--proxy", "bias-only", "--granularity", "user", "--prop", "on", "--epochs",
                 "2", "--percent", "20"}),
            0)
      << err_.str();
  EXPECT_EQ(data_rows(out / "importance.csv"), 40u);
  EXPECT_EQ(data_rows(out / "sample.csv"), 60u);
}

TEST_F(Cli, PsiAtFullPercentIsOne) {
  const auto config = write("config.json", R"({
    "datasets": [{"name": "toy", "synthetic": {"users": 60, "items": 30, "interactions": 600}}],
    "strategies": ["random-user", "svp-cf-user-mf"],
    "percents": [100],
    "scenarios": ["implicit"],
    "algorithms": [{"kind": "poprec"}, {"kind": "bias-only", "epochs": 2},
                   {"kind": "mf", "latent_sizes": [4], "epochs": 2}],
    "svp": {"proxy_epochs": 2}
  })");
  const auto out = dir_ / "psi";
  ASSERT_EQ(run({"psi", "--config", config.string(), "--out", out.string()}), 0) << err_.str();
  const auto report = read_json(out / "report.json");
  EXPECT_DOUBLE_EQ(report["psi"]["random-user"]["psi"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(report["psi"]["svp-cf-user-mf"]["psi"].get<double>(), 1.0);
  ASSERT_EQ(run({"report", "--input", (out / "report.json").string()}), 0) << err_.str();
  EXPECT_NE(out_.str().find("random-user"), std::string::npos);
}

}  // namespace
}  // namespace cfsample
