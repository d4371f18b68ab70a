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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cfsample/dataset.hpp"
#include "cfsample/evaluation.hpp"
#include "cfsample/models.hpp"
#include "cfsample/strategy.hpp"
#include "cfsample/synthetic.hpp"

namespace cfsample {

// One leaderboard entry and its hyper-parameter grid. Every grid point is
// trained and the best (config, epoch) on validation is kept.
struct AlgorithmSpec {
  std::string name;  // leaderboard label, e.g. "mf-32"
  ModelKind kind = ModelKind::kMF;
  std::vector<int> latent_sizes{8};
  std::vector<double> learning_rates{0.02};
  std::vector<double> dropouts{0.0};
  double l2_reg = 1e-4;
  int epochs = 10;
  int n_neg = 1;

  std::vector<TrainConfig> grid() const;
};

// The full search space: latent {4,8,16,32,50}, learning rate
// {0.001,0.006,0.02}, dropout {0,0.3,0.5} for NeuMF.
AlgorithmSpec full_grid(std::string name, ModelKind kind);

struct DatasetSpec {
  std::string name;
  std::optional<SyntheticConfig> synthetic;
  std::filesystem::path csv;  // used when `synthetic` is empty
  CsvSchema schema;
  std::size_t min_interactions = 3;
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> strategies;
  std::vector<double> percents{80, 60, 40, 20, 10, 1};
  std::vector<Scenario> scenarios{Scenario::kExplicit, Scenario::kImplicit,
                                  Scenario::kSequential};
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::uint64_t> seeds{0};  // one replicate per root seed
  SamplerParams sampler;
  SvpSettings svp;
  // Validate every this many epochs when selecting the epoch; 0 validates
  // only the final epoch.
  int validate_every = 0;
  int recall_k = 100;
  int ndcg_k = 10;

  // Relative CSV paths are resolved against `base`.
  static ExperimentConfig from_json(const nlohmann::json& json,
                                    const std::filesystem::path& base = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  // SHA-256 of the canonical JSON form.
  std::string hash() const;
};

struct RunOptions {
  std::size_t jobs = 1;
  std::filesystem::path cache_dir;  // empty disables cell caching
};

struct CellFailure {
  std::string where;
  std::string message;
};

struct ExperimentResult {
  nlohmann::json report;      // deterministic given the config
  nlohmann::json provenance;  // wall-clock data and cache statistics
  // Leaderboards per (dataset, seed) in config order.
  std::vector<LeaderboardSet> boards;
  std::map<std::string, double> psi;  // per strategy, averaged over seeds and datasets
  std::vector<CellFailure> failures;
  bool partial = false;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// report.json, provenance.json and the plot CSVs.
void write_experiment_artifacts(const ExperimentResult& result,
                                const std::filesystem::path& out_dir);

// tau_vs_percent.csv, tau_by_metric.csv, p_mle.csv and psi.csv from a report.
void write_plot_csvs(const nlohmann::json& report, const std::filesystem::path& out_dir);

// Grid-trains one algorithm on `train`, selecting on the validation split
// (MSE for explicit, nDCG for the other scenarios), and returns the chosen
// model with its config and epoch.
struct TrainedModel {
  std::unique_ptr<Scorer> model;
  TrainConfig config;
  int epoch = 0;
  double validation = 0.0;
};

TrainedModel train_and_select(const Dataset& train, const SplitBundle& split,
                              const AlgorithmSpec& algorithm, std::uint64_t seed,
                              int validate_every, int ndcg_k = 10);

}  // namespace cfsample
