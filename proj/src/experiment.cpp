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

#include "cfsample/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "cfsample/error.hpp"
#include "cfsample/hashing.hpp"
#include "cfsample/metrics.hpp"
#include "cfsample/random.hpp"
#include "cfsample/version.hpp"

namespace cfsample {

using nlohmann::json;

std::vector<TrainConfig> AlgorithmSpec::grid() const {
  std::vector<TrainConfig> out;
  if (kind == ModelKind::kPopRec) return {TrainConfig{}};
  const std::vector<int> sizes = kind == ModelKind::kBiasOnly ? std::vector<int>{0} : latent_sizes;
  const std::vector<double> drops = kind == ModelKind::kNeuMF ? dropouts : std::vector<double>{0.0};
  for (int d : sizes) {
    for (double lr : learning_rates) {
      for (double p : drops) {
        out.push_back(TrainConfig{.latent_size = d,
                                  .learning_rate = lr,
                                  .dropout = p,
                                  .l2_reg = l2_reg,
                                  .epochs = epochs,
                                  .n_neg = n_neg,
                                  .seed = 0});
      }
    }
  }
  if (out.empty()) throw ParameterError("evaluation", "empty grid for " + name);
  return out;
}

AlgorithmSpec full_grid(std::string name, ModelKind kind) {
  AlgorithmSpec spec;
  spec.name = std::move(name);
  spec.kind = kind;
  spec.latent_sizes = {4, 8, 16, 32, 50};
  spec.learning_rates = {0.001, 0.006, 0.02};
  spec.dropouts = {0.0, 0.3, 0.5};
  return spec;
}

namespace {

// Rejects keys outside `allowed`.
void check_keys(const json& object, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  if (!object.is_object()) throw ParameterError("evaluation", where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ParameterError("evaluation", "unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read(const json& object, const char* key, T& out) {
  if (auto it = object.find(key); it != object.end()) out = it->get<T>();
}

std::string schema_columns(const CsvSchema& s) {
  int width = std::max({s.user_column, s.item_column, s.rating_column, s.timestamp_column}) + 1;
  std::vector<std::string> names(static_cast<std::size_t>(width), "_");
  names[s.user_column] = "user";
  names[s.item_column] = "item";
  if (s.rating_column >= 0) names[s.rating_column] = "rating";
  if (s.timestamp_column >= 0) names[s.timestamp_column] = "timestamp";
  std::string out;
  for (std::size_t k = 0; k < names.size(); ++k) out += (k ? "," : "") + names[k];
  return out;
}

json synthetic_to_json(const SyntheticConfig& c) {
  return {{"users", c.users},
          {"items", c.items},
          {"interactions", c.interactions},
          {"latent_dim", c.latent_dim},
          {"popularity_exponent", c.popularity_exponent},
          {"affinity", c.affinity},
          {"noise", c.noise},
          {"min_per_user", c.min_per_user},
          {"activity_sigma", c.activity_sigma},
          {"mnar", c.mnar},
          {"propensity_a", c.propensity.a},
          {"propensity_b", c.propensity.b},
          {"seed", c.seed}};
}

SyntheticConfig synthetic_from_json(const json& j) {
  check_keys(j,
             {"users", "items", "interactions", "latent_dim", "popularity_exponent", "affinity",
              "noise", "min_per_user", "activity_sigma", "mnar", "propensity_a", "propensity_b",
              "seed"},
             "synthetic");
  SyntheticConfig c;
  read(j, "users", c.users);
  read(j, "items", c.items);
  read(j, "interactions", c.interactions);
  read(j, "latent_dim", c.latent_dim);
  read(j, "popularity_exponent", c.popularity_exponent);
  read(j, "affinity", c.affinity);
  read(j, "noise", c.noise);
  read(j, "min_per_user", c.min_per_user);
  read(j, "activity_sigma", c.activity_sigma);
  read(j, "mnar", c.mnar);
  read(j, "propensity_a", c.propensity.a);
  read(j, "propensity_b", c.propensity.b);
  read(j, "seed", c.seed);
  return c;
}

json dataset_to_json(const DatasetSpec& d) {
  json out{{"name", d.name}, {"min_interactions", d.min_interactions}};
  if (d.synthetic) {
    out["synthetic"] = synthetic_to_json(*d.synthetic);
  } else {
    out["csv"] = d.csv.string();
    out["schema"] = {{"columns", schema_columns(d.schema)},
                     {"delimiter", std::string(1, d.schema.delimiter)},
                     {"header", d.schema.header}};
  }
  return out;
}

json algorithm_to_json(const AlgorithmSpec& a) {
  return {{"name", a.name},
          {"kind", to_string(a.kind)},
          {"latent_sizes", a.latent_sizes},
          {"learning_rates", a.learning_rates},
          {"dropouts", a.dropouts},
          {"l2_reg", a.l2_reg},
          {"epochs", a.epochs},
          {"n_neg", a.n_neg}};
}

json sampler_to_json(const SamplerParams& p) {
  return {{"restart_probability", p.restart_probability},
          {"burn_probability", p.burn_probability},
          {"damping", p.damping},
          {"tolerance", p.tolerance},
          {"max_iterations", p.max_iterations},
          {"stall_limit", p.stall_limit}};
}

json svp_to_json(const SvpSettings& s) {
  const TrainConfig& t = s.proxy.train;
  return {{"proxy_latent_size", t.latent_size},
          {"proxy_learning_rate", t.learning_rate},
          {"proxy_l2_reg", t.l2_reg},
          {"proxy_epochs", t.epochs},
          {"proxy_n_neg", t.n_neg},
          {"scoring_negatives", s.proxy.scoring_negatives},
          {"propensity_a", s.propensity.a},
          {"propensity_b", s.propensity.b},
          {"smoothing", s.smoothing}};
}

std::vector<AlgorithmSpec> default_algorithms() {
  std::vector<AlgorithmSpec> out;
  auto add = [&](std::string name, ModelKind kind, int d) {
    AlgorithmSpec a;
    a.name = std::move(name);
    a.kind = kind;
    a.latent_sizes = {d};
    out.push_back(a);
  };
  add("poprec", ModelKind::kPopRec, 0);
  add("bias-only", ModelKind::kBiasOnly, 0);
  add("mf-8", ModelKind::kMF, 8);
  add("mf-32", ModelKind::kMF, 32);
  add("neumf-8", ModelKind::kNeuMF, 8);
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::filesystem::path& base) {
  try {
    check_keys(j,
               {"datasets", "strategies", "percents", "scenarios", "algorithms", "seeds",
                "sampler", "svp", "validate_every", "recall_k", "ndcg_k"},
               "experiment config");
    ExperimentConfig c;
    for (const auto& dj : j.at("datasets")) {
      check_keys(dj, {"name", "synthetic", "csv", "schema", "min_interactions"}, "dataset");
      DatasetSpec d;
      d.name = dj.at("name").get<std::string>();
      read(dj, "min_interactions", d.min_interactions);
      if (dj.contains("synthetic") == dj.contains("csv")) {
        throw ParameterError("evaluation", "dataset '" + d.name + "' needs exactly one of synthetic or csv");
      }
      if (dj.contains("synthetic")) {
        d.synthetic = synthetic_from_json(dj.at("synthetic"));
      } else {
        d.csv = dj.at("csv").get<std::string>();
        if (d.csv.is_relative() && !base.empty()) d.csv = base / d.csv;
        std::string columns = "user,item,rating,timestamp", delimiter = ",";
        bool header = true;
        if (auto it = dj.find("schema"); it != dj.end()) {
          check_keys(*it, {"columns", "delimiter", "header"}, "schema");
          read(*it, "columns", columns);
          read(*it, "delimiter", delimiter);
          read(*it, "header", header);
        }
        if (delimiter.size() != 1) throw ParameterError("evaluation", "delimiter must be one character");
        d.schema = CsvSchema::from_columns(columns, delimiter[0], header);
      }
      c.datasets.push_back(std::move(d));
    }
    if (c.datasets.empty()) throw ParameterError("evaluation", "config lists no datasets");

    std::vector<std::string> strategies{"all"};
    read(j, "strategies", strategies);
    for (const auto& name : strategies) {
      if (name == "all") {
        for (const auto& s : all_strategies()) c.strategies.push_back(s.name());
      } else {
        c.strategies.push_back(parse_strategy(name).name());
      }
    }
    read(j, "percents", c.percents);
    for (double p : c.percents) {
      if (!(p > 0.0 && p <= 100.0)) throw ParameterError("evaluation", "percent outside (0, 100]");
    }
    if (auto it = j.find("scenarios"); it != j.end()) {
      c.scenarios.clear();
      for (const auto& s : *it) c.scenarios.push_back(parse_scenario(s.get<std::string>()));
    }
    if (auto it = j.find("algorithms"); it != j.end()) {
      for (const auto& aj : *it) {
        check_keys(aj,
                   {"name", "kind", "latent_sizes", "learning_rates", "dropouts", "l2_reg",
                    "epochs", "n_neg", "grid"},
                   "algorithm");
        AlgorithmSpec a;
        a.kind = parse_model_kind(aj.at("kind").get<std::string>());
        if (aj.value("grid", std::string()) == "full") {
          a = full_grid("", a.kind);
        }
        a.name = aj.value("name", std::string(to_string(a.kind)));
        read(aj, "latent_sizes", a.latent_sizes);
        read(aj, "learning_rates", a.learning_rates);
        read(aj, "dropouts", a.dropouts);
        read(aj, "l2_reg", a.l2_reg);
        read(aj, "epochs", a.epochs);
        read(aj, "n_neg", a.n_neg);
        c.algorithms.push_back(std::move(a));
      }
    } else {
      c.algorithms = default_algorithms();
    }
    std::set<std::string> names;
    for (const auto& a : c.algorithms) {
      if (!names.insert(a.name).second) {
        throw ParameterError("evaluation", "duplicate algorithm name '" + a.name + "'");
      }
    }
    if (c.algorithms.size() < 2) throw ParameterError("evaluation", "need at least two algorithms");
    read(j, "seeds", c.seeds);
    if (c.seeds.empty()) throw ParameterError("evaluation", "config lists no seeds");
    if (auto it = j.find("sampler"); it != j.end()) {
      check_keys(*it,
                 {"restart_probability", "burn_probability", "damping", "tolerance",
                  "max_iterations", "stall_limit"},
                 "sampler");
      read(*it, "restart_probability", c.sampler.restart_probability);
      read(*it, "burn_probability", c.sampler.burn_probability);
      read(*it, "damping", c.sampler.damping);
      read(*it, "tolerance", c.sampler.tolerance);
      read(*it, "max_iterations", c.sampler.max_iterations);
      read(*it, "stall_limit", c.sampler.stall_limit);
    }
    if (auto it = j.find("svp"); it != j.end()) {
      check_keys(*it,
                 {"proxy_latent_size", "proxy_learning_rate", "proxy_l2_reg", "proxy_epochs",
                  "proxy_n_neg", "scoring_negatives", "propensity_a", "propensity_b",
                  "smoothing"},
                 "svp");
      TrainConfig& t = c.svp.proxy.train;
      read(*it, "proxy_latent_size", t.latent_size);
      read(*it, "proxy_learning_rate", t.learning_rate);
      read(*it, "proxy_l2_reg", t.l2_reg);
      read(*it, "proxy_epochs", t.epochs);
      read(*it, "proxy_n_neg", t.n_neg);
      read(*it, "scoring_negatives", c.svp.proxy.scoring_negatives);
      read(*it, "propensity_a", c.svp.propensity.a);
      read(*it, "propensity_b", c.svp.propensity.b);
      read(*it, "smoothing", c.svp.smoothing);
    }
    read(j, "validate_every", c.validate_every);
    read(j, "recall_k", c.recall_k);
    read(j, "ndcg_k", c.ndcg_k);
    if (c.validate_every < 0 || c.recall_k < 1 || c.ndcg_k < 1) {
      throw ParameterError("evaluation", "validate_every must be >= 0 and cutoffs >= 1");
    }
    return c;
  } catch (const json::exception& e) {
    throw ParameterError("evaluation", std::string("malformed experiment config: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("evaluation", "cannot read " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ParameterError("evaluation", path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

json ExperimentConfig::to_json() const {
  json out;
  out["datasets"] = json::array();
  for (const auto& d : datasets) out["datasets"].push_back(dataset_to_json(d));
  out["strategies"] = strategies;
  out["percents"] = percents;
  out["scenarios"] = json::array();
  for (Scenario s : scenarios) out["scenarios"].push_back(to_string(s));
  out["algorithms"] = json::array();
  for (const auto& a : algorithms) out["algorithms"].push_back(algorithm_to_json(a));
  out["seeds"] = seeds;
  out["sampler"] = sampler_to_json(sampler);
  out["svp"] = svp_to_json(svp);
  out["validate_every"] = validate_every;
  out["recall_k"] = recall_k;
  out["ndcg_k"] = ndcg_k;
  return out;
}

std::string ExperimentConfig::hash() const { return sha256_hex(to_json().dump()); }

namespace {

struct ValidationSet {
  Scenario scenario;
  const Dataset* data;
  RankingContext ranking;

  explicit ValidationSet(const SplitBundle& split)
      : scenario(split.scenario),
        data(&split.validation),
        ranking(RankingContext::for_validation(split)) {}
};

// Higher is better.
double validation_score(const Scorer& model, const ValidationSet& v, int ndcg_k) {
  if (v.scenario == Scenario::kExplicit) return -mse(model, *v.data).value;
  return ndcg_at_k(model, v.ranking, ndcg_k).value;
}

TrainedModel select(const Dataset& train, const ValidationSet& validation,
                    const AlgorithmSpec& algorithm, std::uint64_t seed, int validate_every,
                    int ndcg_k) {
  TrainedModel best;
  if (algorithm.kind == ModelKind::kPopRec) {
    auto model = std::make_unique<PopularityModel>(PopularityModel::fit(train));
    best.validation = validation_score(*model, validation, ndcg_k);
    best.model = std::move(model);
    return best;
  }
  double best_score = -std::numeric_limits<double>::infinity();
  std::optional<ModelParams> best_params;
  for (TrainConfig config : algorithm.grid()) {
    config.seed = seed;
    auto on_epoch = [&](int epoch, const ModelParams& params) {
      const bool check = epoch == config.epochs ||
                         (validate_every > 0 && epoch % validate_every == 0);
      if (!check) return;
      const double score = validation_score(FactorModel(params), validation, ndcg_k);
      // Strict improvement keeps the earliest of equally good candidates.
      if (!best_params || score > best_score) {
        best_score = score;
        best_params = params;
        best.config = config;
        best.epoch = epoch;
      }
    };
    if (config.epochs == 0) {
      on_epoch(0, init_params(algorithm.kind, train.num_users(), train.num_items(), config));
    } else if (validation.scenario == Scenario::kExplicit) {
      train_explicit(train, algorithm.kind, config, on_epoch);
    } else {
      train_bpr(train, algorithm.kind, config, on_epoch);
    }
  }
  best.validation = best_score;
  best.model = std::make_unique<FactorModel>(std::move(*best_params));
  return best;
}

using CellMetrics = std::map<MetricName, double>;

CellMetrics evaluate_test(const Scorer& model, const SplitBundle& split, const RankingContext& test,
                          const ExperimentConfig& config) {
  if (split.scenario == Scenario::kExplicit) return {{MetricName::kMSE, mse(model, split.test).value}};
  const auto r = evaluate_ranking(model, test, config.recall_k, config.ndcg_k);
  return {{MetricName::kAUC, r.auc.value},
          {MetricName::kRecall, r.recall.value},
          {MetricName::kNDCG, r.ndcg.value}};
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) fn(k);
    });
  }
  for (auto& t : workers) t.join();
}

struct Source {
  std::string strategy;  // empty for the full train set
  double percent = 100.0;
  std::optional<Dataset> train;
  std::string failure;
};

struct Cell {
  Cell(std::size_t s, std::size_t a) : source(s), algorithm(a) {}

  std::size_t source;
  std::size_t algorithm;
  std::optional<CellMetrics> metrics;
  json selected;
  std::string failure;
  bool cached = false;
};

json cell_json(const CellMetrics& m, const json& selected) {
  json metrics = json::object();
  for (const auto& [name, value] : m) metrics[std::string(to_string(name))] = value;
  return {{"metrics", metrics}, {"selected", selected}};
}

std::optional<std::pair<CellMetrics, json>> read_cache(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json j = json::parse(in);
    CellMetrics m;
    for (const auto& [name, value] : j.at("metrics").items()) {
      m[parse_metric_name(name)] = value.get<double>();
    }
    return std::make_pair(std::move(m), j.at("selected"));
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

void write_cache(const std::filesystem::path& path, const json& j) {
  // Write-then-rename keeps concurrent readers from seeing partial files.
  auto tmp = path;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp);
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

json leaderboard_json(const Leaderboard& b) {
  return {{"scenario", to_string(b.scenario)},
          {"metric", to_string(b.metric)},
          {"algorithms", b.algorithms},
          {"values", b.values},
          {"ranks", b.ranks}};
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

TrainedModel train_and_select(const Dataset& train, const SplitBundle& split,
                              const AlgorithmSpec& algorithm, std::uint64_t seed,
                              int validate_every, int ndcg_k) {
  const ValidationSet validation(split);
  return select(train, validation, algorithm, seed, validate_every, ndcg_k);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto started = std::chrono::system_clock::now();
  const auto clock_start = std::chrono::steady_clock::now();
  if (!options.cache_dir.empty()) std::filesystem::create_directories(options.cache_dir);

  std::vector<StrategyId> strategies;
  for (const auto& name : config.strategies) strategies.push_back(parse_strategy(name));
  const PsiGrid grid{config.scenarios, config.percents};

  ExperimentResult result;
  json datasets_json = json::array();
  json input_hashes = json::object();
  std::size_t cache_hits = 0, cache_misses = 0;
  std::mutex failure_mutex;
  // psi_values[strategy][dataset] -> per-seed values
  std::map<std::string, std::map<std::string, std::vector<double>>> psi_values;
  std::map<std::pair<std::string, double>, std::vector<double>> tau_percent;
  std::map<std::tuple<std::string, Scenario, MetricName>, std::vector<double>> tau_metric;

  for (const auto& spec : config.datasets) {
    Dataset raw;
    json dataset_key = dataset_to_json(spec);
    if (spec.synthetic) {
      raw = generate_synthetic(*spec.synthetic);
    } else {
      const std::string digest = sha256_file(spec.csv);
      input_hashes[spec.name] = digest;
      dataset_key["sha256"] = digest;
      dataset_key.erase("csv");  // content, not location, identifies the data
      raw = ingest_csv(spec.csv, spec.schema);
    }
    const Dataset data = filter_min_interactions(raw, spec.min_interactions);
    json dj{{"name", spec.name},
            {"users", data.num_users()},
            {"items", data.num_items()},
            {"interactions", data.size()},
            {"replicates", json::array()}};

    for (std::uint64_t seed : config.seeds) {
      LeaderboardSet boards;
      json rj{{"seed", seed}, {"scenarios", json::object()}};
      for (Scenario scenario : config.scenarios) {
        const std::string where_prefix =
            spec.name + "/seed " + std::to_string(seed) + "/" + std::string(to_string(scenario));
        const SplitBundle split = split_for_scenario(data, scenario, derive_seed(seed, "split"));
        const ValidationSet validation(split);
        const RankingContext test = RankingContext::for_test(split);

        std::vector<std::size_t> algorithms;
        for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
          // PopRec predicts no ratings.
          if (scenario == Scenario::kExplicit && config.algorithms[a].kind == ModelKind::kPopRec) {
            continue;
          }
          algorithms.push_back(a);
        }

        std::vector<Source> sources;
        sources.push_back(Source{});
        StrategyRunner runner(split.train, scenario, config.svp,
                              derive_seed(seed, std::string("proxy/") + std::string(to_string(scenario))));
        std::vector<std::string> prepare_failure(strategies.size());
        for (std::size_t s = 0; s < strategies.size(); ++s) {
          try {
            runner.prepare({strategies[s]});
          } catch (const std::exception& e) {
            prepare_failure[s] = e.what();
          }
          for (double p : config.percents) {
            Source src;
            src.strategy = strategies[s].name();
            src.percent = p;
            src.failure = prepare_failure[s];
            sources.push_back(std::move(src));
          }
        }
        parallel_for(sources.size() - 1, options.jobs, [&](std::size_t k) {
          Source& src = sources[k + 1];
          if (!src.failure.empty()) return;
          const StrategyId id = parse_strategy(src.strategy);
          std::ostringstream label;
          label << src.strategy << '/' << src.percent;
          SampleSpec sample_spec{src.percent, derive_seed(seed, label.str()), config.sampler};
          try {
            src.train = runner.sample(id, sample_spec).retained;
          } catch (const std::exception& e) {
            src.failure = e.what();
          }
        });

        std::vector<Cell> cells;
        for (std::size_t s = 0; s < sources.size(); ++s) {
          for (std::size_t a : algorithms) cells.emplace_back(s, a);
        }
        std::atomic<std::size_t> hits{0}, misses{0};
        parallel_for(cells.size(), options.jobs, [&](std::size_t k) {
          Cell& cell = cells[k];
          const Source& src = sources[cell.source];
          const AlgorithmSpec& alg = config.algorithms[cell.algorithm];
          if (!src.failure.empty()) {
            cell.failure = src.failure;
            return;
          }
          std::filesystem::path cache_path;
          if (!options.cache_dir.empty()) {
            json key{{"format", 1},
                     {"dataset", dataset_key},
                     {"scenario", to_string(scenario)},
                     {"strategy", src.strategy.empty() ? "full" : src.strategy},
                     {"percent", src.percent},
                     {"seed", seed},
                     {"algorithm", algorithm_to_json(alg)},
                     {"sampler", sampler_to_json(config.sampler)},
                     {"svp", svp_to_json(config.svp)},
                     {"validate_every", config.validate_every},
                     {"recall_k", config.recall_k},
                     {"ndcg_k", config.ndcg_k}};
            cache_path = options.cache_dir / (sha256_hex(key.dump()) + ".json");
            if (auto hit = read_cache(cache_path)) {
              cell.metrics = std::move(hit->first);
              cell.selected = std::move(hit->second);
              cell.cached = true;
              ++hits;
              return;
            }
            ++misses;
          }
          try {
            const Dataset& train = src.train ? *src.train : split.train;
            const std::uint64_t train_seed =
                derive_seed(seed, "train/" + std::string(to_string(scenario)) + "/" + alg.name);
            TrainedModel trained =
                select(train, validation, alg, train_seed, config.validate_every, config.ndcg_k);
            cell.metrics = evaluate_test(*trained.model, split, test, config);
            cell.selected = {{"latent_size", trained.config.latent_size},
                             {"learning_rate", trained.config.learning_rate},
                             {"dropout", trained.config.dropout},
                             {"epoch", trained.epoch},
                             {"validation", trained.validation}};
            if (alg.kind == ModelKind::kPopRec) cell.selected = {{"validation", trained.validation}};
            if (!cache_path.empty()) write_cache(cache_path, cell_json(*cell.metrics, cell.selected));
          } catch (const std::exception& e) {
            cell.failure = e.what();
          }
        });
        cache_hits += hits;
        cache_misses += misses;

        // Assemble leaderboards; any failed algorithm voids the whole board.
        json sj{{"train", split.train.size()},
                {"validation", split.validation.size()},
                {"test", split.test.size()},
                {"cells", json::array()}};
        for (std::size_t s = 0; s < sources.size(); ++s) {
          const Source& src = sources[s];
          std::vector<std::string> names;
          std::map<MetricName, std::vector<double>> values;
          bool complete = true;
          for (const Cell& cell : cells) {
            if (cell.source != s) continue;
            const AlgorithmSpec& alg = config.algorithms[cell.algorithm];
            json cj{{"strategy", src.strategy.empty() ? "full" : src.strategy},
                    {"percent", src.percent},
                    {"algorithm", alg.name}};
            if (!cell.metrics) {
              complete = false;
              cj["failure"] = cell.failure;
              std::lock_guard lock(failure_mutex);
              std::ostringstream where;
              where << where_prefix << '/' << cj["strategy"].get<std::string>() << '/'
                    << src.percent << "%/" << alg.name;
              result.failures.push_back({where.str(), cell.failure});
            } else {
              names.push_back(alg.name);
              for (const auto& [m, v] : *cell.metrics) values[m].push_back(v);
              cj.update(cell_json(*cell.metrics, cell.selected));
            }
            sj["cells"].push_back(std::move(cj));
          }
          if (!complete || names.size() < 2) continue;
          for (MetricName m : scenario_metrics(scenario)) {
            Leaderboard board = make_leaderboard(scenario, m, names, values[m]);
            if (src.strategy.empty()) {
              boards.full[{scenario, m}] = std::move(board);
            } else {
              boards.sampled[src.strategy][CellKey{scenario, m, src.percent}] = std::move(board);
            }
          }
        }
        rj["scenarios"][std::string(to_string(scenario))] = std::move(sj);
      }

      json leaderboards{{"full", json::array()}, {"sampled", json::array()}};
      for (const auto& [key, board] : boards.full) {
        leaderboards["full"].push_back(leaderboard_json(board));
      }
      for (const auto& [strategy, cells] : boards.sampled) {
        for (const auto& [key, board] : cells) {
          json bj = leaderboard_json(board);
          bj["strategy"] = strategy;
          bj["percent"] = key.percent;
          auto full = boards.full.find({key.scenario, key.metric});
          if (full != boards.full.end()) {
            const double tau = leaderboard_tau(full->second, board);
            bj["tau"] = tau;
            tau_percent[{strategy, key.percent}].push_back(tau);
            tau_metric[{strategy, key.scenario, key.metric}].push_back(tau);
          }
          leaderboards["sampled"].push_back(std::move(bj));
        }
      }
      rj["leaderboards"] = std::move(leaderboards);
      json psi_json = json::object();
      for (const auto& name : config.strategies) {
        try {
          const PsiResult psi = compute_psi(boards, name, grid, true);
          psi_json[name] = {{"psi", psi.psi},
                            {"cells", psi.taus.size()},
                            {"expected_cells", psi.expected_cells},
                            {"partial", psi.partial}};
          if (psi.partial) result.partial = true;
          psi_values[name][spec.name].push_back(psi.psi);
        } catch (const Error& e) {
          psi_json[name] = {{"psi", nullptr}, {"error", e.what()}};
          result.partial = true;
        }
      }
      rj["psi"] = std::move(psi_json);
      dj["replicates"].push_back(std::move(rj));
      result.boards.push_back(std::move(boards));
    }
    datasets_json.push_back(std::move(dj));
  }
  if (!result.failures.empty()) result.partial = true;

  json psi = json::object();
  for (const auto& name : config.strategies) {
    json per_dataset = json::object();
    std::vector<double> dataset_means;
    for (const auto& [dataset, values] : psi_values[name]) {
      const double m = mean_of(values);
      per_dataset[dataset] = m;
      dataset_means.push_back(m);
    }
    if (dataset_means.empty()) {
      psi[name] = {{"psi", nullptr}, {"per_dataset", per_dataset}};
      continue;
    }
    result.psi[name] = mean_of(dataset_means);
    psi[name] = {{"psi", result.psi[name]}, {"per_dataset", per_dataset}};
  }

  json by_percent = json::array();
  for (const auto& [key, values] : tau_percent) {
    by_percent.push_back({{"strategy", key.first}, {"percent", key.second}, {"tau", mean_of(values)}});
  }
  json by_metric = json::array();
  for (const auto& [key, values] : tau_metric) {
    by_metric.push_back({{"strategy", std::get<0>(key)},
                         {"scenario", to_string(std::get<1>(key))},
                         {"metric", to_string(std::get<2>(key))},
                         {"tau", mean_of(values)}});
  }
  json p_mle = json::array();
  for (const auto& alg : config.algorithms) {
    for (Scenario f : config.scenarios) {
      for (double p : config.percents) {
        try {
          const double v = compute_p_mle(result.boards, alg.name, f, p);
          p_mle.push_back({{"algorithm", alg.name}, {"scenario", to_string(f)}, {"percent", p}, {"p_mle", v}});
        } catch (const PreconditionError&) {
          // Not ranked in this scenario (PopRec under explicit feedback).
        }
      }
    }
  }
  json failures = json::array();
  std::sort(result.failures.begin(), result.failures.end(),
            [](const CellFailure& a, const CellFailure& b) { return a.where < b.where; });
  for (const auto& f : result.failures) failures.push_back({{"cell", f.where}, {"error", f.message}});

  result.report = {{"version", kVersion},
                   {"config_hash", config.hash()},
                   {"config", config.to_json()},
                   {"datasets", std::move(datasets_json)},
                   {"psi", std::move(psi)},
                   {"tau_by_percent", std::move(by_percent)},
                   {"tau_by_metric", std::move(by_metric)},
                   {"p_mle", std::move(p_mle)},
                   {"failures", std::move(failures)},
                   {"partial", result.partial}};
  const auto finished = std::chrono::system_clock::now();
  result.provenance = {
      {"version", kVersion},
      {"config_hash", config.hash()},
      {"seeds", config.seeds},
      {"input_sha256", input_hashes},
      {"started", iso_time(started)},
      {"finished", iso_time(finished)},
      {"elapsed_seconds",
       std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count()},
      {"jobs", options.jobs},
      {"cache_dir", options.cache_dir.string()},
      {"cache_hits", cache_hits},
      {"cache_misses", cache_misses}};
  return result;
}

void write_experiment_artifacts(const ExperimentResult& result,
                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [&](const char* name) {
    std::ofstream out(out_dir / name);
    if (!out) throw Error("evaluation", "cannot write " + (out_dir / name).string());
    return out;
  };
  open("report.json") << result.report.dump(2) << '\n';
  open("provenance.json") << result.provenance.dump(2) << '\n';
  write_plot_csvs(result.report, out_dir);
}

void write_plot_csvs(const json& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [&](const char* name) {
    std::ofstream out(out_dir / name);
    if (!out) throw Error("evaluation", "cannot write " + (out_dir / name).string());
    return out;
  };

  auto number = [](const json& v) { return v.dump(); };
  {
    auto out = open("tau_vs_percent.csv");
    out << "strategy,percent,tau\n";
    for (const auto& row : report.at("tau_by_percent")) {
      out << row["strategy"].get<std::string>() << ',' << number(row["percent"]) << ','
          << number(row["tau"]) << '\n';
    }
  }
  {
    auto out = open("tau_by_metric.csv");
    out << "strategy,scenario,metric,tau\n";
    for (const auto& row : report.at("tau_by_metric")) {
      out << row["strategy"].get<std::string>() << ',' << row["scenario"].get<std::string>()
          << ',' << row["metric"].get<std::string>() << ',' << number(row["tau"]) << '\n';
    }
  }
  {
    auto out = open("p_mle.csv");
    out << "algorithm,scenario,percent,p_mle\n";
    for (const auto& row : report.at("p_mle")) {
      out << row["algorithm"].get<std::string>() << ',' << row["scenario"].get<std::string>()
          << ',' << number(row["percent"]) << ',' << number(row["p_mle"]) << '\n';
    }
  }
  {
    auto out = open("psi.csv");
    out << "strategy,dataset,psi\n";
    for (const auto& [strategy, entry] : report.at("psi").items()) {
      for (const auto& [dataset, value] : entry["per_dataset"].items()) {
        out << strategy << ',' << dataset << ',' << number(value) << '\n';
      }
      out << strategy << ",all," << number(entry["psi"]) << '\n';
    }
  }
}

}  // namespace cfsample
