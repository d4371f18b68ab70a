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

#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cfsample/checkpoint.hpp"
#include "cfsample/dataset.hpp"
#include "cfsample/error.hpp"
#include "cfsample/experiment.hpp"
#include "cfsample/hashing.hpp"
#include "cfsample/metrics.hpp"
#include "cfsample/strategy.hpp"
#include "cfsample/synthetic.hpp"
#include "cfsample/version.hpp"

namespace cfsample::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

struct CsvOptions {
  std::string columns = "user,item,rating,timestamp";
  char delimiter = ',';
  bool no_header = false;

  CsvSchema schema() const { return CsvSchema::from_columns(columns, delimiter, !no_header); }
};

void add_csv_options(CLI::App* cmd, CsvOptions& o) {
  cmd->add_option("--columns", o.columns, "Column order, '_' skips a column")
      ->capture_default_str();
  cmd->add_option("--delimiter", o.delimiter, "Field delimiter")->capture_default_str();
  cmd->add_flag("--no-header", o.no_header, "Input has no header row");
}

// Everything a command needs to leave behind a reproducible record.
class Run {
 public:
  Run(std::string command, std::vector<std::string> args)
      : command_(std::move(command)), args_(std::move(args)), started_(utc_now()) {}

  Dataset ingest(const fs::path& path, const CsvSchema& schema) {
    inputs_[path.string()] = sha256_file(path);
    return cfsample::ingest_csv(path, schema);
  }
  void input(const fs::path& path) { inputs_[path.string()] = sha256_file(path); }

  json config = json::object();
  json seeds = json::object();

  // Writes provenance.json next to the artifacts, which the caller has
  // already written into `dir`.
  void finish(const fs::path& dir, const std::vector<std::string>& outputs) const {
    json p{{"command", command_},
           {"argv", args_},
           {"version", kVersion},
           {"config", config},
           {"seeds", seeds},
           {"input_sha256", inputs_},
           {"outputs", outputs},
           {"started", started_},
           {"finished", utc_now()}};
    std::ofstream out(dir / "provenance.json");
    out << p.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::string started_;
  json inputs_ = json::object();
};

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cli", "cannot write " + path.string());
  return out;
}

SamplerParams parse_sampler_params(const std::vector<std::string>& pairs, json& record) {
  SamplerParams p;
  for (const auto& pair : pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ParameterError("cli", "--params expects key=value, got '" + pair + "'");
    const std::string key = pair.substr(0, eq);
    const std::string value = pair.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw ParameterError("cli", "--params " + key + " needs a number");
    }
    if (key == "restart_probability") {
      p.restart_probability = v;
    } else if (key == "burn_probability") {
      p.burn_probability = v;
    } else if (key == "damping") {
      p.damping = v;
    } else if (key == "tolerance") {
      p.tolerance = v;
    } else if (key == "max_iterations") {
      p.max_iterations = static_cast<int>(v);
    } else if (key == "stall_limit") {
      p.stall_limit = static_cast<std::size_t>(v);
    } else {
      throw ParameterError("cli", "unknown sampler parameter '" + key + "'");
    }
    record[key] = v;
  }
  return p;
}

json provenance_json(const SampleProvenance& p) {
  return {{"strategy", p.strategy}, {"seed", p.seed},           {"percent", p.percent},
          {"budget", p.budget},     {"converged", p.converged}, {"iterations", p.iterations}};
}

// Maps `d` onto the checkpoint's index space by raw id; rows with ids the
// model never saw are dropped and counted.
Dataset remap(const Dataset& d, const std::shared_ptr<const IdMaps>& target, std::size_t& dropped) {
  std::vector<Interaction> rows;
  for (const auto& x : d.interactions()) {
    auto u = target->users.find(d.ids().users.raw(x.user));
    auto i = target->items.find(d.ids().items.raw(x.item));
    if (!u || !i) {
      ++dropped;
      continue;
    }
    rows.push_back(Interaction{*u, *i, x.rating, x.timestamp});
  }
  return Dataset(std::move(rows), target);
}

void write_importance(const fs::path& path, const Dataset& train, const ImportanceTable& table,
                      const std::optional<PropensityModel>& propensity) {
  auto out = open_output(path);
  out << std::setprecision(17);
  if (table.granularity == Granularity::kInteraction) {
    out << "user,item,importance,propensity\n";
    for (std::size_t k = 0; k < train.size(); ++k) {
      const auto& x = train[k];
      out << train.ids().users.raw(x.user) << ',' << train.ids().items.raw(x.item) << ','
          << table.interaction[k] << ',' << table.propensity[k] << '\n';
    }
    return;
  }
  out << "user,importance,propensity\n";
  for (UserId u = 0; u < train.num_users(); ++u) {
    if (train.history(u).empty()) continue;
    out << train.ids().users.raw(u) << ',' << table.user[u] << ','
        << (propensity ? propensity->user(u) : 1.0) << '\n';
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subsample collaborative-filtering datasets and measure leaderboard fidelity",
               "cfsample"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load, filter and split an interaction CSV");
  fs::path ingest_input, ingest_out;
  CsvOptions ingest_csv_opts;
  std::size_t min_interactions = 3;
  std::string ingest_scenario;
  std::uint64_t ingest_seed = 0;
  ingest->add_option("--input", ingest_input, "Interaction CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", ingest_out, "Output directory")->required();
  add_csv_options(ingest, ingest_csv_opts);
  ingest->add_option("--min-interactions", min_interactions, "Drop users with fewer interactions")
      ->capture_default_str()->check(CLI::PositiveNumber);
  ingest->add_option("--scenario", ingest_scenario, "Also split for this scenario")
      ->check(CLI::IsMember({"explicit", "implicit", "sequential"}));
  ingest->add_option("--seed", ingest_seed, "Split seed")->capture_default_str();

  // sample
  auto* sample = app.add_subcommand("sample", "Subsample a train set under one strategy");
  fs::path sample_input, sample_out;
  CsvOptions sample_csv_opts;
  std::string strategy_name, sample_scenario = "implicit";
  double sample_percent = 0.0;
  std::uint64_t sample_seed = 0;
  std::vector<std::string> sample_params;
  sample->add_option("--input", sample_input, "Train CSV")->required()->check(CLI::ExistingFile);
  sample->add_option("--out", sample_out, "Output directory")->required();
  add_csv_options(sample, sample_csv_opts);
  sample->add_option("--strategy", strategy_name, "Sampling strategy")->required();
  sample->add_option("--percent", sample_percent, "Percent of interactions to keep")
      ->required()->check(CLI::Range(0.0, 100.0));
  sample->add_option("--seed", sample_seed, "Root seed")->capture_default_str();
  sample->add_option("--params", sample_params, "Sampler parameters as key=value");
  sample->add_option("--scenario", sample_scenario, "Scenario of proxy-based strategies")
      ->capture_default_str()->check(CLI::IsMember({"explicit", "implicit", "sequential"}));

  // svp
  auto* svp = app.add_subcommand("svp", "Score importance with a proxy model and subsample");
  fs::path svp_input, svp_out;
  CsvOptions svp_csv_opts;
  std::string proxy_name = "mf", granularity_name = "interaction", prop = "off",
              svp_scenario = "implicit";
  PropensityParams svp_propensity;
  ProxyConfig proxy_config;
  double svp_percent = 0.0, smoothing = 1.0;
  std::uint64_t svp_seed = 0;
  svp->add_option("--input", svp_input, "Train CSV")->required()->check(CLI::ExistingFile);
  svp->add_option("--out", svp_out, "Output directory")->required();
  add_csv_options(svp, svp_csv_opts);
  svp->add_option("--proxy", proxy_name, "Proxy model")->capture_default_str()
      ->check(CLI::IsMember({"bias-only", "mf"}));
  svp->add_option("--granularity", granularity_name, "Selection unit")->capture_default_str()
      ->check(CLI::IsMember({"interaction", "user"}));
  svp->add_option("--prop", prop, "Propensity correction")->capture_default_str()
      ->check(CLI::IsMember({"on", "off"}));
  svp->add_option("--A", svp_propensity.a, "Propensity exponent")->capture_default_str();
  svp->add_option("--B", svp_propensity.b, "Propensity offset")->capture_default_str();
  svp->add_option("--epochs", proxy_config.train.epochs, "Proxy epochs")->capture_default_str()
      ->check(CLI::PositiveNumber);
  svp->add_option("--n-neg", proxy_config.scoring_negatives, "Scoring negatives per positive")
      ->capture_default_str()->check(CLI::PositiveNumber);
  svp->add_option("--latent", proxy_config.train.latent_size, "Proxy latent size")
      ->capture_default_str();
  svp->add_option("--lr", proxy_config.train.learning_rate, "Proxy learning rate")
      ->capture_default_str();
  svp->add_option("--smoothing", smoothing, "Smoothing of the ranking importance")
      ->capture_default_str();
  svp->add_option("--scenario", svp_scenario, "Feedback scenario")->capture_default_str()
      ->check(CLI::IsMember({"explicit", "implicit", "sequential"}));
  svp->add_option("--percent", svp_percent, "Also emit a sample of this percent")
      ->check(CLI::Range(0.0, 100.0));
  svp->add_option("--seed", svp_seed, "Root seed")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Train one model and save a checkpoint");
  fs::path train_input, train_out;
  CsvOptions train_csv_opts;
  std::string model_name = "mf", train_scenario = "implicit";
  TrainConfig train_config;
  train->add_option("--input", train_input, "Train CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "Output directory")->required();
  add_csv_options(train, train_csv_opts);
  train->add_option("--model", model_name, "Model")->capture_default_str()
      ->check(CLI::IsMember({"poprec", "bias-only", "bias", "mf", "neumf"}));
  train->add_option("--scenario", train_scenario, "Feedback scenario")->capture_default_str()
      ->check(CLI::IsMember({"explicit", "implicit", "sequential"}));
  train->add_option("--latent", train_config.latent_size, "Latent size")->capture_default_str();
  train->add_option("--lr", train_config.learning_rate, "Learning rate")->capture_default_str();
  train->add_option("--dropout", train_config.dropout, "NeuMF hidden dropout")
      ->capture_default_str();
  train->add_option("--l2", train_config.l2_reg, "L2 regularization")->capture_default_str();
  train->add_option("--epochs", train_config.epochs, "Epochs")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  train->add_option("--n-neg", train_config.n_neg, "BPR negatives per positive")
      ->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--seed", train_config.seed, "Seed")->capture_default_str();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint on a test split");
  fs::path eval_checkpoint, eval_train, eval_validation, eval_test, eval_out;
  CsvOptions eval_csv_opts;
  std::string eval_scenario = "implicit";
  int recall_k = 100, ndcg_k = 10;
  evaluate->add_option("--checkpoint", eval_checkpoint, "Checkpoint JSON")->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--test", eval_test, "Test CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--train", eval_train, "Train CSV, excluded from candidates")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--validation", eval_validation, "Validation CSV, excluded from candidates")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", eval_out, "Output directory")->required();
  add_csv_options(evaluate, eval_csv_opts);
  evaluate->add_option("--scenario", eval_scenario, "Feedback scenario")->capture_default_str()
      ->check(CLI::IsMember({"explicit", "implicit", "sequential"}));
  evaluate->add_option("--recall-k", recall_k, "Recall cutoff")->capture_default_str()
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--ndcg-k", ndcg_k, "nDCG cutoff")->capture_default_str()
      ->check(CLI::PositiveNumber);

  // psi
  auto* psi = app.add_subcommand("psi", "Run an experiment grid and compute leaderboard fidelity");
  fs::path psi_config, psi_out, cache_dir;
  std::size_t jobs = 1;
  psi->add_option("--config", psi_config, "Experiment config (JSON)")->required()
      ->check(CLI::ExistingFile);
  psi->add_option("--out", psi_out, "Output directory")->required();
  psi->add_option("--jobs", jobs, "Parallel cells")->capture_default_str()
      ->check(CLI::PositiveNumber);
  psi->add_option("--cache-dir", cache_dir, "Cell cache directory");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic interaction log");
  SyntheticConfig synth_config;
  fs::path synth_out;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--users", synth_config.users)->capture_default_str();
  synth->add_option("--items", synth_config.items)->capture_default_str();
  synth->add_option("--interactions", synth_config.interactions)->capture_default_str();
  synth->add_option("--latent-dim", synth_config.latent_dim)->capture_default_str();
  synth->add_option("--popularity-exponent", synth_config.popularity_exponent)
      ->capture_default_str();
  synth->add_option("--affinity", synth_config.affinity)->capture_default_str();
  synth->add_option("--noise", synth_config.noise)->capture_default_str();
  synth->add_option("--activity-sigma", synth_config.activity_sigma)->capture_default_str();
  synth->add_flag("--mnar", synth_config.mnar, "Thin observations by propensity");
  synth->add_option("--seed", synth_config.seed)->capture_default_str();

  // report
  auto* report = app.add_subcommand("report", "Summarize a report JSON and write plot CSVs");
  fs::path report_input, report_out;
  report->add_option("--input", report_input, "report.json")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Output directory for plot CSVs");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ingest->parsed()) {
      Run run("ingest", args);
      const Dataset raw = run.ingest(ingest_input, ingest_csv_opts.schema());
      const Dataset data = filter_min_interactions(raw, min_interactions);
      run.config = {{"columns", ingest_csv_opts.columns},
                    {"min_interactions", min_interactions},
                    {"scenario", ingest_scenario}};
      std::optional<SplitBundle> split;
      if (!ingest_scenario.empty()) {
        split = split_for_scenario(data, parse_scenario(ingest_scenario), ingest_seed);
        run.seeds["split"] = ingest_seed;
      }
      fs::create_directories(ingest_out);
      std::vector<std::string> outputs{"interactions.csv", "users.csv", "items.csv"};
      export_csv(data, ingest_out / "interactions.csv");
      export_id_map(data.ids().users, ingest_out / "users.csv");
      export_id_map(data.ids().items, ingest_out / "items.csv");
      if (split) {
        export_csv(split->train, ingest_out / "train.csv");
        export_csv(split->validation, ingest_out / "validation.csv");
        export_csv(split->test, ingest_out / "test.csv");
        outputs.insert(outputs.end(), {"train.csv", "validation.csv", "test.csv"});
      }
      run.finish(ingest_out, outputs);
      out << "ingested " << raw.size() << " interactions; kept " << data.size() << " from "
          << data.num_users() << " users over " << data.num_items() << " items\n";
      return 0;
    }

    if (sample->parsed()) {
      Run run("sample", args);
      const Dataset data = run.ingest(sample_input, sample_csv_opts.schema());
      const StrategyId strategy = parse_strategy(strategy_name);
      const SamplerParams params = parse_sampler_params(sample_params, run.config["params"]);
      const Scenario scenario = parse_scenario(sample_scenario);
      run.config["strategy"] = strategy.name();
      run.config["percent"] = sample_percent;
      run.config["scenario"] = sample_scenario;
      StrategyRunner runner(data, scenario, SvpSettings{}, derive_seed(sample_seed, "proxy"));
      runner.prepare({strategy});
      const SampleSpec spec{sample_percent, derive_seed(sample_seed, "sample"), params};
      const SampleResult result = runner.sample(strategy, spec);
      run.seeds = {{"root", sample_seed}, {"sample", spec.seed}};
      run.config["sample"] = provenance_json(result.provenance);
      fs::create_directories(sample_out);
      export_csv(result.retained, sample_out / "sample.csv");
      run.finish(sample_out, {"sample.csv"});
      out << "kept " << result.retained.size() << " of " << data.size() << " interactions\n";
      return 0;
    }

    if (svp->parsed()) {
      Run run("svp", args);
      const Dataset data = run.ingest(svp_input, svp_csv_opts.schema());
      const Scenario scenario = parse_scenario(svp_scenario);
      const ModelKind proxy = parse_model_kind(proxy_name);
      const std::uint64_t proxy_seed = derive_seed(svp_seed, "proxy");
      const EpochTrace trace = train_proxy(data, proxy, scenario, proxy_config, proxy_seed);
      ImportanceTable table = scenario == Scenario::kExplicit
                                  ? importance_explicit(trace, data)
                                  : importance_implicit(trace, data, smoothing);
      std::optional<PropensityModel> propensity;
      if (prop == "on") {
        propensity.emplace(data, svp_propensity);
        table = importance_prop(table, *propensity, data);
      }
      table.granularity = parse_granularity(granularity_name);
      run.config = {{"proxy", proxy_name},
                    {"granularity", granularity_name},
                    {"prop", prop},
                    {"A", svp_propensity.a},
                    {"B", svp_propensity.b},
                    {"epochs", proxy_config.train.epochs},
                    {"n_neg", proxy_config.scoring_negatives},
                    {"latent", proxy_config.train.latent_size},
                    {"lr", proxy_config.train.learning_rate},
                    {"smoothing", smoothing},
                    {"scenario", svp_scenario}};
      run.seeds = {{"root", svp_seed}, {"proxy", proxy_seed}};
      std::optional<SampleResult> result;
      if (svp_percent > 0.0) {
        const SampleSpec spec{svp_percent, derive_seed(svp_seed, "sample"), {}};
        result = svp_sample(data, table, spec);
        run.seeds["sample"] = spec.seed;
        run.config["sample"] = provenance_json(result->provenance);
      }
      fs::create_directories(svp_out);
      write_importance(svp_out / "importance.csv", data, table, propensity);
      std::vector<std::string> outputs{"importance.csv"};
      if (result) {
        export_csv(result->retained, svp_out / "sample.csv");
        outputs.push_back("sample.csv");
      }
      run.finish(svp_out, outputs);
      out << "scored " << data.size() << " interactions";
      if (result) out << "; kept " << result->retained.size();
      out << '\n';
      return 0;
    }

    if (train->parsed()) {
      Run run("train", args);
      const Dataset data = run.ingest(train_input, train_csv_opts.schema());
      const ModelKind kind = parse_model_kind(model_name);
      const Scenario scenario = parse_scenario(train_scenario);
      Checkpoint checkpoint;
      if (kind == ModelKind::kPopRec) {
        checkpoint = make_checkpoint(PopularityModel::fit(data));
      } else if (scenario == Scenario::kExplicit) {
        checkpoint = make_checkpoint(train_explicit(data, kind, train_config), train_config);
      } else {
        checkpoint = make_checkpoint(train_bpr(data, kind, train_config), train_config);
      }
      for (UserId u = 0; u < data.num_users(); ++u) {
        checkpoint.user_ids.push_back(data.ids().users.raw(u));
      }
      for (ItemId i = 0; i < data.num_items(); ++i) {
        checkpoint.item_ids.push_back(data.ids().items.raw(i));
      }
      run.config = to_json(checkpoint).at("config");
      run.config["model"] = to_string(kind);
      run.config["scenario"] = train_scenario;
      run.seeds = {{"train", train_config.seed}};
      fs::create_directories(train_out);
      save_checkpoint(checkpoint, train_out / "checkpoint.json");
      run.finish(train_out, {"checkpoint.json"});
      out << "trained " << to_string(kind) << " on " << data.size() << " interactions\n";
      return 0;
    }

    if (evaluate->parsed()) {
      Run run("evaluate", args);
      run.input(eval_checkpoint);
      const Checkpoint checkpoint = load_checkpoint(eval_checkpoint);
      if (checkpoint.user_ids.empty() || checkpoint.item_ids.empty()) {
        throw PreconditionError("cli", "checkpoint has no id maps");
      }
      auto ids = std::make_shared<IdMaps>();
      for (const auto& raw : checkpoint.user_ids) ids->users.intern(raw);
      for (const auto& raw : checkpoint.item_ids) ids->items.intern(raw);
      const auto schema = eval_csv_opts.schema();
      std::size_t dropped = 0, ignored = 0;
      const Dataset test = remap(run.ingest(eval_test, schema), ids, dropped);
      if (test.empty()) throw EmptyDatasetError("no test interaction is known to the model");
      const auto model = make_scorer(checkpoint);
      const Scenario scenario = parse_scenario(eval_scenario);
      json metrics = json::array();
      auto add = [&](const MetricValue& m) {
        metrics.push_back({{"name", m.label()},
                           {"k", m.k},
                           {"value", m.value},
                           {"scenario", eval_scenario},
                           {"users", m.users},
                           {"skipped_users", m.skipped_users}});
      };
      if (scenario == Scenario::kExplicit) {
        add(mse(*model, test));
      } else {
        std::optional<Dataset> seen_train, seen_validation;
        if (!eval_train.empty()) seen_train = remap(run.ingest(eval_train, schema), ids, ignored);
        if (!eval_validation.empty()) {
          seen_validation = remap(run.ingest(eval_validation, schema), ids, ignored);
        }
        const Dataset none(std::vector<Interaction>{}, ids);
        const RankingContext ctx(test, {seen_train ? &*seen_train : &none,
                                        seen_validation ? &*seen_validation : &none});
        const auto r = evaluate_ranking(*model, ctx, recall_k, ndcg_k);
        add(r.auc);
        add(r.recall);
        add(r.ndcg);
      }
      run.config = {{"scenario", eval_scenario}, {"recall_k", recall_k}, {"ndcg_k", ndcg_k}};
      fs::create_directories(eval_out);
      open_output(eval_out / "metrics.json")
          << json{{"metrics", metrics}, {"dropped_test_rows", dropped}}.dump(2) << '\n';
      run.finish(eval_out, {"metrics.json"});
      for (const auto& m : metrics) {
        out << m["name"].get<std::string>() << ' ' << m["value"].dump() << '\n';
      }
      return 0;
    }

    if (psi->parsed()) {
      const ExperimentConfig config = ExperimentConfig::load(psi_config);
      const ExperimentResult result = run_experiment(config, RunOptions{jobs, cache_dir});
      write_experiment_artifacts(result, psi_out);
      for (const auto& [name, value] : result.psi) {
        out << std::left << std::setw(32) << name << ' ' << std::fixed << std::setprecision(4)
            << value << '\n';
      }
      if (result.partial) {
        err << "warning: " << result.failures.size() << " cell(s) failed; psi is partial\n";
      }
      return 0;
    }

    if (synth->parsed()) {
      Run run("synth", args);
      const Dataset data = generate_synthetic(synth_config);
      run.config = {{"users", synth_config.users},
                    {"items", synth_config.items},
                    {"interactions", synth_config.interactions},
                    {"latent_dim", synth_config.latent_dim},
                    {"popularity_exponent", synth_config.popularity_exponent},
                    {"affinity", synth_config.affinity},
                    {"noise", synth_config.noise},
                    {"activity_sigma", synth_config.activity_sigma},
                    {"mnar", synth_config.mnar}};
      run.seeds = {{"synthetic", synth_config.seed}};
      fs::create_directories(synth_out);
      export_csv(data, synth_out / "interactions.csv");
      run.finish(synth_out, {"interactions.csv"});
      out << "generated " << data.size() << " interactions\n";
      return 0;
    }

    if (report->parsed()) {
      std::ifstream in(report_input);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ParameterError("cli", report_input.string() + ": " + e.what());
      }
      if (!j.contains("psi") || !j.contains("tau_by_percent")) {
        throw ParameterError("cli", report_input.string() + " is not an experiment report");
      }
      out << "strategy,psi\n";
      for (const auto& [name, entry] : j.at("psi").items()) {
        out << name << ',' << entry.at("psi").dump() << '\n';
      }
      if (!report_out.empty()) write_plot_csvs(j, report_out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace cfsample::cli
