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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <sstream>

#include "cfsample/dataset.hpp"
#include "cfsample/error.hpp"
#include "cfsample/evaluation.hpp"
#include "cfsample/experiment.hpp"
#include "cfsample/graph.hpp"
#include "cfsample/metrics.hpp"
#include "cfsample/models.hpp"
#include "cfsample/strategy.hpp"
#include "cfsample/svp.hpp"
#include "cfsample/synthetic.hpp"
#include "cfsample/version.hpp"

namespace py = pybind11;
using namespace cfsample;

namespace {

// JSON crosses the boundary as text; the Python side parses it.
py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& obj) {
  return nlohmann::json::parse(
      py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

// A selected model and the grid point that produced it.
struct TrainedHandle {
  std::shared_ptr<Scorer> model;
  TrainConfig config;
  int epoch = 0;
  double validation = 0.0;
};

py::dict metrics_dict(const Scorer& model, const SplitBundle& split, int recall_k, int ndcg_k) {
  py::dict out;
  if (split.scenario == Scenario::kExplicit) {
    out["mse"] = mse(model, split.test).value;
    return out;
  }
  const auto r = evaluate_ranking(model, RankingContext::for_test(split), recall_k, ndcg_k);
  out["auc"] = r.auc.value;
  out["recall"] = r.recall.value;
  out["ndcg"] = r.ndcg.value;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sampling strategies and benchmark tooling for recommender datasets";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<Dataset>(m, "Dataset")
      .def_static(
          "from_csv",
          [](const std::filesystem::path& path, const std::string& columns, char delimiter,
             bool header) {
            return ingest_csv(path, CsvSchema::from_columns(columns, delimiter, header));
          },
          py::arg("path"), py::arg("columns") = "user,item,rating,timestamp",
          py::arg("delimiter") = ',', py::arg("header") = true)
      .def_static(
          "from_text",
          [](const std::string& text, const std::string& columns, char delimiter, bool header) {
            std::istringstream in(text);
            return ingest_csv(in, CsvSchema::from_columns(columns, delimiter, header), "<text>");
          },
          py::arg("text"), py::arg("columns") = "user,item,rating,timestamp",
          py::arg("delimiter") = ',', py::arg("header") = true)
      .def("__len__", &Dataset::size)
      .def_property_readonly("num_users", &Dataset::num_users)
      .def_property_readonly("num_items", &Dataset::num_items)
      .def("interactions",
           [](const Dataset& d) {
             py::list rows;
             for (const auto& x : d.interactions()) {
               rows.append(py::make_tuple(x.user, x.item, x.rating, x.timestamp));
             }
             return rows;
           })
      .def("raw_user", [](const Dataset& d, UserId u) { return d.ids().users.raw(u); })
      .def("raw_item", [](const Dataset& d, ItemId i) { return d.ids().items.raw(i); })
      .def("to_csv", [](const Dataset& d) {
        std::ostringstream out;
        export_csv(d, out);
        return out.str();
      });

  m.def("filter_min_interactions", &filter_min_interactions, py::arg("dataset"),
        py::arg("min_count") = 3);

  py::class_<SplitBundle>(m, "Split")
      .def_readonly("train", &SplitBundle::train)
      .def_readonly("validation", &SplitBundle::validation)
      .def_readonly("test", &SplitBundle::test)
      .def_property_readonly("scenario",
                             [](const SplitBundle& s) { return std::string(to_string(s.scenario)); });

  m.def(
      "split",
      [](const Dataset& d, const std::string& scenario, std::uint64_t seed) {
        return split_for_scenario(d, parse_scenario(scenario), seed);
      },
      py::arg("dataset"), py::arg("scenario"), py::arg("seed") = 0,
      "Random 80/10/10 per user for explicit/implicit, leave-one-last for sequential.");

  m.def(
      "synthetic",
      [](std::size_t users, std::size_t items, std::size_t interactions, double affinity,
         bool mnar, std::uint64_t seed) {
        SyntheticConfig c;
        c.users = users;
        c.items = items;
        c.interactions = interactions;
        c.affinity = affinity;
        c.mnar = mnar;
        c.seed = seed;
        return generate_synthetic(c);
      },
      py::arg("users") = 2000, py::arg("items") = 500, py::arg("interactions") = 20000,
      py::arg("affinity") = 1.0, py::arg("mnar") = false, py::arg("seed") = 0);

  m.def("strategies", [] {
    std::vector<std::string> names;
    for (const auto& id : all_strategies()) names.push_back(id.name());
    return names;
  });

  m.def(
      "sample",
      [](const Dataset& train, const std::string& strategy, double percent, std::uint64_t seed,
         const std::string& scenario, std::uint64_t proxy_seed) {
        const StrategyId id = parse_strategy(strategy);
        StrategyRunner runner(train, parse_scenario(scenario), SvpSettings{}, proxy_seed);
        runner.prepare({id});
        SampleSpec spec;
        spec.percent = percent;
        spec.seed = seed;
        SampleResult result;
        {
          py::gil_scoped_release release;
          result = runner.sample(id, spec);
        }
        return py::make_tuple(result.retained, result.kept);
      },
      py::arg("train"), py::arg("strategy"), py::arg("percent"), py::arg("seed") = 0,
      py::arg("scenario") = "implicit", py::arg("proxy_seed") = 0,
      "Returns (sampled dataset, sorted kept train indices).");

  m.def("kendall_tau", [](const std::vector<double>& a, const std::vector<double>& b) {
    return kendall_tau(a, b);
  });

  m.def(
      "sigmoid_propensity",
      [](double count, std::size_t population, double a, double b) {
        return sigmoid_propensity(count, population, {a, b});
      },
      py::arg("count"), py::arg("population"), py::arg("a") = 0.55, py::arg("b") = 1.5);

  m.def(
      "pagerank",
      [](const Dataset& d, double damping, double tolerance, int max_iterations) {
        const auto r = pagerank(BipartiteGraph(d), {damping, tolerance, max_iterations});
        return py::make_tuple(r.scores, r.iterations, r.converged);
      },
      py::arg("dataset"), py::arg("damping") = 0.85, py::arg("tolerance") = 1e-8,
      py::arg("max_iterations") = 100,
      "Scores over users then items, the iteration count and convergence.");

  py::class_<TrainedHandle>(m, "Model")
      .def("score", [](const TrainedHandle& h, UserId u, ItemId i) { return h.model->score(u, i); })
      .def_property_readonly("latent_size",
                             [](const TrainedHandle& h) { return h.config.latent_size; })
      .def_property_readonly("learning_rate",
                             [](const TrainedHandle& h) { return h.config.learning_rate; })
      .def_readonly("epoch", &TrainedHandle::epoch)
      .def_readonly("validation", &TrainedHandle::validation);

  m.def(
      "train",
      [](const Dataset& train, const SplitBundle& split, const std::string& model,
         std::vector<int> latent_sizes, std::vector<double> learning_rates, int epochs,
         std::uint64_t seed) {
        AlgorithmSpec spec;
        spec.name = model;
        spec.kind = parse_model_kind(model);
        spec.latent_sizes = std::move(latent_sizes);
        spec.learning_rates = std::move(learning_rates);
        spec.epochs = epochs;
        py::gil_scoped_release release;
        auto t = train_and_select(train, split, spec, seed, 0);
        return TrainedHandle{std::move(t.model), t.config, t.epoch, t.validation};
      },
      py::arg("train"), py::arg("split"), py::arg("model") = "mf",
      py::arg("latent_sizes") = std::vector<int>{8},
      py::arg("learning_rates") = std::vector<double>{0.02}, py::arg("epochs") = 10,
      py::arg("seed") = 0,
      "Grid-trains on `train` and selects on the split's validation set.");

  m.def(
      "evaluate",
      [](const TrainedHandle& h, const SplitBundle& split, int recall_k, int ndcg_k) {
        return metrics_dict(*h.model, split, recall_k, ndcg_k);
      },
      py::arg("model"), py::arg("split"), py::arg("recall_k") = 100, py::arg("ndcg_k") = 10);

  m.def(
      "run_experiment",
      [](const py::object& config, std::size_t jobs) {
        const auto parsed = ExperimentConfig::from_json(from_python(config));
        ExperimentResult result;
        {
          py::gil_scoped_release release;
          result = run_experiment(parsed, RunOptions{jobs, {}});
        }
        return to_python(result.report);
      },
      py::arg("config"), py::arg("jobs") = 1,
      "Runs a leaderboard-preservation experiment and returns its report.");
}
