// Python bindings for the survkit core: dataset handling, the three survival
// models, the concordance metric, and the validation protocols.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "survkit/dataset.hpp"
#include "survkit/driver.hpp"
#include "survkit/errors.hpp"
#include "survkit/impute.hpp"
#include "survkit/metrics.hpp"
#include "survkit/synth.hpp"
#include "survkit/validation.hpp"

namespace py = pybind11;
using namespace survkit;

namespace {

SchemaConfig schema_from_kwargs(const std::string& time_column, const std::string& event_column,
                                const std::vector<std::string>& exclude_features,
                                const std::vector<std::string>& na_synonyms,
                                double missingness_threshold, bool keep_orphan_indicators) {
  SchemaConfig schema;
  schema.time_column = time_column;
  schema.event_column = event_column;
  schema.exclude_features = exclude_features;
  if (!na_synonyms.empty()) schema.na_synonyms = na_synonyms;
  schema.missingness_threshold = missingness_threshold;
  schema.keep_orphan_indicators = keep_orphan_indicators;
  return schema;
}

ModelSpec spec_from_kind(const std::string& kind, int n_trees) {
  ModelSpec spec;
  spec.kind = model_kind_from_name(kind);
  spec.n_trees = n_trees;
  return spec;
}

py::dict hyper_params_dict(const HyperParams& params) {
  py::dict d;
  if (const auto* c = std::get_if<CoxnetParams>(&params)) {
    d["alpha"] = c->alpha;
    d["lambda"] = c->lambda;
  } else if (const auto* r = std::get_if<RsfParams>(&params)) {
    d["mtry"] = r->mtry;
    d["min_node_size"] = r->min_node_size;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_survkit, m) {
  m.doc() = "Survival model comparison toolkit (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<FitError>(m, "FitError");
  py::register_exception<NoComparablePairsError>(m, "NoComparablePairsError");

  py::class_<ColumnMeta>(m, "ColumnMeta")
      .def_readonly("name", &ColumnMeta::name)
      .def_readonly("source", &ColumnMeta::source)
      .def_readonly("missing_fraction", &ColumnMeta::missing_fraction)
      .def_property_readonly("kind", [](const ColumnMeta& c) {
        return c.kind == ColumnKind::numeric ? "numeric" : "missing_indicator";
      });

  py::class_<SurvivalDataset>(m, "SurvivalDataset")
      .def_property_readonly("features",
                             [](const SurvivalDataset& ds) { return ds.features; })
      .def_property_readonly("times", [](const SurvivalDataset& ds) { return ds.times; })
      .def_property_readonly("events", [](const SurvivalDataset& ds) { return ds.events; })
      .def_property_readonly("columns", [](const SurvivalDataset& ds) { return ds.columns; })
      .def_property_readonly("column_names",
                             [](const SurvivalDataset& ds) {
                               std::vector<std::string> names;
                               for (const auto& c : ds.columns) names.push_back(c.name);
                               return names;
                             })
      .def("subset_rows", &SurvivalDataset::subset_rows)
      .def("__len__", [](const SurvivalDataset& ds) { return ds.n_rows(); });

  m.def(
      "make_dataset",
      [](const Eigen::MatrixXd& features, const Eigen::VectorXd& times,
         const Eigen::VectorXi& events, const std::vector<std::string>& column_names) {
        SurvivalDataset ds;
        ds.features = features;
        ds.times = times;
        ds.events = events;
        if (!column_names.empty()) {
          if (column_names.size() != static_cast<std::size_t>(features.cols())) {
            throw DataError("column_names length must match the feature column count");
          }
          for (const auto& n : column_names) {
            ds.columns.push_back(ColumnMeta{n, ColumnKind::numeric, "", 0.0});
          }
        } else {
          for (Eigen::Index j = 0; j < features.cols(); ++j) {
            ds.columns.push_back(
                ColumnMeta{"x" + std::to_string(j + 1), ColumnKind::numeric, "", 0.0});
          }
        }
        ds.refresh_missing_fractions();
        validate_dataset(ds);
        return ds;
      },
      py::arg("features"), py::arg("times"), py::arg("events"),
      py::arg("column_names") = std::vector<std::string>{});

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& time_column,
         const std::string& event_column, const std::vector<std::string>& exclude_features,
         const std::vector<std::string>& na_synonyms) {
        return load_csv(path, schema_from_kwargs(time_column, event_column, exclude_features,
                                                 na_synonyms, 0.51, false));
      },
      py::arg("path"), py::arg("time_column") = "time", py::arg("event_column") = "event",
      py::arg("exclude_features") = std::vector<std::string>{},
      py::arg("na_synonyms") = std::vector<std::string>{});

  m.def(
      "preprocess",
      [](const SurvivalDataset& ds, double missingness_threshold, bool keep_orphan_indicators,
         const std::vector<std::string>& na_synonyms) {
        const SchemaConfig schema = schema_from_kwargs(
            "time", "event", {}, na_synonyms, missingness_threshold, keep_orphan_indicators);
        PreprocessResult result = preprocess(ds, schema);
        return py::make_tuple(result.dataset, result.dropped_duplicates,
                              result.dropped_high_missingness);
      },
      py::arg("dataset"), py::arg("missingness_threshold") = 0.51,
      py::arg("keep_orphan_indicators") = false,
      py::arg("na_synonyms") = std::vector<std::string>{});

  m.def(
      "generate",
      [](int n, int p, const Eigen::VectorXd& beta_true, double weibull_shape,
         double weibull_scale, double censor_rate_target, double missing_rate,
         std::uint64_t seed) {
        SynthSpec spec;
        spec.n = n;
        spec.p = p;
        spec.beta_true = beta_true;
        spec.weibull_shape = weibull_shape;
        spec.weibull_scale = weibull_scale;
        spec.censor_rate_target = censor_rate_target;
        spec.missing_rate = missing_rate;
        spec.seed = seed;
        return generate(spec);
      },
      py::arg("n"), py::arg("p"), py::arg("beta_true"), py::arg("weibull_shape") = 1.5,
      py::arg("weibull_scale") = 1.0, py::arg("censor_rate_target") = 0.3,
      py::arg("missing_rate") = 0.0, py::arg("seed") = 0);

  py::class_<ConcordanceResult>(m, "ConcordanceResult")
      .def_readonly("cindex", &ConcordanceResult::cindex)
      .def_readonly("concordant", &ConcordanceResult::concordant)
      .def_readonly("discordant", &ConcordanceResult::discordant)
      .def_readonly("tied_risk", &ConcordanceResult::tied_risk)
      .def_readonly("comparable_pairs", &ConcordanceResult::comparable_pairs);

  m.def("concordance_index", &concordance_index, py::arg("times"), py::arg("events"),
        py::arg("risks"));
  m.def("concordance_oracle", &concordance_oracle, py::arg("times"), py::arg("events"),
        py::arg("risks"));

  py::class_<Standardizer>(m, "Standardizer")
      .def_readonly("mean", &Standardizer::mean)
      .def_readonly("sd", &Standardizer::sd);
  m.def("fit_standardizer", &fit_standardizer, py::arg("train"));
  m.def("apply_standardizer", &apply_standardizer, py::arg("standardizer"), py::arg("x"));

  py::class_<CoxModel>(m, "CoxModel")
      .def_readonly("beta", &CoxModel::beta)
      .def_readonly("log_partial_likelihood", &CoxModel::log_partial_likelihood)
      .def_readonly("n_iterations", &CoxModel::n_iterations)
      .def_readonly("converged", &CoxModel::converged)
      .def_readonly("dropped_columns", &CoxModel::dropped_columns)
      .def("predict_risk",
           [](const CoxModel& model, const Eigen::MatrixXd& x) { return predict_risk(model, x); });
  m.def(
      "fit_cox", [](const SurvivalDataset& train) { return fit_cox(train); }, py::arg("train"));

  py::class_<CoxnetModel>(m, "CoxnetModel")
      .def_readonly("beta", &CoxnetModel::beta)
      .def_readonly("alpha", &CoxnetModel::alpha)
      .def_property_readonly("lambda_", [](const CoxnetModel& mo) { return mo.lambda; })
      .def_readonly("n_nonzero", &CoxnetModel::n_nonzero)
      .def_readonly("converged", &CoxnetModel::converged)
      .def("predict_risk", [](const CoxnetModel& model, const Eigen::MatrixXd& x) {
        return predict_risk(model, x);
      });
  m.def(
      "fit_coxnet",
      [](const SurvivalDataset& train, double alpha, double lambda) {
        return fit_coxnet(train, alpha, lambda);
      },
      py::arg("train"), py::arg("alpha"), py::arg("lambda"));
  m.def("coxnet_lambda_max", &coxnet_lambda_max, py::arg("train"));

  py::class_<Forest>(m, "Forest")
      .def_readonly("mtry", &Forest::mtry)
      .def_readonly("min_node_size", &Forest::min_node_size)
      .def_readonly("event_time_grid", &Forest::event_time_grid)
      .def_property_readonly("n_trees",
                             [](const Forest& f) { return f.trees.size(); })
      .def("predict_mortality", [](const Forest& forest, const Eigen::MatrixXd& x) {
        return predict_mortality(forest, x);
      });
  m.def(
      "fit_rsf",
      [](const SurvivalDataset& train, int mtry, int min_node_size, int n_trees,
         std::uint64_t seed, int n_threads) {
        return fit_rsf(train, mtry, min_node_size, n_trees, seed, n_threads);
      },
      py::arg("train"), py::arg("mtry"), py::arg("min_node_size"), py::arg("n_trees") = 500,
      py::arg("seed") = 0, py::arg("n_threads") = 1);

  py::class_<ImportanceRanking>(m, "ImportanceRanking")
      .def_readonly("oob_cindex", &ImportanceRanking::oob_cindex)
      .def_readonly("excluded_rows", &ImportanceRanking::excluded_rows)
      .def_property_readonly("entries", [](const ImportanceRanking& r) {
        std::vector<std::pair<std::string, double>> out;
        for (const auto& e : r.entries) out.emplace_back(e.column, e.score);
        return out;
      });
  m.def(
      "permutation_importance",
      [](const Forest& forest, const SurvivalDataset& data, int n_repeats, std::uint64_t seed) {
        return permutation_importance(forest, data, n_repeats, seed);
      },
      py::arg("forest"), py::arg("data"), py::arg("n_repeats") = 5, py::arg("seed") = 0);
  m.def("rsf_grid", &rsf_grid, py::arg("n_columns"));

  m.def(
      "stratified_split",
      [](const SurvivalDataset& ds, double train_fraction, std::uint64_t seed) {
        const SplitPair split = stratified_split(ds, train_fraction, seed);
        return py::make_tuple(split.train_indices, split.test_indices);
      },
      py::arg("dataset"), py::arg("train_fraction"), py::arg("seed"));
  m.def(
      "stratified_kfold",
      [](const SurvivalDataset& ds, int k, std::uint64_t seed) {
        std::vector<py::tuple> out;
        for (const auto& fold : stratified_kfold(ds, k, seed)) {
          out.push_back(py::make_tuple(fold.train_indices, fold.test_indices));
        }
        return out;
      },
      py::arg("dataset"), py::arg("k"), py::arg("seed"));

  py::class_<NCVReport>(m, "NCVReport")
      .def_readonly("mean_train", &NCVReport::mean_train)
      .def_readonly("mean_inner", &NCVReport::mean_inner)
      .def_readonly("mean_test", &NCVReport::mean_test)
      .def_property_readonly("folds", [](const NCVReport& r) {
        std::vector<py::dict> out;
        for (const auto& f : r.folds) {
          py::dict d;
          d["fold"] = f.fold;
          d["train_cindex"] = f.train_cindex;
          d["inner_cv_cindex"] = f.inner_cv_cindex;
          d["test_cindex"] = f.test_cindex;
          d["chosen_params"] = hyper_params_dict(f.chosen_params);
          d["failed"] = f.failed;
          out.push_back(std::move(d));
        }
        return out;
      });

  py::class_<MCReport>(m, "MCReport")
      .def_readonly("mean_train", &MCReport::mean_train)
      .def_readonly("sd_train", &MCReport::sd_train)
      .def_readonly("mean_cv", &MCReport::mean_cv)
      .def_readonly("sd_cv", &MCReport::sd_cv)
      .def_readonly("mean_test", &MCReport::mean_test)
      .def_readonly("sd_test", &MCReport::sd_test)
      .def_readonly("n_failed", &MCReport::n_failed)
      .def_property_readonly("experiments", [](const MCReport& r) {
        std::vector<py::dict> out;
        for (const auto& e : r.experiments) {
          py::dict d;
          d["experiment"] = e.experiment;
          d["seed"] = e.seed;
          d["train_cindex"] = e.train_cindex;
          d["cv_cindex"] = e.cv_cindex;
          d["test_cindex"] = e.test_cindex;
          d["chosen_params"] = hyper_params_dict(e.chosen_params);
          d["failed"] = e.failed;
          out.push_back(std::move(d));
        }
        return out;
      });

  m.def(
      "nested_cv",
      [](const std::string& model, const SurvivalDataset& dataset, int outer_k, int inner_k,
         std::uint64_t seed, int knn_k, int n_trees, int jobs) {
        PipelineOptions options;
        options.knn_k = knn_k;
        return nested_cv(spec_from_kind(model, n_trees), dataset, outer_k, inner_k, seed,
                         options, jobs);
      },
      py::arg("model"), py::arg("dataset"), py::arg("outer_k") = 3, py::arg("inner_k") = 5,
      py::arg("seed") = 0, py::arg("knn_k") = 5, py::arg("n_trees") = 500, py::arg("jobs") = 1);

  m.def(
      "monte_carlo",
      [](const std::string& model, const SurvivalDataset& dataset, int n_experiments,
         double train_fraction, int inner_k, std::uint64_t seed, int knn_k, int n_trees,
         int jobs) {
        PipelineOptions options;
        options.knn_k = knn_k;
        return monte_carlo(spec_from_kind(model, n_trees), dataset, n_experiments,
                           train_fraction, inner_k, seed, options, jobs);
      },
      py::arg("model"), py::arg("dataset"), py::arg("n_experiments") = 90,
      py::arg("train_fraction") = 2.0 / 3.0, py::arg("inner_k") = 5, py::arg("seed") = 0,
      py::arg("knn_k") = 5, py::arg("n_trees") = 500, py::arg("jobs") = 1);

  m.attr("__version__") = "0.1.0";
}
