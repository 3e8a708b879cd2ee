#include "survkit/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "survkit/dataset.hpp"
#include "survkit/errors.hpp"
#include "survkit/metrics.hpp"
#include "survkit/parallel.hpp"
#include "survkit/random.hpp"

namespace survkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_param_double(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::cox:
      return "cox";
    case ModelKind::coxnet:
      return "coxnet";
    case ModelKind::rsf:
      return "rsf";
  }
  return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "cox") return ModelKind::cox;
  if (name == "coxnet") return ModelKind::coxnet;
  if (name == "rsf") return ModelKind::rsf;
  throw ConfigError("unknown model kind: " + name);
}

std::string params_to_string(const HyperParams& params) {
  if (std::holds_alternative<std::monostate>(params)) return "NA";
  if (const auto* c = std::get_if<CoxnetParams>(&params)) {
    return "alpha=" + format_param_double(c->alpha) + ";lambda=" + format_param_double(c->lambda);
  }
  const auto& r = std::get<RsfParams>(params);
  return "mtry=" + std::to_string(r.mtry) + ";min_node_size=" + std::to_string(r.min_node_size);
}

Eigen::VectorXd FittedPipeline::risks(const SurvivalDataset& rows) const {
  const Eigen::MatrixXd standardized = apply_standardizer(standardizer, rows.features);
  const Eigen::MatrixXd complete = knn_impute(standardized, imputer);
  switch (kind) {
    case ModelKind::cox:
      return predict_risk(cox, complete);
    case ModelKind::coxnet:
      return predict_risk(coxnet, complete);
    case ModelKind::rsf:
      return predict_mortality(forest, complete);
  }
  throw FitError("unreachable model kind");
}

namespace {

// Training rows standardized, imputed, and bundled back into a dataset ready
// for model fitting.
struct PreparedTrain {
  SurvivalDataset train;
  Standardizer standardizer;
  KnnImputer imputer;
  ImputeStats stats;
};

PreparedTrain prepare_train(const SurvivalDataset& train, int knn_k) {
  PreparedTrain out;
  out.standardizer = fit_standardizer(train.features);
  const Eigen::MatrixXd standardized = apply_standardizer(out.standardizer, train.features);
  out.imputer = make_knn_imputer(standardized, train.columns, knn_k, &out.standardizer);
  out.train = train;
  out.train.features = knn_impute(standardized, out.imputer, &out.stats);
  out.train.refresh_missing_fractions();
  return out;
}

struct ModelVariant {
  ModelKind kind = ModelKind::cox;
  CoxModel cox;
  CoxnetModel coxnet;
  Forest forest;
};

ModelVariant fit_model(const ModelSpec& spec, const HyperParams& params,
                       const SurvivalDataset& complete_train, std::uint64_t seed,
                       const Eigen::VectorXd* coxnet_warm = nullptr) {
  ModelVariant model;
  model.kind = spec.kind;
  switch (spec.kind) {
    case ModelKind::cox:
      model.cox = fit_cox(complete_train, spec.cox_options);
      break;
    case ModelKind::coxnet: {
      const auto& p = std::get<CoxnetParams>(params);
      model.coxnet =
          fit_coxnet(complete_train, p.alpha, p.lambda, spec.coxnet_options, coxnet_warm);
      break;
    }
    case ModelKind::rsf: {
      const auto& p = std::get<RsfParams>(params);
      model.forest =
          fit_rsf(complete_train, p.mtry, p.min_node_size, spec.n_trees, seed, /*n_threads=*/1);
      break;
    }
  }
  return model;
}

Eigen::VectorXd model_risks(const ModelVariant& model, const Eigen::MatrixXd& x) {
  switch (model.kind) {
    case ModelKind::cox:
      return predict_risk(model.cox, x);
    case ModelKind::coxnet:
      return predict_risk(model.coxnet, x);
    case ModelKind::rsf:
      return predict_mortality(model.forest, x);
  }
  throw FitError("unreachable model kind");
}

double cindex_of(const Eigen::VectorXd& risks, const SurvivalDataset& rows) {
  return concordance_index(rows.times, rows.events, risks).cindex;
}

std::vector<HyperParams> grid_combinations(const ModelSpec& spec, Eigen::Index n_columns) {
  std::vector<HyperParams> combos;
  if (spec.kind == ModelKind::coxnet) {
    for (const double a : spec.coxnet_grid.alphas) {
      for (const double l : spec.coxnet_grid.lambdas) {
        combos.emplace_back(CoxnetParams{a, l});
      }
    }
  } else if (spec.kind == ModelKind::rsf) {
    if (spec.rsf_grid_override) {
      for (const int m : spec.rsf_grid_override->mtry_values) {
        for (const int s : spec.rsf_grid_override->min_node_sizes) {
          combos.emplace_back(RsfParams{m, s});
        }
      }
    } else {
      for (const auto& [m, s] : rsf_grid(static_cast<int>(n_columns))) {
        combos.emplace_back(RsfParams{m, s});
      }
    }
  }
  return combos;
}

}  // namespace

FittedPipeline fit_pipeline(const ModelSpec& spec, const HyperParams& params,
                            const SurvivalDataset& train, const PipelineOptions& options,
                            std::uint64_t seed) {
  PreparedTrain prepared = prepare_train(train, options.knn_k);
  ModelVariant model = fit_model(spec, params, prepared.train, seed);
  FittedPipeline fitted;
  fitted.standardizer = std::move(prepared.standardizer);
  fitted.imputer = std::move(prepared.imputer);
  fitted.impute_stats = prepared.stats;
  fitted.kind = model.kind;
  fitted.cox = std::move(model.cox);
  fitted.coxnet = std::move(model.coxnet);
  fitted.forest = std::move(model.forest);
  return fitted;
}

double score_cindex(const FittedPipeline& fitted, const SurvivalDataset& rows) {
  return cindex_of(fitted.risks(rows), rows);
}

TuneResult tune(const ModelSpec& spec, const SurvivalDataset& train, int inner_k,
                std::uint64_t seed, const PipelineOptions& options) {
  TuneResult result;
  if (spec.kind == ModelKind::cox) {
    // The baseline is not tuned; reported as NA.
    result.best_params = std::monostate{};
    result.inner_cv_cindex = kNaN;
    return result;
  }
  if (inner_k < 2) throw DataError("tune requires inner_k >= 2");

  const std::vector<HyperParams> combos = grid_combinations(spec, train.n_cols());
  if (combos.empty()) throw DataError("tune requires a non-empty grid");

  std::vector<ComboResult> results(combos.size());
  for (std::size_t c = 0; c < combos.size(); ++c) {
    results[c].params = combos[c];
    results[c].fold_scores.assign(static_cast<std::size_t>(inner_k), kNaN);
  }

  const std::vector<SplitPair> folds =
      stratified_kfold(train, inner_k, derive_seed(seed, seed_stream::kTune));

  for (int f = 0; f < inner_k; ++f) {
    const SurvivalDataset fold_train = train.subset_rows(folds[static_cast<std::size_t>(f)].train_indices);
    const SurvivalDataset fold_test = train.subset_rows(folds[static_cast<std::size_t>(f)].test_indices);
    PreparedTrain prepared;
    Eigen::MatrixXd test_complete;
    try {
      prepared = prepare_train(fold_train, options.knn_k);
      const Eigen::MatrixXd test_standardized =
          apply_standardizer(prepared.standardizer, fold_test.features);
      test_complete = knn_impute(test_standardized, prepared.imputer);
    } catch (const std::runtime_error&) {
      for (auto& r : results) ++r.n_failed;
      continue;
    }

    if (spec.kind == ModelKind::coxnet) {
      // Warm starts run down each alpha's lambda path in descending order;
      // scores land in canonical grid slots (alphas outer, lambdas inner).
      const auto& grid = spec.coxnet_grid;
      const std::size_t n_lambdas = grid.lambdas.size();
      std::vector<std::size_t> lambda_order(n_lambdas);
      std::iota(lambda_order.begin(), lambda_order.end(), std::size_t{0});
      std::sort(lambda_order.begin(), lambda_order.end(), [&](std::size_t a, std::size_t b) {
        return grid.lambdas[a] > grid.lambdas[b];
      });
      for (std::size_t ai = 0; ai < grid.alphas.size(); ++ai) {
        Eigen::VectorXd warm = Eigen::VectorXd::Zero(prepared.train.n_cols());
        bool have_warm = false;
        for (const std::size_t li : lambda_order) {
          const std::size_t slot = ai * n_lambdas + li;
          try {
            const CoxnetModel model =
                fit_coxnet(prepared.train, grid.alphas[ai], grid.lambdas[li],
                           spec.coxnet_options, have_warm ? &warm : nullptr);
            warm = model.beta;
            have_warm = true;
            const Eigen::VectorXd risks = predict_risk(model, test_complete);
            results[slot].fold_scores[static_cast<std::size_t>(f)] =
                cindex_of(risks, fold_test);
          } catch (const std::runtime_error&) {
            ++results[slot].n_failed;
            have_warm = false;
          }
        }
      }
    } else {
      for (std::size_t c = 0; c < combos.size(); ++c) {
        try {
          const ModelVariant model =
              fit_model(spec, combos[c], prepared.train,
                        derive_seed(derive_seed(seed, static_cast<std::uint64_t>(f)),
                                    static_cast<std::uint64_t>(c)));
          const Eigen::VectorXd risks = model_risks(model, test_complete);
          results[c].fold_scores[static_cast<std::size_t>(f)] = cindex_of(risks, fold_test);
        } catch (const std::runtime_error&) {
          ++results[c].n_failed;
        }
      }
    }
  }

  // Mean over successful folds; a combination that never fitted scores -inf.
  std::size_t best = combos.size();
  for (std::size_t c = 0; c < combos.size(); ++c) {
    double sum = 0.0;
    int count = 0;
    for (const double s : results[c].fold_scores) {
      if (!std::isnan(s)) {
        sum += s;
        ++count;
      }
    }
    results[c].mean_cindex =
        count > 0 ? sum / count : -std::numeric_limits<double>::infinity();
    if (best == combos.size() ||
        results[c].mean_cindex > results[best].mean_cindex) {  // strict: earlier combo wins ties
      best = c;
    }
  }
  if (!std::isfinite(results[best].mean_cindex)) {
    throw FitError("every grid combination failed on every inner fold");
  }
  result.best_params = results[best].params;
  result.inner_cv_cindex = results[best].mean_cindex;
  result.all_results = std::move(results);
  return result;
}

namespace {

// Tune, refit on the full training partition, and score train + test.
struct EvaluationOutcome {
  HyperParams params;
  double train_cindex = kNaN;
  double inner_cv_cindex = kNaN;
  double test_cindex = kNaN;
};

EvaluationOutcome evaluate_partition(const ModelSpec& spec, const SurvivalDataset& full,
                                     const std::vector<int>& train_idx,
                                     const std::vector<int>& test_idx, int inner_k,
                                     std::uint64_t seed, const PipelineOptions& options) {
  const SurvivalDataset train = full.subset_rows(train_idx);
  const SurvivalDataset test = full.subset_rows(test_idx);

  EvaluationOutcome out;
  const TuneResult tuned = tune(spec, train, inner_k, seed, options);
  out.params = tuned.best_params;
  out.inner_cv_cindex = tuned.inner_cv_cindex;

  const FittedPipeline fitted = fit_pipeline(spec, tuned.best_params, train, options,
                                             derive_seed(seed, seed_stream::kRefit));
  out.train_cindex = score_cindex(fitted, train);
  out.test_cindex = score_cindex(fitted, test);
  return out;
}

double mean_ignoring_nan(const std::vector<double>& values) {
  double sum = 0.0;
  int count = 0;
  for (const double v : values) {
    if (!std::isnan(v)) {
      sum += v;
      ++count;
    }
  }
  return count > 0 ? sum / count : kNaN;
}

double sample_sd_ignoring_nan(const std::vector<double>& values) {
  const double mean = mean_ignoring_nan(values);
  if (std::isnan(mean)) return kNaN;
  double ss = 0.0;
  int count = 0;
  for (const double v : values) {
    if (!std::isnan(v)) {
      ss += (v - mean) * (v - mean);
      ++count;
    }
  }
  if (count < 2) return kNaN;
  return std::sqrt(ss / (count - 1));
}

}  // namespace

NCVReport nested_cv(const ModelSpec& spec, const SurvivalDataset& dataset, int outer_k,
                    int inner_k, std::uint64_t seed, const PipelineOptions& options, int jobs) {
  const std::vector<SplitPair> outer =
      stratified_kfold(dataset, outer_k, derive_seed(seed, seed_stream::kNestedCv));
  NCVReport report;
  report.folds.resize(static_cast<std::size_t>(outer_k));
  parallel_for(outer_k, jobs, [&](int f) {
    NCVFold& fold = report.folds[static_cast<std::size_t>(f)];
    fold.fold = f;
    try {
      const EvaluationOutcome out = evaluate_partition(
          spec, dataset, outer[static_cast<std::size_t>(f)].train_indices,
          outer[static_cast<std::size_t>(f)].test_indices, inner_k,
          derive_seed(derive_seed(seed, seed_stream::kNestedCv), static_cast<std::uint64_t>(f)),
          options);
      fold.chosen_params = out.params;
      fold.train_cindex = out.train_cindex;
      fold.inner_cv_cindex = out.inner_cv_cindex;
      fold.test_cindex = out.test_cindex;
    } catch (const std::runtime_error& e) {
      fold.failed = true;
      fold.error = e.what();
      fold.train_cindex = fold.inner_cv_cindex = fold.test_cindex = kNaN;
    }
  });
  recompute_aggregates(report);
  return report;
}

void recompute_aggregates(NCVReport& report) {
  std::vector<double> train, inner, test;
  for (const auto& f : report.folds) {
    if (f.failed) continue;
    train.push_back(f.train_cindex);
    inner.push_back(f.inner_cv_cindex);
    test.push_back(f.test_cindex);
  }
  report.mean_train = mean_ignoring_nan(train);
  report.mean_inner = mean_ignoring_nan(inner);
  report.mean_test = mean_ignoring_nan(test);
}

MCReport monte_carlo(const ModelSpec& spec, const SurvivalDataset& dataset, int n_experiments,
                     double train_fraction, int inner_k, std::uint64_t seed,
                     const PipelineOptions& options, int jobs) {
  if (n_experiments < 1) throw DataError("monte_carlo requires n_experiments >= 1");
  MCReport report;
  report.experiments.resize(static_cast<std::size_t>(n_experiments));
  parallel_for(n_experiments, jobs, [&](int e) {
    MCExperiment& exp = report.experiments[static_cast<std::size_t>(e)];
    exp.experiment = e;
    exp.seed = derive_seed(derive_seed(seed, seed_stream::kMonteCarlo),
                           static_cast<std::uint64_t>(e));
    try {
      const SplitPair split = stratified_split(dataset, train_fraction, exp.seed);
      const EvaluationOutcome out =
          evaluate_partition(spec, dataset, split.train_indices, split.test_indices, inner_k,
                             exp.seed, options);
      exp.chosen_params = out.params;
      exp.train_cindex = out.train_cindex;
      exp.cv_cindex = out.inner_cv_cindex;
      exp.test_cindex = out.test_cindex;
    } catch (const std::runtime_error& err) {
      exp.failed = true;
      exp.error = err.what();
      exp.train_cindex = exp.cv_cindex = exp.test_cindex = kNaN;
    }
  });
  recompute_aggregates(report);
  return report;
}

void recompute_aggregates(MCReport& report) {
  std::vector<double> train, cv, test;
  report.n_failed = 0;
  for (const auto& e : report.experiments) {
    if (e.failed) {
      ++report.n_failed;
      continue;
    }
    train.push_back(e.train_cindex);
    cv.push_back(e.cv_cindex);
    test.push_back(e.test_cindex);
  }
  report.mean_train = mean_ignoring_nan(train);
  report.sd_train = sample_sd_ignoring_nan(train);
  report.mean_cv = mean_ignoring_nan(cv);
  report.sd_cv = sample_sd_ignoring_nan(cv);
  report.mean_test = mean_ignoring_nan(test);
  report.sd_test = sample_sd_ignoring_nan(test);
}

}  // namespace survkit
