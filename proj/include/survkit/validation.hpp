#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "survkit/cox.hpp"
#include "survkit/coxnet.hpp"
#include "survkit/impute.hpp"
#include "survkit/rsf.hpp"
#include "survkit/types.hpp"

namespace survkit {

enum class ModelKind { cox, coxnet, rsf };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct CoxnetParams {
  double alpha = 0.0;
  double lambda = 0.0;
};

struct RsfParams {
  int mtry = 0;
  int min_node_size = 0;
};

// std::monostate encodes "no hyperparameters" (the untuned Cox baseline).
using HyperParams = std::variant<std::monostate, CoxnetParams, RsfParams>;

std::string params_to_string(const HyperParams& params);

struct RsfGridSpec {
  std::vector<int> mtry_values;
  std::vector<int> min_node_sizes;
};

// What to fit: the model family, its tuning grid, and fixed options.
struct ModelSpec {
  ModelKind kind = ModelKind::cox;
  CoxnetGrid coxnet_grid = default_coxnet_grid();
  // When absent, the rsf grid is computed from the actual column count.
  std::optional<RsfGridSpec> rsf_grid_override;
  int n_trees = 500;
  int importance_repeats = 5;
  CoxOptions cox_options;
  CoxnetOptions coxnet_options;
};

struct PipelineOptions {
  int knn_k = 5;
};

// A model with the preprocessing state it was fitted with: standardizer and
// imputer fitted on the training rows only, never on scored rows.
struct FittedPipeline {
  Standardizer standardizer;
  KnnImputer imputer;
  ModelKind kind = ModelKind::cox;
  CoxModel cox;
  CoxnetModel coxnet;
  Forest forest;
  ImputeStats impute_stats;

  Eigen::VectorXd risks(const SurvivalDataset& rows) const;
};

FittedPipeline fit_pipeline(const ModelSpec& spec, const HyperParams& params,
                            const SurvivalDataset& train, const PipelineOptions& options,
                            std::uint64_t seed);

// C-index of the fitted pipeline's risk scores on the given rows.
double score_cindex(const FittedPipeline& fitted, const SurvivalDataset& rows);

struct ComboResult {
  HyperParams params;
  double mean_cindex = 0.0;       // over inner folds that fitted
  int n_failed = 0;               // inner folds where this combination failed
  std::vector<double> fold_scores;
};

struct TuneResult {
  HyperParams best_params;
  double inner_cv_cindex = 0.0;  // NaN for the untuned Cox baseline
  std::vector<ComboResult> all_results;
};

// Inner k-fold hyperparameter selection. Preprocessing is fitted per inner
// fold on its training part only. Grid combinations are scored by mean inner
// C-index; ties keep the earlier grid-order combination. For cox the result is
// empty (not tuned).
TuneResult tune(const ModelSpec& spec, const SurvivalDataset& train, int inner_k,
                std::uint64_t seed, const PipelineOptions& options);

struct NCVFold {
  int fold = 0;
  double train_cindex = 0.0;
  double inner_cv_cindex = 0.0;
  double test_cindex = 0.0;
  HyperParams chosen_params;
  bool failed = false;
  std::string error;
};

struct NCVReport {
  std::vector<NCVFold> folds;
  double mean_train = 0.0;
  double mean_inner = 0.0;
  double mean_test = 0.0;
};

// Nested cross-validation: tune on each outer training partition, refit the
// chosen combination on the full outer-train, and score the held-out fold.
NCVReport nested_cv(const ModelSpec& spec, const SurvivalDataset& dataset, int outer_k,
                    int inner_k, std::uint64_t seed, const PipelineOptions& options,
                    int jobs = 1);

// Recomputes the aggregate means from the per-fold entries.
void recompute_aggregates(NCVReport& report);

struct MCExperiment {
  int experiment = 0;
  std::uint64_t seed = 0;
  double train_cindex = 0.0;
  double cv_cindex = 0.0;
  double test_cindex = 0.0;
  HyperParams chosen_params;
  bool failed = false;
  std::string error;
};

struct MCReport {
  std::vector<MCExperiment> experiments;
  double mean_train = 0.0, sd_train = 0.0;
  double mean_cv = 0.0, sd_cv = 0.0;
  double mean_test = 0.0, sd_test = 0.0;
  int n_failed = 0;
};

// Monte Carlo validation: repeated stratified splits with per-experiment
// derived seeds; tuning and preprocessing happen on the training side only.
// Failed experiments are flagged, counted, and excluded from the aggregates.
MCReport monte_carlo(const ModelSpec& spec, const SurvivalDataset& dataset, int n_experiments,
                     double train_fraction, int inner_k, std::uint64_t seed,
                     const PipelineOptions& options, int jobs = 1);

// Recomputes means and sample standard deviations (n-1) from the entries.
void recompute_aggregates(MCReport& report);

}  // namespace survkit
