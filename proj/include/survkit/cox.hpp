#pragma once

#include <string>
#include <vector>

#include "survkit/types.hpp"

namespace survkit {

struct CoxOptions {
  double gradient_tolerance = 1e-8;  // max-norm convergence criterion
  int max_iterations = 100;
  int max_halvings = 20;
  // |beta_j| beyond this on standardized data signals monotone likelihood.
  double divergence_threshold = 20.0;
};

// Unpenalized Cox proportional hazards fit (Breslow ties, Newton-Raphson with
// step halving). beta holds one entry per feature column; constant or aliased
// columns are excluded from the fit and keep a zero entry.
struct CoxModel {
  Eigen::VectorXd beta;
  double log_partial_likelihood = 0.0;
  int n_iterations = 0;
  bool converged = false;
  std::vector<std::string> dropped_columns;
  Eigen::Index n_features = 0;
};

// Maximizes the Breslow-tie log partial likelihood. Requires >= 2 events and a
// complete standardized matrix. Throws MonotoneLikelihoodError when a
// coefficient diverges; returns converged=false when the iteration budget runs
// out first.
CoxModel fit_cox(const SurvivalDataset& train, const CoxOptions& options = {});

// Linear predictor x_i . beta; higher means shorter expected time to event.
Eigen::VectorXd predict_risk(const CoxModel& model, const Eigen::MatrixXd& x);

}  // namespace survkit
