#pragma once

#include <vector>

#include "survkit/types.hpp"

namespace survkit {

struct CoxnetOptions {
  double tolerance = 1e-7;  // max coordinate change between full cycles
  int max_cycles = 10000;
  int max_halvings = 30;
  double kkt_tolerance = 1e-5;
  // When set, the penalized objective after every cycle is recorded in
  // objective_trace (it is non-increasing by construction).
  bool track_objective = false;
};

// Elastic-net-penalized Cox fit: minimizes
//   -(1/n) logPL_Breslow(beta) + lambda * [alpha * |beta|_1 + (1-alpha)/2 * |beta|_2^2].
struct CoxnetModel {
  Eigen::VectorXd beta;
  double alpha = 0.0;
  double lambda = 0.0;
  int n_nonzero = 0;
  bool converged = false;
  bool kkt_ok = false;
  int n_cycles = 0;
  double objective = 0.0;
  std::vector<double> objective_trace;
  Eigen::Index n_features = 0;
};

// The paper's tuning grid: alpha in {0.00, 0.05, ..., 1.00} (21 values),
// lambda in {0.05, 0.10, ..., 0.30} (6 values); 126 combinations.
struct CoxnetGrid {
  std::vector<double> alphas;
  std::vector<double> lambdas;
};

CoxnetGrid default_coxnet_grid();

// Smallest L1 penalty at which beta = 0 satisfies the KKT conditions:
// max_j |(1/n) d logPL / d beta_j| at beta = 0.
double coxnet_lambda_max(const SurvivalDataset& train);

// Cyclic coordinate descent on the per-cycle quadratic approximation of the
// partial likelihood, with soft-thresholding and a backtracking step so the
// penalized objective never increases between cycles. KKT conditions are
// verified on exit. Throws ConvergenceError past max_cycles.
CoxnetModel fit_coxnet(const SurvivalDataset& train, double alpha, double lambda,
                       const CoxnetOptions& options = {},
                       const Eigen::VectorXd* warm_start = nullptr);

// Linear predictor, identical contract to cox predict_risk.
Eigen::VectorXd predict_risk(const CoxnetModel& model, const Eigen::MatrixXd& x);

}  // namespace survkit
