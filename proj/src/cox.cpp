#include "survkit/cox.hpp"

#include <algorithm>
#include <cmath>

#include "survkit/errors.hpp"
#include "survkit/partial_likelihood.hpp"

namespace survkit {

namespace {

// Constant columns and exact duplicates of an earlier kept column are aliased:
// the partial likelihood cannot identify them, so they are excluded pre-fit.
std::vector<int> active_columns(const SurvivalDataset& train,
                                std::vector<std::string>& dropped) {
  std::vector<int> active;
  for (Eigen::Index j = 0; j < train.n_cols(); ++j) {
    const auto col = train.features.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      dropped.push_back(train.columns[static_cast<std::size_t>(j)].name);
      continue;
    }
    bool duplicate = false;
    for (const int kept : active) {
      if (col == train.features.col(kept)) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) {
      dropped.push_back(train.columns[static_cast<std::size_t>(j)].name);
    } else {
      active.push_back(static_cast<int>(j));
    }
  }
  return active;
}

}  // namespace

CoxModel fit_cox(const SurvivalDataset& train, const CoxOptions& options) {
  validate_for_fit(train);
  if (train.events.sum() < 2) throw DataError("fit_cox requires at least 2 events");

  CoxModel model;
  model.n_features = train.n_cols();
  model.beta = Eigen::VectorXd::Zero(train.n_cols());

  const std::vector<int> active = active_columns(train, model.dropped_columns);
  const Eigen::Index p = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd x(train.n_rows(), p);
  for (Eigen::Index j = 0; j < p; ++j) {
    x.col(j) = train.features.col(active[static_cast<std::size_t>(j)]);
  }

  const TimeOrder order(train.times);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  BreslowValue current = breslow_loglik(x, train.times, train.events, order, beta, true, true);

  if (p == 0) {
    model.log_partial_likelihood = current.loglik;
    model.converged = true;
    return model;
  }

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (current.gradient.cwiseAbs().maxCoeff() <= options.gradient_tolerance) {
      model.converged = true;
      break;
    }
    model.n_iterations = iter + 1;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(current.neg_hessian);
    Eigen::VectorXd direction = ldlt.solve(current.gradient);
    if (!direction.allFinite()) {
      // Singular curvature; retry with a diagonal nudge.
      Eigen::MatrixXd reg = current.neg_hessian;
      reg.diagonal().array() += 1e-10;
      direction = reg.ldlt().solve(current.gradient);
      if (!direction.allFinite()) {
        throw FitError("Newton direction is not finite");
      }
    }

    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h) {
      const Eigen::VectorXd candidate = beta + step * direction;
      const BreslowValue value =
          breslow_loglik(x, train.times, train.events, order, candidate, true, true);
      // Step halving keeps the log partial likelihood non-decreasing.
      if (std::isfinite(value.loglik) &&
          value.loglik >= current.loglik - 1e-12 * std::abs(current.loglik)) {
        beta = candidate;
        current = value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No ascent direction left; report convergence state from the gradient.
      model.converged = current.gradient.cwiseAbs().maxCoeff() <= options.gradient_tolerance;
      break;
    }
    if (beta.cwiseAbs().maxCoeff() > options.divergence_threshold) {
      throw MonotoneLikelihoodError(
          "a Cox coefficient diverged beyond " + std::to_string(options.divergence_threshold) +
          "; the likelihood is monotone in that direction");
    }
    if (current.gradient.cwiseAbs().maxCoeff() <= options.gradient_tolerance) {
      model.converged = true;
      break;
    }
  }

  model.log_partial_likelihood = current.loglik;
  for (Eigen::Index j = 0; j < p; ++j) {
    model.beta(active[static_cast<std::size_t>(j)]) = beta(j);
  }
  if (!model.beta.allFinite()) throw FitError("non-finite Cox coefficients");
  return model;
}

Eigen::VectorXd predict_risk(const CoxModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.n_features) {
    throw DataError("predict_risk: column count mismatch");
  }
  return x * model.beta;
}

}  // namespace survkit
