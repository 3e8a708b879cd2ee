#include "survkit/coxnet.hpp"

#include <algorithm>
#include <cmath>

#include "survkit/errors.hpp"
#include "survkit/partial_likelihood.hpp"

namespace survkit {

CoxnetGrid default_coxnet_grid() {
  CoxnetGrid grid;
  for (int i = 0; i <= 20; ++i) grid.alphas.push_back(static_cast<double>(i) * 0.05);
  for (int i = 1; i <= 6; ++i) grid.lambdas.push_back(static_cast<double>(i) * 0.05);
  return grid;
}

namespace {

double soft_threshold(double z, double threshold) {
  if (z > threshold) return z - threshold;
  if (z < -threshold) return z + threshold;
  return 0.0;
}

double penalty(const Eigen::VectorXd& beta, double alpha, double lambda) {
  return lambda * (alpha * beta.cwiseAbs().sum() + 0.5 * (1.0 - alpha) * beta.squaredNorm());
}

}  // namespace

double coxnet_lambda_max(const SurvivalDataset& train) {
  validate_for_fit(train);
  const TimeOrder order(train.times);
  const Eigen::VectorXd eta = Eigen::VectorXd::Zero(train.n_rows());
  const EtaDerivatives d = breslow_eta_derivatives(eta, train.times, train.events, order);
  const Eigen::VectorXd score = train.features.transpose() * d.score /
                                static_cast<double>(train.n_rows());
  return score.cwiseAbs().maxCoeff();
}

CoxnetModel fit_coxnet(const SurvivalDataset& train, double alpha, double lambda,
                       const CoxnetOptions& options, const Eigen::VectorXd* warm_start) {
  validate_for_fit(train);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DataError("alpha must lie in [0, 1]");
  if (!(lambda > 0.0)) throw DataError("lambda must be positive");

  const Eigen::MatrixXd& x = train.features;
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const TimeOrder order(train.times);

  CoxnetModel model;
  model.alpha = alpha;
  model.lambda = lambda;
  model.n_features = p;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (warm_start) {
    if (warm_start->size() != p) throw DataError("warm start size mismatch");
    beta = *warm_start;
  }
  if (p == 0) {
    model.beta = beta;
    model.converged = model.kkt_ok = true;
    return model;
  }

  const auto objective_at = [&](const Eigen::VectorXd& b, double* loglik_out = nullptr) {
    Eigen::VectorXd eta = x * b;
    const EtaDerivatives d = breslow_eta_derivatives(eta, train.times, train.events, order);
    if (loglik_out) *loglik_out = d.loglik;
    return -inv_n * d.loglik + penalty(b, alpha, lambda);
  };

  double objective = objective_at(beta);
  if (options.track_objective) model.objective_trace.push_back(objective);

  const double ridge = lambda * (1.0 - alpha);
  const double l1 = lambda * alpha;
  bool converged = false;
  int cycle = 0;
  while (cycle < options.max_cycles) {
    ++cycle;

    // Fresh quadratic approximation at the current point.
    Eigen::VectorXd eta = x * beta;
    const EtaDerivatives d = breslow_eta_derivatives(eta, train.times, train.events, order);
    // Working response z satisfies w*(z - eta) = score; zero-weight subjects
    // contribute nothing, any finite placeholder works for them.
    Eigen::VectorXd residual(n);  // w-weighted context: r_i = z_i - eta_i
    for (Eigen::Index i = 0; i < n; ++i) {
      residual(i) = d.weight(i) > 0.0 ? d.score(i) / d.weight(i) : 0.0;
    }

    // One full cyclic pass of coordinate minimization of the quadratic.
    Eigen::VectorXd candidate = beta;
    for (Eigen::Index j = 0; j < p; ++j) {
      double num = 0.0;
      double denom = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double w = d.weight(i);
        if (w == 0.0) continue;
        const double xij = x(i, j);
        num += w * xij * (residual(i) + xij * candidate(j));
        denom += w * xij * xij;
      }
      num *= inv_n;
      denom = denom * inv_n + ridge;
      const double updated = denom > 0.0 ? soft_threshold(num, l1) / denom : 0.0;
      const double delta = updated - candidate(j);
      if (delta != 0.0) {
        residual.noalias() -= delta * x.col(j);
        candidate(j) = updated;
      }
    }

    // Backtrack toward the previous iterate until the true objective is
    // non-increasing.
    double step = 1.0;
    Eigen::VectorXd accepted = candidate;
    double new_objective = objective_at(accepted);
    int halvings = 0;
    while ((!std::isfinite(new_objective) || new_objective > objective + 1e-12) &&
           halvings < options.max_halvings) {
      step *= 0.5;
      accepted = beta + step * (candidate - beta);
      new_objective = objective_at(accepted);
      ++halvings;
    }
    if (!std::isfinite(new_objective) || new_objective > objective + 1e-12) {
      // No descent available: treat the current point as stationary.
      if (options.track_objective) model.objective_trace.push_back(objective);
      converged = true;
      break;
    }

    const double max_change = (accepted - beta).cwiseAbs().maxCoeff();
    beta = accepted;
    objective = std::min(objective, new_objective);
    if (options.track_objective) model.objective_trace.push_back(objective);
    if (max_change < options.tolerance) {
      converged = true;
      break;
    }
  }
  model.n_cycles = cycle;
  if (!converged) {
    throw ConvergenceError("coxnet did not converge within " +
                           std::to_string(options.max_cycles) + " cycles");
  }

  // KKT verification at the exit point.
  {
    Eigen::VectorXd eta = x * beta;
    const EtaDerivatives d = breslow_eta_derivatives(eta, train.times, train.events, order);
    const Eigen::VectorXd score = x.transpose() * d.score * inv_n;
    bool ok = true;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (beta(j) != 0.0) {
        const double residual = score(j) - ridge * beta(j) - l1 * (beta(j) > 0.0 ? 1.0 : -1.0);
        if (std::abs(residual) > options.kkt_tolerance) ok = false;
      } else if (std::abs(score(j)) > l1 + options.kkt_tolerance) {
        ok = false;
      }
    }
    model.kkt_ok = ok;
  }

  model.beta = beta;
  model.converged = converged && model.kkt_ok;
  model.n_nonzero = static_cast<int>((beta.array() != 0.0).count());
  model.objective = objective;
  return model;
}

Eigen::VectorXd predict_risk(const CoxnetModel& model, const Eigen::MatrixXd& x) {
  if (x.cols() != model.n_features) {
    throw DataError("predict_risk: column count mismatch");
  }
  return x * model.beta;
}

}  // namespace survkit
