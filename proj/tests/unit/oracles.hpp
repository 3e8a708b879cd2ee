// Test-only reference implementations, written independently of the library
// code paths they check: naive Breslow log partial likelihood, textbook
// two-sample log-rank, and brute-force KNN cell imputation.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracles {

// Breslow log partial likelihood by direct risk-set enumeration:
//   sum over events i of [eta_i - log(sum over {j : t_j >= t_i} exp(eta_j))].
inline double breslow_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& times,
                             const Eigen::VectorXi& events, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  double loglik = 0.0;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    if (events(i) != 1) continue;
    double denom = 0.0;
    for (Eigen::Index j = 0; j < times.size(); ++j) {
      if (times(j) >= times(i)) denom += std::exp(eta(j));
    }
    loglik += eta(i) - std::log(denom);
  }
  return loglik;
}

// Central finite-difference gradient of the oracle log partial likelihood.
inline Eigen::VectorXd finite_difference_gradient(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& times,
                                                  const Eigen::VectorXi& events,
                                                  const Eigen::VectorXd& beta, double step) {
  Eigen::VectorXd grad(beta.size());
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    Eigen::VectorXd hi = beta;
    Eigen::VectorXd lo = beta;
    hi(j) += step;
    lo(j) -= step;
    grad(j) = (breslow_loglik(x, times, events, hi) - breslow_loglik(x, times, events, lo)) /
              (2.0 * step);
  }
  return grad;
}

// Grid-search maximizer of the oracle log partial likelihood for one
// covariate: beta in [lo, hi] with the given step.
inline double grid_search_beta(const Eigen::MatrixXd& x, const Eigen::VectorXd& times,
                               const Eigen::VectorXi& events, double lo, double hi, double step) {
  double best_beta = lo;
  double best_value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd beta(1);
  const long n_steps = std::lround((hi - lo) / step);
  for (long k = 0; k <= n_steps; ++k) {
    beta(0) = lo + static_cast<double>(k) * step;
    const double value = breslow_loglik(x, times, events, beta);
    if (value > best_value) {
      best_value = value;
      best_beta = beta(0);
    }
  }
  return best_beta;
}

// Textbook two-sample log-rank chi-square: (O - E)^2 / V over the pooled
// distinct event times, with the hypergeometric variance term.
inline double two_sample_logrank(const std::vector<double>& time_left,
                                 const std::vector<int>& event_left,
                                 const std::vector<double>& time_right,
                                 const std::vector<int>& event_right) {
  std::vector<double> event_times;
  for (std::size_t i = 0; i < time_left.size(); ++i) {
    if (event_left[i] == 1) event_times.push_back(time_left[i]);
  }
  for (std::size_t i = 0; i < time_right.size(); ++i) {
    if (event_right[i] == 1) event_times.push_back(time_right[i]);
  }
  std::sort(event_times.begin(), event_times.end());
  event_times.erase(std::unique(event_times.begin(), event_times.end()), event_times.end());

  double observed = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  for (const double tau : event_times) {
    double d_left = 0.0;
    double d_total = 0.0;
    double y_left = 0.0;
    double y_total = 0.0;
    for (std::size_t i = 0; i < time_left.size(); ++i) {
      if (time_left[i] >= tau) {
        y_left += 1.0;
        y_total += 1.0;
      }
      if (event_left[i] == 1 && time_left[i] == tau) {
        d_left += 1.0;
        d_total += 1.0;
      }
    }
    for (std::size_t i = 0; i < time_right.size(); ++i) {
      if (time_right[i] >= tau) y_total += 1.0;
      if (event_right[i] == 1 && time_right[i] == tau) d_total += 1.0;
    }
    observed += d_left;
    expected += d_total * y_left / y_total;
    if (y_total > 1.0) {
      variance +=
          d_total * (y_left / y_total) * (1.0 - y_left / y_total) * (y_total - d_total) /
          (y_total - 1.0);
    }
  }
  if (variance <= 0.0) return 0.0;
  return (observed - expected) * (observed - expected) / variance;
}

// Brute-force KNN imputation of one missing cell: every rescaled distance
// computed directly, neighbours sorted, the k nearest observed values
// averaged. Ties break by reference-row index.
inline double knn_impute_cell(const Eigen::MatrixXd& target, Eigen::Index target_row,
                              Eigen::Index column, const Eigen::MatrixXd& reference,
                              const std::vector<char>& indicator_mask, int k) {
  int p_numeric = 0;
  for (const char m : indicator_mask) {
    if (!m) ++p_numeric;
  }
  std::vector<std::pair<double, int>> candidates;
  for (Eigen::Index r = 0; r < reference.rows(); ++r) {
    if (std::isnan(reference(r, column))) continue;
    double sum = 0.0;
    int observed = 0;
    for (Eigen::Index c = 0; c < reference.cols(); ++c) {
      if (indicator_mask[static_cast<std::size_t>(c)]) continue;
      if (std::isnan(target(target_row, c)) || std::isnan(reference(r, c))) continue;
      const double diff = target(target_row, c) - reference(r, c);
      sum += diff * diff;
      ++observed;
    }
    if (observed == 0) continue;
    candidates.emplace_back(
        std::sqrt(sum * static_cast<double>(p_numeric) / static_cast<double>(observed)),
        static_cast<int>(r));
  }
  std::sort(candidates.begin(), candidates.end());
  const std::size_t take = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(k));
  double sum = 0.0;
  for (std::size_t i = 0; i < take; ++i) {
    sum += reference(candidates[i].second, column);
  }
  return sum / static_cast<double>(take);
}

}  // namespace oracles
