#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace survkit {

// Subject ordering by time, descending, with tie groups. Built once per
// (times) vector and reused across likelihood evaluations.
struct TimeOrder {
  std::vector<int> desc;                       // row indices, time descending
  std::vector<std::pair<int, int>> groups;     // [begin, end) ranges in desc sharing one time
  explicit TimeOrder(const Eigen::VectorXd& times);
};

struct BreslowValue {
  double loglik = 0.0;
  Eigen::VectorXd gradient;      // d loglik / d beta (empty unless requested)
  Eigen::MatrixXd neg_hessian;   // -d2 loglik / d beta2 (empty unless requested)
};

// Breslow-tie log partial likelihood, with optional gradient and negated
// Hessian, at the given coefficient vector. The linear predictor is centered
// internally so exp() cannot overflow.
BreslowValue breslow_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& times,
                            const Eigen::VectorXi& events, const TimeOrder& order,
                            const Eigen::VectorXd& beta, bool need_gradient,
                            bool need_hessian);

struct EtaDerivatives {
  double loglik = 0.0;
  Eigen::VectorXd score;   // d loglik / d eta, per subject
  Eigen::VectorXd weight;  // -d2 loglik / d eta_i^2 (diagonal), per subject
};

// Per-subject first derivative and diagonal curvature of the Breslow log
// partial likelihood with respect to the linear predictor eta. Used by the
// coxnet coordinate-descent quadratic approximation.
EtaDerivatives breslow_eta_derivatives(const Eigen::VectorXd& eta, const Eigen::VectorXd& times,
                                       const Eigen::VectorXi& events, const TimeOrder& order);

}  // namespace survkit
