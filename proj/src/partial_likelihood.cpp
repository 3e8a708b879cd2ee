#include "survkit/partial_likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace survkit {

TimeOrder::TimeOrder(const Eigen::VectorXd& times) {
  desc.resize(static_cast<std::size_t>(times.size()));
  std::iota(desc.begin(), desc.end(), 0);
  std::stable_sort(desc.begin(), desc.end(),
                   [&](int a, int b) { return times(a) > times(b); });
  std::size_t i = 0;
  while (i < desc.size()) {
    std::size_t j = i + 1;
    while (j < desc.size() && times(desc[j]) == times(desc[i])) ++j;
    groups.emplace_back(static_cast<int>(i), static_cast<int>(j));
    i = j;
  }
}

BreslowValue breslow_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& times,
                            const Eigen::VectorXi& events, const TimeOrder& order,
                            const Eigen::VectorXd& beta, bool need_gradient,
                            bool need_hessian) {
  (void)times;
  const Eigen::Index p = x.cols();
  Eigen::VectorXd eta = x * beta;
  // Center the linear predictor; the shift cancels in every reported quantity.
  if (eta.size() > 0) eta.array() -= eta.maxCoeff();

  BreslowValue out;
  if (need_gradient) out.gradient = Eigen::VectorXd::Zero(p);
  if (need_hessian) out.neg_hessian = Eigen::MatrixXd::Zero(p, p);

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(p);
  Eigen::MatrixXd s2;
  if (need_hessian) s2 = Eigen::MatrixXd::Zero(p, p);

  for (const auto& [begin, end] : order.groups) {
    int d = 0;
    double eta_events = 0.0;
    Eigen::VectorXd x_events;
    if (need_gradient) x_events = Eigen::VectorXd::Zero(p);
    for (int k = begin; k < end; ++k) {
      const int i = order.desc[static_cast<std::size_t>(k)];
      const double w = std::exp(eta(i));
      s0 += w;
      if (need_gradient || need_hessian) s1.noalias() += w * x.row(i).transpose();
      if (need_hessian) s2.noalias() += w * x.row(i).transpose() * x.row(i);
      if (events(i) == 1) {
        ++d;
        eta_events += eta(i);
        if (need_gradient) x_events += x.row(i).transpose();
      }
    }
    if (d == 0) continue;
    out.loglik += eta_events - static_cast<double>(d) * std::log(s0);
    if (need_gradient) {
      out.gradient.noalias() += x_events - (static_cast<double>(d) / s0) * s1;
    }
    if (need_hessian) {
      const Eigen::VectorXd mean = s1 / s0;
      out.neg_hessian.noalias() +=
          static_cast<double>(d) * (s2 / s0 - mean * mean.transpose());
    }
  }
  return out;
}

EtaDerivatives breslow_eta_derivatives(const Eigen::VectorXd& eta, const Eigen::VectorXd& times,
                                       const Eigen::VectorXi& events, const TimeOrder& order) {
  const Eigen::Index n = eta.size();
  Eigen::VectorXd centered = eta;
  if (n > 0) centered.array() -= centered.maxCoeff();
  Eigen::VectorXd exp_eta = centered.array().exp();

  EtaDerivatives out;
  out.score.resize(n);
  out.weight.resize(n);

  // Descending sweep: risk-set sums at each distinct event time.
  struct EventTime {
    double time;
    int d;
    double s0;
  };
  std::vector<EventTime> event_times;  // descending time order
  double s0 = 0.0;
  for (const auto& [begin, end] : order.groups) {
    int d = 0;
    double eta_events = 0.0;
    for (int k = begin; k < end; ++k) {
      const int i = order.desc[static_cast<std::size_t>(k)];
      s0 += exp_eta(i);
      if (events(i) == 1) {
        ++d;
        eta_events += centered(i);
      }
    }
    if (d > 0) {
      event_times.push_back({times(order.desc[static_cast<std::size_t>(begin)]), d, s0});
      out.loglik += eta_events - static_cast<double>(d) * std::log(s0);
    }
  }
  std::reverse(event_times.begin(), event_times.end());  // ascending

  // Prefix sums of d/s0 and d/s0^2 over event times.
  std::vector<double> cum_a(event_times.size());
  std::vector<double> cum_b(event_times.size());
  double a = 0.0;
  double b = 0.0;
  for (std::size_t k = 0; k < event_times.size(); ++k) {
    a += static_cast<double>(event_times[k].d) / event_times[k].s0;
    b += static_cast<double>(event_times[k].d) / (event_times[k].s0 * event_times[k].s0);
    cum_a[k] = a;
    cum_b[k] = b;
  }

  // Ascending sweep over subjects: locate the last event time <= t_i.
  std::ptrdiff_t k_ptr = -1;
  for (auto it = order.desc.rbegin(); it != order.desc.rend(); ++it) {
    const int i = *it;
    while (k_ptr + 1 < static_cast<std::ptrdiff_t>(event_times.size()) &&
           event_times[static_cast<std::size_t>(k_ptr + 1)].time <= times(i)) {
      ++k_ptr;
    }
    const double ai = k_ptr >= 0 ? cum_a[static_cast<std::size_t>(k_ptr)] : 0.0;
    const double bi = k_ptr >= 0 ? cum_b[static_cast<std::size_t>(k_ptr)] : 0.0;
    const double p_i = exp_eta(i) * ai;
    out.score(i) = static_cast<double>(events(i)) - p_i;
    out.weight(i) = p_i - exp_eta(i) * exp_eta(i) * bi;
  }
  return out;
}

}  // namespace survkit
