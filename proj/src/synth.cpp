#include "survkit/synth.hpp"

#include <algorithm>
#include <cmath>

#include "survkit/errors.hpp"
#include "survkit/random.hpp"

namespace survkit {

namespace {

double censored_fraction(const Eigen::VectorXd& event_time, const Eigen::VectorXd& censor_unit,
                         double rate) {
  // censor_unit holds -log(V) so C_i = censor_unit_i / rate.
  Eigen::Index censored = 0;
  for (Eigen::Index i = 0; i < event_time.size(); ++i) {
    if (censor_unit(i) / rate < event_time(i)) ++censored;
  }
  return static_cast<double>(censored) / static_cast<double>(event_time.size());
}

}  // namespace

SurvivalDataset generate(const SynthSpec& spec) {
  if (spec.n < 1 || spec.p < 1) throw DataError("synth spec requires n >= 1 and p >= 1");
  if (spec.beta_true.size() != spec.p) {
    throw DataError("beta_true length must equal p");
  }
  if (!(spec.censor_rate_target >= 0.0 && spec.censor_rate_target < 1.0)) {
    throw DataError("censor_rate_target must lie in [0, 1)");
  }
  if (!(spec.missing_rate >= 0.0 && spec.missing_rate < 1.0)) {
    throw DataError("missing_rate must lie in [0, 1)");
  }
  if (!(spec.weibull_shape > 0.0 && spec.weibull_scale > 0.0)) {
    throw DataError("Weibull shape and scale must be positive");
  }

  Rng rng(spec.seed);
  const Eigen::Index n = spec.n;
  const Eigen::Index p = spec.p;

  // Fixed draw order: features row-major, event uniforms, censor uniforms,
  // missingness mask. Calibration reuses the same censor draws.
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
  }

  // Weibull PH: S(t | eta) = exp(-(t/scale)^shape * exp(eta)), so
  // T = scale * (-log U * exp(-eta))^(1/shape).
  const Eigen::VectorXd eta = x * spec.beta_true;
  Eigen::VectorXd event_time(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    event_time(i) = spec.weibull_scale *
                    std::pow(-std::log(u) * std::exp(-eta(i)), 1.0 / spec.weibull_shape);
  }

  Eigen::VectorXd censor_unit(n);  // -log(V); C = censor_unit / rate
  for (Eigen::Index i = 0; i < n; ++i) censor_unit(i) = -std::log(rng.uniform_open());

  SurvivalDataset ds;
  ds.times.resize(n);
  ds.events.resize(n);
  ds.time_unit = "t";

  if (spec.censor_rate_target == 0.0) {
    ds.times = event_time;
    ds.events.setOnes();
  } else {
    // The realized censored fraction is monotone non-decreasing in the rate;
    // bisect on the log scale until it lands within +-0.05 of the target.
    double lo = 1e-12;
    double hi = 1e12;
    double rate = std::sqrt(lo * hi);
    bool found = false;
    for (int iter = 0; iter < 200; ++iter) {
      rate = std::exp(0.5 * (std::log(lo) + std::log(hi)));
      const double frac = censored_fraction(event_time, censor_unit, rate);
      if (std::abs(frac - spec.censor_rate_target) <= 0.05) {
        found = true;
        break;
      }
      (frac > spec.censor_rate_target ? hi : lo) = rate;
    }
    if (!found) {
      throw DataError("censoring calibration failed: target unreachable within +-0.05");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = censor_unit(i) / rate;
      ds.events(i) = event_time(i) <= c ? 1 : 0;
      ds.times(i) = std::min(event_time(i), c);
    }
  }

  if (spec.missing_rate > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) {
        if (rng.uniform() < spec.missing_rate) x(i, j) = SurvivalDataset::missing_value();
      }
    }
  }

  ds.features = std::move(x);
  ds.columns.reserve(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) {
    ds.columns.push_back(ColumnMeta{"x" + std::to_string(j + 1), ColumnKind::numeric, "", 0.0});
  }
  ds.refresh_missing_fractions();
  validate_dataset(ds);
  return ds;
}

}  // namespace survkit
