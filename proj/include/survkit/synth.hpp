#pragma once

#include <cstdint>

#include "survkit/types.hpp"

namespace survkit {

// Synthetic right-censored cohort with known ground truth: standard-normal
// features, Weibull proportional-hazards event times driven by beta_true, an
// independent exponential censoring time with its rate calibrated to hit the
// target censoring fraction, and completely-at-random missingness.
struct SynthSpec {
  int n = 0;
  int p = 0;
  Eigen::VectorXd beta_true;  // length p; zeros allowed
  double weibull_shape = 1.5;
  double weibull_scale = 1.0;
  double censor_rate_target = 0.3;  // in [0, 1)
  double missing_rate = 0.0;        // in [0, 1), per feature cell
  std::uint64_t seed = 0;
};

// Deterministic per seed. Throws DataError when the censoring target cannot be
// met within +-0.05 by the bounded rate search.
SurvivalDataset generate(const SynthSpec& spec);

}  // namespace survkit
