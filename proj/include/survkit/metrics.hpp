#pragma once

#include <cstdint>

#include "survkit/types.hpp"

namespace survkit {

// Harrell's concordance over comparable pairs. A pair with distinct times is
// comparable iff the shorter time carries an event; a pair with equal times is
// comparable iff exactly one carries an event (it must score higher risk to be
// concordant). Tied predicted risks contribute 0.5, so the paper's C/(C+D)
// holds exactly whenever tied_risk = 0.
struct ConcordanceResult {
  double cindex = 0.0;
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  std::uint64_t tied_risk = 0;
  std::uint64_t comparable_pairs = 0;
};

// O(n log n) implementation (order statistics over risk ranks). Throws
// NoComparablePairsError when no pair is comparable.
ConcordanceResult concordance_index(const Eigen::VectorXd& times, const Eigen::VectorXi& events,
                                    const Eigen::VectorXd& risks);

// O(n^2) reference implementation by explicit pair enumeration; identical
// contract. The correctness reference for concordance_index.
ConcordanceResult concordance_oracle(const Eigen::VectorXd& times, const Eigen::VectorXi& events,
                                     const Eigen::VectorXd& risks);

}  // namespace survkit
