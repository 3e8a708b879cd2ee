#pragma once

#include <stdexcept>
#include <string>

namespace survkit {

// Configuration problems: bad config file, out-of-range settings.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Data contract violations: malformed CSV, invalid labels, empty model space.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Model fitting failures.
class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

// A coefficient diverged during Cox fitting (monotone likelihood).
class MonotoneLikelihoodError : public FitError {
 public:
  explicit MonotoneLikelihoodError(const std::string& what) : FitError(what) {}
};

// Iteration budget exhausted without meeting the convergence criterion.
class ConvergenceError : public FitError {
 public:
  explicit ConvergenceError(const std::string& what) : FitError(what) {}
};

// Concordance is undefined: the input contains no comparable pair.
class NoComparablePairsError : public std::runtime_error {
 public:
  explicit NoComparablePairsError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace survkit
