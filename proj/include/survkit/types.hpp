#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace survkit {

enum class ColumnKind { numeric, missing_indicator };

struct ColumnMeta {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  // For indicators, the name of the originating numeric column.
  std::string source;
  // Fraction of missing cells before imputation.
  double missing_fraction = 0.0;
};

// Right-censored tabular cohort: a feature matrix (NaN marks a missing cell)
// plus per-subject follow-up time and event status. Values are immutable in
// use: every operation returns a new dataset.
struct SurvivalDataset {
  Eigen::MatrixXd features;  // n_subjects x n_columns
  Eigen::VectorXd times;     // follow-up duration, >= 0
  Eigen::VectorXi events;    // 1 = event observed, 0 = censored
  std::vector<ColumnMeta> columns;
  std::string time_unit;  // opaque unit label carried through reports

  Eigen::Index n_rows() const { return features.rows(); }
  Eigen::Index n_cols() const { return features.cols(); }

  static bool is_missing(double v) { return std::isnan(v); }
  static double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

  // Index of a column by name, or -1.
  int column_index(const std::string& name) const;

  // New dataset holding the given rows (in the given order).
  SurvivalDataset subset_rows(const std::vector<int>& rows) const;

  // Recounts missing fractions from the cells.
  void refresh_missing_fractions();
};

// Checks structural invariants: matching lengths, label ranges, unique column
// names, indicator metadata consistency. Throws DataError on violation.
void validate_dataset(const SurvivalDataset& ds);

// Additional requirements for fitting: >= 1 event and >= 2 distinct observed
// times, no missing cells. Throws DataError on violation.
void validate_for_fit(const SurvivalDataset& ds);

// A train/test partition of dataset rows, stratified by event status.
struct SplitPair {
  std::vector<int> train_indices;
  std::vector<int> test_indices;
  std::uint64_t seed = 0;
};

}  // namespace survkit
