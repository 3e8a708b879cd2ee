#pragma once

#include <cstdint>
#include <vector>

#include "survkit/types.hpp"

namespace survkit {

// Per-column centering and scaling, fitted on training rows only. A column
// whose observed cells have zero spread keeps sd = 1 so it passes through as
// centered zeros.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

// Means and sample standard deviations over observed (non-missing) cells.
// Throws DataError for a column with zero observed cells.
Standardizer fit_standardizer(const Eigen::MatrixXd& train);

// (x - mean) / sd per column; missing cells stay missing.
Eigen::MatrixXd apply_standardizer(const Standardizer& st, const Eigen::MatrixXd& x);

struct ImputeStats {
  std::int64_t imputed_cells = 0;
  // Cells filled from fewer than k neighbours (all eligible rows used).
  std::int64_t fallback_cells = 0;
};

// K-nearest-neighbour imputer. The reference matrix is the standardized
// training matrix with its missing cells retained; distances are Euclidean
// over mutually observed numeric coordinates, rescaled by sqrt(p / p_observed).
// Indicator columns never serve as distance coordinates but are imputable:
// the imputed value snaps to {0,1} on the raw scale (0.5 rounds to 0) and is
// mapped back through the column's standardization.
struct KnnImputer {
  int k = 5;
  Eigen::MatrixXd reference;
  std::vector<char> indicator_mask;  // per column; 1 = missing-indicator column
  Eigen::VectorXd column_mean;       // standardization applied to the reference
  Eigen::VectorXd column_sd;
};

// Without a standardizer the columns are taken as unscaled (mean 0, sd 1).
KnnImputer make_knn_imputer(const Eigen::MatrixXd& standardized_train,
                            const std::vector<ColumnMeta>& columns, int k,
                            const Standardizer* standardizer = nullptr);

// Fills every missing cell of `target` (same column layout as the reference)
// with the unweighted mean of the column over the k nearest reference rows
// among those observing that column. Neighbour ties break by smaller
// reference-row index. Throws DataError when no reference row observes a
// needed column.
Eigen::MatrixXd knn_impute(const Eigen::MatrixXd& target, const KnnImputer& imputer,
                           ImputeStats* stats = nullptr);

}  // namespace survkit
