#include "survkit/impute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "survkit/errors.hpp"

namespace survkit {

Standardizer fit_standardizer(const Eigen::MatrixXd& train) {
  if (train.rows() == 0) throw DataError("standardizer requires a non-empty training matrix");
  const Eigen::Index p = train.cols();
  Standardizer st;
  st.mean.resize(p);
  st.sd.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    double sum = 0.0;
    Eigen::Index observed = 0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      const double v = train(i, j);
      if (SurvivalDataset::is_missing(v)) continue;
      sum += v;
      ++observed;
    }
    if (observed == 0) {
      throw DataError("column " + std::to_string(j) + " has zero observed cells");
    }
    const double mean = sum / static_cast<double>(observed);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < train.rows(); ++i) {
      const double v = train(i, j);
      if (SurvivalDataset::is_missing(v)) continue;
      ss += (v - mean) * (v - mean);
    }
    double sd = observed > 1 ? std::sqrt(ss / static_cast<double>(observed - 1)) : 0.0;
    if (sd == 0.0) sd = 1.0;  // constant column passes through unscaled
    st.mean(j) = mean;
    st.sd(j) = sd;
  }
  return st;
}

Eigen::MatrixXd apply_standardizer(const Standardizer& st, const Eigen::MatrixXd& x) {
  if (x.cols() != st.mean.size()) {
    throw DataError("standardizer column count mismatch");
  }
  Eigen::MatrixXd out = x;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (!SurvivalDataset::is_missing(out(i, j))) {
        out(i, j) = (out(i, j) - st.mean(j)) / st.sd(j);
      }
    }
  }
  return out;
}

KnnImputer make_knn_imputer(const Eigen::MatrixXd& standardized_train,
                            const std::vector<ColumnMeta>& columns, int k,
                            const Standardizer* standardizer) {
  if (k < 1) throw DataError("imputer requires k >= 1");
  if (static_cast<Eigen::Index>(k) > standardized_train.rows()) {
    throw DataError("imputer requires k <= number of reference rows");
  }
  if (columns.size() != static_cast<std::size_t>(standardized_train.cols())) {
    throw DataError("imputer column metadata mismatch");
  }
  KnnImputer imputer;
  imputer.k = k;
  imputer.reference = standardized_train;
  imputer.indicator_mask.resize(columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    imputer.indicator_mask[j] = columns[j].kind == ColumnKind::missing_indicator ? 1 : 0;
  }
  if (standardizer) {
    if (standardizer->mean.size() != standardized_train.cols()) {
      throw DataError("imputer standardizer column count mismatch");
    }
    imputer.column_mean = standardizer->mean;
    imputer.column_sd = standardizer->sd;
  } else {
    imputer.column_mean = Eigen::VectorXd::Zero(standardized_train.cols());
    imputer.column_sd = Eigen::VectorXd::Ones(standardized_train.cols());
  }
  return imputer;
}

namespace {

// Rescaled Euclidean distance over mutually observed numeric coordinates:
// sqrt(sum * p / p_observed); +inf when nothing is mutually observed.
double row_distance(const Eigen::MatrixXd& target, Eigen::Index tr,
                    const Eigen::MatrixXd& reference, Eigen::Index rr,
                    const std::vector<char>& indicator_mask, int p_numeric) {
  double sum = 0.0;
  int observed = 0;
  for (Eigen::Index c = 0; c < target.cols(); ++c) {
    if (indicator_mask[static_cast<std::size_t>(c)]) continue;
    const double a = target(tr, c);
    const double b = reference(rr, c);
    if (SurvivalDataset::is_missing(a) || SurvivalDataset::is_missing(b)) continue;
    sum += (a - b) * (a - b);
    ++observed;
  }
  if (observed == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(sum * static_cast<double>(p_numeric) / static_cast<double>(observed));
}

}  // namespace

Eigen::MatrixXd knn_impute(const Eigen::MatrixXd& target, const KnnImputer& imputer,
                           ImputeStats* stats) {
  if (target.cols() != imputer.reference.cols()) {
    throw DataError("imputer column count mismatch");
  }
  const Eigen::Index n_ref = imputer.reference.rows();
  int p_numeric = 0;
  for (const char m : imputer.indicator_mask) {
    if (!m) ++p_numeric;
  }

  Eigen::MatrixXd out = target;
  std::vector<double> dist(static_cast<std::size_t>(n_ref));
  std::vector<int> eligible;
  for (Eigen::Index i = 0; i < target.rows(); ++i) {
    bool any_missing = false;
    for (Eigen::Index c = 0; c < target.cols() && !any_missing; ++c) {
      any_missing = SurvivalDataset::is_missing(target(i, c));
    }
    if (!any_missing) continue;

    for (Eigen::Index r = 0; r < n_ref; ++r) {
      dist[static_cast<std::size_t>(r)] =
          row_distance(target, i, imputer.reference, r, imputer.indicator_mask, p_numeric);
    }
    for (Eigen::Index c = 0; c < target.cols(); ++c) {
      if (!SurvivalDataset::is_missing(target(i, c))) continue;
      eligible.clear();
      for (Eigen::Index r = 0; r < n_ref; ++r) {
        if (!SurvivalDataset::is_missing(imputer.reference(r, c)) &&
            std::isfinite(dist[static_cast<std::size_t>(r)])) {
          eligible.push_back(static_cast<int>(r));
        }
      }
      if (eligible.empty()) {
        throw DataError("no reference row observes column " + std::to_string(c));
      }
      const std::size_t take = std::min<std::size_t>(eligible.size(),
                                                     static_cast<std::size_t>(imputer.k));
      // Ties at identical distance break by smaller reference-row index, which
      // the secondary index comparison provides.
      std::partial_sort(eligible.begin(), eligible.begin() + static_cast<std::ptrdiff_t>(take),
                        eligible.end(), [&](int a, int b) {
                          const double da = dist[static_cast<std::size_t>(a)];
                          const double db = dist[static_cast<std::size_t>(b)];
                          if (da != db) return da < db;
                          return a < b;
                        });
      double sum = 0.0;
      for (std::size_t t = 0; t < take; ++t) {
        sum += imputer.reference(eligible[t], c);
      }
      double value = sum / static_cast<double>(take);
      if (imputer.indicator_mask[static_cast<std::size_t>(c)]) {
        // Snap to {0,1} on the raw scale (0.5 rounds to 0), then map back
        // through the column's standardization.
        const double mean = imputer.column_mean(c);
        const double sd = imputer.column_sd(c);
        const double raw = value * sd + mean;
        value = ((raw > 0.5 ? 1.0 : 0.0) - mean) / sd;
      }
      out(i, c) = value;
      if (stats) {
        ++stats->imputed_cells;
        if (take < static_cast<std::size_t>(imputer.k)) ++stats->fallback_cells;
      }
    }
  }
  return out;
}

}  // namespace survkit
