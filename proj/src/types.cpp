#include "survkit/types.hpp"

#include <set>
#include <unordered_map>
#include <unordered_set>

#include "survkit/errors.hpp"

namespace survkit {

int SurvivalDataset::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].name == name) return static_cast<int>(j);
  }
  return -1;
}

SurvivalDataset SurvivalDataset::subset_rows(const std::vector<int>& rows) const {
  SurvivalDataset out;
  out.columns = columns;
  out.time_unit = time_unit;
  const Eigen::Index m = static_cast<Eigen::Index>(rows.size());
  out.features.resize(m, features.cols());
  out.times.resize(m);
  out.events.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const int r = rows[static_cast<std::size_t>(i)];
    out.features.row(i) = features.row(r);
    out.times(i) = times(r);
    out.events(i) = events(r);
  }
  out.refresh_missing_fractions();
  return out;
}

void SurvivalDataset::refresh_missing_fractions() {
  const Eigen::Index n = n_rows();
  for (Eigen::Index j = 0; j < n_cols(); ++j) {
    Eigen::Index miss = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (is_missing(features(i, j))) ++miss;
    }
    columns[static_cast<std::size_t>(j)].missing_fraction =
        n == 0 ? 0.0 : static_cast<double>(miss) / static_cast<double>(n);
  }
}

void validate_dataset(const SurvivalDataset& ds) {
  const Eigen::Index n = ds.features.rows();
  if (ds.times.size() != n || ds.events.size() != n) {
    throw DataError("times/events length does not match the feature row count");
  }
  if (ds.columns.size() != static_cast<std::size_t>(ds.features.cols())) {
    throw DataError("column metadata count does not match the feature column count");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(ds.times(i) >= 0.0) || !std::isfinite(ds.times(i))) {
      throw DataError("time must be a finite non-negative number (row " + std::to_string(i) + ")");
    }
    if (ds.events(i) != 0 && ds.events(i) != 1) {
      throw DataError("event must be 0 or 1 (row " + std::to_string(i) + ")");
    }
  }
  std::unordered_set<std::string> names;
  for (const auto& col : ds.columns) {
    if (!names.insert(col.name).second) {
      throw DataError("duplicate column name: " + col.name);
    }
  }
  for (std::size_t j = 0; j < ds.columns.size(); ++j) {
    const auto& col = ds.columns[j];
    if (col.kind != ColumnKind::missing_indicator) continue;
    const int src = ds.column_index(col.source);
    if (src < 0 || ds.columns[static_cast<std::size_t>(src)].kind != ColumnKind::numeric) {
      throw DataError("indicator column " + col.name + " names no existing numeric source");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = ds.features(i, static_cast<Eigen::Index>(j));
      if (!SurvivalDataset::is_missing(v) && v != 0.0 && v != 1.0) {
        throw DataError("indicator column " + col.name + " holds a value outside {0,1}");
      }
    }
  }
}

void validate_for_fit(const SurvivalDataset& ds) {
  // Fit-stage matrices are standardized, so the raw-scale indicator cell
  // invariant no longer applies; everything else does.
  const Eigen::Index n = ds.features.rows();
  if (ds.times.size() != n || ds.events.size() != n) {
    throw DataError("times/events length does not match the feature row count");
  }
  if (ds.columns.size() != static_cast<std::size_t>(ds.features.cols())) {
    throw DataError("column metadata count does not match the feature column count");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(ds.times(i) >= 0.0) || !std::isfinite(ds.times(i))) {
      throw DataError("time must be a finite non-negative number (row " + std::to_string(i) + ")");
    }
    if (ds.events(i) != 0 && ds.events(i) != 1) {
      throw DataError("event must be 0 or 1 (row " + std::to_string(i) + ")");
    }
  }
  if (ds.events.sum() < 1) throw DataError("fit requires at least 1 observed event");
  std::set<double> distinct(ds.times.data(), ds.times.data() + ds.times.size());
  if (distinct.size() < 2) throw DataError("fit requires at least 2 distinct observed times");
  for (Eigen::Index j = 0; j < ds.n_cols(); ++j) {
    for (Eigen::Index i = 0; i < ds.n_rows(); ++i) {
      if (SurvivalDataset::is_missing(ds.features(i, j))) {
        throw DataError("fit requires a complete matrix; column " +
                        ds.columns[static_cast<std::size_t>(j)].name + " has missing cells");
      }
    }
  }
}

}  // namespace survkit
