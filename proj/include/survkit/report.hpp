#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "survkit/rsf.hpp"
#include "survkit/validation.hpp"

namespace survkit {

// Round-trip-exact decimal rendering of a double ("%.17g"); NaN renders as NA.
std::string format_double(double v);
double parse_double_field(const std::string& token);

struct ModelReports {
  std::string model;
  std::optional<NCVReport> ncv;
  std::optional<MCReport> mc;
};

// Everything one run emits: per-fold and per-experiment scores with their
// aggregate tables, plus the optional importance ranking.
struct ReportBundle {
  std::vector<ModelReports> models;
  std::optional<ImportanceRanking> importance;
};

struct RunMeta {
  std::string config_digest;
  std::uint64_t seed = 0;
  std::size_t n_rows = 0;
  std::size_t n_columns = 0;
  std::vector<std::string> models;
  std::vector<std::string> protocols;
};

// Writes the bundle as CSV files with one-line schema headers plus the
// run_meta.json sidecar. run_meta.json is written last: a bundle without it is
// incomplete. File contents are byte-deterministic for a given bundle.
void write_bundle(const std::string& out_dir, const ReportBundle& bundle, const RunMeta& meta);

// Parsed rows of the emitted files; used to verify that embedded aggregates
// are recomputable from the per-row records.
struct NcvFoldRow {
  std::string model;
  int fold = 0;
  double train_cindex = 0.0;
  double inner_cv_cindex = 0.0;
  double test_cindex = 0.0;
  std::string chosen_params;
  bool failed = false;
};

struct NcvSummaryRow {
  std::string model;
  double test_cindex = 0.0;
  double train_cindex = 0.0;
  double inner_cv_cindex = 0.0;
};

struct McExperimentRow {
  std::string model;
  int experiment = 0;
  std::uint64_t seed = 0;
  double train_cindex = 0.0;
  double cv_cindex = 0.0;
  double test_cindex = 0.0;
  std::string chosen_params;
  bool failed = false;
};

struct McSummaryRow {
  std::string model;
  double test_mean = 0.0, test_sd = 0.0;
  double train_mean = 0.0, train_sd = 0.0;
  double cv_mean = 0.0, cv_sd = 0.0;
  int n_experiments = 0;
  int n_failed = 0;
};

struct ImportanceRow {
  std::string column;
  double importance = 0.0;
};

std::vector<NcvFoldRow> read_ncv_folds(const std::string& path);
std::vector<NcvSummaryRow> read_ncv_summary(const std::string& path);
std::vector<McExperimentRow> read_mc_experiments(const std::string& path);
std::vector<McSummaryRow> read_mc_summary(const std::string& path);
std::vector<ImportanceRow> read_importance(const std::string& path);

}  // namespace survkit
