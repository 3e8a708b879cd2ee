#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "survkit/types.hpp"

namespace survkit {

// Input schema: names the outcome columns and configures missingness handling.
struct SchemaConfig {
  std::string time_column = "time";
  std::string event_column = "event";
  std::vector<std::string> exclude_features;
  std::vector<std::string> na_synonyms = default_na_synonyms();
  double missingness_threshold = 0.51;
  bool keep_orphan_indicators = false;

  static std::vector<std::string> default_na_synonyms() {
    return {"", "NA", "N/A", "-9", "-8", "-1"};
  }
};

// Loads a UTF-8 comma-separated file with one header row. Cells whose token
// matches an NA synonym become missing; other non-numeric cells are an error.
// Excluded features are dropped at load. Throws DataError on contract
// violations (missing time/event column, event outside {0,1}, negative time,
// duplicate column name).
SurvivalDataset load_csv(const std::string& path, const SchemaConfig& schema);

// Replaces every feature cell equal to a numeric NA synonym with the missing
// marker. String synonyms act at parse time (load_csv); here only synonyms
// that parse as numbers can match already-parsed cells. Idempotent.
SurvivalDataset normalize_missing(const SurvivalDataset& ds,
                                  const std::vector<std::string>& na_synonyms);

// Appends one {0,1} indicator column per numeric column that has at least one
// missing cell. Indicator names follow "<col>__miss", with "_2" appended on
// collision; a collision after suffixing is an error, as is calling this on a
// dataset that already carries indicators.
SurvivalDataset add_missing_indicators(const SurvivalDataset& ds);

struct DropResult {
  SurvivalDataset dataset;
  std::vector<std::string> dropped;  // sorted by name
};

// Removes numeric columns whose missing fraction is >= threshold, together
// with their indicators unless keep_orphan_indicators is set. Indicators are
// never dropped by their own (always zero) missingness.
DropResult drop_high_missingness(const SurvivalDataset& ds, double threshold,
                                 bool keep_orphan_indicators = false);

// Collapses groups of columns with identical cell vectors (missing cells
// compare equal) to the lexicographically first name in each group.
DropResult remove_duplicate_columns(const SurvivalDataset& ds);

struct PreprocessResult {
  SurvivalDataset dataset;
  std::vector<std::string> dropped_duplicates;
  std::vector<std::string> dropped_high_missingness;
};

// The fixed structural pipeline: normalize_missing -> remove_duplicate_columns
// -> add_missing_indicators -> drop_high_missingness. Imputation is a separate
// fitted step (see impute.hpp) applied per training partition.
PreprocessResult preprocess(const SurvivalDataset& ds, const SchemaConfig& schema);

// Stratified train/test split: events and censored subjects are sampled
// separately without replacement; per-stratum train count is
// round(train_fraction * stratum size). Deterministic per seed.
SplitPair stratified_split(const SurvivalDataset& ds, double train_fraction,
                           std::uint64_t seed);

// Stratified k-fold partition. Within each stratum the shuffled members are
// dealt into folds whose sizes differ by at most one; remainder members go to
// folds in ascending fold index. Deterministic per seed.
std::vector<SplitPair> stratified_kfold(const SurvivalDataset& ds, int k,
                                        std::uint64_t seed);

}  // namespace survkit
