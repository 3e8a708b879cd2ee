#include "survkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "survkit/errors.hpp"
#include "survkit/random.hpp"

namespace survkit {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_double(const std::string& token) {
  if (token.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

double round_half_away(double x) { return std::floor(x + 0.5); }

}  // namespace

SurvivalDataset load_csv(const std::string& path, const SchemaConfig& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input file: " + path);
  const std::vector<std::string> header = split_line(line);

  std::unordered_set<std::string> seen;
  for (const auto& name : header) {
    if (!seen.insert(name).second) throw DataError("duplicate column name: " + name);
  }

  const std::unordered_set<std::string> synonyms(schema.na_synonyms.begin(),
                                                 schema.na_synonyms.end());
  const std::unordered_set<std::string> excluded(schema.exclude_features.begin(),
                                                 schema.exclude_features.end());
  if (excluded.count(schema.time_column) || excluded.count(schema.event_column)) {
    throw DataError("time/event column cannot be excluded");
  }

  int time_col = -1;
  int event_col = -1;
  std::vector<int> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == schema.time_column) {
      time_col = static_cast<int>(j);
    } else if (header[j] == schema.event_column) {
      event_col = static_cast<int>(j);
    } else if (!excluded.count(header[j])) {
      feature_cols.push_back(static_cast<int>(j));
      feature_names.push_back(header[j]);
    }
  }
  if (time_col < 0) throw DataError("missing time column: " + schema.time_column);
  if (event_col < 0) throw DataError("missing event column: " + schema.event_column);

  std::vector<std::vector<double>> rows;
  std::vector<double> times;
  std::vector<int> events;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    const auto parse_outcome = [&](int col, const char* what) {
      const std::string& token = cells[static_cast<std::size_t>(col)];
      if (synonyms.count(token)) {
        throw DataError(std::string("missing value in ") + what + " column (row " +
                        std::to_string(line_no) + ")");
      }
      const auto v = parse_double(token);
      if (!v) {
        throw DataError(std::string("non-numeric ") + what + " value '" + token + "' (row " +
                        std::to_string(line_no) + ")");
      }
      return *v;
    };
    const double t = parse_outcome(time_col, "time");
    if (t < 0.0) throw DataError("negative time (row " + std::to_string(line_no) + ")");
    const double ev = parse_outcome(event_col, "event");
    if (ev != 0.0 && ev != 1.0) {
      throw DataError("event value outside {0,1} (row " + std::to_string(line_no) + ")");
    }
    std::vector<double> row(feature_cols.size());
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      const std::string& token = cells[static_cast<std::size_t>(feature_cols[f])];
      if (synonyms.count(token)) {
        row[f] = SurvivalDataset::missing_value();
        continue;
      }
      const auto v = parse_double(token);
      if (!v) {
        throw DataError("non-numeric cell '" + token + "' in column " + feature_names[f] +
                        " (row " + std::to_string(line_no) + ")");
      }
      row[f] = *v;
    }
    rows.push_back(std::move(row));
    times.push_back(t);
    events.push_back(static_cast<int>(ev));
  }

  SurvivalDataset ds;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(feature_names.size());
  ds.features.resize(n, p);
  ds.times.resize(n);
  ds.events.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      ds.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    ds.times(i) = times[static_cast<std::size_t>(i)];
    ds.events(i) = events[static_cast<std::size_t>(i)];
  }
  ds.columns.reserve(feature_names.size());
  for (const auto& name : feature_names) {
    ds.columns.push_back(ColumnMeta{name, ColumnKind::numeric, "", 0.0});
  }
  ds.refresh_missing_fractions();
  validate_dataset(ds);
  return ds;
}

SurvivalDataset normalize_missing(const SurvivalDataset& ds,
                                  const std::vector<std::string>& na_synonyms) {
  if (na_synonyms.empty()) throw DataError("na_synonyms must be non-empty");
  std::vector<double> numeric_synonyms;
  for (const auto& s : na_synonyms) {
    if (const auto v = parse_double(s)) numeric_synonyms.push_back(*v);
  }
  SurvivalDataset out = ds;
  for (Eigen::Index j = 0; j < out.n_cols(); ++j) {
    for (Eigen::Index i = 0; i < out.n_rows(); ++i) {
      const double v = out.features(i, j);
      if (SurvivalDataset::is_missing(v)) continue;
      for (const double s : numeric_synonyms) {
        if (v == s) {
          out.features(i, j) = SurvivalDataset::missing_value();
          break;
        }
      }
    }
  }
  out.refresh_missing_fractions();
  return out;
}

SurvivalDataset add_missing_indicators(const SurvivalDataset& ds) {
  for (const auto& col : ds.columns) {
    if (col.kind == ColumnKind::missing_indicator) {
      throw DataError("dataset already carries missing indicators");
    }
  }
  std::unordered_set<std::string> taken;
  for (const auto& col : ds.columns) taken.insert(col.name);

  std::vector<int> sources;
  std::vector<std::string> indicator_names;
  for (Eigen::Index j = 0; j < ds.n_cols(); ++j) {
    const auto& col = ds.columns[static_cast<std::size_t>(j)];
    if (col.missing_fraction <= 0.0) continue;
    std::string name = col.name + "__miss";
    if (taken.count(name)) name += "_2";
    if (taken.count(name)) {
      throw DataError("indicator name collision for column " + col.name);
    }
    taken.insert(name);
    sources.push_back(static_cast<int>(j));
    indicator_names.push_back(name);
  }

  SurvivalDataset out;
  out.times = ds.times;
  out.events = ds.events;
  out.time_unit = ds.time_unit;
  out.columns = ds.columns;
  const Eigen::Index n = ds.n_rows();
  const Eigen::Index p = ds.n_cols();
  const Eigen::Index extra = static_cast<Eigen::Index>(sources.size());
  out.features.resize(n, p + extra);
  out.features.leftCols(p) = ds.features;
  for (Eigen::Index e = 0; e < extra; ++e) {
    const Eigen::Index src = sources[static_cast<std::size_t>(e)];
    for (Eigen::Index i = 0; i < n; ++i) {
      out.features(i, p + e) = SurvivalDataset::is_missing(ds.features(i, src)) ? 1.0 : 0.0;
    }
    out.columns.push_back(ColumnMeta{indicator_names[static_cast<std::size_t>(e)],
                                     ColumnKind::missing_indicator,
                                     ds.columns[static_cast<std::size_t>(src)].name, 0.0});
  }
  out.refresh_missing_fractions();
  return out;
}

namespace {

SurvivalDataset keep_columns(const SurvivalDataset& ds, const std::vector<int>& keep) {
  SurvivalDataset out;
  out.times = ds.times;
  out.events = ds.events;
  out.time_unit = ds.time_unit;
  out.features.resize(ds.n_rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.features.col(static_cast<Eigen::Index>(j)) = ds.features.col(keep[j]);
    out.columns.push_back(ds.columns[static_cast<std::size_t>(keep[j])]);
  }
  return out;
}

}  // namespace

DropResult drop_high_missingness(const SurvivalDataset& ds, double threshold,
                                 bool keep_orphan_indicators) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw DataError("missingness threshold must lie in (0, 1]");
  }
  std::unordered_set<std::string> dropped_sources;
  for (const auto& col : ds.columns) {
    if (col.kind == ColumnKind::numeric && col.missing_fraction >= threshold) {
      dropped_sources.insert(col.name);
    }
  }
  std::vector<int> keep;
  std::vector<std::string> dropped;
  for (Eigen::Index j = 0; j < ds.n_cols(); ++j) {
    const auto& col = ds.columns[static_cast<std::size_t>(j)];
    bool drop = false;
    if (col.kind == ColumnKind::numeric) {
      drop = dropped_sources.count(col.name) > 0;
    } else if (!keep_orphan_indicators) {
      drop = dropped_sources.count(col.source) > 0;
    }
    if (drop) {
      dropped.push_back(col.name);
    } else {
      keep.push_back(static_cast<int>(j));
    }
  }
  if (keep.empty()) throw DataError("all feature columns dropped: empty model space");
  std::sort(dropped.begin(), dropped.end());
  return DropResult{keep_columns(ds, keep), std::move(dropped)};
}

DropResult remove_duplicate_columns(const SurvivalDataset& ds) {
  // Content key: cell bytes with NaN and zero canonicalized so that missing
  // cells compare equal and -0.0 == 0.0.
  const auto column_key = [&](Eigen::Index j) {
    std::string key(static_cast<std::size_t>(ds.n_rows()) * sizeof(double), '\0');
    for (Eigen::Index i = 0; i < ds.n_rows(); ++i) {
      double v = ds.features(i, j);
      if (SurvivalDataset::is_missing(v)) v = std::numeric_limits<double>::quiet_NaN();
      if (v == 0.0) v = 0.0;
      std::memcpy(key.data() + static_cast<std::size_t>(i) * sizeof(double), &v, sizeof(double));
    }
    return key;
  };
  std::unordered_map<std::string, std::vector<int>> groups;
  for (Eigen::Index j = 0; j < ds.n_cols(); ++j) {
    groups[column_key(j)].push_back(static_cast<int>(j));
  }
  std::vector<bool> drop_mask(static_cast<std::size_t>(ds.n_cols()), false);
  std::vector<std::string> dropped;
  for (auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    int keep_idx = members[0];
    for (const int j : members) {
      if (ds.columns[static_cast<std::size_t>(j)].name <
          ds.columns[static_cast<std::size_t>(keep_idx)].name) {
        keep_idx = j;
      }
    }
    for (const int j : members) {
      if (j == keep_idx) continue;
      drop_mask[static_cast<std::size_t>(j)] = true;
      dropped.push_back(ds.columns[static_cast<std::size_t>(j)].name);
    }
  }
  std::vector<int> keep;
  for (Eigen::Index j = 0; j < ds.n_cols(); ++j) {
    if (!drop_mask[static_cast<std::size_t>(j)]) keep.push_back(static_cast<int>(j));
  }
  std::sort(dropped.begin(), dropped.end());
  return DropResult{keep_columns(ds, keep), std::move(dropped)};
}

PreprocessResult preprocess(const SurvivalDataset& ds, const SchemaConfig& schema) {
  SurvivalDataset normalized = normalize_missing(ds, schema.na_synonyms);
  DropResult deduped = remove_duplicate_columns(normalized);
  SurvivalDataset with_indicators = add_missing_indicators(deduped.dataset);
  DropResult dropped = drop_high_missingness(with_indicators, schema.missingness_threshold,
                                             schema.keep_orphan_indicators);
  return PreprocessResult{std::move(dropped.dataset), std::move(deduped.dropped),
                          std::move(dropped.dropped)};
}

namespace {

struct Strata {
  std::vector<int> events;
  std::vector<int> censored;
};

Strata collect_strata(const SurvivalDataset& ds) {
  Strata s;
  for (Eigen::Index i = 0; i < ds.n_rows(); ++i) {
    (ds.events(i) == 1 ? s.events : s.censored).push_back(static_cast<int>(i));
  }
  return s;
}

}  // namespace

SplitPair stratified_split(const SurvivalDataset& ds, double train_fraction,
                           std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train_fraction must lie in (0, 1)");
  }
  Strata strata = collect_strata(ds);
  if (strata.events.size() < 2 || strata.censored.size() < 2) {
    throw DataError("stratified split requires >= 2 events and >= 2 censored subjects");
  }
  Rng rng(seed);
  SplitPair split;
  split.seed = seed;
  const auto deal = [&](std::vector<int>& stratum, bool is_event_stratum) {
    rng.shuffle(stratum);
    const auto n = static_cast<double>(stratum.size());
    auto n_train = static_cast<std::size_t>(round_half_away(train_fraction * n));
    if (is_event_stratum && (n_train == 0 || n_train == stratum.size())) {
      throw DataError("too few rows to place at least one event in each side");
    }
    for (std::size_t i = 0; i < stratum.size(); ++i) {
      (i < n_train ? split.train_indices : split.test_indices).push_back(stratum[i]);
    }
  };
  deal(strata.events, true);
  deal(strata.censored, false);
  std::sort(split.train_indices.begin(), split.train_indices.end());
  std::sort(split.test_indices.begin(), split.test_indices.end());
  return split;
}

std::vector<SplitPair> stratified_kfold(const SurvivalDataset& ds, int k, std::uint64_t seed) {
  if (k < 2) throw DataError("k-fold requires k >= 2");
  Strata strata = collect_strata(ds);
  if (strata.events.size() < static_cast<std::size_t>(k) ||
      strata.censored.size() < static_cast<std::size_t>(k)) {
    throw DataError("every stratum must hold at least k members");
  }
  Rng rng(seed);
  std::vector<std::vector<int>> fold_members(static_cast<std::size_t>(k));
  const auto deal = [&](std::vector<int>& stratum) {
    rng.shuffle(stratum);
    const std::size_t base = stratum.size() / static_cast<std::size_t>(k);
    const std::size_t rem = stratum.size() % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
      const std::size_t take = base + (f < rem ? 1 : 0);
      for (std::size_t i = 0; i < take; ++i) fold_members[f].push_back(stratum[pos++]);
    }
  };
  deal(strata.events);
  deal(strata.censored);

  std::vector<SplitPair> folds(static_cast<std::size_t>(k));
  for (std::size_t f = 0; f < static_cast<std::size_t>(k); ++f) {
    folds[f].seed = seed;
    folds[f].test_indices = fold_members[f];
    for (std::size_t g = 0; g < static_cast<std::size_t>(k); ++g) {
      if (g == f) continue;
      folds[f].train_indices.insert(folds[f].train_indices.end(), fold_members[g].begin(),
                                    fold_members[g].end());
    }
    std::sort(folds[f].train_indices.begin(), folds[f].train_indices.end());
    std::sort(folds[f].test_indices.begin(), folds[f].test_indices.end());
  }
  return folds;
}

}  // namespace survkit
