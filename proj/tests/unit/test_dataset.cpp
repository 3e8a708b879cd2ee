#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "survkit/dataset.hpp"
#include "survkit/errors.hpp"
#include "survkit/synth.hpp"

using namespace survkit;

namespace {

std::string write_temp_csv(const std::string& content) {
  static int counter = 0;
  const std::string path = "dataset_test_" + std::to_string(counter++) + ".csv";
  std::ofstream out(path);
  out << content;
  return path;
}

SurvivalDataset tiny_dataset(std::initializer_list<double> col,
                             std::initializer_list<double> times,
                             std::initializer_list<int> events) {
  SurvivalDataset ds;
  const auto n = static_cast<Eigen::Index>(col.size());
  ds.features.resize(n, 1);
  ds.times.resize(n);
  ds.events.resize(n);
  Eigen::Index i = 0;
  for (const double v : col) ds.features(i++, 0) = v;
  i = 0;
  for (const double v : times) ds.times(i++) = v;
  i = 0;
  for (const int v : events) ds.events(i++) = v;
  ds.columns.push_back(ColumnMeta{"x", ColumnKind::numeric, "", 0.0});
  ds.refresh_missing_fractions();
  return ds;
}

double event_rate(const SurvivalDataset& ds, const std::vector<int>& rows) {
  int events = 0;
  for (const int r : rows) events += ds.events(r);
  return static_cast<double>(events) / static_cast<double>(rows.size());
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("load_csv parses a 3-row file") {
  const auto path = write_temp_csv("time,event,x1\n1.5,1,0.2\n2.0,0,0.5\n3.25,1,-1\n");
  SchemaConfig schema;
  schema.na_synonyms = {"NA"};  // keep -1 as a value for this file
  const auto ds = load_csv(path, schema);
  CHECK(ds.n_rows() == 3);
  CHECK(ds.n_cols() == 1);
  CHECK(ds.columns[0].name == "x1");
  CHECK(ds.times(2) == 3.25);
  CHECK(ds.events(1) == 0);
  CHECK(ds.features(2, 0) == -1.0);
  std::remove(path.c_str());
}

TEST_CASE("load_csv drops excluded features") {
  const auto path = write_temp_csv("time,event,scfru,x1\n1,1,3,0.2\n2,0,4,0.5\n");
  SchemaConfig schema;
  schema.exclude_features = {"scfru"};
  const auto ds = load_csv(path, schema);
  CHECK(ds.column_index("scfru") == -1);
  CHECK(ds.n_cols() == 1);
  // No indicator can derive from an excluded column.
  const auto expanded = add_missing_indicators(ds);
  for (const auto& col : expanded.columns) CHECK(col.source != "scfru");
  std::remove(path.c_str());
}

TEST_CASE("load_csv rejects contract violations") {
  SchemaConfig schema;
  const auto bad_event = write_temp_csv("time,event,x\n1,2,0.5\n");
  CHECK_THROWS_AS(load_csv(bad_event, schema), DataError);
  std::remove(bad_event.c_str());

  const auto negative_time = write_temp_csv("time,event,x\n-1,1,0.5\n");
  CHECK_THROWS_AS(load_csv(negative_time, schema), DataError);
  std::remove(negative_time.c_str());

  const auto duplicate = write_temp_csv("time,event,x,x\n1,1,0.5,0.5\n");
  CHECK_THROWS_AS(load_csv(duplicate, schema), DataError);
  std::remove(duplicate.c_str());

  const auto no_time = write_temp_csv("t,event,x\n1,1,0.5\n");
  CHECK_THROWS_AS(load_csv(no_time, schema), DataError);
  std::remove(no_time.c_str());

  const auto garbage = write_temp_csv("time,event,x\n1,1,hello\n");
  CHECK_THROWS_AS(load_csv(garbage, schema), DataError);
  std::remove(garbage.c_str());
}

TEST_CASE("load_csv maps NA synonyms to missing cells") {
  const auto path = write_temp_csv("time,event,x,y\n1,1,NA,2\n2,0,0.5,N/A\n3,1,,-9\n");
  SchemaConfig schema;
  const auto ds = load_csv(path, schema);
  CHECK(SurvivalDataset::is_missing(ds.features(0, 0)));
  CHECK(SurvivalDataset::is_missing(ds.features(1, 1)));
  CHECK(SurvivalDataset::is_missing(ds.features(2, 0)));
  CHECK(SurvivalDataset::is_missing(ds.features(2, 1)));  // -9 is a default synonym
  CHECK(ds.columns[0].missing_fraction == doctest::Approx(2.0 / 3.0));
  std::remove(path.c_str());
}

TEST_CASE("normalize_missing replaces numeric synonym values") {
  auto ds = tiny_dataset({-9.0, 1.0, 2.0}, {1, 2, 3}, {1, 0, 1});
  const auto out = normalize_missing(ds, {"-9"});
  CHECK(SurvivalDataset::is_missing(out.features(0, 0)));
  CHECK(out.features(1, 0) == 1.0);
  CHECK(out.columns[0].missing_fraction == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("normalize_missing is the identity without matches and is idempotent") {
  auto ds = tiny_dataset({0.5, 1.0, 2.0}, {1, 2, 3}, {1, 0, 1});
  const auto once = normalize_missing(ds, {"-9", "NA"});
  CHECK(once.features == ds.features);
  auto with_match = tiny_dataset({-9.0, 1.0, 2.0}, {1, 2, 3}, {1, 0, 1});
  const auto first = normalize_missing(with_match, {"-9"});
  const auto second = normalize_missing(first, {"-9"});
  for (Eigen::Index i = 0; i < second.n_rows(); ++i) {
    CHECK(SurvivalDataset::is_missing(second.features(i, 0)) ==
          SurvivalDataset::is_missing(first.features(i, 0)));
  }
  CHECK_THROWS_AS(normalize_missing(ds, {}), DataError);
}

TEST_CASE("add_missing_indicators builds one indicator per affected column") {
  SurvivalDataset ds;
  ds.features.resize(6, 2);
  ds.features.col(0) << 1, 2, SurvivalDataset::missing_value(), 4, 5,
      SurvivalDataset::missing_value();
  ds.features.col(1) << 1, 2, 3, 4, 5, 6;
  ds.times.resize(6);
  ds.times << 1, 2, 3, 4, 5, 6;
  ds.events.resize(6);
  ds.events << 1, 0, 1, 0, 1, 0;
  ds.columns = {ColumnMeta{"a", ColumnKind::numeric, "", 0.0},
                ColumnMeta{"b", ColumnKind::numeric, "", 0.0}};
  ds.refresh_missing_fractions();

  SUBCASE("values follow the missingness pattern; fully observed columns get none") {
    const auto out = add_missing_indicators(ds);
    CHECK(out.n_cols() == 3);
    const int idx = out.column_index("a__miss");
    REQUIRE(idx >= 0);
    CHECK(out.columns[static_cast<std::size_t>(idx)].kind == ColumnKind::missing_indicator);
    CHECK(out.columns[static_cast<std::size_t>(idx)].source == "a");
    Eigen::VectorXd expected(6);
    expected << 0, 0, 1, 0, 0, 1;
    CHECK(out.features.col(idx) == expected);
    CHECK(out.column_index("b__miss") == -1);
    validate_dataset(out);
  }

  SUBCASE("missing at rows 2 and 5 of 6 gives 0,1,0,0,1,0") {
    // Spec indexing is 1-based: rows {2,5} are matrix rows 1 and 4.
    SurvivalDataset shifted = ds;
    shifted.features.col(0) << 1, SurvivalDataset::missing_value(), 3, 4,
        SurvivalDataset::missing_value(), 6;
    shifted.refresh_missing_fractions();
    const auto out = add_missing_indicators(shifted);
    Eigen::VectorXd expected(6);
    expected << 0, 1, 0, 0, 1, 0;
    CHECK(out.features.col(out.column_index("a__miss")) == expected);
  }

  SUBCASE("two partially missing columns give exactly two indicators") {
    SurvivalDataset both = ds;
    both.features(0, 1) = SurvivalDataset::missing_value();
    both.refresh_missing_fractions();
    const auto out = add_missing_indicators(both);
    CHECK(out.n_cols() == 4);
  }

  SUBCASE("indicators may not be added twice") {
    const auto out = add_missing_indicators(ds);
    CHECK_THROWS_AS(add_missing_indicators(out), DataError);
  }

  SUBCASE("name collisions get the _2 suffix, then error") {
    SurvivalDataset clash = ds;
    clash.columns[1].name = "a__miss";
    const auto out = add_missing_indicators(clash);
    CHECK(out.column_index("a__miss_2") >= 0);
    SurvivalDataset clash2 = out;  // now both a__miss and a__miss_2 exist
    clash2.columns.pop_back();
    clash2.features.conservativeResize(Eigen::NoChange, 2);
    clash2.columns[0].name = "a";
    clash2.columns[1].name = "a__miss";
    clash2.columns[1].kind = ColumnKind::numeric;
    clash2.features(0, 1) = SurvivalDataset::missing_value();
    // Rebuild a second numeric column named a__miss_2 to exhaust the rule.
    SurvivalDataset clash3 = clash2;
    clash3.features.conservativeResize(Eigen::NoChange, 3);
    clash3.features.col(2) = clash2.features.col(1);
    clash3.columns.push_back(ColumnMeta{"a__miss_2", ColumnKind::numeric, "", 0.0});
    clash3.refresh_missing_fractions();
    CHECK_THROWS_AS(add_missing_indicators(clash3), DataError);
  }
}

TEST_CASE("drop_high_missingness applies the >= threshold rule") {
  SurvivalDataset ds;
  ds.features.resize(500, 3);
  ds.times.resize(500);
  ds.events.resize(500);
  for (Eigen::Index i = 0; i < 500; ++i) {
    ds.features(i, 0) = i < 254 ? SurvivalDataset::missing_value() : 1.0 * i;  // 50.8%
    ds.features(i, 1) = i < 255 ? SurvivalDataset::missing_value() : 1.0 * i;  // 51%
    ds.features(i, 2) = 1.0 * i;                                               // 0%
    ds.times(i) = i + 1;
    ds.events(i) = i % 2;
  }
  ds.columns = {ColumnMeta{"apoe", ColumnKind::numeric, "", 0.0},
                ColumnMeta{"b", ColumnKind::numeric, "", 0.0},
                ColumnMeta{"c", ColumnKind::numeric, "", 0.0}};
  ds.refresh_missing_fractions();
  CHECK(ds.columns[0].missing_fraction == doctest::Approx(0.508));

  const auto result = drop_high_missingness(ds, 0.51);
  CHECK(result.dataset.column_index("apoe") >= 0);  // 50.8% stays
  CHECK(result.dataset.column_index("b") == -1);    // 51% goes
  CHECK(result.dataset.column_index("c") >= 0);
  CHECK(result.dropped == std::vector<std::string>{"b"});

  CHECK_THROWS_AS(drop_high_missingness(ds, 0.0), DataError);
  CHECK_THROWS_AS(drop_high_missingness(ds, 1.5), DataError);
}

TEST_CASE("dropping a source drops its indicator unless configured otherwise") {
  SurvivalDataset ds;
  ds.features.resize(10, 2);
  ds.times.resize(10);
  ds.events.resize(10);
  for (Eigen::Index i = 0; i < 10; ++i) {
    ds.features(i, 0) = i < 6 ? SurvivalDataset::missing_value() : 1.0 * i;  // 60%
    ds.features(i, 1) = i < 1 ? SurvivalDataset::missing_value() : 2.0 * i;  // 10%
    ds.times(i) = i + 1;
    ds.events(i) = i % 2;
  }
  ds.columns = {ColumnMeta{"high", ColumnKind::numeric, "", 0.0},
                ColumnMeta{"low", ColumnKind::numeric, "", 0.0}};
  ds.refresh_missing_fractions();
  const auto expanded = add_missing_indicators(ds);

  const auto dropped = drop_high_missingness(expanded, 0.51);
  CHECK(dropped.dataset.column_index("high") == -1);
  CHECK(dropped.dataset.column_index("high__miss") == -1);
  CHECK(dropped.dataset.column_index("low__miss") >= 0);
  CHECK(dropped.dropped == std::vector<std::string>{"high", "high__miss"});

  const auto kept = drop_high_missingness(expanded, 0.51, /*keep_orphan_indicators=*/true);
  CHECK(kept.dataset.column_index("high") == -1);
  CHECK(kept.dataset.column_index("high__miss") >= 0);  // indicators never self-drop

  SurvivalDataset all_high = ds;
  all_high.features.col(1) = all_high.features.col(0);
  all_high.refresh_missing_fractions();
  CHECK_THROWS_AS(drop_high_missingness(all_high, 0.51), DataError);
}

TEST_CASE("remove_duplicate_columns keeps the first by name order") {
  SurvivalDataset ds;
  ds.features.resize(4, 3);
  ds.features.col(0) << 1, SurvivalDataset::missing_value(), 3, 4;
  ds.features.col(1) << 1, SurvivalDataset::missing_value(), 3, 4;  // same content
  ds.features.col(2) << 1, 2, 3, 4;
  ds.times.resize(4);
  ds.times << 1, 2, 3, 4;
  ds.events.resize(4);
  ds.events << 1, 0, 1, 0;
  ds.columns = {ColumnMeta{"zeta", ColumnKind::numeric, "", 0.0},
                ColumnMeta{"alpha", ColumnKind::numeric, "", 0.0},
                ColumnMeta{"beta", ColumnKind::numeric, "", 0.0}};
  ds.refresh_missing_fractions();
  const auto result = remove_duplicate_columns(ds);
  CHECK(result.dataset.n_cols() == 2);
  CHECK(result.dataset.column_index("alpha") >= 0);
  CHECK(result.dataset.column_index("zeta") == -1);
  CHECK(result.dropped == std::vector<std::string>{"zeta"});
}

TEST_CASE("preprocess recounts missing fractions consistently") {
  SynthSpec spec;
  spec.n = 200;
  spec.p = 4;
  spec.beta_true = Eigen::VectorXd::Zero(4);
  spec.beta_true(0) = 1.0;
  spec.missing_rate = 0.2;
  spec.seed = 5;
  const auto raw = generate(spec);
  SchemaConfig schema;
  const auto result = preprocess(raw, schema);
  validate_dataset(result.dataset);
  for (Eigen::Index j = 0; j < result.dataset.n_cols(); ++j) {
    Eigen::Index miss = 0;
    for (Eigen::Index i = 0; i < result.dataset.n_rows(); ++i) {
      if (SurvivalDataset::is_missing(result.dataset.features(i, j))) ++miss;
    }
    CHECK(result.dataset.columns[static_cast<std::size_t>(j)].missing_fraction ==
          doctest::Approx(static_cast<double>(miss) / 200.0));
  }
}

TEST_CASE("stratified_split rounds per stratum") {
  SurvivalDataset ds;
  const int n = 300;  // 90 events, 210 censored
  ds.features.resize(n, 1);
  ds.times.resize(n);
  ds.events.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.features(i, 0) = i;
    ds.times(i) = i + 1;
    ds.events(i) = i < 90 ? 1 : 0;
  }
  ds.columns.push_back(ColumnMeta{"x", ColumnKind::numeric, "", 0.0});

  const auto split = stratified_split(ds, 2.0 / 3.0, 17);
  int train_events = 0;
  int train_censored = 0;
  for (const int r : split.train_indices) (ds.events(r) == 1 ? train_events : train_censored)++;
  CHECK(train_events == 60);
  CHECK(train_censored == 140);
  CHECK(split.train_indices.size() + split.test_indices.size() == n);

  // Disjointness.
  std::set<int> seen(split.train_indices.begin(), split.train_indices.end());
  for (const int r : split.test_indices) CHECK(seen.count(r) == 0);

  // Determinism and seed sensitivity.
  const auto again = stratified_split(ds, 2.0 / 3.0, 17);
  CHECK(again.train_indices == split.train_indices);
  CHECK(again.test_indices == split.test_indices);
  const auto other = stratified_split(ds, 2.0 / 3.0, 18);
  CHECK(other.train_indices != split.train_indices);

  // Stratification bound from the SplitPair contract.
  const double full_rate = 90.0 / 300.0;
  const double bound = 1.0 / static_cast<double>(split.train_indices.size()) + 1.0 / 300.0;
  CHECK(std::abs(event_rate(ds, split.train_indices) - full_rate) <= bound);
}

TEST_CASE("stratified_split on a 7556-row cohort leaves 2519 +- 1 for test") {
  SynthSpec spec;
  spec.n = 7556;
  spec.p = 2;
  spec.beta_true = Eigen::VectorXd::Zero(2);
  spec.censor_rate_target = 0.7;
  spec.seed = 2026;
  const auto ds = generate(spec);
  const auto split = stratified_split(ds, 2.0 / 3.0, 1);

  // Recount from the per-stratum rounding rule.
  int n_events = ds.events.sum();
  int n_censored = 7556 - n_events;
  const auto round_half_away = [](double x) { return std::floor(x + 0.5); };
  const int expected_train = static_cast<int>(round_half_away(2.0 / 3.0 * n_events)) +
                             static_cast<int>(round_half_away(2.0 / 3.0 * n_censored));
  CHECK(static_cast<int>(split.train_indices.size()) == expected_train);
  CHECK(std::abs(static_cast<int>(split.test_indices.size()) - 2519) <= 1);
}

TEST_CASE("stratified_split input contracts") {
  auto ds = tiny_dataset({1, 2, 3, 4}, {1, 2, 3, 4}, {1, 1, 0, 0});
  CHECK_THROWS_AS(stratified_split(ds, 0.0, 1), DataError);
  CHECK_THROWS_AS(stratified_split(ds, 1.0, 1), DataError);
  // 2 events at fraction 0.9: rounding would put both events in train.
  CHECK_THROWS_AS(stratified_split(ds, 0.9, 1), DataError);
  auto few = tiny_dataset({1, 2, 3}, {1, 2, 3}, {1, 0, 0});
  CHECK_THROWS_AS(stratified_split(few, 0.5, 1), DataError);
}

TEST_CASE("stratified_kfold partitions with divisible strata") {
  SurvivalDataset ds;
  const int n = 30;  // 9 events, 21 censored
  ds.features.resize(n, 1);
  ds.times.resize(n);
  ds.events.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.features(i, 0) = i;
    ds.times(i) = i + 1;
    ds.events(i) = i < 9 ? 1 : 0;
  }
  ds.columns.push_back(ColumnMeta{"x", ColumnKind::numeric, "", 0.0});

  const auto folds = stratified_kfold(ds, 3, 5);
  REQUIRE(folds.size() == 3);
  std::set<int> all_test;
  for (const auto& fold : folds) {
    int ev = 0;
    for (const int r : fold.test_indices) {
      ev += ds.events(r);
      CHECK(all_test.insert(r).second);  // each index in exactly one test fold
    }
    CHECK(ev == 3);
    CHECK(fold.test_indices.size() == 10);
    CHECK(fold.train_indices.size() == 20);
  }
  CHECK(all_test.size() == 30);

  const auto again = stratified_kfold(ds, 3, 5);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(again[f].test_indices == folds[f].test_indices);
  }
}

TEST_CASE("stratified_kfold deals remainders to ascending folds") {
  SurvivalDataset ds;
  const int n = 27;  // 7 events, 20 censored
  ds.features.resize(n, 1);
  ds.times.resize(n);
  ds.events.resize(n);
  for (int i = 0; i < n; ++i) {
    ds.features(i, 0) = i;
    ds.times(i) = i + 1;
    ds.events(i) = i < 7 ? 1 : 0;
  }
  ds.columns.push_back(ColumnMeta{"x", ColumnKind::numeric, "", 0.0});

  const auto folds = stratified_kfold(ds, 5, 123);
  std::vector<int> event_counts;
  int total = 0;
  for (const auto& fold : folds) {
    int ev = 0;
    for (const int r : fold.test_indices) ev += ds.events(r);
    event_counts.push_back(ev);
    total += ev;
  }
  CHECK(total == 7);
  // 7 = 2+2+1+1+1 with the remainder in folds 0 and 1.
  CHECK(event_counts == std::vector<int>{2, 2, 1, 1, 1});

  CHECK_THROWS_AS(stratified_kfold(ds, 8, 1), DataError);  // event stratum smaller than k
  CHECK_THROWS_AS(stratified_kfold(ds, 1, 1), DataError);
}

}  // TEST_SUITE
