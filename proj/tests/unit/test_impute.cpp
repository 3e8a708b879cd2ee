#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "survkit/errors.hpp"
#include "survkit/impute.hpp"
#include "survkit/random.hpp"

using namespace survkit;

namespace {

constexpr double kNA = std::numeric_limits<double>::quiet_NaN();

Eigen::MatrixXd random_matrix_with_missing(Rng& rng, int n, int p, double missing_rate) {
  Eigen::MatrixXd m(n, p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) {
      m(i, j) = rng.uniform() < missing_rate ? kNA : rng.normal();
    }
  }
  return m;
}

std::vector<ColumnMeta> numeric_columns(int p) {
  std::vector<ColumnMeta> cols;
  for (int j = 0; j < p; ++j) {
    cols.push_back(ColumnMeta{"x" + std::to_string(j + 1), ColumnKind::numeric, "", 0.0});
  }
  return cols;
}

}  // namespace

TEST_SUITE("impute") {

TEST_CASE("standardizer means and sds over observed cells") {
  Eigen::MatrixXd m(3, 3);
  m << 2, 5, 1, 4, 5, kNA, 6, 5, 3;
  const auto st = fit_standardizer(m);
  CHECK(st.mean(0) == doctest::Approx(4.0));
  CHECK(st.sd(0) == doctest::Approx(2.0));  // sample sd of {2,4,6}
  CHECK(st.mean(2) == doctest::Approx(2.0));  // observed-only mean of {1,3}
  // A constant column stores sd 1 and transforms to centered zeros.
  CHECK(st.sd(1) == 1.0);
  const auto out = apply_standardizer(st, m);
  CHECK(out(0, 1) == 0.0);
  CHECK(out(2, 1) == 0.0);
  CHECK(SurvivalDataset::is_missing(out(1, 2)));
}

TEST_CASE("standardized training columns have mean 0 and sd 1") {
  Rng rng(3);
  const Eigen::MatrixXd m = random_matrix_with_missing(rng, 60, 4, 0.15);
  const auto st = fit_standardizer(m);
  const auto out = apply_standardizer(st, m);
  for (int j = 0; j < 4; ++j) {
    double sum = 0.0;
    double ss = 0.0;
    int count = 0;
    for (int i = 0; i < 60; ++i) {
      if (SurvivalDataset::is_missing(out(i, j))) continue;
      sum += out(i, j);
      ++count;
    }
    const double mean = sum / count;
    for (int i = 0; i < 60; ++i) {
      if (SurvivalDataset::is_missing(out(i, j))) continue;
      ss += (out(i, j) - mean) * (out(i, j) - mean);
    }
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::sqrt(ss / (count - 1)) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("standardizer rejects an all-missing column") {
  Eigen::MatrixXd m(2, 2);
  m << 1, kNA, 2, kNA;
  CHECK_THROWS_AS(fit_standardizer(m), DataError);
}

TEST_CASE("knn_impute returns complete targets unchanged") {
  Rng rng(4);
  const Eigen::MatrixXd reference = random_matrix_with_missing(rng, 20, 3, 0.1);
  const Eigen::MatrixXd target = random_matrix_with_missing(rng, 5, 3, 0.0);
  const auto imputer = make_knn_imputer(reference, numeric_columns(3), 5);
  CHECK(knn_impute(target, imputer) == target);
}

TEST_CASE("identical nearest neighbours impute their shared value") {
  Eigen::MatrixXd reference(6, 2);
  reference << 0.0, 7.0, 0.1, 7.0, -0.1, 7.0, 0.05, 7.0, -0.05, 7.0, 50.0, 1.0;
  Eigen::MatrixXd target(1, 2);
  target << 0.0, kNA;
  const auto imputer = make_knn_imputer(reference, numeric_columns(2), 5);
  const auto out = knn_impute(target, imputer);
  CHECK(out(0, 1) == doctest::Approx(7.0));
}

TEST_CASE("8x3 reference matches the brute-force oracle") {
  Rng rng(11);
  Eigen::MatrixXd reference = random_matrix_with_missing(rng, 8, 3, 0.2);
  // Column 0 fully observed so the imputed cell always has neighbours.
  for (int i = 0; i < 8; ++i) {
    if (SurvivalDataset::is_missing(reference(i, 0))) reference(i, 0) = rng.normal();
  }
  Eigen::MatrixXd target(2, 3);
  target << kNA, 0.3, -0.2, 0.4, kNA, 0.1;
  const std::vector<char> mask(3, 0);
  const auto imputer = make_knn_imputer(reference, numeric_columns(3), 5);
  const auto out = knn_impute(target, imputer);
  CHECK(out(0, 0) == doctest::Approx(oracles::knn_impute_cell(target, 0, 0, reference, mask, 5))
                         .epsilon(1e-12));
  CHECK(out(1, 1) == doctest::Approx(oracles::knn_impute_cell(target, 1, 1, reference, mask, 5))
                         .epsilon(1e-12));
  CHECK(!out.hasNaN());
}

TEST_CASE("held-out imputation never reads other held-out rows") {
  Rng rng(12);
  const Eigen::MatrixXd reference = random_matrix_with_missing(rng, 30, 4, 0.1);
  Eigen::MatrixXd target = random_matrix_with_missing(rng, 10, 4, 0.3);
  target(0, 0) = kNA;  // ensure at least one imputed cell in row 0
  const auto imputer = make_knn_imputer(reference, numeric_columns(4), 5);
  const Eigen::MatrixXd full = knn_impute(target, imputer);

  // Impute row 0 alone: other held-out rows are invisible to it.
  const Eigen::MatrixXd alone = knn_impute(target.topRows(1), imputer);
  CHECK(full.row(0) == alone.row(0));

  // Shuffling the remaining held-out rows changes nothing for row 0.
  Eigen::MatrixXd shuffled = target;
  shuffled.row(3).swap(shuffled.row(7));
  shuffled.row(2).swap(shuffled.row(9));
  const Eigen::MatrixXd out = knn_impute(shuffled, imputer);
  CHECK(out.row(0) == full.row(0));
}

TEST_CASE("permuting reference rows leaves imputed values unchanged") {
  Rng rng(13);
  const Eigen::MatrixXd reference = random_matrix_with_missing(rng, 25, 3, 0.15);
  Eigen::MatrixXd target = random_matrix_with_missing(rng, 6, 3, 0.3);
  const auto imputer = make_knn_imputer(reference, numeric_columns(3), 4);
  const Eigen::MatrixXd base = knn_impute(target, imputer);

  std::vector<int> perm(25);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  Eigen::MatrixXd permuted(25, 3);
  for (int i = 0; i < 25; ++i) permuted.row(i) = reference.row(perm[i]);
  const auto imputer2 = make_knn_imputer(permuted, numeric_columns(3), 4);
  const Eigen::MatrixXd out = knn_impute(target, imputer2);
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    for (Eigen::Index j = 0; j < base.cols(); ++j) {
      CHECK(out(i, j) == doctest::Approx(base(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("distance ties break by smaller reference-row index") {
  // Rows 0 and 1 sit at the same distance from the target; k = 1 must pick
  // row 0's value for the missing cell.
  Eigen::MatrixXd reference(3, 2);
  reference << 1.0, 10.0, -1.0, 20.0, 5.0, 30.0;
  Eigen::MatrixXd target(1, 2);
  target << 0.0, kNA;
  const auto imputer = make_knn_imputer(reference, numeric_columns(2), 1);
  const auto out = knn_impute(target, imputer);
  CHECK(out(0, 1) == 10.0);
}

TEST_CASE("imputed indicator cells snap to {0,1} and 0.5 rounds down") {
  Eigen::MatrixXd reference(4, 2);
  reference << 0.0, 1.0, 0.1, 1.0, -0.1, 0.0, 0.2, 0.0;
  std::vector<ColumnMeta> cols = numeric_columns(2);
  cols[1].kind = ColumnKind::missing_indicator;
  cols[1].source = "x1";
  Eigen::MatrixXd target(1, 2);
  target << 0.0, kNA;
  // k = 4 averages {1,1,0,0} = 0.5, which rounds to 0.
  const auto imputer = make_knn_imputer(reference, cols, 4);
  CHECK(knn_impute(target, imputer)(0, 1) == 0.0);
  // k = 2 averages the two nearest {1,1} = 1.
  const auto imputer2 = make_knn_imputer(reference, cols, 2);
  CHECK(knn_impute(target, imputer2)(0, 1) == 1.0);
}

TEST_CASE("indicator columns are not distance coordinates") {
  // The indicator column would pull row 1 closer; distances must ignore it.
  Eigen::MatrixXd reference(2, 3);
  reference << 0.0, 100.0, 42.0, 3.0, 0.0, 7.0;
  std::vector<ColumnMeta> cols = numeric_columns(3);
  cols[1].kind = ColumnKind::missing_indicator;
  cols[1].source = "x1";
  Eigen::MatrixXd target(1, 3);
  target << 0.1, 100.0, kNA;
  const auto imputer = make_knn_imputer(reference, cols, 1);
  CHECK(knn_impute(target, imputer)(0, 2) == 42.0);
}

TEST_CASE("fallback to all eligible neighbours is counted") {
  Eigen::MatrixXd reference(3, 2);
  reference << 1.0, 5.0, 2.0, kNA, 3.0, kNA;
  Eigen::MatrixXd target(1, 2);
  target << 1.5, kNA;
  const auto imputer = make_knn_imputer(reference, numeric_columns(2), 3);
  ImputeStats stats;
  const auto out = knn_impute(target, imputer, &stats);
  CHECK(out(0, 1) == 5.0);  // only one eligible neighbour
  CHECK(stats.imputed_cells == 1);
  CHECK(stats.fallback_cells == 1);
}

TEST_CASE("no reference row observing a column is an error") {
  Eigen::MatrixXd reference(2, 2);
  reference << 1.0, kNA, 2.0, kNA;
  Eigen::MatrixXd target(1, 2);
  target << 1.5, kNA;
  const auto imputer = make_knn_imputer(reference, numeric_columns(2), 1);
  CHECK_THROWS_AS(knn_impute(target, imputer), DataError);
}

TEST_CASE("imputer construction contracts") {
  Eigen::MatrixXd reference(3, 1);
  reference << 1, 2, 3;
  CHECK_THROWS_AS(make_knn_imputer(reference, numeric_columns(1), 0), DataError);
  CHECK_THROWS_AS(make_knn_imputer(reference, numeric_columns(1), 4), DataError);
  CHECK_THROWS_AS(make_knn_imputer(reference, numeric_columns(2), 2), DataError);
}

}  // TEST_SUITE
