#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "survkit/types.hpp"

namespace survkit {

// Internal node: split_column >= 0 and child links. Terminal node:
// split_column == -1 with a Nelson-Aalen cumulative hazard sampled on the
// forest's event-time grid.
struct TreeNode {
  int split_column = -1;
  double split_value = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> chf;
  double chf_sum = 0.0;
};

struct SurvivalTree {
  std::vector<TreeNode> nodes;
  std::vector<int> in_bag;  // bootstrap sample of training rows, with repeats
};

struct Forest {
  std::vector<SurvivalTree> trees;
  int mtry = 0;
  int min_node_size = 0;
  std::vector<double> event_time_grid;  // sorted distinct training event times
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> oob;  // per tree: training rows not in the bag
  Eigen::Index n_columns = 0;
};

// Grows n_trees bagged survival trees with log-rank split selection. At each
// node, mtry columns drawn without replacement compete over every midpoint
// between distinct in-node values; the admissible split with the largest
// two-sample log-rank statistic wins (ties break by lower column index, then
// lower split value). A node is terminal when it has < 2*min_node_size rows,
// < 2 distinct event times, or no admissible split. Bit-identical for a fixed
// seed regardless of n_threads.
Forest fit_rsf(const SurvivalDataset& train, int mtry, int min_node_size, int n_trees,
               std::uint64_t seed, int n_threads = 1);

// Ensemble mortality: sum over the event-time grid of the mean terminal CHF
// across trees. Higher means higher risk.
Eigen::VectorXd predict_mortality(const Forest& forest, const Eigen::MatrixXd& x);

struct ImportanceEntry {
  std::string column;
  double score = 0.0;
  std::vector<double> repeat_deltas;
};

// Entries sorted by score descending, ties by column name.
struct ImportanceRanking {
  std::vector<ImportanceEntry> entries;
  double oob_cindex = 0.0;
  int excluded_rows = 0;  // rows in-bag for every tree, skipped by the OOB score
};

// Permutation importance on the out-of-bag C-index: mean over repeats of
// (intact OOB C-index - OOB C-index with the column permuted). `data` must be
// the forest's training dataset.
ImportanceRanking permutation_importance(const Forest& forest, const SurvivalDataset& data,
                                         int n_repeats, std::uint64_t seed);

// The paper's tuning grid: mtry from 10 to n_columns/2 in steps of 3 (clamped
// to {min(10, n_columns)} when n_columns < 20), crossed with node sizes
// {1, 10, 20}. Row-major: mtry outer, node size inner.
std::vector<std::pair<int, int>> rsf_grid(int n_columns);

struct SplitCandidate {
  bool valid = false;
  double value = 0.0;
  double statistic = 0.0;
  int n_left = 0;
};

// Best admissible split of one candidate column over node rows (arrays carry
// bootstrap multiplicity). Exposed so the split search can be checked against
// an independent log-rank computation.
SplitCandidate best_split_on_column(const std::vector<double>& x,
                                    const std::vector<double>& time,
                                    const std::vector<int>& event, int min_node_size);

}  // namespace survkit
