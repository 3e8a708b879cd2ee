#include "survkit/rsf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survkit/errors.hpp"
#include "survkit/metrics.hpp"
#include "survkit/parallel.hpp"
#include "survkit/random.hpp"

namespace survkit {

namespace {

// Distinct event times of a node with event counts and at-risk counts.
struct NodeEventTable {
  std::vector<double> tau;  // ascending distinct event times
  std::vector<int> deaths;  // events at tau[k]
  std::vector<int> at_risk; // rows with time >= tau[k]
  int total_events = 0;
};

NodeEventTable build_event_table(const std::vector<double>& time, const std::vector<int>& event) {
  NodeEventTable table;
  std::vector<double> event_times;
  for (std::size_t i = 0; i < time.size(); ++i) {
    if (event[i] == 1) event_times.push_back(time[i]);
  }
  table.total_events = static_cast<int>(event_times.size());
  std::sort(event_times.begin(), event_times.end());
  std::vector<double> all_times = time;
  std::sort(all_times.begin(), all_times.end());
  std::size_t i = 0;
  while (i < event_times.size()) {
    std::size_t j = i;
    while (j < event_times.size() && event_times[j] == event_times[i]) ++j;
    table.tau.push_back(event_times[i]);
    table.deaths.push_back(static_cast<int>(j - i));
    const auto below = std::lower_bound(all_times.begin(), all_times.end(), event_times[i]) -
                       all_times.begin();
    table.at_risk.push_back(static_cast<int>(all_times.size()) - static_cast<int>(below));
    i = j;
  }
  return table;
}

// Two-sample log-rank chi-square for the current left group, given per-event-
// time left-group death and at-risk counts.
double logrank_statistic(const NodeEventTable& table, const std::vector<int>& deaths_left,
                         const std::vector<int>& at_risk_left) {
  double observed = 0.0;
  double expected = 0.0;
  double variance = 0.0;
  for (std::size_t k = 0; k < table.tau.size(); ++k) {
    const double d = table.deaths[k];
    const double y = table.at_risk[k];
    const double yl = at_risk_left[k];
    observed += deaths_left[k];
    expected += d * yl / y;
    if (y > 1.0) {
      variance += d * (yl / y) * (1.0 - yl / y) * (y - d) / (y - 1.0);
    }
  }
  if (variance <= 0.0) return 0.0;
  const double diff = observed - expected;
  return diff * diff / variance;
}

}  // namespace

SplitCandidate best_split_on_column(const std::vector<double>& x,
                                    const std::vector<double>& time,
                                    const std::vector<int>& event, int min_node_size) {
  const std::size_t m = x.size();
  SplitCandidate best;
  if (m < 2) return best;

  const NodeEventTable table = build_event_table(time, event);
  const std::size_t n_times = table.tau.size();
  if (n_times == 0) return best;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });

  // Position of each row's time on the event grid: largest tau <= time, or -1.
  const auto grid_pos = [&](double t) {
    const auto it = std::upper_bound(table.tau.begin(), table.tau.end(), t);
    return static_cast<std::ptrdiff_t>(it - table.tau.begin()) - 1;
  };

  std::vector<int> deaths_left(n_times, 0);
  std::vector<int> at_risk_left(n_times, 0);
  int n_left = 0;
  int events_left = 0;

  std::size_t i = 0;
  while (i < m) {
    // Move every row sharing this x value into the left group.
    std::size_t j = i;
    const double value = x[order[i]];
    while (j < m && x[order[j]] == value) {
      const std::size_t r = order[j];
      const std::ptrdiff_t pos = grid_pos(time[r]);
      if (event[r] == 1) {
        ++deaths_left[static_cast<std::size_t>(pos)];  // an event time is always on the grid
        ++events_left;
      }
      for (std::ptrdiff_t k = 0; k <= pos; ++k) ++at_risk_left[static_cast<std::size_t>(k)];
      ++n_left;
      ++j;
    }
    if (j == m) break;  // no right group remains

    const int n_right = static_cast<int>(m) - n_left;
    const int events_right = table.total_events - events_left;
    if (n_left >= min_node_size && n_right >= min_node_size && events_left >= 1 &&
        events_right >= 1) {
      const double stat = logrank_statistic(table, deaths_left, at_risk_left);
      if (stat > 0.0 && stat > best.statistic) {
        best.valid = true;
        best.statistic = stat;
        best.value = (value + x[order[j]]) / 2.0;
        best.n_left = n_left;
      }
    }
    i = j;
  }
  return best;
}

namespace {

struct TreeGrower {
  const Eigen::MatrixXd& x;
  const Eigen::VectorXd& times;
  const Eigen::VectorXi& events;
  const std::vector<double>& grid;
  int mtry;
  int min_node_size;
  Rng rng;

  struct Pending {
    int node;
    std::vector<int> rows;
  };

  SurvivalTree grow(Eigen::Index n_rows) {
    SurvivalTree tree;
    tree.in_bag.resize(static_cast<std::size_t>(n_rows));
    for (auto& r : tree.in_bag) {
      r = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n_rows)));
    }

    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, tree.in_bag});

    while (!stack.empty()) {
      Pending item = std::move(stack.back());
      stack.pop_back();
      split_or_terminate(tree, item.node, std::move(item.rows), stack);
    }
    return tree;
  }

  void split_or_terminate(SurvivalTree& tree, int node, std::vector<int>&& rows,
                          std::vector<Pending>& stack) {
    const std::size_t m = rows.size();
    std::vector<double> node_time(m);
    std::vector<int> node_event(m);
    for (std::size_t i = 0; i < m; ++i) {
      node_time[i] = times(rows[i]);
      node_event[i] = events(rows[i]);
    }

    bool terminal = m < 2 * static_cast<std::size_t>(min_node_size);
    if (!terminal) {
      // Count distinct event times.
      std::vector<double> ev;
      for (std::size_t i = 0; i < m; ++i) {
        if (node_event[i] == 1) ev.push_back(node_time[i]);
      }
      std::sort(ev.begin(), ev.end());
      ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
      terminal = ev.size() < 2;
    }

    int best_col = -1;
    SplitCandidate best;
    if (!terminal) {
      std::vector<int> candidates =
          rng.sample_without_replacement(static_cast<int>(x.cols()), mtry);
      std::sort(candidates.begin(), candidates.end());
      std::vector<double> node_x(m);
      for (const int c : candidates) {
        for (std::size_t i = 0; i < m; ++i) node_x[i] = x(rows[i], c);
        const SplitCandidate cand =
            best_split_on_column(node_x, node_time, node_event, min_node_size);
        // Strict improvement keeps the lowest column index, then the lowest
        // split value, on ties.
        if (cand.valid && (best_col < 0 || cand.statistic > best.statistic)) {
          best = cand;
          best_col = c;
        }
      }
      terminal = best_col < 0;
    }

    if (terminal) {
      finish_terminal(tree.nodes[static_cast<std::size_t>(node)], node_time, node_event);
      return;
    }

    std::vector<int> left_rows;
    std::vector<int> right_rows;
    left_rows.reserve(m);
    right_rows.reserve(m);
    for (const int r : rows) {
      (x(r, best_col) <= best.value ? left_rows : right_rows).push_back(r);
    }
    const int left = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int right = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    auto& nd = tree.nodes[static_cast<std::size_t>(node)];
    nd.split_column = best_col;
    nd.split_value = best.value;
    nd.left = left;
    nd.right = right;
    // Right pushed first so the left child is grown (and draws RNG) first.
    stack.push_back({right, std::move(right_rows)});
    stack.push_back({left, std::move(left_rows)});
  }

  void finish_terminal(TreeNode& node, const std::vector<double>& node_time,
                       const std::vector<int>& node_event) const {
    const NodeEventTable table = build_event_table(node_time, node_event);
    node.chf.assign(grid.size(), 0.0);
    double h = 0.0;
    std::size_t k = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      while (k < table.tau.size() && table.tau[k] <= grid[g]) {
        h += static_cast<double>(table.deaths[k]) / static_cast<double>(table.at_risk[k]);
        ++k;
      }
      node.chf[g] = h;
      node.chf_sum += h;
    }
  }
};

int leaf_of(const SurvivalTree& tree, const Eigen::MatrixXd& x, Eigen::Index row) {
  int node = 0;
  while (tree.nodes[static_cast<std::size_t>(node)].split_column >= 0) {
    const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
    node = x(row, nd.split_column) <= nd.split_value ? nd.left : nd.right;
  }
  return node;
}

}  // namespace

Forest fit_rsf(const SurvivalDataset& train, int mtry, int min_node_size, int n_trees,
               std::uint64_t seed, int n_threads) {
  validate_for_fit(train);
  if (mtry < 1 || mtry > train.n_cols()) {
    throw DataError("mtry must lie in [1, n_columns]");
  }
  if (min_node_size < 1) throw DataError("min_node_size must be >= 1");
  if (n_trees < 1) throw DataError("n_trees must be >= 1");

  Forest forest;
  forest.mtry = mtry;
  forest.min_node_size = min_node_size;
  forest.seed = seed;
  forest.n_columns = train.n_cols();
  {
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < train.n_rows(); ++i) {
      if (train.events(i) == 1) ev.push_back(train.times(i));
    }
    std::sort(ev.begin(), ev.end());
    ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
    forest.event_time_grid = std::move(ev);
  }

  forest.trees.resize(static_cast<std::size_t>(n_trees));
  const Eigen::Index n = train.n_rows();
  parallel_for(n_trees, n_threads, [&](int t) {
    TreeGrower grower{train.features, train.times,    train.events,
                      forest.event_time_grid, mtry,   min_node_size,
                      Rng(derive_seed(seed, static_cast<std::uint64_t>(t)))};
    forest.trees[static_cast<std::size_t>(t)] = grower.grow(n);
  });

  forest.oob.resize(static_cast<std::size_t>(n_trees));
  for (int t = 0; t < n_trees; ++t) {
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    for (const int r : forest.trees[static_cast<std::size_t>(t)].in_bag) {
      in[static_cast<std::size_t>(r)] = 1;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (!in[static_cast<std::size_t>(r)]) {
        forest.oob[static_cast<std::size_t>(t)].push_back(static_cast<int>(r));
      }
    }
  }
  return forest;
}

Eigen::VectorXd predict_mortality(const Forest& forest, const Eigen::MatrixXd& x) {
  if (x.cols() != forest.n_columns) throw DataError("predict_mortality: column count mismatch");
  Eigen::VectorXd risk = Eigen::VectorXd::Zero(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double sum = 0.0;
    for (const auto& tree : forest.trees) {
      sum += tree.nodes[static_cast<std::size_t>(leaf_of(tree, x, i))].chf_sum;
    }
    risk(i) = sum / static_cast<double>(forest.trees.size());
  }
  return risk;
}

namespace {

// OOB mortality: per row, mean chf_sum over the trees holding the row out of
// bag. Rows that are in-bag everywhere are reported excluded.
Eigen::VectorXd oob_mortality(const Forest& forest, const Eigen::MatrixXd& x,
                              const std::vector<std::vector<char>>& oob_mask,
                              std::vector<int>& included) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd risk = Eigen::VectorXd::Zero(n);
  Eigen::VectorXi count = Eigen::VectorXi::Zero(n);
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    const auto& tree = forest.trees[t];
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!oob_mask[t][static_cast<std::size_t>(i)]) continue;
      risk(i) += tree.nodes[static_cast<std::size_t>(leaf_of(tree, x, i))].chf_sum;
      count(i) += 1;
    }
  }
  included.clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (count(i) > 0) {
      risk(i) /= static_cast<double>(count(i));
      included.push_back(static_cast<int>(i));
    }
  }
  return risk;
}

double cindex_on(const Eigen::VectorXd& times, const Eigen::VectorXi& events,
                 const Eigen::VectorXd& risks, const std::vector<int>& rows) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(rows.size()));
  Eigen::VectorXi e(static_cast<Eigen::Index>(rows.size()));
  Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t(static_cast<Eigen::Index>(i)) = times(rows[i]);
    e(static_cast<Eigen::Index>(i)) = events(rows[i]);
    r(static_cast<Eigen::Index>(i)) = risks(rows[i]);
  }
  return concordance_index(t, e, r).cindex;
}

}  // namespace

ImportanceRanking permutation_importance(const Forest& forest, const SurvivalDataset& data,
                                         int n_repeats, std::uint64_t seed) {
  validate_for_fit(data);
  if (data.n_cols() != forest.n_columns) {
    throw DataError("importance: dataset columns do not match the forest");
  }
  if (static_cast<std::size_t>(forest.oob.size()) != forest.trees.size()) {
    throw DataError("importance: forest carries no out-of-bag records");
  }
  if (n_repeats < 1) throw DataError("n_repeats must be >= 1");

  const Eigen::Index n = data.n_rows();
  std::vector<std::vector<char>> oob_mask(forest.trees.size(),
                                          std::vector<char>(static_cast<std::size_t>(n), 0));
  for (std::size_t t = 0; t < forest.trees.size(); ++t) {
    for (const int r : forest.oob[t]) oob_mask[t][static_cast<std::size_t>(r)] = 1;
  }

  std::vector<int> included;
  const Eigen::VectorXd base_risk = oob_mortality(forest, data.features, oob_mask, included);
  const double base_cindex = cindex_on(data.times, data.events, base_risk, included);

  ImportanceRanking ranking;
  ranking.oob_cindex = base_cindex;
  ranking.excluded_rows = static_cast<int>(n) - static_cast<int>(included.size());

  std::vector<int> perm(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < data.n_cols(); ++j) {
    ImportanceEntry entry;
    entry.column = data.columns[static_cast<std::size_t>(j)].name;
    Eigen::MatrixXd permuted = data.features;
    for (int rep = 0; rep < n_repeats; ++rep) {
      Rng rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(j)),
                          static_cast<std::uint64_t>(rep)));
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(perm);
      for (Eigen::Index i = 0; i < n; ++i) {
        permuted(i, j) = data.features(perm[static_cast<std::size_t>(i)], j);
      }
      std::vector<int> incl;
      const Eigen::VectorXd risk = oob_mortality(forest, permuted, oob_mask, incl);
      const double c = cindex_on(data.times, data.events, risk, incl);
      entry.repeat_deltas.push_back(base_cindex - c);
    }
    entry.score = std::accumulate(entry.repeat_deltas.begin(), entry.repeat_deltas.end(), 0.0) /
                  static_cast<double>(n_repeats);
    ranking.entries.push_back(std::move(entry));
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const ImportanceEntry& a, const ImportanceEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.column < b.column;
            });
  return ranking;
}

std::vector<std::pair<int, int>> rsf_grid(int n_columns) {
  if (n_columns < 1) throw DataError("rsf_grid requires n_columns >= 1");
  std::vector<int> mtry_values;
  if (n_columns < 20) {
    mtry_values.push_back(std::min(10, n_columns));
  } else {
    for (int v = 10; v <= n_columns / 2; v += 3) mtry_values.push_back(v);
  }
  const int node_sizes[] = {1, 10, 20};
  std::vector<std::pair<int, int>> grid;
  for (const int m : mtry_values) {
    for (const int s : node_sizes) grid.emplace_back(m, s);
  }
  return grid;
}

}  // namespace survkit
