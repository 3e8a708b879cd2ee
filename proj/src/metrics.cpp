#include "survkit/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "survkit/errors.hpp"

namespace survkit {

namespace {

void check_inputs(const Eigen::VectorXd& times, const Eigen::VectorXi& events,
                  const Eigen::VectorXd& risks) {
  if (times.size() != events.size() || times.size() != risks.size()) {
    throw DataError("concordance inputs must have equal length");
  }
  for (Eigen::Index i = 0; i < events.size(); ++i) {
    if (events(i) != 0 && events(i) != 1) throw DataError("event values must be 0 or 1");
  }
}

ConcordanceResult finalize(std::uint64_t c, std::uint64_t d, std::uint64_t t) {
  ConcordanceResult r;
  r.concordant = c;
  r.discordant = d;
  r.tied_risk = t;
  r.comparable_pairs = c + d + t;
  if (r.comparable_pairs == 0) {
    throw NoComparablePairsError("no comparable pairs: concordance is undefined");
  }
  r.cindex = (static_cast<double>(c) + 0.5 * static_cast<double>(t)) /
             static_cast<double>(r.comparable_pairs);
  return r;
}

// Fenwick tree over risk ranks counting inserted event subjects.
class RankCounter {
 public:
  explicit RankCounter(int n) : tree_(static_cast<std::size_t>(n) + 1, 0), n_(n) {}

  void add(int rank) {  // rank in [1, n]
    for (int i = rank; i <= n_; i += i & (-i)) tree_[static_cast<std::size_t>(i)] += 1;
  }

  std::uint64_t count_le(int rank) const {
    std::uint64_t s = 0;
    for (int i = rank; i > 0; i -= i & (-i)) s += tree_[static_cast<std::size_t>(i)];
    return s;
  }

 private:
  std::vector<std::uint64_t> tree_;
  int n_;
};

}  // namespace

ConcordanceResult concordance_index(const Eigen::VectorXd& times, const Eigen::VectorXi& events,
                                    const Eigen::VectorXd& risks) {
  check_inputs(times, events, risks);
  const Eigen::Index n = times.size();

  // Dense risk ranks in [1, #distinct].
  std::vector<double> sorted_risks(risks.data(), risks.data() + n);
  std::sort(sorted_risks.begin(), sorted_risks.end());
  sorted_risks.erase(std::unique(sorted_risks.begin(), sorted_risks.end()), sorted_risks.end());
  const auto rank_of = [&](double r) {
    return static_cast<int>(std::lower_bound(sorted_risks.begin(), sorted_risks.end(), r) -
                            sorted_risks.begin()) +
           1;
  };
  const int n_ranks = static_cast<int>(sorted_risks.size());

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return times(a) < times(b); });

  RankCounter inserted(n_ranks);
  std::uint64_t inserted_total = 0;
  std::uint64_t c = 0;
  std::uint64_t d = 0;
  std::uint64_t t = 0;

  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && times(order[j]) == times(order[i])) ++j;

    // Pairs against event subjects at strictly earlier times: the earlier
    // subject must carry the strictly higher risk to be concordant.
    for (std::size_t k = i; k < j; ++k) {
      const int rank = rank_of(risks(order[k]));
      const std::uint64_t le = inserted.count_le(rank);
      const std::uint64_t lt = inserted.count_le(rank - 1);
      c += inserted_total - le;  // earlier risk strictly higher
      d += lt;                   // earlier risk strictly lower
      t += le - lt;
    }

    // Same observed time: comparable iff exactly one of the pair has an event.
    std::vector<double> ev;
    std::vector<double> cen;
    for (std::size_t k = i; k < j; ++k) {
      (events(order[k]) == 1 ? ev : cen).push_back(risks(order[k]));
    }
    if (!ev.empty() && !cen.empty()) {
      std::sort(cen.begin(), cen.end());
      for (const double re : ev) {
        const auto lo = std::lower_bound(cen.begin(), cen.end(), re);
        const auto hi = std::upper_bound(cen.begin(), cen.end(), re);
        c += static_cast<std::uint64_t>(lo - cen.begin());  // event risk strictly higher
        d += static_cast<std::uint64_t>(cen.end() - hi);
        t += static_cast<std::uint64_t>(hi - lo);
      }
    }

    for (std::size_t k = i; k < j; ++k) {
      if (events(order[k]) == 1) {
        inserted.add(rank_of(risks(order[k])));
        ++inserted_total;
      }
    }
    i = j;
  }
  return finalize(c, d, t);
}

ConcordanceResult concordance_oracle(const Eigen::VectorXd& times, const Eigen::VectorXi& events,
                                     const Eigen::VectorXd& risks) {
  check_inputs(times, events, risks);
  const Eigen::Index n = times.size();
  std::uint64_t c = 0;
  std::uint64_t d = 0;
  std::uint64_t t = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Eigen::Index shorter;
      Eigen::Index longer;
      if (times(i) < times(j)) {
        shorter = i;
        longer = j;
      } else if (times(j) < times(i)) {
        shorter = j;
        longer = i;
      } else {
        // Equal times: comparable iff exactly one event; the event subject
        // must carry the higher risk.
        if (events(i) + events(j) != 1) continue;
        shorter = events(i) == 1 ? i : j;
        longer = shorter == i ? j : i;
        if (risks(shorter) > risks(longer)) {
          ++c;
        } else if (risks(shorter) < risks(longer)) {
          ++d;
        } else {
          ++t;
        }
        continue;
      }
      if (events(shorter) != 1) continue;
      if (risks(shorter) > risks(longer)) {
        ++c;
      } else if (risks(shorter) < risks(longer)) {
        ++d;
      } else {
        ++t;
      }
    }
  }
  return finalize(c, d, t);
}

}  // namespace survkit
