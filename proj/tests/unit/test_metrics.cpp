#include <doctest.h>

#include <cmath>

#include "survkit/errors.hpp"
#include "survkit/metrics.hpp"
#include "survkit/random.hpp"

using namespace survkit;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const double x : v) out(i++) = x;
  return out;
}

Eigen::VectorXi ivec(std::initializer_list<int> v) {
  Eigen::VectorXi out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const int x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("perfect ranking scores 1") {
  const auto r = concordance_index(vec({1, 2, 3}), ivec({1, 1, 1}), vec({3, 2, 1}));
  CHECK(r.cindex == 1.0);
  CHECK(r.concordant == 3);
  CHECK(r.comparable_pairs == 3);
}

TEST_CASE("reversed ranking scores 0") {
  const auto r = concordance_index(vec({1, 2, 3}), ivec({1, 1, 1}), vec({1, 2, 3}));
  CHECK(r.cindex == 0.0);
  CHECK(r.discordant == 3);
}

TEST_CASE("constant risks score 0.5 via ties") {
  const auto r = concordance_index(vec({1, 2, 3, 4}), ivec({1, 1, 0, 1}), vec({7, 7, 7, 7}));
  CHECK(r.cindex == 0.5);
  CHECK(r.tied_risk == r.comparable_pairs);
}

TEST_CASE("brute-force example: times 2,4,5 events 1,0,1 risks 3,5,1") {
  // Comparable pairs: (1,2) discordant, (1,3) concordant.
  const auto r = concordance_index(vec({2, 4, 5}), ivec({1, 0, 1}), vec({3, 5, 1}));
  CHECK(r.comparable_pairs == 2);
  CHECK(r.concordant == 1);
  CHECK(r.discordant == 1);
  CHECK(r.cindex == 0.5);
}

TEST_CASE("tied time pairs are comparable only with exactly one event") {
  // Two events at the same time carry no ordering information.
  CHECK_THROWS_AS(concordance_index(vec({3, 3}), ivec({1, 1}), vec({1, 2})),
                  NoComparablePairsError);
  // Event vs censored at the same time: the event subject must score higher.
  const auto r = concordance_index(vec({3, 3}), ivec({1, 0}), vec({5, 1}));
  CHECK(r.cindex == 1.0);
  const auto r2 = concordance_index(vec({3, 3}), ivec({1, 0}), vec({1, 5}));
  CHECK(r2.cindex == 0.0);
}

TEST_CASE("all censored throws a named error, not 0.5") {
  CHECK_THROWS_AS(concordance_index(vec({1, 2, 3}), ivec({0, 0, 0}), vec({1, 2, 3})),
                  NoComparablePairsError);
}

TEST_CASE("single comparable pair lands in {0, 0.5, 1}") {
  for (const double risk : {0.0, 1.0, 2.0}) {
    const auto r = concordance_index(vec({1, 2}), ivec({1, 0}), vec({1, risk}));
    CHECK((r.cindex == 0.0 || r.cindex == 0.5 || r.cindex == 1.0));
  }
}

TEST_CASE("oracle equals the fast implementation on random inputs") {
  Rng rng(20260810);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(59));
    Eigen::VectorXd times(n);
    Eigen::VectorXi events(n);
    Eigen::VectorXd risks(n);
    bool any_event = false;
    for (int i = 0; i < n; ++i) {
      times(i) = static_cast<double>(rng.uniform_below(8));  // heavy time ties
      events(i) = rng.uniform() < 0.6 ? 1 : 0;
      risks(i) = static_cast<double>(rng.uniform_below(5));  // heavy risk ties
      any_event = any_event || events(i) == 1;
    }
    if (!any_event) events(0) = 1;
    ConcordanceResult fast;
    ConcordanceResult slow;
    bool fast_threw = false;
    bool slow_threw = false;
    try {
      fast = concordance_index(times, events, risks);
    } catch (const NoComparablePairsError&) {
      fast_threw = true;
    }
    try {
      slow = concordance_oracle(times, events, risks);
    } catch (const NoComparablePairsError&) {
      slow_threw = true;
    }
    REQUIRE(fast_threw == slow_threw);
    if (fast_threw) continue;
    CHECK(fast.concordant == slow.concordant);
    CHECK(fast.discordant == slow.discordant);
    CHECK(fast.tied_risk == slow.tied_risk);
    CHECK(fast.comparable_pairs == slow.comparable_pairs);
    CHECK(fast.cindex == slow.cindex);
  }
}

TEST_CASE("invariance under strictly increasing risk transforms") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_below(40));
    Eigen::VectorXd times(n);
    Eigen::VectorXi events(n);
    Eigen::VectorXd risks(n);
    for (int i = 0; i < n; ++i) {
      times(i) = rng.uniform() * 10.0;
      events(i) = rng.uniform() < 0.7 ? 1 : 0;
      risks(i) = static_cast<double>(rng.uniform_below(6)) - 3.0;
    }
    events(0) = 1;
    const auto base = concordance_index(times, events, risks);
    const Eigen::VectorXd affine = 2.0 * risks.array() + 7.0;
    const Eigen::VectorXd expd = risks.array().exp();
    for (const auto& transformed : {affine, expd}) {
      const auto r = concordance_index(times, events, transformed);
      CHECK(r.concordant == base.concordant);
      CHECK(r.discordant == base.discordant);
      CHECK(r.tied_risk == base.tied_risk);
    }
  }
}

TEST_CASE("antisymmetry when no risks tie") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_below(30));
    Eigen::VectorXd times(n);
    Eigen::VectorXi events(n);
    Eigen::VectorXd risks(n);
    for (int i = 0; i < n; ++i) {
      times(i) = rng.uniform() * 5.0;
      events(i) = rng.uniform() < 0.7 ? 1 : 0;
      risks(i) = rng.uniform();  // continuous: ties have probability zero
    }
    events(0) = 1;
    const auto plus = concordance_index(times, events, risks);
    const auto minus = concordance_index(times, events, -risks);
    REQUIRE(plus.tied_risk == 0);
    CHECK(plus.cindex + minus.cindex == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("paper formula C/(C+D) holds exactly when tied_risk is 0") {
  const auto r = concordance_index(vec({1, 2, 3, 4, 5}), ivec({1, 0, 1, 1, 0}),
                                   vec({5, 4, 2, 3, 1}));
  REQUIRE(r.tied_risk == 0);
  CHECK(r.cindex == static_cast<double>(r.concordant) /
                        static_cast<double>(r.concordant + r.discordant));
}

}  // TEST_SUITE
