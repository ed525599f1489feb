#include <stdexcept>

#include <doctest.h>

#include "corrclust/interval_set.hpp"
#include "corrclust/rng.hpp"

using namespace ccl;

TEST_CASE("measure and membership") {
  const IntervalSet S({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(S.measure() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_FALSE(S.empty());
  CHECK(S.contains(1.0));
  CHECK(S.contains(1.5));
  CHECK_FALSE(S.contains(2.0));  // half-open
  CHECK_FALSE(S.contains(2.5));
  CHECK(S.contains(3.0));
  CHECK(S.contains(4.0));  // closed right end at the domain end
  CHECK_FALSE(S.contains(4.5));
  CHECK(IntervalSet{}.empty());
  CHECK(IntervalSet{}.measure() == 0.0);
}

TEST_CASE("pushdown is the prefix measure") {
  const IntervalSet S({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(S.pi_forward(0.5) == 0.0);
  CHECK(S.pi_forward(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(S.pi_forward(2.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(S.pi_forward(3.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(S.pi_forward(10.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("inverse is a right inverse resolving ties rightward") {
  const IntervalSet S({{1.0, 2.0}, {3.0, 4.0}});
  CHECK(S.pi_inverse(0.0) == doctest::Approx(1.0).epsilon(1e-15));  // inf S
  CHECK(S.pi_inverse(0.5) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(S.pi_inverse(1.0) == doctest::Approx(3.0).epsilon(1e-15));  // next interval
  CHECK(S.pi_inverse(1.5) == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(S.pi_inverse(2.0) == doctest::Approx(4.0).epsilon(1e-15));  // right end
  CHECK_THROWS_AS(S.pi_inverse(-0.1), std::out_of_range);
  CHECK_THROWS_AS(S.pi_inverse(2.1), std::out_of_range);
}

TEST_CASE("construction normalizes and rejects bad intervals") {
  // unsorted input is sorted
  const IntervalSet S({{3.0, 4.0}, {1.0, 2.0}});
  CHECK(S.intervals().front().first == 1.0);
  CHECK_THROWS_AS(IntervalSet({{2.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalSet({{1.0, 3.0}, {2.0, 4.0}}), std::invalid_argument);  // overlap
}

TEST_CASE("pushdown properties hold on random sets and draws") {
  Xoshiro256ss rng(99);
  for (int rep = 0; rep < 50; ++rep) {
    // random disjoint intervals from sorted cuts in [0, 1]
    const int k = 1 + static_cast<int>(rng.below(6));
    std::vector<double> cuts(2 * k);
    for (double& c : cuts) c = rng.uniform();
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> iv;
    for (int i = 0; i < k; ++i) {
      if (cuts[2 * i] < cuts[2 * i + 1]) iv.emplace_back(cuts[2 * i], cuts[2 * i + 1]);
    }
    const IntervalSet S(std::move(iv));
    if (S.measure() <= 0.0) continue;
    for (int i = 0; i < 200; ++i) {
      double x1 = rng.uniform(), x2 = rng.uniform();
      if (x1 > x2) std::swap(x1, x2);
      const double p1 = S.pi_forward(x1), p2 = S.pi_forward(x2);
      CHECK(p2 >= p1);                          // monotone
      CHECK(p2 - p1 <= (x2 - x1) + 1e-12);      // 1-Lipschitz
      const double y = rng.uniform() * S.measure();
      const double x = S.pi_inverse(y);
      CHECK(S.pi_forward(x) == doctest::Approx(y).epsilon(1e-12));
      CHECK(S.contains(x));
    }
  }
}
