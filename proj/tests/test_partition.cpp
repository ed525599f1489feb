#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "corrclust/analysis.hpp"
#include "corrclust/instance.hpp"
#include "corrclust/partition.hpp"

#include "test_support.hpp"

using namespace ccl;
using test_support::euclidean_metric;
using test_support::lattice_metric;

namespace {
const double R = 1.0 / 3.0;
}

TEST_CASE("derived constants at beta = 0.1, q = 2") {
  const PartitionParams p = PartitionParams::from_radii(0.1 * R, R, 2.0, Mode::practical);
  CHECK(p.beta == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(p.D_beta == doctest::Approx(6.0 * std::log(10.0)).epsilon(1e-15));  // 13.8155...
  CHECK(p.rho == doctest::Approx(1000.0).epsilon(1e-12));
  CHECK(p.R0 == doctest::Approx(R / p.D_beta).epsilon(1e-15));
  CHECK(p.R0 + p.R1 == doctest::Approx(R).epsilon(1e-15));
  // e^{-D_beta/2} = beta^{q+1}
  CHECK(std::exp(-p.D_beta / 2.0) == doctest::Approx(1e-3).epsilon(1e-12));
}

TEST_CASE("from_radii validates inputs") {
  CHECK_THROWS_AS(PartitionParams::from_radii(0.0, R, 2.0, Mode::practical),
                  std::invalid_argument);
  CHECK_THROWS_AS(PartitionParams::from_radii(R, R, 2.0, Mode::practical),
                  std::invalid_argument);
  CHECK_THROWS_AS(PartitionParams::from_radii(0.1 * R, R, 0.5, Mode::practical),
                  std::invalid_argument);
  // beta = 0.1 is far outside the strict regime
  CHECK_THROWS_AS(PartitionParams::from_radii(0.1 * R, R, 2.0, Mode::strict),
                  std::invalid_argument);
}

TEST_CASE("strict regime boundary") {
  const double bs = beta_star(2.0);
  CHECK(bs == doctest::Approx(4.8903068656854152e-08).epsilon(1e-4));
  CHECK_NOTHROW(PartitionParams::from_radii(bs * R, R, 2.0, Mode::strict));
  CHECK_THROWS_AS(PartitionParams::from_radii((bs + 1e-9) * R, R, 2.0, Mode::strict),
                  std::invalid_argument);
  // larger q widens the core-margin constraint, so the boundary moves up
  const double bs3 = beta_star(3.0);
  CHECK(bs3 > 0.0);
  CHECK_NOTHROW(PartitionParams::from_radii(bs3 * R, R, 3.0, Mode::strict));
  CHECK_THROWS_AS(PartitionParams::from_radii(bs3 * 1.01 * R, R, 3.0, Mode::strict),
                  std::invalid_argument);
}

TEST_CASE("practical cap solves 2 beta D_beta = 1") {
  const double bc = beta_practical_cap(2.0);
  const double D = 2.0 * 3.0 * std::log(1.0 / bc);
  CHECK(2.0 * bc * D == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("derive_params maps alpha to radii") {
  // small alpha: r = sqrt(alpha)/ln(1/alpha) used directly
  const double alpha = 1e-8;
  const PartitionParams p = derive_params(alpha, 2.0, R, Mode::practical);
  CHECK(p.r == doctest::Approx(std::sqrt(alpha) / std::log(1.0 / alpha)).epsilon(1e-12));
  CHECK(p.R == R);

  // alpha = 0.25 breaks r < R0; reject unless clamping is allowed
  CHECK_THROWS_AS(derive_params(0.25, 2.0, R, Mode::practical, false), std::invalid_argument);
  const PartitionParams clamped = derive_params(0.25, 2.0, R, Mode::practical, true);
  CHECK(clamped.beta == doctest::Approx(beta_practical_cap(2.0)).epsilon(1e-6));

  // strict mode clamps alpha so that beta <= beta_star
  const PartitionParams strict = derive_params(0.25, 2.0, R, Mode::strict);
  CHECK(strict.beta <= beta_star(2.0) * (1.0 + 1e-9));
  CHECK(strict.mode == Mode::strict);

  CHECK_THROWS_AS(derive_params(1.5, 2.0, R, Mode::practical), std::invalid_argument);
}

TEST_CASE("truncated-exponential CDF") {
  const PartitionParams p = PartitionParams::from_radii(0.05 * R, R, 2.0, Mode::practical);
  CHECK(p.F(0.0) == 0.0);
  CHECK(p.F(R / 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (double x : {0.01, 0.05, 0.1, 0.15}) {
    CHECK(p.F_inverse(p.F(x)) == doctest::Approx(x).epsilon(1e-10));
  }
  // monotone
  CHECK(p.F(0.1) > p.F(0.05));
}

TEST_CASE("metric view validation") {
  Matrix bad_diag(4, 0.0);
  mat_at(bad_diag, 2, 0, 0) = 0.1;
  CHECK_THROWS_AS(MetricView::create(bad_diag, 2), std::invalid_argument);

  Matrix asym(4, 0.0);
  mat_at(asym, 2, 0, 1) = 0.1;
  CHECK_THROWS_AS(MetricView::create(asym, 2), std::invalid_argument);

  Matrix neg(4, 0.0);
  mat_at(neg, 2, 0, 1) = mat_at(neg, 2, 1, 0) = -0.1;
  CHECK_THROWS_AS(MetricView::create(neg, 2), std::invalid_argument);

  Matrix tri(9, 0.0);
  mat_at(tri, 3, 0, 1) = mat_at(tri, 3, 1, 0) = 0.1;
  mat_at(tri, 3, 1, 2) = mat_at(tri, 3, 2, 1) = 0.1;
  mat_at(tri, 3, 0, 2) = mat_at(tri, 3, 2, 0) = 0.9;
  CHECK_THROWS_AS(MetricView::create(tri, 3), std::invalid_argument);

  const Matrix good = euclidean_metric(10, 1);
  const MetricView view = MetricView::create(good, 10);
  CHECK(view.active_count() == 10);
  CHECK(view.ball_size(0, 10.0) == 10);
  CHECK(view.ball_size(0, 0.0) == 1);
}

TEST_CASE("pivot maximizes the core ball, smallest index on ties") {
  // two coincident pairs: all balls equal, index 0 wins
  const Matrix even = lattice_metric(2, 1.0);
  CHECK(select_pivot(MetricView::create(even, 2), 0.1) == 0);

  // line points 0, 0.05, 0.1, 1.0: index 1 sees three points within 0.06
  const int n = 4;
  const double pos[n] = {0.0, 0.05, 0.1, 1.0};
  Matrix d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) mat_at(d, n, i, j) = std::abs(pos[i] - pos[j]);
  }
  CHECK(select_pivot(MetricView::create(d, n), 0.06) == 1);
}

TEST_CASE("heavy and light balls") {
  // uniform metric with pairwise distance in (R0, R1]: every core ball is a
  // singleton while the R1 ball holds all n points, tripping the rho threshold
  const PartitionParams p = PartitionParams::from_radii(0.1 * R, R, 1.0, Mode::practical);
  REQUIRE(p.rho == doctest::Approx(100.0).epsilon(1e-12));
  const int n = 120;
  Matrix d(static_cast<std::size_t>(n) * n, 0.2);
  for (int i = 0; i < n; ++i) mat_at(d, n, i, i) = 0.0;
  REQUIRE(p.R0 < 0.2);
  REQUIRE(0.2 <= p.R1);
  const MetricView view = MetricView::create(d, n);
  REQUIRE(view.ball_size(0, p.R0) == 1);
  CHECK(is_heavy(view, 0, p));

  Xoshiro256ss rng(1);
  const ClusterPick pick = cluster_select(view, p, rng);
  CHECK(pick.heavy);
  CHECK(pick.t == p.R1);
  CHECK(pick.mu_S == 0.0);
  CHECK(static_cast<int>(pick.members.size()) == n);

  // sparse line: far too few points for the rho threshold
  const Matrix line = lattice_metric(20, 2.0 * R);
  const PartitionParams q2 = PartitionParams::from_radii(0.05 * R, R, 2.0, Mode::practical);
  const MetricView lview = MetricView::create(line, 20);
  CHECK_FALSE(is_heavy(lview, select_pivot(lview, q2.R0), q2));
}

TEST_CASE("radius set matches a dense-grid oracle") {
  const PartitionParams p = PartitionParams::from_radii(0.05 * R, R, 2.0, Mode::practical);
  const int n = 60;
  const Matrix d = euclidean_metric(n, 2024);
  const MetricView view = MetricView::create(d, n);
  const int z = select_pivot(view, p.R0);
  const IntervalSet S = compute_S(view, z, p);

  // every accepted radius lies in (3R0, R1]
  for (const auto& [a, b] : S.intervals()) {
    CHECK(a >= 3.0 * p.R0 - 1e-12);
    CHECK(b <= p.R1 + 1e-12);
  }

  // breakpoints where ball membership can change
  std::vector<double> boundaries{3.0 * p.R0, p.R1};
  for (int v : view.active()) boundaries.push_back(view.dist(z, v));

  const double rhs_scale = 25.0 * p.beta * p.D_beta * p.D_beta;
  const int grid = 10000;
  int checked = 0;
  for (int g = 0; g < grid; ++g) {
    const double s = 3.0 * p.R0 + (p.R1 - 3.0 * p.R0) * (g + 0.5) / grid;
    bool near_boundary = false;
    for (double b : boundaries) {
      if (std::abs(s - b) < 1e-9) near_boundary = true;
    }
    if (near_boundary) continue;
    ++checked;

    // direct evaluation of the shell inequality at radius s
    std::vector<char> member(n, 0);
    for (int v : view.active()) member[v] = view.dist(z, v) <= s;
    bool ok = true;
    for (int u = 0; u < n && ok; ++u) {
      int separated = 0;
      for (int v = 0; v < n; ++v) {
        if (v != u && view.dist(u, v) <= p.r && member[u] != member[v]) ++separated;
      }
      if (separated == 0) continue;
      double touch_mass = 0.0;
      for (int v = 0; v < n; ++v) {
        if (v == u) continue;
        const double dist = view.dist(u, v);
        if (dist <= 2.0 * p.R && (member[u] || member[v])) touch_mass += dist / p.R;
      }
      if (static_cast<double>(separated) > rhs_scale * touch_mass) ok = false;
    }
    CHECK(S.contains(s) == ok);
  }
  CHECK(checked > grid / 2);
}

TEST_CASE("radius sampling honours the mode contract") {
  const PartitionParams strict =
      PartitionParams::from_radii(beta_star(2.0) / 2.0 * R, R, 2.0, Mode::strict);
  Xoshiro256ss rng(3);
  CHECK_THROWS_AS(sample_radius(IntervalSet{}, strict, rng), std::runtime_error);

  // strict mode demands mu(S) >= R/2
  const IntervalSet thin({{3.0 * strict.R0, 3.0 * strict.R0 + 0.01}});
  CHECK_THROWS_AS(sample_radius(thin, strict, rng), guarantee_violation);

  const IntervalSet wide({{3.0 * strict.R0, 3.0 * strict.R0 + R / 2.0 + 0.01}});
  for (int i = 0; i < 100; ++i) {
    const double t = sample_radius(wide, strict, rng);
    CHECK(wide.contains(t));
  }

  // practical mode clamps overshooting draws into S instead of failing
  const PartitionParams prac = PartitionParams::from_radii(0.05 * R, R, 2.0, Mode::practical);
  const IntervalSet small({{3.0 * prac.R0, 3.0 * prac.R0 + 0.002}});
  for (int i = 0; i < 100; ++i) {
    const double t = sample_radius(small, prac, rng);
    CHECK(small.contains(t));
  }
}

TEST_CASE("partitions are deterministic, complete, and low-diameter") {
  const PartitionParams p = PartitionParams::from_radii(0.05 * R, R, 2.0, Mode::practical);
  const int n = 40;
  const Matrix d = euclidean_metric(n, 5);
  const MetricView view = MetricView::create(d, n);

  Xoshiro256ss rng_a(3), rng_b(3), rng_c(4);
  std::vector<ClusterPick> trace;
  const Clustering a = partition_metric(view, p, rng_a, &trace);
  const Clustering b = partition_metric(view, p, rng_b);
  CHECK(a.labels == b.labels);
  CHECK_NOTHROW(a.check_valid());
  CHECK(static_cast<int>(a.labels.size()) == n);
  CHECK(static_cast<int>(trace.size()) == a.cluster_count());

  // labels follow pick order
  for (std::size_t i = 0; i < trace.size(); ++i) {
    for (int v : trace[i].members) CHECK(a.labels[v] == static_cast<int>(i));
  }

  // every cluster has diameter <= 2R
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (a.labels[u] == a.labels[v]) CHECK(view.dist(u, v) <= 2.0 * p.R + 1e-12);
    }
  }

  const Clustering c = partition_metric(view, p, rng_c);
  CHECK(static_cast<int>(c.labels.size()) == n);  // different seed still completes
}

TEST_CASE("end-to-end clustering driver") {
  auto [inst, planted] = gen_random(8, 0.25, 2, 0.2, 42);
  const ClusterRunResult run =
      cluster_instance(inst, NormOrder::inf(), SolverOptions{}, Mode::practical, 9);
  CHECK_NOTHROW(run.clustering.check_valid());
  CHECK(run.alpha_clamped);  // alpha = 0.25 exceeds the practical regime
  CHECK(run.params.beta == doctest::Approx(beta_practical_cap(2.0)).epsilon(1e-6));
  const auto rep = disagreements(inst, run.clustering, NormOrder::inf());
  CHECK(run.dis_norm == doctest::Approx(rep.norms.at("inf")).epsilon(1e-12));
  // oracle dominance: the brute-force optimum is a lower bound
  const auto [opt, best] = brute_force_opt(inst, NormOrder::inf());
  CHECK(opt <= run.dis_norm + 1e-9);

  // deterministic in the seed
  const ClusterRunResult again =
      cluster_instance(inst, NormOrder::inf(), SolverOptions{}, Mode::practical, 9);
  CHECK(again.clustering.labels == run.clustering.labels);
  CHECK(again.solution.x == run.solution.x);

  // strict mode clamps alpha all the way into the strict regime
  const ClusterRunResult strict =
      cluster_instance(inst, NormOrder::inf(), SolverOptions{}, Mode::strict, 9);
  CHECK(strict.params.beta <= beta_star(2.0) * (1.0 + 1e-9));
  CHECK_NOTHROW(strict.clustering.check_valid());
}
