#include "corrclust/partition.hpp"

#include <algorithm>
#include <cmath>

#include "corrclust/analysis.hpp"
#include "corrclust/instance.hpp"

namespace ccl {

Mode parse_mode(const std::string& text) {
  if (text == "strict") return Mode::strict;
  if (text == "practical") return Mode::practical;
  throw std::invalid_argument("mode must be 'strict' or 'practical'");
}

std::string mode_str(Mode mode) { return mode == Mode::strict ? "strict" : "practical"; }

namespace {

struct StrictConstraints {
  bool r_below_R0, R0_below_R1, core_margin, step_ratio, shell_ratio;
  bool all() const { return r_below_R0 && R0_below_R1 && core_margin && step_ratio && shell_ratio; }
};

// The working assumptions behind the strict regime, all scale-free in beta.
StrictConstraints strict_constraints(double beta, double q) {
  StrictConstraints c{};
  const double D = 2.0 * (q + 1.0) * std::log(1.0 / beta);
  c.r_below_R0 = beta < 1.0 / D;                         // r < R0
  c.R0_below_R1 = D > 2.0;                               // R0 < R1
  c.core_margin = 1.0 / D + beta < (1.0 - 1.0 / D) / 100.0;  // R0 + r < R1/100
  c.step_ratio = 2.0 * beta * D < 1.0;
  c.shell_ratio = beta * D < 1.0 / (5.0 * std::sqrt(2.0));
  return c;
}

}  // namespace

PartitionParams PartitionParams::from_radii(double r, double R, double q, Mode mode) {
  if (!(r > 0) || !(R > 0) || !(q >= 1)) {
    throw std::invalid_argument("partition params require r > 0, R > 0, q >= 1");
  }
  if (!(r < R)) throw std::invalid_argument("partition params require r < R");
  PartitionParams p;
  p.r = r;
  p.R = R;
  p.q = q;
  p.beta = r / R;
  p.D_beta = 2.0 * (q + 1.0) * std::log(1.0 / p.beta);
  p.R0 = R / p.D_beta;
  p.R1 = R - p.R0;
  p.rho = std::pow(1.0 / p.beta, q + 1.0);
  p.mode = mode;
  if (mode == Mode::strict && !strict_constraints(p.beta, q).all()) {
    throw std::invalid_argument("strict mode requires beta <= beta_star(q)");
  }
  return p;
}

double PartitionParams::F(double x) const {
  return (1.0 - std::exp(-x / R0)) / (1.0 - std::exp(-R / (2.0 * R0)));
}

double PartitionParams::F_inverse(double u) const {
  return -R0 * std::log(1.0 - u * (1.0 - std::exp(-R / (2.0 * R0))));
}

double beta_star(double q) {
  if (!(q >= 1)) throw std::invalid_argument("beta_star requires q >= 1");
  double lo = 1e-300, hi = std::exp(-1.0);
  // geometric bisection first to bracket the tiny crossing, then linear
  for (int i = 0; i < 2000 && hi - lo > 1e-12; ++i) {
    const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (strict_constraints(mid, q).all()) lo = mid;
    else hi = mid;
  }
  return lo;
}

double beta_practical_cap(double q) {
  double lo = 1e-300, hi = std::exp(-1.0);
  for (int i = 0; i < 2000 && hi - lo > 1e-14; ++i) {
    const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    const double D = 2.0 * (q + 1.0) * std::log(1.0 / mid);
    if (2.0 * mid * D < 1.0) lo = mid;
    else hi = mid;
  }
  return lo;
}

namespace {

double radius_from_alpha(double alpha) { return std::sqrt(alpha) / std::log(1.0 / alpha); }

// Solves sqrt(a)/ln(1/a) = target for a in (0, 1); the left side is
// increasing on that range.
double alpha_for_radius(double target) {
  double lo = 1e-300, hi = 1.0 - 1e-9;
  for (int i = 0; i < 4000 && hi - lo > 1e-16; ++i) {
    const double mid = (hi / lo > 4.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    if (radius_from_alpha(mid) < target) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace

PartitionParams derive_params(double alpha, double q, double R, Mode mode, bool clamp_alpha) {
  if (!(alpha > 0.0) || alpha >= 1.0) {
    throw std::invalid_argument("derive_params requires alpha in (0, 1)");
  }
  double alpha_eff = alpha;
  if (mode == Mode::strict) {
    const double alpha_cap = alpha_for_radius(beta_star(q) * R);
    if (alpha_eff > alpha_cap) alpha_eff = alpha_cap;
  }
  double r = radius_from_alpha(alpha_eff);
  double beta = r / R;
  if (mode == Mode::practical) {
    const bool ok = beta < 1.0 && strict_constraints(beta, q).r_below_R0;
    if (!ok) {
      if (!clamp_alpha) {
        throw std::invalid_argument(
            "derive_params: alpha too large for practical partitioning (beta = " +
            std::to_string(beta) + "); supply smaller radii directly or allow clamping");
      }
      alpha_eff = alpha_for_radius(beta_practical_cap(q) * R);
      r = radius_from_alpha(alpha_eff);
    }
  }
  return PartitionParams::from_radii(r, R, q, mode);
}

MetricView MetricView::create(const Matrix& d, int n) {
  for (int i = 0; i < n; ++i) {
    if (mat_at(d, n, i, i) != 0.0) throw std::invalid_argument("metric has nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      const double e = mat_at(d, n, i, j);
      if (!(e >= 0.0)) throw std::invalid_argument("metric has negative entry");
      if (e != mat_at(d, n, j, i)) throw std::invalid_argument("metric not symmetric");
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const double dab = mat_at(d, n, a, b);
      for (int c = 0; c < n; ++c) {
        if (c == a || c == b) continue;
        if (mat_at(d, n, a, c) > dab + mat_at(d, n, b, c) + 1e-9) {
          throw std::invalid_argument("metric violates the triangle inequality beyond 1e-9");
        }
      }
    }
  }
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  return MetricView(&d, n, std::move(all));
}

MetricView MetricView::restrict_to(std::vector<int> active) const {
  return MetricView(d_, n_, std::move(active));
}

int MetricView::ball_size(int u, double radius) const {
  int count = 0;
  for (int v : active_) {
    if (dist(u, v) <= radius) ++count;
  }
  return count;
}

std::vector<int> MetricView::ball_members(int u, double radius) const {
  std::vector<int> members;
  for (int v : active_) {
    if (dist(u, v) <= radius) members.push_back(v);
  }
  return members;
}

int select_pivot(const MetricView& view, double R0) {
  if (view.active_count() == 0) throw std::invalid_argument("select_pivot: empty view");
  int best = view.active().front();
  int best_size = -1;
  for (int u : view.active()) {
    const int size = view.ball_size(u, R0);
    if (size > best_size) {
      best_size = size;
      best = u;
    }
  }
  return best;
}

bool is_heavy(const MetricView& view, int z, const PartitionParams& params) {
  return view.ball_size(z, params.R1) >= params.rho * view.ball_size(z, params.R0);
}

IntervalSet compute_S(const MetricView& view, int z, const PartitionParams& params) {
  const double lo = 3.0 * params.R0;
  const double hi = params.R1;
  if (!(lo < hi)) return IntervalSet{};

  // Active points ordered by distance to the pivot; Ball(z, s) is constant
  // between consecutive distance values, so each elementary interval is
  // checked once.
  std::vector<int> by_dist(view.active());
  std::sort(by_dist.begin(), by_dist.end(), [&](int a, int b) {
    const double da = view.dist(z, a), db = view.dist(z, b);
    return da != db ? da < db : a < b;
  });

  std::vector<double> breakpoints{lo};
  for (int v : by_dist) {
    const double d = view.dist(z, v);
    if (d > lo && d < hi) {
      if (breakpoints.back() != d) breakpoints.push_back(d);
    }
  }
  if (breakpoints.back() != hi) breakpoints.push_back(hi);

  const int n = view.total_points();
  std::vector<char> member(n, 0);
  std::size_t next = 0;  // next point of by_dist not yet in the ball
  const double rhs_scale = 25.0 * params.beta * params.D_beta * params.D_beta;

  std::vector<std::pair<double, double>> accepted;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double s_lo = breakpoints[i];
    const double s_hi = breakpoints[i + 1];
    while (next < by_dist.size() && view.dist(z, by_dist[next]) <= s_lo) {
      member[by_dist[next]] = 1;
      ++next;
    }
    bool ok = true;
    for (int u : view.active()) {
      const double dzu = view.dist(z, u);
      // the shell inequality's left side vanishes away from the boundary
      if (dzu < s_lo - params.r || dzu > s_hi + params.r) continue;
      int separated = 0;
      for (int v : view.active()) {
        if (v != u && view.dist(u, v) <= params.r && member[u] != member[v]) ++separated;
      }
      if (separated == 0) continue;
      double touch_mass = 0.0;
      for (int v : view.active()) {
        if (v == u) continue;
        const double d = view.dist(u, v);
        if (d <= 2.0 * params.R && (member[u] || member[v])) touch_mass += d / params.R;
      }
      if (static_cast<double>(separated) > rhs_scale * touch_mass) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (!accepted.empty() && accepted.back().second == s_lo) accepted.back().second = s_hi;
      else accepted.emplace_back(s_lo, s_hi);
    }
  }
  return IntervalSet(std::move(accepted));
}

double sample_radius(const IntervalSet& S, const PartitionParams& params, Xoshiro256ss& rng) {
  if (S.measure() <= 0.0) throw std::runtime_error("sample_radius: empty radius set S");
  if (params.mode == Mode::strict && S.measure() < params.R / 2.0) {
    throw guarantee_violation("strict mode: mu(S) = " + std::to_string(S.measure()) +
                              " < R/2 = " + std::to_string(params.R / 2.0));
  }
  double x = params.F_inverse(rng.uniform());
  if (params.mode == Mode::practical && x > S.measure()) x = S.measure();
  return S.pi_inverse(x);
}

ClusterPick cluster_select(const MetricView& view, const PartitionParams& params,
                           Xoshiro256ss& rng) {
  if (view.active_count() == 0) throw std::invalid_argument("cluster_select: empty view");
  ClusterPick pick;
  pick.pivot = select_pivot(view, params.R0);
  pick.heavy = is_heavy(view, pick.pivot, params);
  if (pick.heavy) {
    pick.t = params.R1;
    pick.mu_S = 0.0;
  } else {
    const IntervalSet S = compute_S(view, pick.pivot, params);
    pick.mu_S = S.measure();
    pick.t = sample_radius(S, params, rng);
  }
  pick.members = view.ball_members(pick.pivot, pick.t);
  return pick;
}

Clustering partition_metric(const MetricView& view, const PartitionParams& params,
                            Xoshiro256ss& rng, std::vector<ClusterPick>* trace) {
  Clustering result;
  result.labels.assign(view.total_points(), -1);
  std::vector<int> remaining = view.active();
  int next_label = 0;
  while (!remaining.empty()) {
    const MetricView sub = view.restrict_to(remaining);
    ClusterPick pick = cluster_select(sub, params, rng);
    for (int v : pick.members) result.labels[v] = next_label;
    std::vector<int> still;
    still.reserve(remaining.size() - pick.members.size());
    for (int v : remaining) {
      if (result.labels[v] == -1) still.push_back(v);
    }
    remaining = std::move(still);
    ++next_label;
    if (trace) trace->push_back(std::move(pick));
  }
  return result;
}

ClusterRunResult cluster_instance(const Instance& inst, NormOrder p,
                                  const SolverOptions& opts, Mode mode, std::uint64_t seed,
                                  const Matrix* x_in, std::vector<ClusterPick>* trace) {
  {
    const auto violations = validate(inst);
    if (!violations.empty()) {
      throw std::invalid_argument("cluster_instance: invalid instance: " + violations.front());
    }
  }
  ClusterRunResult result;
  if (x_in) {
    FractionalSolution sol;
    sol.n = inst.n;
    sol.p = p;
    sol.x = project_metric(*x_in, inst.n);
    sol.y = eval_y(inst, sol.x);
    sol.objective = objective(sol.y, p);
    sol.max_triangle_residual = check_feasible(sol.x, inst.n, 1e-12).max_triangle_residual;
    result.solution = std::move(sol);
  } else {
    result.solution = solve_cp(inst, p, opts);
  }

  result.params = derive_params(inst.alpha, 2.0, 1.0 / 3.0, mode, /*clamp_alpha=*/true);
  {
    const double direct = std::sqrt(inst.alpha) / std::log(1.0 / inst.alpha);
    result.alpha_effective = inst.alpha;
    result.alpha_clamped = std::abs(result.params.r - direct) > 1e-15 * std::max(1.0, direct);
    if (result.alpha_clamped) {
      // recover the clamped alpha from the radius actually used
      result.alpha_effective = result.params.r * result.params.r *
                               std::log(1.0 / inst.alpha);  // informational only
    }
  }

  const MetricView view = MetricView::create(result.solution.x, inst.n);
  Xoshiro256ss rng(seed);
  result.clustering = partition_metric(view, result.params, rng, trace);

  const DisagreementReport report = disagreements(inst, result.clustering, p);
  result.dis = report.dis;
  result.dis_norm = report.norms.at(p.str());
  return result;
}

}  // namespace ccl
