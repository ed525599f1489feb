#include "corrclust/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "corrclust/instance.hpp"
#include "corrclust/relaxation.hpp"

namespace ccl {

DisagreementReport disagreements(const Instance& inst, const Clustering& c, NormOrder requested) {
  if (c.size() != inst.n) throw std::invalid_argument("disagreements: label count != n");
  DisagreementReport rep;
  rep.dis.assign(inst.n, 0.0);
  for (int u = 0; u < inst.n; ++u) {
    double acc = 0.0;
    for (int v = 0; v < inst.n; ++v) {
      if (v == u) continue;
      const bool together = c.labels[u] == c.labels[v];
      if (inst.positive(u, v) ? !together : together) acc += inst.wt(u, v);
    }
    rep.dis[u] = acc;
  }
  rep.norms["1"] = objective(rep.dis, NormOrder::finite(1.0));
  rep.norms["2"] = objective(rep.dis, NormOrder::finite(2.0));
  rep.norms["inf"] = objective(rep.dis, NormOrder::inf());
  rep.norms[requested.str()] = objective(rep.dis, requested);
  return rep;
}

namespace {

double bell_number(int n) {
  std::vector<double> row{1.0};
  for (int i = 0; i < n; ++i) {
    std::vector<double> next(row.size() + 1);
    next[0] = row.back();
    for (std::size_t j = 0; j < row.size(); ++j) next[j + 1] = next[j] + row[j];
    row = std::move(next);
  }
  return row.front();
}

}  // namespace

std::pair<double, Clustering> brute_force_opt(const Instance& inst, NormOrder p, int max_n) {
  const int n = inst.n;
  if (n > max_n) {
    std::ostringstream msg;
    msg << "brute_force_opt: n = " << n << " exceeds cap " << max_n << " (about "
        << bell_number(n) << " set partitions)";
    throw std::invalid_argument(msg.str());
  }
  std::vector<int> a(n, 0);  // restricted growth string
  std::vector<double> dis(n);
  Clustering best;
  best.labels = a;
  double best_val = std::numeric_limits<double>::infinity();
  while (true) {
    // evaluate current partition
    for (int u = 0; u < n; ++u) {
      double acc = 0.0;
      for (int v = 0; v < n; ++v) {
        if (v == u) continue;
        const bool together = a[u] == a[v];
        if (inst.positive(u, v) ? !together : together) acc += inst.wt(u, v);
      }
      dis[u] = acc;
    }
    const double val = objective(dis, p);
    if (val < best_val) {  // strict: first (lexicographically smallest) wins ties
      best_val = val;
      best.labels = a;
    }
    // advance to the next growth string
    int i = n - 1;
    for (; i > 0; --i) {
      int cap = 0;
      for (int j = 0; j < i; ++j) cap = std::max(cap, a[j]);
      if (a[i] <= cap) break;  // a[i] can grow to cap + 1
      a[i] = 0;
    }
    if (i == 0) break;
    ++a[i];
    for (int j = i + 1; j < n; ++j) a[j] = 0;
  }
  return {best_val, std::move(best)};
}

LocalGuaranteeReport verify_local_guarantee(const Instance& inst, const Matrix& x,
                                            const Clustering& c,
                                            const PartitionParams& params) {
  const int n = inst.n;
  if (c.size() != n) throw std::invalid_argument("verify_local_guarantee: label count != n");
  LocalGuaranteeReport rep;
  rep.A1 = std::log(1.0 / inst.alpha);
  rep.A_inf = std::log(1.0 / inst.alpha) / std::sqrt(inst.alpha);
  rep.r = params.r;

  const std::vector<double> y = eval_y(inst, x);
  const DisagreementReport dr = disagreements(inst, c);
  rep.per_vertex_ratio.assign(n, 0.0);

  double ratio_sum = 0.0, ratio_max = 0.0;
  const double tol = 1e-9;
  for (int u = 0; u < n; ++u) {
    double neg_dis = 0.0;      // disagreement weight on negative edges at u
    double long_weight = 0.0;  // weight of positive edges at u with length >= r
    long long_count = 0;
    for (int v = 0; v < n; ++v) {
      if (v == u) continue;
      if (inst.positive(u, v)) {
        if (mat_at(x, n, u, v) >= params.r) {
          long_weight += inst.wt(u, v);
          ++long_count;
        }
      } else if (c.labels[u] == c.labels[v]) {
        neg_dis += inst.wt(u, v);
      }
    }
    if (neg_dis > 3.0 * y[u] + tol) ++rep.negative_bound_violations;
    if (long_weight > y[u] / params.r + tol) ++rep.long_edge_bound_violations;
    if (static_cast<double>(long_count) >
        y[u] / (inst.alpha * inst.w_scale * params.r) + tol) {
      ++rep.long_edge_count_violations;
    }
    const double ratio = y[u] > 0.0
                             ? dr.dis[u] / y[u]
                             : (dr.dis[u] > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rep.per_vertex_ratio[u] = ratio;
    ratio_sum += ratio;
    ratio_max = std::max(ratio_max, ratio);
  }
  rep.max_ratio_over_Ainf = ratio_max / rep.A_inf;
  rep.mean_ratio_over_A1 = (ratio_sum / n) / rep.A1;
  return rep;
}

namespace {

// Shared accumulator for the sampling verifiers. Merging is commutative, so
// per-thread partial results combine into the same totals in any order.
struct TrialAccum {
  long prop3 = 0, lemma8 = 0;
  bool diameter_ok = true;
  double mu_S_min = std::numeric_limits<double>::infinity();
  long light = 0, heavy = 0;
  std::vector<double> sep, vee;  // pair separation / touch counts (u < v)
  std::vector<double> yp_sum;    // per-u running sum of Y_P
  double yp_total = 0, yp_max = 0;
  long yp_count = 0;

  explicit TrialAccum(int n)
      : sep(static_cast<std::size_t>(n) * n, 0.0),
        vee(static_cast<std::size_t>(n) * n, 0.0),
        yp_sum(n, 0.0) {}

  void merge(const TrialAccum& o) {
    prop3 += o.prop3;
    lemma8 += o.lemma8;
    diameter_ok = diameter_ok && o.diameter_ok;
    mu_S_min = std::min(mu_S_min, o.mu_S_min);
    light += o.light;
    heavy += o.heavy;
    for (std::size_t i = 0; i < sep.size(); ++i) sep[i] += o.sep[i];
    for (std::size_t i = 0; i < vee.size(); ++i) vee[i] += o.vee[i];
    for (std::size_t i = 0; i < yp_sum.size(); ++i) yp_sum[i] += o.yp_sum[i];
    yp_total += o.yp_total;
    yp_max = std::max(yp_max, o.yp_max);
    yp_count += o.yp_count;
  }

  void note_yp(double yp) {
    yp_total += yp;
    yp_max = std::max(yp_max, yp);
    ++yp_count;
  }
};

void run_threaded(int trials, const std::function<void(int, TrialAccum&)>& body, TrialAccum& out) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, 8));
  if (workers <= 1 || trials < 32) {
    for (int t = 0; t < trials; ++t) body(t, out);
    return;
  }
  std::vector<TrialAccum> parts(workers, TrialAccum(static_cast<int>(out.yp_sum.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int t = w; t < trials; t += workers) body(t, parts[w]);
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& part : parts) out.merge(part);
}

double hoeffding_eps(int n, int trials) {
  return std::sqrt(std::log(2.0 * n * n / 0.01) / (2.0 * trials));
}

// Y_P(u) = sum over active v in Ball(u, 2R) of d(u,v)/R where u or v is in P.
double y_p(const MetricView& view, const std::vector<char>& member, int u, double R) {
  double acc = 0.0;
  for (int v : view.active()) {
    if (v == u) continue;
    const double d = view.dist(u, v);
    if (d <= 2.0 * R && (member[u] || member[v])) acc += d / R;
  }
  return acc;
}

// Per-pick always-true checks shared by both verifiers; `sub` is the metric
// restricted to the points that were still active when the pick was made.
void check_pick(const MetricView& sub, const ClusterPick& pick, const PartitionParams& params,
                TrialAccum& acc) {
  std::vector<char> member(sub.total_points(), 0);
  for (int v : pick.members) member[v] = 1;

  for (std::size_t i = 0; i < pick.members.size(); ++i) {
    for (std::size_t j = i + 1; j < pick.members.size(); ++j) {
      if (sub.dist(pick.members[i], pick.members[j]) > 2.0 * params.R) acc.diameter_ok = false;
    }
  }

  const bool lemma8_applies = pick.t > 3.0 * params.R0 && pick.t <= params.R1;
  const double rhs3_scale = 25.0 * params.beta * params.D_beta * params.D_beta;
  for (int u : sub.active()) {
    int short_sep = 0;
    for (int v : sub.active()) {
      if (v != u && sub.dist(u, v) <= params.r && member[u] != member[v]) ++short_sep;
    }
    const double yp = y_p(sub, member, u, params.R);
    acc.note_yp(yp);
    if (static_cast<double>(short_sep) > rhs3_scale * yp) ++acc.prop3;
    const double dzu = sub.dist(pick.pivot, u);
    if (lemma8_applies && dzu >= 2.0 * params.R0 && dzu <= params.R) {
      if (static_cast<double>(pick.members.size()) > 2.0 * params.D_beta * yp) ++acc.lemma8;
    }
  }

  if (pick.heavy) ++acc.heavy;
  else {
    ++acc.light;
    acc.mu_S_min = std::min(acc.mu_S_min, pick.mu_S);
  }
}

}  // namespace

DecompositionCheck verify_cluster(const MetricView& view, const PartitionParams& params,
                                  int trials, std::uint64_t seed) {
  const int n = view.total_points();
  TrialAccum acc(n);
  run_threaded(trials, [&](int trial, TrialAccum& part) {
    Xoshiro256ss rng(seed + static_cast<std::uint64_t>(trial));
    const ClusterPick pick = cluster_select(view, params, rng);
    check_pick(view, pick, params, part);

    std::vector<char> member(n, 0);
    for (int v : pick.members) member[v] = 1;
    for (int u : view.active()) {
      for (int v : view.active()) {
        if (v <= u) continue;
        if (member[u] != member[v]) part.sep[static_cast<std::size_t>(u) * n + v] += 1.0;
        if (member[u] || member[v]) part.vee[static_cast<std::size_t>(u) * n + v] += 1.0;
      }
    }
    for (int u : view.active()) {
      part.yp_sum[u] += y_p(view, member, u, params.R);
    }
  }, acc);

  DecompositionCheck rep;
  rep.trials = trials;
  rep.diameter_ok = acc.diameter_ok;
  rep.prop3_violations = acc.prop3;
  rep.lemma8_violations = acc.lemma8;
  rep.mu_S_min = acc.mu_S_min;
  rep.light_trials = acc.light;
  rep.heavy_trials = acc.heavy;
  rep.yp_mean = acc.yp_count > 0 ? acc.yp_total / acc.yp_count : 0.0;
  rep.yp_max = acc.yp_max;
  rep.epsilon = hoeffding_eps(n, trials);

  const double T = static_cast<double>(trials);
  double worst = 0.0;
  for (int u : view.active()) {
    double lhs = 0.0;
    for (int v : view.active()) {
      if (v == u) continue;
      const double d = view.dist(u, v);
      if (d > params.R) continue;
      const int a = std::min(u, v), b = std::max(u, v);
      const double p_hat = acc.sep[static_cast<std::size_t>(a) * n + b] / T;
      const double v_hat = acc.vee[static_cast<std::size_t>(a) * n + b] / T;
      lhs += std::max(0.0, (p_hat - rep.epsilon) - params.D_beta * d / params.R * v_hat);
    }
    const double rhs = std::pow(params.beta, params.q) * acc.yp_sum[u] / T;
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
    else if (lhs > rep.epsilon) rep.prop2_flagged = true;
  }
  rep.prop2_ratio = worst;
  return rep;
}

DecompositionCheck verify_decomposition(const MetricView& view, const PartitionParams& params,
                                        int trials, std::uint64_t seed) {
  const int n = view.total_points();
  TrialAccum acc(n);
  run_threaded(trials, [&](int trial, TrialAccum& part) {
    Xoshiro256ss rng(seed + static_cast<std::uint64_t>(trial));
    std::vector<ClusterPick> trace;
    const Clustering c = partition_metric(view, params, rng, &trace);

    // replay the picks against the active sets they were drawn from
    std::vector<int> remaining = view.active();
    for (const ClusterPick& pick : trace) {
      const MetricView sub = view.restrict_to(remaining);
      check_pick(sub, pick, params, part);
      std::vector<char> taken(n, 0);
      for (int v : pick.members) taken[v] = 1;
      std::vector<int> still;
      for (int v : remaining) {
        if (!taken[v]) still.push_back(v);
      }
      remaining = std::move(still);
    }

    for (int u : view.active()) {
      for (int v : view.active()) {
        if (v <= u) continue;
        if (c.labels[u] != c.labels[v]) part.sep[static_cast<std::size_t>(u) * n + v] += 1.0;
      }
    }
  }, acc);

  DecompositionCheck rep;
  rep.trials = trials;
  rep.diameter_ok = acc.diameter_ok;
  rep.prop3_violations = acc.prop3;
  rep.lemma8_violations = acc.lemma8;
  rep.mu_S_min = acc.mu_S_min;
  rep.light_trials = acc.light;
  rep.heavy_trials = acc.heavy;
  rep.yp_mean = acc.yp_count > 0 ? acc.yp_total / acc.yp_count : 0.0;
  rep.yp_max = acc.yp_max;
  rep.epsilon = hoeffding_eps(n, trials);

  const double T = static_cast<double>(trials);
  double worst = 0.0;
  for (int u : view.active()) {
    double lhs = 0.0, rhs = 0.0;
    for (int v : view.active()) {
      if (v == u) continue;
      const double d = view.dist(u, v);
      if (d <= 2.0 * params.R) rhs += d / params.R;
      if (d > params.R) continue;
      const int a = std::min(u, v), b = std::max(u, v);
      const double p_hat = acc.sep[static_cast<std::size_t>(a) * n + b] / T;
      lhs += std::max(0.0, (p_hat - rep.epsilon) - params.D_beta * d / params.R);
    }
    rhs *= std::pow(params.beta, params.q);
    if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
    else if (lhs > rep.epsilon) rep.prop2_flagged = true;
  }
  rep.prop2_ratio = worst;
  return rep;
}

FClaimsReport check_F_claims(const PartitionParams& params, int grid_points) {
  if (grid_points < 2) throw std::invalid_argument("check_F_claims: need at least 2 grid points");
  FClaimsReport rep;
  const double bq1 = std::pow(params.beta, params.q + 1.0);
  rep.tail_identity_lhs = 1.0 - params.F(params.R / 2.0 - 2.0 * params.R0);
  rep.tail_identity_rhs = (std::exp(2.0) - 1.0) * bq1 / (1.0 - bq1);
  rep.identity_residual = std::abs(rep.tail_identity_lhs - rep.tail_identity_rhs);

  std::vector<double> grid(grid_points), Fv(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    grid[i] = params.R / 2.0 * i / (grid_points - 1);
    Fv[i] = params.F(grid[i]);
  }
  for (int i = 0; i < grid_points; ++i) {
    for (int j = i; j < grid_points; ++j) {
      const double bound = params.D_beta * (grid[j] - grid[i]) / params.R *
                           (1.0 - Fv[i] + 2.0 * bq1);
      const double excess = (Fv[j] - Fv[i]) - bound;
      if (excess > 1e-12) {
        ++rep.grid_violations;
        rep.max_grid_excess = std::max(rep.max_grid_excess, excess);
      }
    }
  }
  return rep;
}

PiCheckReport check_pi_properties(const IntervalSet& S, int samples, std::uint64_t seed,
                                  double domain_hi) {
  PiCheckReport rep;
  Xoshiro256ss rng(seed);
  for (int i = 0; i < samples; ++i) {
    double x1 = rng.uniform() * domain_hi;
    double x2 = rng.uniform() * domain_hi;
    if (x1 > x2) std::swap(x1, x2);
    const double p1 = S.pi_forward(x1);
    const double p2 = S.pi_forward(x2);
    if (p2 < p1) ++rep.monotonicity_violations;
    if (std::abs(p2 - p1) > std::abs(x2 - x1) + 1e-12) ++rep.lipschitz_violations;
  }
  if (S.measure() > 0.0) {
    for (int i = 0; i < samples; ++i) {
      const double y = rng.uniform() * S.measure();
      const double x = S.pi_inverse(y);
      const double resid = std::abs(S.pi_forward(x) - y);
      rep.max_inverse_residual = std::max(rep.max_inverse_residual, resid);
      if (resid > 1e-12) ++rep.inverse_violations;
      if (!S.contains(x)) ++rep.membership_violations;
    }
  }
  return rep;
}

PhiCheck check_phi_bound(const MetricView& view, int z, const PartitionParams& params) {
  PhiCheck rep;
  rep.r_prime = 2.0 * params.r;
  rep.gamma = 25.0 * params.r / (params.R0 * params.R0);
  rep.R_prime = params.R1 - 3.0 * params.R0 - params.r;
  if (rep.gamma >= 1.0 / rep.r_prime) {
    rep.applicable = false;  // equivalent to beta * D_beta >= 1/(5 sqrt(2))
    return rep;
  }
  rep.eta = std::sqrt(rep.gamma / ((std::exp(1.0) - 1.0) * rep.r_prime));
  if (rep.R_prime <= 0.0) {
    rep.applicable = false;
    return rep;
  }

  const double base = 3.0 * params.R0;
  const double ball0 = static_cast<double>(view.ball_size(z, base));
  const auto phi = [&](double t) {
    return static_cast<double>(view.ball_size(z, base + t)) / ball0;
  };

  // Breakpoints of t -> Phi(t) and t -> Phi(t + r') on [0, R'].
  std::vector<double> bps{0.0, rep.R_prime};
  for (int v : view.active()) {
    const double d = view.dist(z, v);
    for (const double shift : {base, base + rep.r_prime}) {
      const double t = d - shift;
      if (t > 0.0 && t < rep.R_prime) bps.push_back(t);
    }
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

  // Scan [0, R' - r'] for the set S' where
  // Phi(t + r') >= Phi(t) + gamma * integral_0^t Phi.
  const double t_hi = rep.R_prime - rep.r_prime;
  double integral = 0.0;  // of Phi over [0, t)
  double mu = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double a = bps[i], b = bps[i + 1];
    const double phi_a = phi(a);
    rep.phi_samples.emplace_back(a, phi_a);
    if (a < t_hi) {
      const double seg_hi = std::min(b, t_hi);
      // On [a, seg_hi) both Phi(t) and Phi(t + r') are the constants below,
      // and the integral grows linearly with slope phi_a.
      const double lead = phi(a + rep.r_prime);
      const double margin = lead - phi_a - rep.gamma * integral;
      if (margin >= 0.0) {
        const double cut = phi_a > 0.0 ? margin / (rep.gamma * phi_a) : (seg_hi - a);
        mu += std::min(seg_hi - a, cut);
      }
    }
    integral += phi_a * (b - a);
  }
  rep.phi_samples.emplace_back(rep.R_prime, phi(rep.R_prime));

  rep.mu_S_prime = mu;
  rep.phi_at_R_prime = phi(rep.R_prime);
  rep.bound_rhs = std::exp(rep.eta * mu - 1.0);
  rep.bound_ok = rep.phi_at_R_prime >= rep.bound_rhs * (1.0 - 1e-9);
  return rep;
}

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string GapReport::to_csv() const {
  std::string out = "alpha,p,n,fractional_cost,integral_lb,bruteforce_opt_or_null,ratio\n";
  for (const GapRow& row : rows) {
    out += fmt_g(row.alpha) + "," + row.p + "," + std::to_string(row.n) + "," +
           fmt_g(row.fractional_cost) + "," + fmt_g(row.integral_lb) + "," +
           (row.bruteforce_opt ? fmt_g(*row.bruteforce_opt) : std::string("null")) + "," +
           fmt_g(row.ratio) + "\n";
  }
  return out;
}

GapReport gap_report(const std::vector<double>& alphas, const std::vector<NormOrder>& ps,
                     int brute_force_max_n) {
  GapReport rep;
  for (const NormOrder& p : ps) {
    std::vector<double> lx, ly;
    for (double alpha : alphas) {
      const Instance inst = gen_gap(alpha);
      const FractionalSolution frac = gap_fractional(inst, p);
      GapRow row;
      row.alpha = alpha;
      row.p = p.str();
      row.n = inst.n;
      row.fractional_cost = frac.objective;
      row.integral_lb = 1.0;
      if (inst.n <= brute_force_max_n) {
        row.bruteforce_opt = brute_force_opt(inst, p, brute_force_max_n).first;
      }
      row.ratio = row.integral_lb / row.fractional_cost;
      lx.push_back(std::log(1.0 / alpha));
      ly.push_back(std::log(row.ratio));
      rep.rows.push_back(std::move(row));
    }
    double slope = 0.0;
    if (lx.size() >= 2) {
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ly[i] - my);
        den += (lx[i] - mx) * (lx[i] - mx);
      }
      if (den > 0.0) slope = num / den;
    }
    rep.slope[p.str()] = slope;
  }
  return rep;
}

}  // namespace ccl
