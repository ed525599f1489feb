#include "corrclust/relaxation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>

namespace ccl {

std::vector<double> eval_y(const Instance& inst, const Matrix& x) {
  const int n = inst.n;
  if (static_cast<int>(x.size()) != n * n) throw std::invalid_argument("eval_y: dimension mismatch");
  std::vector<double> y(n, 0.0);
  for (int u = 0; u < n; ++u) {
    double acc = 0.0;
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      const double xv = mat_at(x, n, u, v);
      acc += inst.positive(u, v) ? inst.wt(u, v) * xv : inst.wt(u, v) * (1.0 - xv);
    }
    y[u] = acc;
  }
  return y;
}

double objective(const std::vector<double>& y, NormOrder p) {
  if (y.empty()) return 0.0;
  double m = 0.0;
  for (double v : y) m = std::max(m, v);
  if (p.infinite || m == 0.0) return m;
  if (p.value == 1.0) {
    double s = 0.0;
    for (double v : y) s += v;
    return s;
  }
  // scale by the max to avoid overflow for large p
  double s = 0.0;
  for (double v : y) s += std::pow(v / m, p.value);
  return m * std::pow(s, 1.0 / p.value);
}

FeasibilityReport check_feasible(const Matrix& x, int n, double tol) {
  FeasibilityReport rep;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      const double e = mat_at(x, n, u, v);
      if (e < -tol || e > 1.0 + tol) ++rep.range_violations;
      if (std::abs(e - mat_at(x, n, v, u)) > tol) ++rep.symmetry_violations;
    }
  }
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (b == a) continue;
      const double xab = mat_at(x, n, a, b);
      for (int c = 0; c < n; ++c) {
        if (c == a || c == b) continue;
        worst = std::max(worst, mat_at(x, n, a, c) - xab - mat_at(x, n, b, c));
      }
    }
  }
  rep.max_triangle_residual = std::max(0.0, worst);
  return rep;
}

Matrix project_metric(Matrix x, int n) {
  // Floyd-Warshall min-plus closure; output <= input entry-wise.
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      const double dik = mat_at(x, n, i, k);
      for (int j = 0; j < n; ++j) {
        const double via = dik + mat_at(x, n, k, j);
        if (via < mat_at(x, n, i, j)) mat_at(x, n, i, j) = via;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    mat_at(x, n, i, i) = 0.0;
    for (int j = 0; j < n; ++j) {
      if (mat_at(x, n, i, j) > 1.0) mat_at(x, n, i, j) = 1.0;
    }
  }
  return x;
}

namespace {

// Subgradient of ||y(x)||_p in x-space. dy_u/dx_uv is +w for positive edges
// and -w for negative ones, and each edge appears in both endpoint rows.
void norm_subgradient(const Instance& inst, const std::vector<double>& y, NormOrder p,
                      std::vector<double>& gy) {
  const int n = inst.n;
  gy.assign(n, 0.0);
  if (p.infinite) {
    int best = 0;
    for (int u = 1; u < n; ++u) {
      if (y[u] > y[best]) best = u;  // lowest index on ties
    }
    gy[best] = 1.0;
    return;
  }
  if (p.value == 1.0) {
    gy.assign(n, 1.0);
    return;
  }
  const double norm = objective(y, p);
  if (norm <= 0.0) return;  // already optimal
  for (int u = 0; u < n; ++u) gy[u] = std::pow(y[u] / norm, p.value - 1.0);
}

void triangle_fix_sweep(Matrix& x, int n) {
  // Cyclic halfspace projections over every oriented triple.
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) {
        double& ab = mat_at(x, n, a, b);
        double& bc = mat_at(x, n, b, c);
        double& ac = mat_at(x, n, a, c);
        double v = ac - ab - bc;
        if (v > 0) { ac -= v / 3; ab += v / 3; bc += v / 3; }
        v = ab - ac - bc;
        if (v > 0) { ab -= v / 3; ac += v / 3; bc += v / 3; }
        v = bc - ab - ac;
        if (v > 0) { bc -= v / 3; ab += v / 3; ac += v / 3; }
        mat_at(x, n, b, a) = ab;
        mat_at(x, n, c, b) = bc;
        mat_at(x, n, c, a) = ac;
      }
    }
  }
}

void clamp_unit(Matrix& x, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double& e = mat_at(x, n, i, j);
      if (i == j) e = 0.0;
      else e = std::clamp(e, 0.0, 1.0);
    }
  }
}

double max_weight(const Instance& inst) {
  double m = 0.0;
  for (double w : inst.weight) m = std::max(m, w);
  return m;
}

// Dykstra's alternating projections onto the intersection of all triangle
// halfspaces and the [0,1] box. Unlike plain cyclic projection, the
// per-constraint correction terms make the limit the exact Euclidean
// projection, which keeps descent steps unbiased.
void dykstra_project(Matrix& x, int n, double tol, int max_cycles) {
  std::vector<std::array<int, 3>> tris;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int c = b + 1; c < n; ++c) tris.push_back({a, b, c});
    }
  }
  std::vector<double> corr(tris.size() * 3, 0.0);
  Matrix box_corr(static_cast<std::size_t>(n) * n, 0.0);
  for (int cyc = 0; cyc < max_cycles; ++cyc) {
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const auto [a, b, c] = tris[t];
      for (int o = 0; o < 3; ++o) {
        int i, j, k;
        if (o == 0) { i = a; j = b; k = c; }
        else if (o == 1) { i = b; j = a; k = c; }
        else { i = a; j = c; k = b; }
        double& cr = corr[t * 3 + o];
        double eik = mat_at(x, n, std::min(i, k), std::max(i, k));
        double eij = mat_at(x, n, std::min(i, j), std::max(i, j));
        double ejk = mat_at(x, n, std::min(j, k), std::max(j, k));
        eik += cr;
        eij -= cr;
        ejk -= cr;
        const double v = eik - eij - ejk;  // halfspace a.z <= 0 with ||a||^2 = 3
        const double lam = v > 0 ? v / 3.0 : 0.0;
        eik -= lam;
        eij += lam;
        ejk += lam;
        cr = lam;
        mat_at(x, n, std::min(i, k), std::max(i, k)) = eik;
        mat_at(x, n, std::min(i, j), std::max(i, j)) = eij;
        mat_at(x, n, std::min(j, k), std::max(j, k)) = ejk;
      }
    }
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        double& e = mat_at(x, n, u, v);
        double& cr = mat_at(box_corr, n, u, v);
        e += cr;
        const double proj = std::clamp(e, 0.0, 1.0);
        cr = e - proj;
        e = proj;
      }
    }
    double worst = 0.0;
    for (const auto& [a, b, c] : tris) {
      const double ab = mat_at(x, n, a, b), bc = mat_at(x, n, b, c), ac = mat_at(x, n, a, c);
      worst = std::max({worst, ac - ab - bc, ab - ac - bc, bc - ab - ac});
    }
    if (worst <= tol) break;
  }
  for (int u = 0; u < n; ++u) {
    mat_at(x, n, u, u) = 0.0;
    for (int v = u + 1; v < n; ++v) mat_at(x, n, v, u) = mat_at(x, n, u, v);
  }
}

// Refinement: projected (sub)gradient with exact projection and epoch-wise
// geometric step decay. The step is halved whenever an epoch fails to improve
// the incumbent by a fraction of the step, so the error tracks the step size
// down to rounding level. For p = inf the max is smoothed with a softmax
// whose temperature shrinks with the step.
void refine(const Instance& inst, NormOrder p, int epochs, int iters, double& best_obj,
            Matrix& best_x) {
  const int n = inst.n;
  const double maxw = std::max(max_weight(inst), 1e-300);
  double step = 1.0 / (n * maxw);
  std::vector<double> gy(n);
  Matrix x = best_x;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    const double start_best = best_obj;
    if (objective(eval_y(inst, x), p) > best_obj * 1.02) x = best_x;  // restart from incumbent
    for (int it = 0; it < iters; ++it) {
      const std::vector<double> y = eval_y(inst, x);
      if (p.infinite) {
        const double tau = std::max(1e-12, step * maxw);
        const double m = *std::max_element(y.begin(), y.end());
        double z = 0.0;
        for (int u = 0; u < n; ++u) {
          gy[u] = std::exp((y[u] - m) / tau);
          z += gy[u];
        }
        for (int u = 0; u < n; ++u) gy[u] /= z;
      } else if (p.value == 1.0) {
        std::fill(gy.begin(), gy.end(), 1.0);
      } else {
        const double nm = objective(y, p);
        if (nm <= 0.0) std::fill(gy.begin(), gy.end(), 0.0);
        else {
          for (int u = 0; u < n; ++u) gy[u] = std::pow(y[u] / nm, p.value - 1.0);
        }
      }
      for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
          const double coef =
              (gy[u] + gy[v]) * (inst.positive(u, v) ? inst.wt(u, v) : -inst.wt(u, v));
          const double e = mat_at(x, n, u, v) - step * coef;
          mat_at(x, n, u, v) = e;
          mat_at(x, n, v, u) = e;
        }
      }
      dykstra_project(x, n, 1e-13, 3000);
      const double obj = objective(eval_y(inst, x), p);
      if (obj < best_obj - 1e-15) {
        best_obj = obj;
        best_x = x;
      }
    }
    if (start_best - best_obj < 1e-9 * step * maxw) step *= 0.5;
    if (best_obj == 0.0 || step < 1e-13 / (n * maxw)) break;
  }
  best_x = project_metric(std::move(best_x), n);
  best_obj = objective(eval_y(inst, best_x), p);
}

}  // namespace

FractionalSolution solve_cp(const Instance& inst, NormOrder p, const SolverOptions& opts) {
  const int n = inst.n;
  if (opts.max_iters <= 0 || opts.projection_rounds <= 0 || !(opts.tol_residual > 0) ||
      !(opts.tol_obj > 0)) {
    throw std::invalid_argument("solve_cp: solver options must be positive");
  }
  const double step0 = opts.step0 > 0 ? opts.step0 : 1.0 / (n * std::max(max_weight(inst), 1e-300));

  Matrix x(static_cast<std::size_t>(n) * n, 0.5);
  for (int i = 0; i < n; ++i) mat_at(x, n, i, i) = 0.0;

  Matrix best_x = project_metric(x, n);
  double best_obj = objective(eval_y(inst, best_x), p);

  std::vector<double> gy;
  std::deque<double> recent_obj;
  bool converged = false;

  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    std::vector<double> y = eval_y(inst, x);
    norm_subgradient(inst, y, p, gy);
    const double step = step0 / std::sqrt(static_cast<double>(iter));
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        const double coef = (gy[u] + gy[v]) * (inst.positive(u, v) ? inst.wt(u, v) : -inst.wt(u, v));
        const double e = std::clamp(mat_at(x, n, u, v) - step * coef, 0.0, 1.0);
        mat_at(x, n, u, v) = e;
        mat_at(x, n, v, u) = e;
      }
    }
    for (int round = 0; round < opts.projection_rounds; ++round) triangle_fix_sweep(x, n);
    clamp_unit(x, n);

    // Track the best exactly-feasible iterate.
    Matrix repaired = project_metric(x, n);
    const double obj = objective(eval_y(inst, repaired), p);
    if (obj < best_obj) {
      best_obj = obj;
      best_x = std::move(repaired);
    }

    recent_obj.push_back(best_obj);
    if (static_cast<int>(recent_obj.size()) > 50) recent_obj.pop_front();
    if (static_cast<int>(recent_obj.size()) == 50) {
      const double old = recent_obj.front();
      const double rel = std::abs(old - best_obj) / std::max(std::abs(old), 1e-12);
      const double resid = check_feasible(x, n, 1e-12).max_triangle_residual;
      if (resid <= opts.tol_residual && rel <= opts.tol_obj) {
        converged = true;
        break;
      }
    }
    if (best_obj == 0.0) {
      converged = true;
      break;
    }
  }

  if (opts.refine_epochs > 0 && n <= opts.refine_max_n) {
    refine(inst, p, opts.refine_epochs, opts.refine_iters, best_obj, best_x);
    // A flat start sometimes escapes the basin the phase-1 incumbent is in.
    Matrix flat(static_cast<std::size_t>(n) * n, 0.5);
    for (int i = 0; i < n; ++i) mat_at(flat, n, i, i) = 0.0;
    double flat_obj = objective(eval_y(inst, flat), p);
    refine(inst, p, opts.refine_epochs, opts.refine_iters, flat_obj, flat);
    if (flat_obj < best_obj) {
      best_obj = flat_obj;
      best_x = std::move(flat);
    }
    converged = true;
  }

  FractionalSolution sol;
  sol.n = n;
  sol.p = p;
  sol.x = std::move(best_x);
  sol.y = eval_y(inst, sol.x);
  sol.objective = objective(sol.y, p);
  sol.max_triangle_residual = check_feasible(sol.x, n, 1e-12).max_triangle_residual;
  sol.converged = converged;
  return sol;
}

namespace {

// Checks that inst has the exact gen_gap shape.
bool is_gap_shape(const Instance& inst) {
  const int n = inst.n;
  if (n < 3 || inst.w_scale != 1.0) return false;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (v == u + 1) {
        if (!inst.positive(u, v) || inst.wt(u, v) != 1.0) return false;
      } else if (u == 0 && v == n - 1) {
        if (inst.positive(u, v) || inst.wt(u, v) != 1.0) return false;
      } else {
        if (!inst.positive(u, v) || inst.wt(u, v) != inst.alpha) return false;
      }
    }
  }
  return true;
}

}  // namespace

FractionalSolution gap_fractional(const Instance& inst, NormOrder p) {
  if (!is_gap_shape(inst)) {
    throw std::invalid_argument("gap_fractional: instance does not have the gap-family shape");
  }
  const int n = inst.n;
  FractionalSolution sol;
  sol.n = n;
  sol.p = p;
  sol.x.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      mat_at(sol.x, n, u, v) = static_cast<double>(std::abs(u - v)) / (n - 1);
    }
  }
  sol.y = eval_y(inst, sol.x);
  sol.objective = objective(sol.y, p);
  sol.max_triangle_residual = check_feasible(sol.x, n, 1e-12).max_triangle_residual;
  sol.converged = true;
  return sol;
}

Matrix embed_clustering(const Clustering& c) {
  const int n = c.size();
  Matrix x(static_cast<std::size_t>(n) * n, 0.0);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      mat_at(x, n, u, v) = (c.labels[u] == c.labels[v]) ? 0.0 : 1.0;
    }
  }
  return x;
}

}  // namespace ccl
