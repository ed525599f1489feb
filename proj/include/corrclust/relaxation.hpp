#pragma once

#include <vector>

#include "corrclust/types.hpp"

namespace ccl {

struct SolverOptions {
  int max_iters = 4000;
  double step0 = 0.0;          // 0 = auto: 1 / (n * max weight)
  double tol_residual = 1e-6;  // feasibility tolerance
  double tol_obj = 1e-8;       // relative objective stall tolerance
  int projection_rounds = 2;   // triangle fix-up cycles per iteration
  // Refinement phase: projected subgradient with exact (Dykstra) projection
  // onto the relaxed polytope and geometric step decay, run from both the
  // phase-1 incumbent and a flat start. Skipped when n > refine_max_n because
  // the exact projection is cubic per iteration.
  int refine_epochs = 250;     // 0 disables refinement
  int refine_iters = 300;      // iterations per epoch
  int refine_max_n = 16;
};

struct FractionalSolution {
  int n = 0;
  NormOrder p;
  Matrix x;               // symmetric, [0,1], zero diagonal
  std::vector<double> y;  // exact (P1) vector for x
  double objective = 0.0;
  double max_triangle_residual = 0.0;
  bool converged = true;
};

struct FeasibilityReport {
  double max_triangle_residual = 0.0;
  int range_violations = 0;
  int symmetry_violations = 0;
};

// Exact (P1) cost vector for a given multicut metric x.
std::vector<double> eval_y(const Instance& inst, const Matrix& x);

// lp norm of a nonnegative vector; max for p = inf.
double objective(const std::vector<double>& y, NormOrder p);

// Exhaustive O(n^3) triangle scan plus range/symmetry accounting.
FeasibilityReport check_feasible(const Matrix& x, int n, double tol);

// Min-plus (all-pairs shortest path) closure clamped to [0,1]. Output is an
// exact metric and never exceeds the input entry-wise.
Matrix project_metric(Matrix x, int n);

// Projected subgradient descent with cyclic triangle fixing. Deterministic.
FractionalSolution solve_cp(const Instance& inst, NormOrder p, const SolverOptions& opts);

// Closed-form fractional solution for gen_gap instances: x from path
// distances scaled by 1/(n-1).
FractionalSolution gap_fractional(const Instance& inst, NormOrder p);

// 0/1 co-clustering embedding of an integral clustering.
Matrix embed_clustering(const Clustering& c);

}  // namespace ccl
