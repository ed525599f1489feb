#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "corrclust/interval_set.hpp"
#include "corrclust/relaxation.hpp"
#include "corrclust/rng.hpp"
#include "corrclust/types.hpp"

namespace ccl {

enum class Mode { strict, practical };

Mode parse_mode(const std::string& text);
std::string mode_str(Mode mode);

// All decomposition constants derived from (r, R, q):
//   beta = r/R, D_beta = 2(q+1) ln(1/beta), R0 = R/D_beta, R1 = R - R0,
//   rho = beta^-(q+1).
struct PartitionParams {
  double r = 0, R = 0, q = 2;
  double beta = 0, D_beta = 0, R0 = 0, R1 = 0, rho = 0;
  Mode mode = Mode::practical;

  static PartitionParams from_radii(double r, double R, double q, Mode mode);

  // Truncated-exponential CDF on [0, R/2] used for the pre-image radius draw.
  double F(double x) const;
  double F_inverse(double u) const;  // u in [0,1)
};

// Largest beta in (0, e^-1) for which strict mode's working assumptions all
// hold (bisection to 1e-12).
double beta_star(double q);

// Largest beta at which 2*beta*D_beta = 1; the cap practical mode uses when
// the alpha-derived radius would break r < R0.
double beta_practical_cap(double q);

// r = sqrt(alpha)/ln(1/alpha) with R fixed. Strict mode first clamps alpha
// so that beta <= beta_star(q). Practical mode rejects parameters with
// beta >= 1 or r >= R0; use clamp_alpha=true (the clustering driver does) to
// instead clamp alpha down to the beta_practical_cap boundary.
PartitionParams derive_params(double alpha, double q = 2.0, double R = 1.0 / 3.0,
                              Mode mode = Mode::practical, bool clamp_alpha = false);

// Finite metric over a subset of points of a shared distance matrix.
class MetricView {
 public:
  // Checks symmetry, nonnegativity, zero diagonal, and the triangle
  // inequality (within 1e-9) once, on the full matrix.
  static MetricView create(const Matrix& d, int n);

  MetricView restrict_to(std::vector<int> active) const;

  int total_points() const { return n_; }
  int active_count() const { return static_cast<int>(active_.size()); }
  const std::vector<int>& active() const { return active_; }
  double dist(int u, int v) const { return mat_at(*d_, n_, u, v); }  // global indices

  // |Ball(u, radius)| among active points; u is a global index.
  int ball_size(int u, double radius) const;
  std::vector<int> ball_members(int u, double radius) const;

 private:
  MetricView(const Matrix* d, int n, std::vector<int> active)
      : d_(d), n_(n), active_(std::move(active)) {}
  const Matrix* d_ = nullptr;
  int n_ = 0;
  std::vector<int> active_;
};

// arg max over active points of |Ball(u, R0)|, smallest index on ties.
int select_pivot(const MetricView& view, double R0);

bool is_heavy(const MetricView& view, int z, const PartitionParams& params);

// Radii s in (3R0, R1] whose ball around z passes the worst-case shell
// inequality with constant 25 for every active point.
IntervalSet compute_S(const MetricView& view, int z, const PartitionParams& params);

// Inverse-CDF draw of the pre-image x in [0, R/2) followed by the pushdown
// inverse. Strict mode requires mu(S) >= R/2; practical mode clamps x.
double sample_radius(const IntervalSet& S, const PartitionParams& params, Xoshiro256ss& rng);

struct ClusterPick {
  std::vector<int> members;  // global indices, ascending
  int pivot = -1;
  bool heavy = false;
  double t = 0.0;     // selected radius (R1 in the heavy case)
  double mu_S = 0.0;  // 0 for heavy picks
};

ClusterPick cluster_select(const MetricView& view, const PartitionParams& params,
                           Xoshiro256ss& rng);

// Iterates cluster_select until all points are clustered; labels follow
// cluster selection order.
Clustering partition_metric(const MetricView& view, const PartitionParams& params,
                            Xoshiro256ss& rng, std::vector<ClusterPick>* trace = nullptr);

struct DisagreementReport;  // analysis.hpp

struct ClusterRunResult {
  Clustering clustering;
  FractionalSolution solution;
  PartitionParams params;
  std::vector<double> dis;  // per-vertex disagreement weight
  double dis_norm = 0.0;    // at the requested p
  bool alpha_clamped = false;
  double alpha_effective = 0.0;
};

// End-to-end driver: solve (P) (or take x as given), repair to an exact
// metric, derive params from inst.alpha (q = 2, R = 1/3), partition.
ClusterRunResult cluster_instance(const Instance& inst, NormOrder p,
                                  const SolverOptions& opts, Mode mode,
                                  std::uint64_t seed,
                                  const Matrix* x_in = nullptr,
                                  std::vector<ClusterPick>* trace = nullptr);

}  // namespace ccl
