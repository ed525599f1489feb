#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "corrclust/partition.hpp"
#include "corrclust/types.hpp"

namespace ccl {

struct DisagreementReport {
  std::vector<double> dis;             // per-vertex disagreement weight
  std::map<std::string, double> norms; // "1", "2", "inf", plus the requested p
};

DisagreementReport disagreements(const Instance& inst, const Clustering& c,
                                 NormOrder requested = NormOrder::inf());

// Exhaustive set-partition enumeration via restricted growth strings.
// Ties resolve to the lexicographically smallest growth string.
std::pair<double, Clustering> brute_force_opt(const Instance& inst, NormOrder p,
                                              int max_n = 12);

struct LocalGuaranteeReport {
  double A1 = 0, A_inf = 0, r = 0;
  // Deterministic sub-bounds (analytic consequences of diam <= 2R, R = 1/3):
  int negative_bound_violations = 0;   // neg disagreement weight <= 3 y_u
  int long_edge_bound_violations = 0;  // weight of E^{>=r} edges at u <= y_u / r
  int long_edge_count_violations = 0;  // |E^{>=r} nbrs at u| <= y_u / (alpha r)
  double max_ratio_over_Ainf = 0;      // max_u dis_u / (A_inf y_u), report only
  double mean_ratio_over_A1 = 0;       // mean_u dis_u / (A_1 y_u), report only
  std::vector<double> per_vertex_ratio;
};

LocalGuaranteeReport verify_local_guarantee(const Instance& inst, const Matrix& x,
                                            const Clustering& c,
                                            const PartitionParams& params);

struct DecompositionCheck {
  int trials = 0;
  bool diameter_ok = true;
  long prop3_violations = 0;
  long lemma8_violations = 0;
  double mu_S_min = 0;           // over light-ball invocations; inf if none
  double prop2_ratio = 0;        // max_u empirical LHS/RHS with Hoeffding slack
  bool prop2_flagged = false;    // LHS > eps against a zero RHS
  double epsilon = 0;            // Hoeffding slack at 99% confidence
  double yp_mean = 0, yp_max = 0;
  long light_trials = 0, heavy_trials = 0;
};

// Repeats cluster_select; asserts the always-true properties (diameter,
// shell bound with constant 25, Lemma-8 style |P| <= 2 D_beta Y_P) per trial
// and estimates the expectation-level separation bound.
DecompositionCheck verify_cluster(const MetricView& view, const PartitionParams& params,
                                  int trials, std::uint64_t seed);

// Same for full partitions from partition_metric.
DecompositionCheck verify_decomposition(const MetricView& view, const PartitionParams& params,
                                        int trials, std::uint64_t seed);

struct FClaimsReport {
  double tail_identity_lhs = 0;   // 1 - F(R/2 - 2R0)
  double tail_identity_rhs = 0;   // (e^2 - 1) beta^{q+1} / (1 - beta^{q+1})
  double identity_residual = 0;
  long grid_violations = 0;       // growth-bound violations beyond 1e-12
  double max_grid_excess = 0;
};

FClaimsReport check_F_claims(const PartitionParams& params, int grid_points = 2001);

struct PiCheckReport {
  long lipschitz_violations = 0;
  long monotonicity_violations = 0;
  long inverse_violations = 0;      // |pi(pi_inv(y)) - y| > 1e-12
  long membership_violations = 0;   // pi_inv(y) outside S off image endpoints
  double max_inverse_residual = 0;
};

PiCheckReport check_pi_properties(const IntervalSet& S, int samples, std::uint64_t seed,
                                  double domain_hi);

struct PhiCheck {
  bool applicable = true;  // false when gamma >= 1/r' (bound regime not met)
  double gamma = 0, eta = 0, r_prime = 0, R_prime = 0;
  double mu_S_prime = 0;
  double phi_at_R_prime = 0;
  double bound_rhs = 0;  // e^{eta mu(S') - 1}
  bool bound_ok = false;
  std::vector<std::pair<double, double>> phi_samples;  // (t, Phi(t)) at breakpoints
};

// Ball-growth lower bound at a light-ball pivot:
// Phi(t) = |Ball(z, t + 3R0)| / |Ball(z, 3R0)|, checked against e^{eta mu(S')-1}.
PhiCheck check_phi_bound(const MetricView& view, int z, const PartitionParams& params);

struct GapRow {
  double alpha = 0;
  std::string p;
  int n = 0;
  double fractional_cost = 0;
  double integral_lb = 1.0;
  std::optional<double> bruteforce_opt;
  double ratio = 0;  // integral_lb / fractional_cost
};

struct GapReport {
  std::vector<GapRow> rows;
  std::map<std::string, double> slope;  // per p: log-log slope of ratio vs 1/alpha
  std::string to_csv() const;
};

GapReport gap_report(const std::vector<double>& alphas, const std::vector<NormOrder>& ps,
                     int brute_force_max_n = 12);

}  // namespace ccl
