#include "corrclust.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "corrclust/analysis.hpp"
#include "corrclust/instance.hpp"
#include "corrclust/json_io.hpp"
#include "corrclust/partition.hpp"
#include "corrclust/relaxation.hpp"

using nlohmann::json;

struct ccl_instance {
  ccl::Instance v;
};
struct ccl_solution {
  ccl::FractionalSolution v;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int wrap(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CCL_OK;
  } catch (const ccl::io_error& e) {
    g_last_error = e.what();
    return CCL_EIO;
  } catch (const ccl::guarantee_violation& e) {
    g_last_error = e.what();
    return CCL_EVERIFY;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return CCL_ERANGE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CCL_EINVAL;
  }
}

ccl::SolverOptions parse_opts(const char* opts_json) {
  ccl::SolverOptions opts;
  if (!opts_json || !*opts_json) return opts;
  json j;
  try {
    j = json::parse(opts_json);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("solver options: ") + e.what());
  }
  opts.max_iters = j.value("max_iters", opts.max_iters);
  opts.step0 = j.value("step0", opts.step0);
  opts.tol_residual = j.value("tol_residual", opts.tol_residual);
  opts.tol_obj = j.value("tol_obj", opts.tol_obj);
  opts.projection_rounds = j.value("projection_rounds", opts.projection_rounds);
  opts.refine_epochs = j.value("refine_epochs", opts.refine_epochs);
  opts.refine_iters = j.value("refine_iters", opts.refine_iters);
  opts.refine_max_n = j.value("refine_max_n", opts.refine_max_n);
  return opts;
}

json parse_params(const char* params_json) {
  if (!params_json || !*params_json) return json::object();
  try {
    return json::parse(params_json);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("params: ") + e.what());
  }
}

// Seeded point cloud in the unit square under the Euclidean metric: a cheap
// source of varied finite metric spaces for the samplers.
ccl::Matrix random_metric(int n, std::uint64_t seed) {
  ccl::Xoshiro256ss rng(seed);
  std::vector<double> px(n), py(n);
  for (int i = 0; i < n; ++i) {
    px[i] = rng.uniform();
    py[i] = rng.uniform();
  }
  ccl::Matrix d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = px[i] - px[j], dy = py[i] - py[j];
      const double e = std::sqrt(dx * dx + dy * dy);
      ccl::mat_at(d, n, i, j) = e;
      ccl::mat_at(d, n, j, i) = e;
    }
  }
  return d;
}

// Evenly spaced points on a segment of length `span`.
ccl::Matrix lattice_metric(int n, double span) {
  ccl::Matrix d(static_cast<std::size_t>(n) * n, 0.0);
  const double step = n > 1 ? span / (n - 1) : 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ccl::mat_at(d, n, i, j) = std::abs(i - j) * step;
    }
  }
  return d;
}

json params_to_json(const ccl::PartitionParams& p) {
  json j;
  j["r"] = p.r;
  j["R"] = p.R;
  j["q"] = p.q;
  j["beta"] = p.beta;
  j["D_beta"] = p.D_beta;
  j["R0"] = p.R0;
  j["R1"] = p.R1;
  j["rho"] = p.rho;
  j["mode"] = ccl::mode_str(p.mode);
  return j;
}

json decomposition_to_json_obj(const ccl::DecompositionCheck& c) {
  return json::parse(ccl::decomposition_check_to_json(c));
}

int verify_sampling(const json& p, bool full_partition, char** report_json) {
  const int n = p.value("n", 100);
  const double q = p.value("q", 2.0);
  const double R = p.value("R", 1.0 / 3.0);
  const double beta = p.value("beta", 0.05);
  const ccl::Mode mode = ccl::parse_mode(p.value("mode", std::string("practical")));
  const int trials = p.value("trials", 10000);
  const std::uint64_t seed = p.value("seed", std::uint64_t{0});
  const std::uint64_t metric_seed = p.value("metric_seed", std::uint64_t{12345});
  const int metrics = p.value("metrics", 1);
  const double ratio_bound = p.value("ratio_bound", 100.0);

  const ccl::PartitionParams params = ccl::PartitionParams::from_radii(beta * R, R, q, mode);
  json reports = json::array();
  bool failed = false;
  for (int m = 0; m < metrics; ++m) {
    const ccl::Matrix d = random_metric(n, metric_seed + m);
    const ccl::MetricView view = ccl::MetricView::create(d, n);
    const ccl::DecompositionCheck check =
        full_partition ? ccl::verify_decomposition(view, params, trials, seed)
                       : ccl::verify_cluster(view, params, trials, seed);
    if (!check.diameter_ok || check.prop3_violations > 0 || check.lemma8_violations > 0 ||
        check.prop2_flagged || !(check.prop2_ratio <= ratio_bound)) {
      failed = true;
    }
    if (mode == ccl::Mode::strict && check.light_trials > 0 && check.mu_S_min < R / 2.0) {
      failed = true;
    }
    reports.push_back(decomposition_to_json_obj(check));
  }
  json out;
  out["kind"] = full_partition ? "decomposition" : "cluster";
  out["params"] = params_to_json(params);
  out["ratio_bound"] = ratio_bound;
  out["reports"] = std::move(reports);
  out["passed"] = !failed;
  if (report_json) *report_json = dup_string(out.dump(2) + "\n");
  if (failed) throw ccl::guarantee_violation("sampling verifier found a property violation");
  return CCL_OK;
}

int verify_claims(const json& p, char** report_json) {
  const double q = p.value("q", 2.0);
  const double R = p.value("R", 1.0 / 3.0);
  const int grid_points = p.value("grid_points", 2001);
  std::vector<double> betas;
  if (p.contains("betas")) betas = p.at("betas").get<std::vector<double>>();
  else betas.push_back(p.value("beta", 0.1));

  json reports = json::array();
  bool failed = false;
  for (double beta : betas) {
    const ccl::PartitionParams params =
        ccl::PartitionParams::from_radii(beta * R, R, q, ccl::Mode::practical);
    const ccl::FClaimsReport rep = ccl::check_F_claims(params, grid_points);
    if (rep.identity_residual > 1e-12 || rep.grid_violations > 0) failed = true;
    json jr = json::parse(ccl::f_claims_to_json(rep));
    jr["beta"] = beta;
    reports.push_back(std::move(jr));
  }
  json out;
  out["kind"] = "claims";
  out["reports"] = std::move(reports);
  out["passed"] = !failed;
  if (report_json) *report_json = dup_string(out.dump(2) + "\n");
  if (failed) throw ccl::guarantee_violation("truncated-CDF claim check failed");
  return CCL_OK;
}

int verify_pi(const json& p, char** report_json) {
  const int samples = p.value("samples", 100000);
  const std::uint64_t seed = p.value("seed", std::uint64_t{0});
  const int max_intervals = p.value("intervals", 20);
  const double R = p.value("R", 1.0 / 3.0);

  json reports = json::array();
  bool failed = false;
  ccl::Xoshiro256ss rng(seed);
  for (int k = 1; k <= max_intervals; ++k) {
    // 2k sorted uniform breakpoints in [0, R] form k disjoint intervals
    std::vector<double> cuts(2 * k);
    for (double& c : cuts) c = rng.uniform() * R;
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> iv;
    for (int i = 0; i < k; ++i) {
      if (cuts[2 * i] < cuts[2 * i + 1]) iv.emplace_back(cuts[2 * i], cuts[2 * i + 1]);
    }
    const ccl::IntervalSet S(std::move(iv));
    const int per_set = std::max(1000, samples / max_intervals);
    const ccl::PiCheckReport rep =
        ccl::check_pi_properties(S, per_set, seed + static_cast<std::uint64_t>(k), R);
    if (rep.lipschitz_violations || rep.monotonicity_violations || rep.inverse_violations ||
        rep.membership_violations) {
      failed = true;
    }
    json jr = json::parse(ccl::pi_check_to_json(rep));
    jr["intervals"] = k;
    jr["samples"] = per_set;
    reports.push_back(std::move(jr));
  }
  json out;
  out["kind"] = "pi";
  out["reports"] = std::move(reports);
  out["passed"] = !failed;
  if (report_json) *report_json = dup_string(out.dump(2) + "\n");
  if (failed) throw ccl::guarantee_violation("pushdown map property check failed");
  return CCL_OK;
}

int verify_phi(const json& p, char** report_json) {
  const int n = p.value("n", 100);
  const double q = p.value("q", 2.0);
  const double R = p.value("R", 1.0 / 3.0);
  const double beta = p.value("beta", ccl::beta_star(2.0) / 2.0);
  const std::uint64_t metric_seed = p.value("metric_seed", std::uint64_t{12345});
  const bool lattice = p.value("lattice", true);

  const ccl::PartitionParams params =
      ccl::PartitionParams::from_radii(beta * R, R, q, ccl::Mode::practical);
  const ccl::Matrix d = lattice ? lattice_metric(n, 2.0 * R) : random_metric(n, metric_seed);
  const ccl::MetricView view = ccl::MetricView::create(d, n);
  const int z = ccl::select_pivot(view, params.R0);
  const ccl::PhiCheck rep = ccl::check_phi_bound(view, z, params);

  json out = json::parse(ccl::phi_check_to_json(rep));
  out["kind"] = "phi";
  out["pivot"] = z;
  out["params"] = params_to_json(params);
  out["passed"] = !rep.applicable || rep.bound_ok;
  if (report_json) *report_json = dup_string(out.dump(2) + "\n");
  if (rep.applicable && !rep.bound_ok) {
    throw ccl::guarantee_violation("ball-growth lower bound failed");
  }
  return CCL_OK;
}

int verify_local(const json& p, char** report_json) {
  const double alpha = p.value("alpha", 0.25);
  const int n = p.value("n", 16);
  const int k = p.value("k", 3);
  const double flip = p.value("flip", 0.2);
  const ccl::NormOrder norm = ccl::NormOrder::parse(p.value("p", std::string("inf")));
  const std::uint64_t seed = p.value("seed", std::uint64_t{0});
  const ccl::Mode mode = ccl::parse_mode(p.value("mode", std::string("practical")));

  const auto [inst, planted] = ccl::gen_random(n, alpha, k, flip, seed);
  (void)planted;
  const ccl::ClusterRunResult run =
      ccl::cluster_instance(inst, norm, ccl::SolverOptions{}, mode, seed);
  const ccl::LocalGuaranteeReport rep =
      ccl::verify_local_guarantee(inst, run.solution.x, run.clustering, run.params);
  const bool failed = rep.negative_bound_violations > 0 || rep.long_edge_bound_violations > 0 ||
                      rep.long_edge_count_violations > 0;

  json out = json::parse(ccl::local_guarantee_to_json(rep));
  out["kind"] = "local";
  out["params"] = params_to_json(run.params);
  out["dis_norm"] = run.dis_norm;
  out["cp_objective"] = run.solution.objective;
  out["passed"] = !failed;
  if (report_json) *report_json = dup_string(out.dump(2) + "\n");
  if (failed) throw ccl::guarantee_violation("deterministic local bound check failed");
  return CCL_OK;
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

extern "C" {

const char* ccl_last_error(void) { return g_last_error.c_str(); }

const char* ccl_version(void) { return "1.0.0"; }

int ccl_instance_gen_gap(double alpha, ccl_instance** out) {
  return wrap([&] {
    if (!out) throw std::invalid_argument("out is NULL");
    *out = new ccl_instance{ccl::gen_gap(alpha)};
  });
}

int ccl_instance_gen_random(int n, double alpha, int planted_k, double flip_prob,
                            uint64_t seed, ccl_instance** out, char** planted_labels_json) {
  return wrap([&] {
    if (!out) throw std::invalid_argument("out is NULL");
    auto [inst, planted] = ccl::gen_random(n, alpha, planted_k, flip_prob, seed);
    *out = new ccl_instance{std::move(inst)};
    if (planted_labels_json) {
      *planted_labels_json = dup_string(ccl::clustering_to_json(planted));
    }
  });
}

int ccl_instance_load(const char* path, ccl_instance** out) {
  return wrap([&] {
    if (!path || !out) throw std::invalid_argument("NULL argument");
    *out = new ccl_instance{ccl::load_instance(path)};
  });
}

int ccl_instance_save(const ccl_instance* inst, const char* path) {
  return wrap([&] {
    if (!inst || !path) throw std::invalid_argument("NULL argument");
    ccl::save_instance(inst->v, path);
  });
}

int ccl_instance_to_json(const ccl_instance* inst, char** json_out) {
  return wrap([&] {
    if (!inst || !json_out) throw std::invalid_argument("NULL argument");
    *json_out = dup_string(ccl::instance_to_json(inst->v));
  });
}

int ccl_instance_from_json(const char* text, ccl_instance** out) {
  return wrap([&] {
    if (!text || !out) throw std::invalid_argument("NULL argument");
    *out = new ccl_instance{ccl::instance_from_json(text)};
  });
}

int ccl_instance_validate(const ccl_instance* inst, char** violations_json) {
  return wrap([&] {
    if (!inst) throw std::invalid_argument("NULL instance");
    const auto violations = ccl::validate(inst->v);
    if (violations_json) *violations_json = dup_string(json(violations).dump() + "\n");
    if (!violations.empty()) {
      throw ccl::guarantee_violation("instance violates the weight regime: " + violations.front());
    }
  });
}

int ccl_instance_n(const ccl_instance* inst) { return inst ? inst->v.n : 0; }

double ccl_instance_alpha(const ccl_instance* inst) { return inst ? inst->v.alpha : 0.0; }

void ccl_instance_free(ccl_instance* inst) { delete inst; }

int ccl_solve(const ccl_instance* inst, const char* p, const char* opts_json,
              ccl_solution** out) {
  return wrap([&] {
    if (!inst || !p || !out) throw std::invalid_argument("NULL argument");
    *out = new ccl_solution{
        ccl::solve_cp(inst->v, ccl::NormOrder::parse(p), parse_opts(opts_json))};
  });
}

int ccl_gap_fractional(const ccl_instance* inst, const char* p, ccl_solution** out) {
  return wrap([&] {
    if (!inst || !p || !out) throw std::invalid_argument("NULL argument");
    *out = new ccl_solution{ccl::gap_fractional(inst->v, ccl::NormOrder::parse(p))};
  });
}

int ccl_solution_to_json(const ccl_solution* sol, char** json_out) {
  return wrap([&] {
    if (!sol || !json_out) throw std::invalid_argument("NULL argument");
    *json_out = dup_string(ccl::solution_to_json(sol->v));
  });
}

int ccl_solution_from_json(const char* text, ccl_solution** out) {
  return wrap([&] {
    if (!text || !out) throw std::invalid_argument("NULL argument");
    *out = new ccl_solution{ccl::solution_from_json(text)};
  });
}

double ccl_solution_objective(const ccl_solution* sol) { return sol ? sol->v.objective : 0.0; }

void ccl_solution_free(ccl_solution* sol) { delete sol; }

int ccl_cluster(const ccl_instance* inst, const char* p, const char* mode,
                uint64_t seed, const char* opts_json, const char* x_json,
                const char* trace_path, char** result_json) {
  return wrap([&] {
    if (!inst || !p || !mode) throw std::invalid_argument("NULL argument");
    const ccl::NormOrder norm = ccl::NormOrder::parse(p);
    const ccl::Mode m = ccl::parse_mode(mode);
    const ccl::SolverOptions opts = parse_opts(opts_json);

    ccl::Matrix x_given;
    const ccl::Matrix* x_ptr = nullptr;
    if (x_json && *x_json) {
      const ccl::FractionalSolution given = ccl::solution_from_json(x_json);
      if (given.n != inst->v.n) throw std::invalid_argument("x has wrong dimension");
      x_given = given.x;
      x_ptr = &x_given;
    }

    std::vector<ccl::ClusterPick> trace;
    const ccl::ClusterRunResult run = ccl::cluster_instance(
        inst->v, norm, opts, m, seed, x_ptr, trace_path ? &trace : nullptr);

    if (trace_path) {
      std::string lines;
      for (const auto& pick : trace) lines += ccl::cluster_pick_to_json(pick) + "\n";
      ccl::write_file_atomic(trace_path, lines);
    }

    const ccl::LocalGuaranteeReport local =
        ccl::verify_local_guarantee(inst->v, run.solution.x, run.clustering, run.params);

    json out;
    out["labels"] = run.clustering.labels;
    out["solution"] = json::parse(ccl::solution_to_json(run.solution));
    const ccl::DisagreementReport dr = ccl::disagreements(inst->v, run.clustering, norm);
    out["dis"] = dr.dis;
    out["norms"] = dr.norms;
    json jp = params_to_json(run.params);
    jp["alpha_clamped"] = run.alpha_clamped;
    jp["alpha_effective"] = run.alpha_effective;
    out["params"] = std::move(jp);
    out["local_checks"] = json::parse(ccl::local_guarantee_to_json(local));
    out["seed"] = seed;
    out["p"] = norm.str();
    out["mode"] = ccl::mode_str(m);
    if (result_json) *result_json = dup_string(out.dump(2) + "\n");

    if (local.negative_bound_violations > 0 || local.long_edge_bound_violations > 0 ||
        local.long_edge_count_violations > 0) {
      throw ccl::guarantee_violation("deterministic local bound check failed after clustering");
    }
  });
}

int ccl_verify(const char* kind, const char* params_json, char** report_json) {
  return wrap([&] {
    if (!kind) throw std::invalid_argument("kind is NULL");
    const json p = parse_params(params_json);
    const std::string k = kind;
    if (k == "cluster") verify_sampling(p, false, report_json);
    else if (k == "decomposition") verify_sampling(p, true, report_json);
    else if (k == "claims") verify_claims(p, report_json);
    else if (k == "pi") verify_pi(p, report_json);
    else if (k == "phi") verify_phi(p, report_json);
    else if (k == "local") verify_local(p, report_json);
    else throw std::invalid_argument("unknown verify kind '" + k + "'");
  });
}

int ccl_gap_report(const char* alphas, const char* ps, char** csv_out, char** json_out) {
  return wrap([&] {
    if (!alphas || !ps) throw std::invalid_argument("NULL argument");
    std::vector<double> alpha_list;
    for (const std::string& a : split_csv(alphas)) {
      std::size_t pos = 0;
      const double v = std::stod(a, &pos);
      if (pos != a.size()) throw std::invalid_argument("bad alpha '" + a + "'");
      alpha_list.push_back(v);
    }
    std::vector<ccl::NormOrder> p_list;
    for (const std::string& s : split_csv(ps)) p_list.push_back(ccl::NormOrder::parse(s));
    if (alpha_list.empty() || p_list.empty()) {
      throw std::invalid_argument("alphas and ps must be non-empty");
    }
    const ccl::GapReport rep = ccl::gap_report(alpha_list, p_list);
    if (csv_out) *csv_out = dup_string(rep.to_csv());
    if (json_out) *json_out = dup_string(ccl::gap_report_to_json(rep));
  });
}

int ccl_bench(const char* params_json, char** report_json) {
  return wrap([&] {
    const json p = parse_params(params_json);
    const int n = p.value("n", 32);
    const double alpha = p.value("alpha", 0.25);
    const std::uint64_t seed = p.value("seed", std::uint64_t{0});
    const ccl::NormOrder norm = ccl::NormOrder::parse(p.value("p", std::string("inf")));
    const int trials = p.value("trials", 10);

    using clock = std::chrono::steady_clock;
    const auto ms = [](clock::time_point a, clock::time_point b) {
      return std::chrono::duration<double, std::milli>(b - a).count();
    };

    const auto t0 = clock::now();
    const auto [inst, planted] = ccl::gen_random(n, alpha, 4, 0.2, seed);
    (void)planted;
    const auto t1 = clock::now();
    const ccl::FractionalSolution sol = ccl::solve_cp(inst, norm, ccl::SolverOptions{});
    const auto t2 = clock::now();
    const ccl::MetricView view = ccl::MetricView::create(sol.x, n);
    const ccl::PartitionParams params =
        ccl::derive_params(inst.alpha, 2.0, 1.0 / 3.0, ccl::Mode::practical, true);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
      ccl::Xoshiro256ss rng(seed + static_cast<std::uint64_t>(t));
      const ccl::Clustering c = ccl::partition_metric(view, params, rng);
      best = ccl::disagreements(inst, c, norm).norms.at(norm.str());
    }
    const auto t3 = clock::now();
    const ccl::DecompositionCheck check = ccl::verify_cluster(view, params, trials, seed);
    const auto t4 = clock::now();

    json out;
    out["n"] = n;
    out["alpha"] = alpha;
    out["p"] = norm.str();
    out["seed"] = seed;
    out["trials"] = trials;
    out["cp_objective"] = sol.objective;
    out["last_dis_norm"] = best;
    out["verify_diameter_ok"] = check.diameter_ok;
    out["ms_gen"] = ms(t0, t1);
    out["ms_solve"] = ms(t1, t2);
    out["ms_partition"] = ms(t2, t3);
    out["ms_verify"] = ms(t3, t4);
    if (report_json) *report_json = dup_string(out.dump(2) + "\n");
  });
}

void ccl_string_free(char* s) { std::free(s); }

} /* extern "C" */
