// Command-line front end. Talks to the library exclusively through the
// C API in corrclust.h.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrclust.h"

namespace {

// exit codes: 0 ok, 1 property violation, 2 usage, 3 I/O
int status_to_exit(int rc) {
  switch (rc) {
    case CCL_OK: return 0;
    case CCL_EVERIFY: return 1;
    case CCL_EIO: return 3;
    default: return 2;
  }
}

int fail(int rc) {
  std::cerr << "error: " << ccl_last_error() << "\n";
  return status_to_exit(rc);
}

// write-to-temp + rename so failures never leave partial output files
int write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot open '" << tmp << "' for writing\n";
      return 3;
    }
    out << content;
    if (!out.good()) {
      std::remove(tmp.c_str());
      std::cerr << "error: write failed for '" << tmp << "'\n";
      return 3;
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    std::cerr << "error: cannot rename '" << tmp << "' to '" << path << "'\n";
    return 3;
  }
  return 0;
}

int emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return 0;
  }
  return write_file(path, text);
}

std::string take(char* s) {
  std::string out = s ? s : "";
  ccl_string_free(s);
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lp-norm correlation clustering toolkit"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  gen->require_subcommand(1);
  double gen_alpha = 0.25;
  std::string gen_out;
  auto* gen_gap = gen->add_subcommand("gap", "integrality-gap family instance");
  gen_gap->add_option("--alpha", gen_alpha, "asymmetry parameter in (0, 1/4]")->required();
  gen_gap->add_option("--output", gen_out, "instance JSON path")->required();

  int rnd_n = 16, rnd_k = 2;
  double rnd_alpha = 0.25, rnd_flip = 0.0;
  std::uint64_t rnd_seed = 0;
  std::string rnd_out, rnd_labels_out;
  auto* gen_rnd = gen->add_subcommand("random", "planted clustering with sign flips");
  gen_rnd->add_option("--n", rnd_n, "number of vertices")->required();
  gen_rnd->add_option("--alpha", rnd_alpha, "asymmetry parameter in (0, 1]")->required();
  gen_rnd->add_option("--k", rnd_k, "number of planted clusters");
  gen_rnd->add_option("--flip", rnd_flip, "sign flip probability in [0, 1/2)");
  gen_rnd->add_option("--seed", rnd_seed, "generator seed (default 0)");
  gen_rnd->add_option("--output", rnd_out, "instance JSON path")->required();
  gen_rnd->add_option("--labels-output", rnd_labels_out, "planted clustering JSON path");

  // ---- solve --------------------------------------------------------------
  auto* solve = app.add_subcommand("solve", "solve the convex relaxation");
  std::string sol_in, sol_p = "inf", sol_out;
  int sol_iters = 4000, sol_rounds = 2, sol_refine = 250;
  double sol_step0 = 0.0, sol_tol_res = 1e-6, sol_tol_obj = 1e-8;
  solve->add_option("--input", sol_in, "instance JSON path")->required();
  solve->add_option("--p", sol_p, "norm order: real >= 1 or 'inf'");
  solve->add_option("--output", sol_out, "solution JSON path")->required();
  solve->add_option("--max-iters", sol_iters, "subgradient iterations");
  solve->add_option("--step0", sol_step0, "initial step size (0 = auto)");
  solve->add_option("--tol-residual", sol_tol_res, "triangle residual tolerance");
  solve->add_option("--tol-obj", sol_tol_obj, "relative objective stall tolerance");
  solve->add_option("--projection-rounds", sol_rounds, "triangle projection cycles per iteration");
  solve->add_option("--refine-epochs", sol_refine, "refinement epochs for small instances (0 = off)");

  // ---- cluster ------------------------------------------------------------
  auto* cluster = app.add_subcommand("cluster", "end-to-end clustering run");
  std::string cl_in, cl_p = "inf", cl_mode = "practical", cl_x, cl_trace, cl_out;
  std::uint64_t cl_seed = 0;
  int cl_iters = 4000, cl_rounds = 2, cl_refine = 250;
  double cl_step0 = 0.0, cl_tol_res = 1e-6, cl_tol_obj = 1e-8;
  cluster->add_option("--input", cl_in, "instance JSON path")->required();
  cluster->add_option("--p", cl_p, "norm order: real >= 1 or 'inf'");
  cluster->add_option("--mode", cl_mode, "strict | practical");
  cluster->add_option("--seed", cl_seed, "partitioning seed (default 0)");
  cluster->add_option("--x", cl_x, "precomputed solution JSON (skips the solver)");
  cluster->add_option("--trace", cl_trace, "per-cluster pick trace (JSONL) path");
  cluster->add_option("--output", cl_out, "result JSON path");
  cluster->add_option("--max-iters", cl_iters, "subgradient iterations");
  cluster->add_option("--step0", cl_step0, "initial step size (0 = auto)");
  cluster->add_option("--tol-residual", cl_tol_res, "triangle residual tolerance");
  cluster->add_option("--tol-obj", cl_tol_obj, "relative objective stall tolerance");
  cluster->add_option("--projection-rounds", cl_rounds, "triangle projection cycles per iteration");
  cluster->add_option("--refine-epochs", cl_refine, "refinement epochs for small instances (0 = off)");

  // ---- verify -------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run a property verifier");
  verify->require_subcommand(1);
  struct VerifyOpts {
    int n = 100, trials = 10000, metrics = 1, grid_points = 2001, samples = 100000,
        intervals = 20, k = 3;
    double beta = 0.05, q = 2.0, R = 1.0 / 3.0, ratio_bound = 100.0, alpha = 0.25, flip = 0.2;
    std::uint64_t seed = 0, metric_seed = 12345;
    std::string mode = "practical", p = "inf", betas, out;
    bool lattice = true;
  } vo;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", vo.seed, "trial seed base (default 0)");
    sub->add_option("--output", vo.out, "report JSON path (default: stdout)");
  };
  auto* v_cluster = verify->add_subcommand("cluster", "single-cluster sampling properties");
  auto* v_decomp = verify->add_subcommand("decomposition", "full-partition sampling properties");
  for (CLI::App* sub : {v_cluster, v_decomp}) {
    add_common(sub);
    sub->add_option("--n", vo.n, "metric size");
    sub->add_option("--beta", vo.beta, "r/R ratio");
    sub->add_option("--q", vo.q, "norm-conjugate parameter q >= 1");
    sub->add_option("--R", vo.R, "outer radius");
    sub->add_option("--mode", vo.mode, "strict | practical");
    sub->add_option("--trials", vo.trials, "sampled clusters/partitions");
    sub->add_option("--metric-seed", vo.metric_seed, "random metric seed");
    sub->add_option("--metrics", vo.metrics, "number of random metrics");
    sub->add_option("--ratio-bound", vo.ratio_bound, "regression pin for the separation ratio");
  }
  auto* v_claims = verify->add_subcommand("claims", "truncated-CDF identities and growth bound");
  add_common(v_claims);
  v_claims->add_option("--beta", vo.beta, "single beta");
  v_claims->add_option("--betas", vo.betas, "comma-separated betas (overrides --beta)");
  v_claims->add_option("--q", vo.q, "norm-conjugate parameter q >= 1");
  v_claims->add_option("--R", vo.R, "outer radius");
  v_claims->add_option("--grid-points", vo.grid_points, "grid resolution on [0, R/2]");
  auto* v_pi = verify->add_subcommand("pi", "pushdown map properties");
  add_common(v_pi);
  v_pi->add_option("--samples", vo.samples, "total random draws");
  v_pi->add_option("--intervals", vo.intervals, "max interval count of random sets");
  v_pi->add_option("--R", vo.R, "interval domain end");
  auto* v_phi = verify->add_subcommand("phi", "ball-growth lower bound");
  double phi_beta = -1.0;  // < 0: let the library default to beta_star(2)/2
  add_common(v_phi);
  v_phi->add_option("--n", vo.n, "metric size");
  v_phi->add_option("--beta", phi_beta, "r/R ratio (default: beta_star(2)/2)");
  v_phi->add_option("--q", vo.q, "norm-conjugate parameter q >= 1");
  v_phi->add_option("--R", vo.R, "outer radius");
  v_phi->add_option("--metric-seed", vo.metric_seed, "random metric seed");
  v_phi->add_flag("--lattice,!--no-lattice", vo.lattice, "use a 1D lattice metric");
  auto* v_local = verify->add_subcommand("local", "deterministic per-vertex bounds");
  add_common(v_local);
  v_local->add_option("--alpha", vo.alpha, "asymmetry parameter");
  v_local->add_option("--n", vo.n, "instance size");
  v_local->add_option("--k", vo.k, "planted clusters");
  v_local->add_option("--flip", vo.flip, "sign flip probability");
  v_local->add_option("--p", vo.p, "norm order");
  v_local->add_option("--mode", vo.mode, "strict | practical");

  // ---- gap ----------------------------------------------------------------
  auto* gap = app.add_subcommand("gap", "integrality-gap table");
  std::string gap_alphas, gap_ps = "1,2,inf", gap_csv, gap_json;
  gap->add_option("--alphas", gap_alphas, "comma-separated alphas, each <= 1/4")->required();
  gap->add_option("--ps", gap_ps, "comma-separated norm orders");
  gap->add_option("--output", gap_csv, "CSV output path (default: stdout)");
  gap->add_option("--json-output", gap_json, "JSON output path");

  // ---- bench --------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "wall-clock per phase");
  int b_n = 32, b_trials = 10;
  double b_alpha = 0.25;
  std::uint64_t b_seed = 0;
  std::string b_p = "inf", b_out;
  bench->add_option("--n", b_n, "instance size");
  bench->add_option("--alpha", b_alpha, "asymmetry parameter");
  bench->add_option("--seed", b_seed, "seed (default 0)");
  bench->add_option("--p", b_p, "norm order");
  bench->add_option("--trials", b_trials, "partition repetitions");
  bench->add_option("--output", b_out, "report JSON path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (gen_gap->parsed()) {
    ccl_instance* inst = nullptr;
    const int rc = ccl_instance_gen_gap(gen_alpha, &inst);
    if (rc != CCL_OK) return fail(rc);
    std::cout << "# gen gap alpha=" << gen_alpha << " n=" << ccl_instance_n(inst) << "\n";
    const int rc2 = ccl_instance_save(inst, gen_out.c_str());
    ccl_instance_free(inst);
    return rc2 == CCL_OK ? 0 : fail(rc2);
  }

  if (gen_rnd->parsed()) {
    ccl_instance* inst = nullptr;
    char* labels = nullptr;
    const int rc = ccl_instance_gen_random(rnd_n, rnd_alpha, rnd_k, rnd_flip, rnd_seed, &inst,
                                           rnd_labels_out.empty() ? nullptr : &labels);
    if (rc != CCL_OK) return fail(rc);
    std::cout << "# gen random n=" << rnd_n << " alpha=" << rnd_alpha << " k=" << rnd_k
              << " flip=" << rnd_flip << " seed=" << rnd_seed << "\n";
    int rc2 = ccl_instance_save(inst, rnd_out.c_str());
    ccl_instance_free(inst);
    if (rc2 == CCL_OK && !rnd_labels_out.empty()) {
      const int w = write_file(rnd_labels_out, take(labels));
      if (w != 0) return w;
      labels = nullptr;
    }
    if (labels) ccl_string_free(labels);
    return rc2 == CCL_OK ? 0 : fail(rc2);
  }

  if (solve->parsed()) {
    ccl_instance* inst = nullptr;
    int rc = ccl_instance_load(sol_in.c_str(), &inst);
    if (rc != CCL_OK) return fail(rc);
    std::ostringstream opts;
    opts << std::setprecision(17) << "{\"max_iters\":" << sol_iters << ",\"step0\":" << sol_step0
         << ",\"tol_residual\":" << sol_tol_res << ",\"tol_obj\":" << sol_tol_obj
         << ",\"projection_rounds\":" << sol_rounds << ",\"refine_epochs\":" << sol_refine << "}";
    ccl_solution* sol = nullptr;
    rc = ccl_solve(inst, sol_p.c_str(), opts.str().c_str(), &sol);
    ccl_instance_free(inst);
    if (rc != CCL_OK) return fail(rc);
    std::cout << "# solve p=" << sol_p << " max_iters=" << sol_iters
              << " objective=" << ccl_solution_objective(sol) << "\n";
    char* text = nullptr;
    rc = ccl_solution_to_json(sol, &text);
    ccl_solution_free(sol);
    if (rc != CCL_OK) return fail(rc);
    return emit(take(text), sol_out);
  }

  if (cluster->parsed()) {
    ccl_instance* inst = nullptr;
    int rc = ccl_instance_load(cl_in.c_str(), &inst);
    if (rc != CCL_OK) return fail(rc);
    std::string x_text;
    if (!cl_x.empty()) {
      std::ifstream in(cl_x, std::ios::binary);
      if (!in) {
        ccl_instance_free(inst);
        std::cerr << "error: cannot open '" << cl_x << "'\n";
        return 3;
      }
      std::ostringstream oss;
      oss << in.rdbuf();
      x_text = oss.str();
    }
    std::ostringstream opts;
    opts << std::setprecision(17) << "{\"max_iters\":" << cl_iters << ",\"step0\":" << cl_step0
         << ",\"tol_residual\":" << cl_tol_res << ",\"tol_obj\":" << cl_tol_obj
         << ",\"projection_rounds\":" << cl_rounds << ",\"refine_epochs\":" << cl_refine << "}";
    std::cout << "# cluster p=" << cl_p << " mode=" << cl_mode << " seed=" << cl_seed << "\n";
    char* result = nullptr;
    rc = ccl_cluster(inst, cl_p.c_str(), cl_mode.c_str(), cl_seed, opts.str().c_str(),
                     x_text.empty() ? nullptr : x_text.c_str(),
                     cl_trace.empty() ? nullptr : cl_trace.c_str(), &result);
    ccl_instance_free(inst);
    if (rc != CCL_OK) {
      if (result) ccl_string_free(result);
      return fail(rc);
    }
    return emit(take(result), cl_out);
  }

  if (verify->parsed()) {
    std::string kind;
    std::ostringstream params;
    params << std::setprecision(17) << "{";
    if (v_cluster->parsed() || v_decomp->parsed()) {
      kind = v_cluster->parsed() ? "cluster" : "decomposition";
      params << "\"n\":" << vo.n << ",\"beta\":" << vo.beta << ",\"q\":" << vo.q
             << ",\"R\":" << vo.R << ",\"mode\":\"" << vo.mode << "\",\"trials\":" << vo.trials
             << ",\"seed\":" << vo.seed << ",\"metric_seed\":" << vo.metric_seed
             << ",\"metrics\":" << vo.metrics << ",\"ratio_bound\":" << vo.ratio_bound;
    } else if (v_claims->parsed()) {
      kind = "claims";
      params << "\"q\":" << vo.q << ",\"R\":" << vo.R << ",\"grid_points\":" << vo.grid_points;
      if (!vo.betas.empty()) {
        params << ",\"betas\":[" << vo.betas << "]";
      } else {
        params << ",\"beta\":" << vo.beta;
      }
    } else if (v_pi->parsed()) {
      kind = "pi";
      params << "\"samples\":" << vo.samples << ",\"seed\":" << vo.seed
             << ",\"intervals\":" << vo.intervals << ",\"R\":" << vo.R;
    } else if (v_phi->parsed()) {
      kind = "phi";
      params << "\"n\":" << vo.n << ",\"q\":" << vo.q << ",\"R\":" << vo.R
             << ",\"metric_seed\":" << vo.metric_seed << ",\"lattice\":"
             << (vo.lattice ? "true" : "false");
      if (phi_beta > 0) params << ",\"beta\":" << phi_beta;
    } else {
      kind = "local";
      params << "\"alpha\":" << vo.alpha << ",\"n\":" << vo.n << ",\"k\":" << vo.k
             << ",\"flip\":" << vo.flip << ",\"p\":\"" << json_escape(vo.p)
             << "\",\"seed\":" << vo.seed << ",\"mode\":\"" << vo.mode << "\"";
    }
    params << "}";
    std::cout << "# verify " << kind << " " << params.str() << "\n";
    char* report = nullptr;
    const int rc = ccl_verify(kind.c_str(), params.str().c_str(), &report);
    const std::string text = take(report);
    if (!text.empty()) {
      const int w = emit(text, vo.out);
      if (rc == CCL_OK && w != 0) return w;
    }
    if (rc != CCL_OK) return fail(rc);
    return 0;
  }

  if (gap->parsed()) {
    char* csv = nullptr;
    char* jsn = nullptr;
    const int rc = ccl_gap_report(gap_alphas.c_str(), gap_ps.c_str(), &csv,
                                  gap_json.empty() ? nullptr : &jsn);
    if (rc != CCL_OK) {
      if (csv) ccl_string_free(csv);
      if (jsn) ccl_string_free(jsn);
      return fail(rc);
    }
    const int w = emit(take(csv), gap_csv);
    if (w != 0) {
      if (jsn) ccl_string_free(jsn);
      return w;
    }
    if (!gap_json.empty()) return write_file(gap_json, take(jsn));
    return 0;
  }

  if (bench->parsed()) {
    std::ostringstream params;
    params << std::setprecision(17) << "{\"n\":" << b_n << ",\"alpha\":" << b_alpha << ",\"seed\":" << b_seed
           << ",\"p\":\"" << json_escape(b_p) << "\",\"trials\":" << b_trials << "}";
    std::cout << "# bench " << params.str() << "\n";
    char* report = nullptr;
    const int rc = ccl_bench(params.str().c_str(), &report);
    if (rc != CCL_OK) {
      if (report) ccl_string_free(report);
      return fail(rc);
    }
    return emit(take(report), b_out);
  }

  return 2;
}
