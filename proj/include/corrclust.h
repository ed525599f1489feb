/* C API for the correlation-clustering library. Opaque handles, integer
 * error codes; bulk data crosses the boundary as JSON strings. Strings
 * returned through char** outputs are owned by the caller and must be
 * released with ccl_string_free. */
#ifndef CORRCLUST_H
#define CORRCLUST_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ccl_instance ccl_instance;
typedef struct ccl_solution ccl_solution;

enum ccl_status {
  CCL_OK = 0,
  CCL_EINVAL = 1,   /* invalid parameter or malformed input */
  CCL_EIO = 2,      /* file read/write failure */
  CCL_EVERIFY = 3,  /* an always-true property or strict-mode guarantee failed */
  CCL_ERANGE = 4    /* argument outside its documented range */
};

/* Thread-local message for the last failing call. */
const char* ccl_last_error(void);

const char* ccl_version(void);

/* --- instances ---------------------------------------------------------- */

int ccl_instance_gen_gap(double alpha, ccl_instance** out);
int ccl_instance_gen_random(int n, double alpha, int planted_k, double flip_prob,
                            uint64_t seed, ccl_instance** out, char** planted_labels_json);
int ccl_instance_load(const char* path, ccl_instance** out);
int ccl_instance_save(const ccl_instance* inst, const char* path);
int ccl_instance_to_json(const ccl_instance* inst, char** json);
int ccl_instance_from_json(const char* json, ccl_instance** out);
/* violations_json: JSON array of human-readable violation strings. */
int ccl_instance_validate(const ccl_instance* inst, char** violations_json);
int ccl_instance_n(const ccl_instance* inst);
double ccl_instance_alpha(const ccl_instance* inst);
void ccl_instance_free(ccl_instance* inst);

/* --- relaxation --------------------------------------------------------- */

/* p: "1", "2", any real >= 1, or "inf". opts_json: optional (NULL for
 * defaults) object {"max_iters", "step0", "tol_residual", "tol_obj",
 * "projection_rounds"}. */
int ccl_solve(const ccl_instance* inst, const char* p, const char* opts_json,
              ccl_solution** out);
int ccl_gap_fractional(const ccl_instance* inst, const char* p, ccl_solution** out);
int ccl_solution_to_json(const ccl_solution* sol, char** json);
int ccl_solution_from_json(const char* json, ccl_solution** out);
double ccl_solution_objective(const ccl_solution* sol);
void ccl_solution_free(ccl_solution* sol);

/* --- clustering --------------------------------------------------------- */

/* mode: "strict" | "practical". x_json: optional precomputed solution JSON
 * (bypasses the solver). trace_path: optional JSONL trace output.
 * result_json: {"labels", "solution", "dis", "norms", "params", "local_checks"}. */
int ccl_cluster(const ccl_instance* inst, const char* p, const char* mode,
                uint64_t seed, const char* opts_json, const char* x_json,
                const char* trace_path, char** result_json);

/* --- verification ------------------------------------------------------- */

/* kind: "cluster" | "decomposition" | "claims" | "pi" | "phi" | "local".
 * params_json keys by kind (all optional unless noted):
 *   cluster/decomposition: n, beta, q, R, mode, trials, seed, metric_seed,
 *                          metrics, ratio_bound
 *   claims: beta (or betas array), q, R, grid_points
 *   pi:     samples, seed, intervals, R
 *   phi:    n, beta, q, R, metric_seed, lattice (bool)
 *   local:  alpha, n, k, flip, p, seed, mode
 * Returns CCL_EVERIFY when an always-true property fails. */
int ccl_verify(const char* kind, const char* params_json, char** report_json);

/* alphas/ps: comma-separated lists; ps entries as for ccl_solve. */
int ccl_gap_report(const char* alphas, const char* ps, char** csv_out, char** json_out);

/* Wall-clock per phase on a seeded corpus. params_json: {"n", "alpha",
 * "seed", "p", "trials"}. */
int ccl_bench(const char* params_json, char** report_json);

void ccl_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CORRCLUST_H */
