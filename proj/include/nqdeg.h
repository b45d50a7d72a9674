/* nqdeg — nonclassical-degree toolkit for pure bosonic field states.
 *
 * C API over the C++ core. All handles are opaque; every fallible call
 * returns an nqd_status and reports results through out parameters. On
 * failure a thread-local message is available via nqd_last_error().
 *
 * States are immutable once created and safe to share across threads.
 * All computational entry points are pure functions of their inputs and
 * may be called concurrently.
 */
#ifndef NQDEG_H
#define NQDEG_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define NQDEG_VERSION "1.0.0"

typedef enum nqd_status {
    NQD_OK = 0,
    NQD_ERR_DOMAIN = 1,              /* parameter outside its domain */
    NQD_ERR_BOUNDS = 2,              /* truncation / size cap exceeded */
    NQD_ERR_TRUNCATION = 3,          /* coherent tail above tolerance */
    NQD_ERR_PARSE = 4,               /* state spec or JSON syntax */
    NQD_ERR_ARITY = 5,               /* single-mode vs bipartite mismatch */
    NQD_ERR_CONFIG = 6,              /* grid / optimizer configuration */
    NQD_ERR_CONVERGENCE = 7,         /* optimizer failed on every start */
    NQD_ERR_UNDEFINED_STATISTIC = 8, /* Mandel q of a vacuum-like state */
    NQD_ERR_IO = 9,
    NQD_ERR_NULL_ARGUMENT = 10,
    NQD_ERR_INTERNAL = 11
} nqd_status;

/* Opaque pure state of one or two bosonic modes in the Fock basis. */
typedef struct nqd_state nqd_state;

const char* nqd_version(void);
const char* nqd_status_name(nqd_status status);

/* Message for the most recent failure on this thread; empty string when
 * the last call succeeded. The pointer stays valid until the next API
 * call on the same thread. */
const char* nqd_last_error(void);

/* ------------------------------------------------------------------ */
/* State construction. Every constructor hands back an owned handle to
 * be released with nqd_state_free().                                   */

/* Number state |n>, 0 <= n <= 256. */
nqd_status nqd_state_fock(int n, nqd_state** out);

/* Coherent state truncated at `truncation` (< 0 selects an automatic
 * truncation) and renormalized; |alpha| <= 8. The discarded tail weight
 * must stay below 1e-12; pass a non-NULL `discarded_tail` to read it. */
nqd_status nqd_state_coherent(double alpha_re, double alpha_im, int truncation,
                              double* discarded_tail, nqd_state** out);

/* sqrt(xi)|0,1> +/- sqrt(1-xi)|1,0>; sign is '+' or '-'. */
nqd_status nqd_state_psi(char sign, double xi, nqd_state** out);

/* sqrt(xi)|0,0> +/- sqrt(1-xi)|1,1>. */
nqd_status nqd_state_phi(char sign, double xi, nqd_state** out);

/* Tensor product of two single-mode states (per-mode truncation <= 64). */
nqd_status nqd_state_product(const nqd_state* a, const nqd_state* b, nqd_state** out);

/* Coefficients as interleaved re,im pairs, normalized within 1e-6
 * (renormalized exactly). Bipartite matrices are row-major with the row
 * index counting mode-a photons. */
nqd_status nqd_state_single_from_coeffs(const double* re_im, int count, nqd_state** out);
nqd_status nqd_state_bipartite_from_coeffs(const double* re_im, int rows, int cols,
                                           nqd_state** out);

/* State mini-language: fock:N | coh:RE,IM | psi:{+|-}:XI | phi:{+|-}:XI |
 * file:PATH. `coherent_truncation` overrides the automatic truncation of
 * the coh form (pass a negative value to keep the default). */
nqd_status nqd_state_parse(const char* spec, int coherent_truncation, nqd_state** out);

/* JSON form {"kind":"single"|"bipartite","coeffs":...}; the loader
 * renormalizes norm deviations up to 1e-6 and rejects anything larger. */
nqd_status nqd_state_from_json(const char* text, nqd_state** out);
nqd_status nqd_state_to_json(const nqd_state* s, char** out_text);

void nqd_string_free(char* text);
void nqd_state_free(nqd_state* s);

/* ------------------------------------------------------------------ */
/* State queries. */

/* 1 for single-mode, 2 for bipartite, 0 on null input. */
int nqd_state_arity(const nqd_state* s);

/* Truncation of mode 0 or 1 (mode 1 only for bipartite); -1 on error. */
int nqd_state_truncation(const nqd_state* s, int mode);

/* Coefficient c_n (single mode; m ignored) or c_{n,m}. */
nqd_status nqd_state_coeff(const nqd_state* s, int n, int m, double* re, double* im);

/* ------------------------------------------------------------------ */
/* Phase-space evaluation. */

/* <beta|psi> for a single-mode state. */
nqd_status nqd_coherent_overlap(const nqd_state* s, double beta_re, double beta_im,
                                double* out_re, double* out_im);

/* Husimi Q at one phase-space point. `amps_re_im` holds arity
 * interleaved re,im pairs and must match the state's arity. Values lie
 * in [0, 1/pi] (single mode) or [0, 1/pi^2] (bipartite). */
nqd_status nqd_husimi_q(const nqd_state* s, const double* amps_re_im, int arity, double* out);

/* Wigner function of a single-mode state; may be negative. */
nqd_status nqd_wigner(const nqd_state* s, double alpha_re, double alpha_im, double* out);

/* Square quadrature lattice: center +/- half_width, spacing step. */
typedef struct nqd_grid_spec {
    double half_width;
    double step;
    double center_re;
    double center_im;
} nqd_grid_spec;

/* Defaults: half_width 4, step 0.05, centered at the origin. */
void nqd_grid_spec_init(nqd_grid_spec* grid);

/* Q recovered as the Gaussian convolution of W over `grid` (trapezoidal
 * quadrature). Pass NULL to use the default grid centered on beta; an
 * explicit grid must cover |alpha - beta| <= 3.5 with step <= 0.1. */
nqd_status nqd_q_from_w(const nqd_state* s, double beta_re, double beta_im,
                        const nqd_grid_spec* grid, double* out);

/* |<a|b>|^2 for states of equal arity; unequal truncations zero-pad. */
nqd_status nqd_fidelity(const nqd_state* a, const nqd_state* b, double* out);

/* Bures-Uhlmann sqrt(2 - 2 sqrt(F)) and Hilbert-Schmidt sqrt(2 - 2 F). */
nqd_status nqd_distance_bu(const nqd_state* a, const nqd_state* b, double* out);
nqd_status nqd_distance_hs(const nqd_state* a, const nqd_state* b, double* out);

/* ------------------------------------------------------------------ */
/* Global maximization of Q. */

typedef struct nqd_optimizer_config {
    double radius_margin; /* search square: |amp| <= sqrt(trunc) + margin */
    int grid_per_axis;    /* odd, >= 3 */
    double simplex_tol;
    int max_iters;
    uint64_t seed; /* reserved for stochastic restart strategies */
} nqd_optimizer_config;

/* Defaults: margin 3, grid 9, tol 1e-10, 2000 iterations, seed 0. */
void nqd_optimizer_config_init(nqd_optimizer_config* cfg);

typedef struct nqd_max_result {
    double q_max;
    double argmax[4]; /* arity re,im pairs */
    int arity;
    long starts_used;
    int converged;
    double spread; /* max - min of the top-3 local maxima found */
} nqd_max_result;

/* Deterministic multistart maximization (NULL cfg = defaults). On
 * NQD_ERR_CONVERGENCE the result still holds the best point seen. */
nqd_status nqd_maximize_q(const nqd_state* s, const nqd_optimizer_config* cfg,
                          nqd_max_result* out);

/* Exhaustive lattice oracle plus one local refinement; the evaluation
 * budget (points^(2*arity)) is capped at 1e9. */
nqd_status nqd_brute_force_max(const nqd_state* s, double half_width, double step,
                               nqd_max_result* out);

/* ------------------------------------------------------------------ */
/* Scalar measures. */

typedef struct nqd_measure_report {
    double degree; /* 1 - pi^arity * q_max */
    double q_max;
    double argmax[4];
    int arity;
    int has_entropy; /* bipartite only */
    double entropy;
    int has_mandel_q; /* absent for vacuum-like states */
    double mandel_q;
    int converged;
    int has_closed_form_ref; /* caller-provided reference value */
    double closed_form_ref;
} nqd_measure_report;

/* Nonclassical degree via the optimizer. Returns NQD_ERR_CONVERGENCE
 * with a best-so-far report (converged = 0) when no start converged. */
nqd_status nqd_degree(const nqd_state* s, const nqd_optimizer_config* cfg,
                      nqd_measure_report* out);

/* JSON with fixed key order: degree, q_max, argmax, entropy, mandel_q,
 * converged, closed_form_ref (absent fields serialize as null). */
nqd_status nqd_report_to_json(const nqd_measure_report* report, char** out_text);

/* Von Neumann entropy of either reduced state, in nats. */
nqd_status nqd_entanglement_entropy(const nqd_state* s, double* out);

/* Mandel factor <n^2>/<n> - <n> - 1 (total photon number for two modes).
 * NQD_ERR_UNDEFINED_STATISTIC when <n> vanishes. */
nqd_status nqd_mandel_q(const nqd_state* s, double* out);

/* Product composition law D1 + D2 - D1*D2 on [0,1]^2. */
nqd_status nqd_compose_product_degree(double d1, double d2, double* out);

/* Closed-form reference degrees. `family` is "fock" (param n), "fock_nn"
 * (param n, the |n,n> product), "psi" or "phi" (param xi). */
nqd_status nqd_closed_form_degree(const char* family, double param, double* out);

/* ------------------------------------------------------------------ */
/* Grid dumps. */

/* CSV dump `re,im,value` (row-major, 17 significant digits) of the
 * surface "q", "w" or "qfromw" for a single-mode state. `conv_grid`
 * configures the inner convolution for "qfromw" (NULL = default) and is
 * recentred on each output point. `path` NULL writes to stdout. */
nqd_status nqd_dump_grid(const nqd_state* s, const char* surface, const nqd_grid_spec* grid,
                         const nqd_grid_spec* conv_grid, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* NQDEG_H */
