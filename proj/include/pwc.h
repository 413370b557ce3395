/* C interface to the Poisson wiretap-channel secrecy solver.
 *
 * All computation runs in natural logarithms; rate-like quantities are in
 * nats/second.  Every function returning pwc_status reports PWC_OK on
 * success; on failure, pwc_last_error_message() describes the problem for
 * the calling thread.  Out-parameters are untouched on failure.
 */
#ifndef PWC_H
#define PWC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pwc_status {
    PWC_OK = 0,
    PWC_EINVAL = 1,         /* invalid argument or malformed input */
    PWC_ENOTDEGRADED = 2,   /* channel pair is not stochastically degraded */
    PWC_EUNSUPPORTED = 3,   /* constraint regime outside the solver's scope */
    PWC_ETRUNCATION = 4,    /* output truncation exceeds the configured cap */
    PWC_ESTALL = 5,         /* iteration/support caps hit before certification */
    PWC_ENOMULTIPLIER = 6,  /* multiplier estimate undefined for this input */
    PWC_ENUMERIC = 7,       /* other numeric failure */
} pwc_status;

/* Short stable identifier for a status code (e.g. "ok", "invalid-argument"). */
const char* pwc_status_name(pwc_status status);

/* Thread-local message for the most recent failure in this thread. */
const char* pwc_last_error_message(void);

/* Library version, e.g. "1.0.0". */
const char* pwc_version(void);

/* ------------------------------------------------------------------ */
/* Plain-data inputs                                                   */

typedef struct pwc_channel_params {
    double alpha_b;   /* legitimate-receiver gain, > 0 */
    double lambda_b;  /* legitimate-receiver dark current, > 0 */
    double alpha_e;   /* eavesdropper gain, > 0 */
    double lambda_e;  /* eavesdropper dark current, > 0 */
    double delta;     /* sampling interval, > 0 */
} pwc_channel_params;

typedef struct pwc_constraints {
    int has_peak;
    double peak;      /* peak intensity bound A */
    int has_average;
    double average;   /* average intensity bound E */
} pwc_constraints;

typedef struct pwc_solver_config {
    double kkt_tol;        /* max admissible certificate violation, nats/second */
    long grid_size;        /* uniform certificate grid points on [0, A] */
    double merge_tol;      /* min mass-point separation, fraction of A */
    double weight_floor;   /* weights below this are dropped */
    size_t max_support;    /* support-size cap */
    long max_outer_iters;  /* escalation cap */
} pwc_solver_config;

typedef struct pwc_truncation_policy {
    double epsilon_tail;  /* per-side admissible tail mass */
    long y_max_cap;       /* hard cap on the truncation index */
} pwc_truncation_policy;

void pwc_default_solver_config(pwc_solver_config* config);
void pwc_default_truncation_policy(pwc_truncation_policy* policy);

/* ------------------------------------------------------------------ */
/* Channel-level quantities                                            */

pwc_status pwc_validate_params(const pwc_channel_params* params);

/* 1 iff degraded with at least one strict inequality; 0 otherwise. */
int pwc_is_degraded(const pwc_channel_params* params);

/* Smallest y with cumulative Poisson(mean) mass >= 1 - epsilon_tail. */
pwc_status pwc_truncation_index(double mean, const pwc_truncation_policy* policy,
                                long* index);

/* Mutual-information densities i_B, i_E and the secrecy density
 * c_s = i_B - i_E at input x under the mixture (locations, weights). */
pwc_status pwc_mi_densities(const pwc_channel_params* params,
                            const pwc_truncation_policy* policy,
                            const double* locations, const double* weights, size_t n,
                            double x, double* i_b, double* i_e, double* c_s);

/* Mutual informations I_B, I_E and the secrecy rate f0 = I_B - I_E. */
pwc_status pwc_rates(const pwc_channel_params* params,
                     const pwc_truncation_policy* policy,
                     const double* locations, const double* weights, size_t n,
                     double* i_b, double* i_e, double* f0);

/* ------------------------------------------------------------------ */
/* Certificates                                                        */

typedef struct pwc_kkt_report pwc_kkt_report;  /* opaque */

/* Independent certificate check of (distribution, gamma) at weighting mu. */
pwc_status pwc_kkt_verify(const pwc_channel_params* params,
                          const pwc_constraints* constraints,
                          const pwc_solver_config* config,
                          const pwc_truncation_policy* policy, double mu, double gamma,
                          const double* locations, const double* weights, size_t n,
                          pwc_kkt_report** report);
void pwc_kkt_report_free(pwc_kkt_report* report);

double pwc_kkt_report_gamma(const pwc_kkt_report* report);
double pwc_kkt_report_max_violation(const pwc_kkt_report* report);
double pwc_kkt_report_equality_residual(const pwc_kkt_report* report);
double pwc_kkt_report_argmax_x(const pwc_kkt_report* report);
size_t pwc_kkt_report_grid_size(const pwc_kkt_report* report);
/* Fills caller arrays of length pwc_kkt_report_grid_size(); slack is the
 * certificate bound minus the density slack, nonnegative when certified. */
pwc_status pwc_kkt_report_grid(const pwc_kkt_report* report, double* x, double* slack);
int pwc_kkt_report_certified(const pwc_kkt_report* report, double kkt_tol);

/* ------------------------------------------------------------------ */
/* Solver                                                              */

typedef struct pwc_solution pwc_solution;  /* opaque */

/* Solve max f_mu over distributions on [0, A] with mean <= E.  Pass
 * warm_locations/warm_weights = NULL (warm_n = 0) for a cold start. */
pwc_status pwc_solve(const pwc_channel_params* params,
                     const pwc_constraints* constraints,
                     const pwc_solver_config* config,
                     const pwc_truncation_policy* policy, double mu,
                     const double* warm_locations, const double* warm_weights,
                     size_t warm_n, pwc_solution** solution);
void pwc_solution_free(pwc_solution* solution);

size_t pwc_solution_support_size(const pwc_solution* solution);
/* Fills caller arrays of length pwc_solution_support_size(). */
pwc_status pwc_solution_support(const pwc_solution* solution, double* locations,
                                double* weights);
double pwc_solution_objective(const pwc_solution* solution);  /* f_mu, nats/second */
double pwc_solution_gamma(const pwc_solution* solution);
double pwc_solution_mu(const pwc_solution* solution);
long pwc_solution_iterations(const pwc_solution* solution);
/* Borrowed view of the stored certificate; do not free. */
const pwc_kkt_report* pwc_solution_kkt(const pwc_solution* solution);

/* Optimal weights on a fixed support (warm = NULL for uniform start).
 * weights_out has length n. */
pwc_status pwc_optimize_weights(const pwc_channel_params* params,
                                const pwc_constraints* constraints,
                                const pwc_solver_config* config,
                                const pwc_truncation_policy* policy, double mu,
                                const double* locations, size_t n,
                                const double* warm_weights, double* weights_out,
                                double* gamma_out, double* objective_out);

/* One location-refinement pass (support size is preserved).
 * locations_out/weights_out have length n. */
pwc_status pwc_refine_locations(const pwc_channel_params* params,
                                const pwc_constraints* constraints,
                                const pwc_solver_config* config,
                                const pwc_truncation_policy* policy, double mu,
                                const double* locations, const double* weights, size_t n,
                                double* locations_out, double* weights_out,
                                double* gamma_out, double* objective_out);

/* Least-squares multiplier from the density values at the mass points. */
pwc_status pwc_estimate_gamma(const pwc_channel_params* params,
                              const pwc_constraints* constraints,
                              const pwc_truncation_policy* policy, double mu,
                              const double* locations, const double* weights, size_t n,
                              double* gamma_out);

/* ------------------------------------------------------------------ */
/* Rate-equivocation region                                            */

typedef struct pwc_region pwc_region;  /* opaque */

/* Solve each mu in the strictly increasing grid, warm-starting along the
 * sweep; points are stored in mu order. */
pwc_status pwc_trace_boundary(const pwc_channel_params* params,
                              const pwc_constraints* constraints,
                              const pwc_solver_config* config,
                              const pwc_truncation_policy* policy,
                              const double* mu_grid, size_t grid_n, pwc_region** region);
void pwc_region_free(pwc_region* region);

size_t pwc_region_size(const pwc_region* region);
pwc_status pwc_region_point(const pwc_region* region, size_t index, double* mu,
                            double* rate, double* equivocation);
size_t pwc_region_dist_size(const pwc_region* region, size_t index);
pwc_status pwc_region_dist(const pwc_region* region, size_t index, double* locations,
                           double* weights);
/* 1 iff the mu=0 and mu=1 distributions differ beyond tol. */
pwc_status pwc_detect_tradeoff(const pwc_region* region, double tol, int* tradeoff);

/* ------------------------------------------------------------------ */
/* Asymptotics                                                         */

pwc_status pwc_phi(const pwc_channel_params* params, double x, double* value);
pwc_status pwc_low_intensity_quadratic(const pwc_channel_params* params, double ratio,
                                       double* coefficient);
pwc_status pwc_low_intensity_linear_slope(const pwc_channel_params* params, double peak,
                                          double* slope);
pwc_status pwc_avg_only_equal_gains_slope(const pwc_channel_params* params,
                                          double* slope);
pwc_status pwc_avg_only_diff_gains_bounds(const pwc_channel_params* params, double avg,
                                          double* lower, double* upper);
pwc_status pwc_high_intensity_bound(const pwc_channel_params* params, double* bound);
pwc_status pwc_ct_secrecy_capacity(const pwc_channel_params* params, double peak,
                                   int has_average, double average, double* value,
                                   double* p_star);

/* Regime classification.  regime/law buffers receive NUL-terminated names
 * (64 bytes are always sufficient).  When *has_bounds is 1 the result is the
 * (lower, upper) pair; otherwise *coefficient holds the single value. */
pwc_status pwc_classify_regime(const pwc_channel_params* params,
                               const pwc_constraints* constraints, char* regime_buf,
                               size_t regime_len, char* law_buf, size_t law_len,
                               int* has_bounds, double* coefficient, double* lower,
                               double* upper);

#ifdef __cplusplus
}
#endif

#endif /* PWC_H */
