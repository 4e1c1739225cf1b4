#ifndef FULFILL_CAPI_H
#define FULFILL_CAPI_H
/* C boundary of the fulfillment engine.
 *
 * Conventions:
 *   - Every function returns FF_OK (0) on success or an FF_E* code; on
 *     failure ff_last_error() returns a thread-local message that stays
 *     valid until the next failing call on the same thread.
 *   - Strings handed out through char** are heap-allocated; release them
 *     with ff_string_free.  Handles are released with their _free function.
 *   - All JSON in and out is UTF-8, one document per string.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ff_instance ff_instance;
typedef struct ff_service ff_service;

enum {
  FF_OK = 0,
  FF_EINVAL = 1,      /* bad argument / configuration */
  FF_EPARSE = 2,      /* malformed instance or JSON input */
  FF_ENOSESSION = 3,  /* service wire code "no_session" (in-band) */
  FF_EBADORDER = 4,   /* service wire code "bad_order" (in-band) */
  FF_EBADCOSTS = 5,   /* service wire code "bad_costs" (in-band) */
  FF_EREGIME = 6,     /* policy/regime mismatch */
  FF_EOVERFLOW = 7,   /* search state budget exhausted */
  FF_EIO = 8,         /* file read/write failure */
  FF_EINFEASIBLE = 9, /* plan violates demand/stock/sign constraints */
  FF_EDOMAIN = 10,    /* formula input outside its domain */
  FF_EINTERNAL = 11
};

const char* ff_last_error(void);
void ff_string_free(char* s);

/* ---- instances --------------------------------------------------------- */

/* Parses the JSON instance format (same schema the file reader accepts). */
int ff_instance_parse(const char* json_text, ff_instance** out);
int ff_instance_from_file(const char* path, ff_instance** out);

/* Adversarial generator families; params_json as documented by the engine
 * ("{}" for defaults where a family has them). */
int ff_instance_generate(const char* family, const char* params_json,
                         ff_instance** out);

/* Stochastic generator.  config_json fields (all optional): n, K, T, f0,
 * f_fdc, a, b, order_sizes, type_counts, size_probs, tau, regime
 * ("time-varying" | "time-invariant"). */
int ff_instance_stochastic(const char* config_json, uint64_t seed,
                           ff_instance** out);

int ff_instance_to_json(const ff_instance* inst, char** json_out);
int ff_instance_write_file(const ff_instance* inst, const char* path);
void ff_instance_free(ff_instance* inst);

/* ---- engine ------------------------------------------------------------ */

/* policy_spec_json: {"name": ..., "theta"?, "eta"?, "greedy_rule"?}.
 * trace_mode: 0 = totals only, 1 = also per-period costs, 2 = full trace
 * ("trace": per period {period, gated, period_cost, plan, proposal,
 * inventory_after}; plan/proposal are (K+1) x n with row 0 = RDC,
 * inventory_after is K x n, FDC rows only).
 * result_json: {policy_id, seed, total_cost, gated_periods, wall_time,
 * decide_time, decisions, rounding_fallbacks, fdc_pref, period_costs?,
 * trace?}. */
int ff_run_policy(const ff_instance* inst, const char* policy_spec_json,
                  uint64_t seed, int trace_mode, char** result_json);

/* limits_json (optional, may be NULL or "{}"): {"max_states"?,
 * "recheck_every"?, "want_plan"?}.  Returns FF_EOVERFLOW when the state
 * budget is hit.  result_json: {opt_cost, method, states_expanded, elapsed,
 * plan?} where plan is [T][(K+1)][n] (row 0 = RDC). */
int ff_bruteforce_opt(const ff_instance* inst, const char* limits_json,
                      char** result_json);

/* Reads the analytic annotation carried by the instance.
 * result_json: {opt_cost, method} with method "analytic-exact" or
 * "analytic-upper-bound". */
int ff_analytic_opt(const ff_instance* inst, char** result_json);

/* inputs_json: {"f0"?, "f1"?, "fmin"?, "a"?, "b"?, "theta"?, "w"?,
 * "fdc_fixed_costs"?: [..]}; which fields a bound id needs is documented by
 * the engine. */
int ff_bound_value(const char* bound_id, const char* inputs_json, double* out);

/* Default order-size gate threshold from (f0, fmin, a, b). */
int ff_theta_default(double f0, double fmin, double a, double b, double* out);

/* ---- decision service --------------------------------------------------- */

int ff_service_new(ff_service** out);
/* One request line in, one response line out (no trailing newline).  Always
 * FF_OK with a response; protocol failures are in-band JSON errors. */
int ff_service_handle_line(ff_service* svc, const char* line, char** response);
void ff_service_free(ff_service* svc);

/* ---- acceptance --------------------------------------------------------- */

/* suite_id: "all" or a single suite id.  print_progress != 0 streams one
 * line per criterion to stdout as it finishes.  report_json carries
 * {suite, pass, results: [{number, id, pass, detail, seconds}]}. */
int ff_acceptance_run(const char* suite_id, int print_progress,
                      char** report_json);

/* Newline-separated list of valid suite ids. */
int ff_acceptance_suites(char** ids_out);

#ifdef __cplusplus
}
#endif

#endif /* FULFILL_CAPI_H */
