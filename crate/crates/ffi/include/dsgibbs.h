#ifndef DSGIBBS_H
#define DSGIBBS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define DSG_OK 0

#define DSG_ERR_IO 1

#define DSG_ERR_INVALID_ARGUMENT 2

#define DSG_ERR_NUMERIC 3

#define DSG_ERR_SAMPLING_BUDGET 4

#define DSG_ERR_NULL_POINTER 5

#define DSG_ERR_PANIC 6

#define DSG_METHOD_CLASSICAL 0

#define DSG_METHOD_FLAT_PRIOR 1

/**
 * One chain trajectory with its own random stream.
 */
typedef struct DsgChain DsgChain;

/**
 * Results of an ensemble run.
 */
typedef struct DsgReport DsgReport;

/**
 * One time step of an ensemble report.
 */
typedef struct DsgStepSummary {
  uint32_t t;
  double sample_mean;
  double std_error;
  double closed_form_mean;
  double empirical_w1;
  double w1_lower;
  double w1_upper;
  double w1_worst_case;
} DsgStepSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *dsg_version(void);

/**
 * Message for the last failure on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *dsg_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must be NULL or a pointer obtained from this library and not yet freed.
 */
void dsg_string_free(char *s);

/**
 * Starts a trajectory at `z0`, drawing from stream 0 of `seed`.
 *
 * # Safety
 * `out_chain` must be a valid pointer to writable storage for a handle.
 */
int32_t dsg_chain_new(uint32_t n1,
                      uint32_t n2,
                      double z0,
                      uint64_t seed,
                      struct DsgChain **out_chain);

/**
 * Advances the trajectory by `steps` and optionally reports the new state.
 *
 * # Safety
 * `chain` must come from `dsg_chain_new`; `out_z` may be NULL.
 */
int32_t dsg_chain_step(struct DsgChain *chain, uint32_t steps, double *out_z);

/**
 * Current state and number of steps taken.
 *
 * # Safety
 * `chain` must come from `dsg_chain_new`; either out-pointer may be NULL.
 */
int32_t dsg_chain_state(const struct DsgChain *chain, double *out_z, uint64_t *out_t);

/**
 * # Safety
 * `chain` must be NULL or come from `dsg_chain_new` and not be used again.
 */
void dsg_chain_free(struct DsgChain *chain);

/**
 * Runs `replicates` trajectories for `t_max` steps (see the CLI `chain`
 * subcommand; same seed gives the same numbers).
 *
 * # Safety
 * `out_report` must be a valid pointer to writable storage for a handle.
 */
int32_t dsg_report_run(uint32_t n1,
                       uint32_t n2,
                       double z0,
                       uint32_t t_max,
                       uint64_t replicates,
                       uint64_t seed,
                       struct DsgReport **out_report);

/**
 * Number of rows (`t_max + 1`).
 *
 * # Safety
 * `report` must come from `dsg_report_run`.
 */
int32_t dsg_report_len(const struct DsgReport *report, size_t *out_len);

/**
 * Copies row `index` into `out_row`.
 *
 * # Safety
 * `report` must come from `dsg_report_run`; `out_row` must be writable.
 */
int32_t dsg_report_row(const struct DsgReport *report,
                       size_t index,
                       struct DsgStepSummary *out_row);

/**
 * Serializes the report as JSON (the CLI `chain --format json` document).
 * Free the string with `dsg_string_free`.
 *
 * # Safety
 * `report` must come from `dsg_report_run`; `out_json` must be writable.
 */
int32_t dsg_report_to_json(const struct DsgReport *report, char **out_json);

/**
 * # Safety
 * `report` must be NULL or come from `dsg_report_run` and not be used again.
 */
void dsg_report_free(struct DsgReport *report);

/**
 * `E[Z_t]` from `z0`.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_expected_value_at(uint32_t n1, uint32_t n2, uint32_t t, double z0, double *out_value);

/**
 * Upper bound `rho^t E|Z - z0|` on the Wasserstein-1 distance to stationarity.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_w1_upper_bound(uint32_t n1, uint32_t n2, uint32_t t, double z0, double *out_value);

/**
 * Lower bound `|z0 - m| rho^t` on the Wasserstein-1 distance to stationarity.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_w1_lower_bound(uint32_t n1, uint32_t n2, uint32_t t, double z0, double *out_value);

/**
 * Wasserstein-1 bound over all starting points.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_worst_case_w1(uint32_t n1, uint32_t n2, uint32_t t, double *out_value);

/**
 * Regularized incomplete beta function `I_x(alpha, beta)`.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_beta_cdf(double alpha, double beta, double x, double *out_value);

/**
 * `E[X^k]` for `X ~ Beta(alpha, beta)`.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_beta_kth_moment(double alpha, double beta, uint32_t k, double *out_value);

/**
 * `E|X - z|` for `X ~ Beta(alpha, beta)`.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_beta_w1_to_point(double alpha, double beta, double z, double *out_value);

/**
 * Fills `out_values[0..n]` with upper feasible-interval endpoints for `n1`
 * first-category and `n2` second-category observations.
 *
 * # Safety
 * `out_values` must point to `n` writable doubles; `out_attempts` may be NULL.
 */
int32_t dsg_oracle_endpoints(uint32_t n1,
                             uint32_t n2,
                             size_t n,
                             uint64_t seed,
                             uint64_t max_attempts,
                             double *out_values,
                             uint64_t *out_attempts);

/**
 * Probability that `n` balls land in distinct boxes out of `k`.
 *
 * # Safety
 * `out_value` must be a valid pointer to a writable `double`.
 */
int32_t dsg_birthday(uint64_t k, uint64_t n, int32_t method_code, double *out_value);

/**
 * Probability that `n` balls leave no box empty. For the flat prior,
 * `replicates == 0` selects the exact formula and any other value the urn
 * simulation with the given seed. `out_std_error` may be NULL and is 0 for
 * exact results.
 *
 * # Safety
 * `out_estimate` must be writable; `out_std_error` may be NULL.
 */
int32_t dsg_coupon(uint64_t k,
                   uint64_t n,
                   int32_t method_code,
                   uint64_t replicates,
                   uint64_t seed,
                   double *out_estimate,
                   double *out_std_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSGIBBS_H */
