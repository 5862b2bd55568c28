/* C interface to the evolutionary Cournot engine.
 *
 * Usage: build a run handle from a JSON configuration document, call the
 * operation you need, and free returned strings with clre_string_free().
 * Every operation returns a status code; on failure the handle keeps a
 * human-readable message retrievable via clre_last_error().
 */
#ifndef COURNOTLRE_CAPI_H
#define COURNOTLRE_CAPI_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes (stable contract). */
#define CLRE_OK 0            /* success */
#define CLRE_CHECK_FAILED 1  /* a verification or refusal condition fired */
#define CLRE_CONFIG_ERROR 2  /* invalid or missing configuration */
#define CLRE_RUNTIME_ERROR 3 /* internal failure (numerics, caps, ...) */

typedef struct clre_run clre_run;

/* Parses and validates the JSON configuration. On success stores a new
 * handle in *out and returns CLRE_OK; otherwise *out is NULL and
 * clre_last_error(NULL) describes the problem. */
int clre_run_new(const char* config_json, clre_run** out);
void clre_run_free(clre_run* run);

/* Message for the most recent failure on this handle; pass NULL for
 * failures of clre_run_new itself. The pointer stays valid until the next
 * call on the same handle (or the next clre_run_new for NULL). */
const char* clre_last_error(const clre_run* run);

/* Releases any string returned through an out-parameter below. */
void clre_string_free(char* s);

/* Benchmarks, advantage-set boundaries, descent sequences and long-run
 * bounds as a JSON document. */
int clre_bench(clre_run* run, char** out_json);

/* Stochastic-stability analysis (absorbing sets, resistance trees, long-run
 * equilibria). eta_override may be NULL to use the configured value.
 * Refuses (CLRE_CHECK_FAILED) when a configured rule-revision criterion
 * violates the survival-of-the-fittest principle. */
int clre_analyze(clre_run* run, const double* eta_override, char** out_json);

/* Same analysis, emitted as a DOT graph of the resistances plus the witness
 * trees of the winning states. */
int clre_analyze_dot(clre_run* run, const double* eta_override, char** out_dot);

/* Monte Carlo estimate of long-run occupancy per absorbing pattern.
 * seed_override may be NULL. eps_sweep (length sweep_len) overrides the
 * configured epsilon sweep; pass NULL/0 to use the configuration. When the
 * configuration requests a trajectory export and out_trajectory_csv is
 * non-NULL, a CSV document is stored there (empty string otherwise). */
int clre_simulate(clre_run* run, const unsigned long long* seed_override,
                  const double* eps_sweep, size_t sweep_len, char** out_json,
                  char** out_trajectory_csv);

/* Composite verification suite (model regularity, radius certificates,
 * rule-principle checks). Returns CLRE_CHECK_FAILED when any check fails;
 * out_json carries the per-check report either way. */
int clre_verify(clre_run* run, char** out_json);

/* Aggregative-game analysis: quasi-submodularity, aggregate-taking strategy,
 * Nash strategy, and the long-run equilibria of the generalized dynamics.
 * Uses the explicit "aggregative" config section when present, otherwise the
 * Cournot model's own aggregative form. */
int clre_aggregative(clre_run* run, const double* eta_override,
                     char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* COURNOTLRE_CAPI_H */
