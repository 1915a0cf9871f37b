#ifndef RANKONE_H
#define RANKONE_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes shared by all functions.
typedef enum RankoneStatus {
  RANKONE_STATUS_OK = 0,
  RANKONE_STATUS_NULL_POINTER = 1,
  RANKONE_STATUS_INVALID_UTF8 = 2,
  RANKONE_STATUS_CONFIG = 3,
  RANKONE_STATUS_INVALID_PARAMETER = 4,
  RANKONE_STATUS_NUMERICAL = 5,
  RANKONE_STATUS_IO = 6,
  RANKONE_STATUS_BUFFER_TOO_SMALL = 7,
  RANKONE_STATUS_PANIC = 8,
} RankoneStatus;

// Support of a measure.
typedef enum RankoneSupport {
  RANKONE_SUPPORT_LINE = 0,
  RANKONE_SUPPORT_CIRCLE = 1,
} RankoneSupport;

// Finite measure on the line or the circle.
typedef struct RankoneMeasure RankoneMeasure;

// Report of one experiment run, with its JSON and optional CSV text.
typedef struct RankoneReport RankoneReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread; empty when none. The pointer
// stays valid until the next failing call on the same thread.
const char *rankone_last_error(void);

// Purely atomic measure from `n` positions (points on the line, angles on
// the circle) and positive weights.
//
// # Safety
// `positions` and `weights` must point to `n` doubles; `out` must be writable.
enum RankoneStatus rankone_measure_atomic(enum RankoneSupport support,
                                          const double *positions,
                                          const double *weights,
                                          size_t n,
                                          struct RankoneMeasure **out);

// Measure from the same text the command line accepts: `lebesgue_grid(N)`,
// `atoms([[pos, weight], ...])`, `mixed`, `file:PATH` or an inline JSON
// measure object.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum RankoneStatus rankone_measure_parse(const char *text,
                                         enum RankoneSupport support,
                                         struct RankoneMeasure **out);

// # Safety
// `m` must come from a constructor in this library and not be freed twice.
void rankone_measure_free(struct RankoneMeasure *m);

// Number of nodes (atoms plus density cells), the length of function arrays.
//
// # Safety
// `m` must be a live measure handle or null (returns 0).
size_t rankone_measure_dim(const struct RankoneMeasure *m);

// Total mass; NaN for a null handle.
//
// # Safety
// `m` must be a live measure handle or null.
double rankone_measure_mass(const struct RankoneMeasure *m);

// Cauchy transform of `f dμ` at `z`: `∫ f dμ(x)/(x − z)` on the line and
// `∫ f dμ(ξ)/(1 − ξ̄z)` on the circle. `f` holds `dim` interleaved
// (re, im) pairs, or is null for `f ≡ 1`. The value goes to `out[0..2]`.
//
// # Safety
// `f` must hold `2·dim` doubles when non-null; `out` must hold 2 doubles.
enum RankoneStatus rankone_cauchy_transform(const struct RankoneMeasure *m,
                                            const double *f,
                                            double z_re,
                                            double z_im,
                                            double *out);

// Spectral measure of the rank-one perturbation with coupling `α` (real on
// the line, unimodular on the circle) of an atomic measure. Writes up to
// `capacity` positions and weights and the true count to `len`; returns
// `BufferTooSmall` when `capacity < len`.
//
// # Safety
// `positions` and `weights` must hold `capacity` doubles; `len` must be writable.
enum RankoneStatus rankone_clark_spectrum(const struct RankoneMeasure *m,
                                          double alpha_re,
                                          double alpha_im,
                                          double *positions,
                                          double *weights,
                                          size_t capacity,
                                          size_t *len);

// Runs the experiment described by a JSON configuration, the same format
// `rankone run` reads. Output paths in the configuration are honored.
// Failed checks still return `Ok`; see [`rankone_report_passed`].
//
// # Safety
// `config_json` must be a NUL-terminated string; `out` must be writable.
enum RankoneStatus rankone_run_config(const char *config_json, struct RankoneReport **out);

// # Safety
// `r` must come from [`rankone_run_config`] and not be freed twice.
void rankone_report_free(struct RankoneReport *r);

// 1 when every check passed, 0 otherwise or for a null handle.
//
// # Safety
// `r` must be a live report handle or null.
int32_t rankone_report_passed(const struct RankoneReport *r);

// Number of checks in the report.
//
// # Safety
// `r` must be a live report handle or null (returns 0).
size_t rankone_report_check_count(const struct RankoneReport *r);

// The JSON report, owned by the handle.
//
// # Safety
// `r` must be a live report handle or null (returns null).
const char *rankone_report_json(const struct RankoneReport *r);

// The CSV table, owned by the handle; null when the subcommand has none.
//
// # Safety
// `r` must be a live report handle or null (returns null).
const char *rankone_report_csv(const struct RankoneReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANKONE_H */
