#ifndef QUARTIC_CENSUS_H
#define QUARTIC_CENSUS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum QcStatus {
  QC_STATUS_OK = 0,
  QC_STATUS_NULL_POINTER = 1,
  QC_STATUS_NOT_FUNDAMENTAL = 2,
  QC_STATUS_INVALID_ARGUMENT = 3,
  QC_STATUS_DATA = 4,
  QC_STATUS_INVARIANT = 5,
  QC_STATUS_IO = 6,
  QC_STATUS_PANIC = 7,
} QcStatus;

/**
 * Which counting engine to run.
 */
typedef enum QcEngine {
  QC_ENGINE_DIRECT = 0,
  QC_ENGINE_CHARACTERS = 1,
} QcEngine;

/**
 * A finished census.
 */
typedef struct QcCensus QcCensus;

/**
 * A quadratic field with its counting engine.
 */
typedef struct QcField QcField;

typedef struct QcCensusCounts {
  uint64_t x;
  uint64_t total;
  uint64_t n_d4;
  uint64_t n_c4;
  uint64_t n_v4;
  /**
   * 1 if `total = 2 n_d4 + n_c4 + 3 n_v4`.
   */
  uint8_t identity_ok;
} QcCensusCounts;

typedef struct QcFieldRow {
  int64_t disc;
  uint64_t bound;
  uint64_t count;
  uint64_t n_c4;
  uint64_t n_v4;
  uint64_t n_d4;
} QcFieldRow;

/**
 * Certified enclosure `[lo, hi]` of the `D4` constant.
 */
typedef struct QcInterval {
  double lo;
  double hi;
  double midpoint;
  double width;
} QcInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *qc_status_message(enum QcStatus status);

/**
 * Message for the last failure on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *qc_last_error_message(void);

/**
 * Creates the field of discriminant `disc`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum QcStatus qc_field_new(int64_t disc, struct QcField **out);

/**
 * # Safety
 * `field` must be null or come from [`qc_field_new`] and not be used again.
 */
void qc_field_free(struct QcField *field);

/**
 * # Safety
 * `field` must be a live handle; `out` must be valid for writes.
 */
enum QcStatus qc_field_disc(const struct QcField *field, int64_t *out);

/**
 * Number of quadratic extensions with relative discriminant norm at most
 * `bound`.
 *
 * # Safety
 * `field` must be a live handle; `out` must be valid for writes.
 */
enum QcStatus qc_count_relative(const struct QcField *field,
                                double bound,
                                enum QcEngine engine,
                                uint64_t *out);

/**
 * `zeta_k^*(1) / (2^r2 zeta_k(2))` in double precision.
 *
 * # Safety
 * `field` must be a live handle; `out` must be valid for writes.
 */
enum QcStatus qc_main_term(const struct QcField *field, double *out);

/**
 * Runs the census at `x` with the `D4` pairing audit.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QcStatus qc_census_run(uint64_t x, struct QcCensus **out);

/**
 * # Safety
 * `census` must be null or come from [`qc_census_run`] and not be used again.
 */
void qc_census_free(struct QcCensus *census);

/**
 * # Safety
 * `census` must be a live handle; `out` must be valid for writes.
 */
enum QcStatus qc_census_counts(const struct QcCensus *census, struct QcCensusCounts *out);

/**
 * Number of quadratic fields in the census.
 *
 * # Safety
 * `census` must be a live handle; `out` must be valid for writes.
 */
enum QcStatus qc_census_field_count(const struct QcCensus *census, size_t *out);

/**
 * Row `index` of the per-field breakdown.
 *
 * # Safety
 * `census` must be a live handle; `out` must be valid for writes.
 */
enum QcStatus qc_census_field_row(const struct QcCensus *census,
                                  size_t index,
                                  struct QcFieldRow *out);

/**
 * Certified interval for the `D4` constant from fields with `|disc| <= b`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QcStatus qc_constant_c(uint64_t b, struct QcInterval *out);

/**
 * `V4` fields with `|disc| <= x` from discriminant triples.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum QcStatus qc_v4_count(uint64_t x, uint64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QUARTIC_CENSUS_H */
