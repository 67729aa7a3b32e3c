#ifndef CUBETOPO_H
#define CUBETOPO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CtDirection {
  CT_DIRECTION_LEQ = 0,
  CT_DIRECTION_GEQ = 1,
} CtDirection;

typedef enum CtFormat {
  /**
   * Loading: detect from the file contents. Saving: raw for a `.raw`
   * extension, text otherwise.
   */
  CT_FORMAT_AUTO = 0,
  CT_FORMAT_TEXT = 1,
  CT_FORMAT_RAW = 2,
} CtFormat;

typedef enum CtStatus {
  CT_STATUS_OK = 0,
  CT_STATUS_NULL_POINTER = 1,
  CT_STATUS_IO = 2,
  CT_STATUS_PARSE = 3,
  CT_STATUS_INVALID_ARGUMENT = 4,
  /**
   * Input violates a data contract (non-finite values, bodies not nested, ...).
   */
  CT_STATUS_DATA = 5,
  CT_STATUS_PANIC = 6,
} CtStatus;

/**
 * Barcode handle.
 */
typedef struct CtBarcode CtBarcode;

/**
 * Scalar grid handle.
 */
typedef struct CtGrid CtGrid;

typedef struct CtBetti {
  size_t b0;
  size_t b1;
  size_t b2;
  int64_t chi;
} CtBetti;

/**
 * `death` is `n + 1` and `death_level` is +inf for classes alive at the last level.
 */
typedef struct CtInterval {
  uint32_t q;
  size_t birth;
  size_t death;
  double birth_level;
  double death_level;
} CtInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ct_last_error_message(void);

const char *ct_version(void);

/**
 * Copies `nx*ny*nz` values (x fastest) into a new grid.
 *
 * # Safety
 * `values` must point to `nx*ny*nz` doubles and `out` must be writable.
 */
enum CtStatus ct_grid_new(size_t nx,
                          size_t ny,
                          size_t nz,
                          const double *values,
                          struct CtGrid **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum CtStatus ct_grid_load(const char *path, enum CtFormat format, struct CtGrid **out);

/**
 * # Safety
 * `grid` must come from this library and `path` must be NUL-terminated.
 */
enum CtStatus ct_grid_save(const struct CtGrid *grid, const char *path, enum CtFormat format);

/**
 * # Safety
 * `grid` must be null or come from this library, and must not be used afterwards.
 */
void ct_grid_free(struct CtGrid *grid);

/**
 * # Safety
 * `dims` must point to room for three `size_t`.
 */
enum CtStatus ct_grid_dims(const struct CtGrid *grid, size_t *dims);

/**
 * Copies the values into `buf`, which holds `len` doubles; `len` must be
 * at least the grid size.
 *
 * # Safety
 * `buf` must point to `len` writable doubles.
 */
enum CtStatus ct_grid_values(const struct CtGrid *grid, double *buf, size_t len);

/**
 * New grid rescaled onto [0, 1].
 *
 * # Safety
 * `grid` must come from this library and `out` must be writable.
 */
enum CtStatus ct_grid_normalize(const struct CtGrid *grid, struct CtGrid **out);

/**
 * Legendre-series field of order `k_max` with default coefficient spreads.
 *
 * # Safety
 * `out` must be writable.
 */
enum CtStatus ct_generate_spectral(size_t nx,
                                   size_t ny,
                                   size_t nz,
                                   size_t k_max,
                                   uint64_t seed,
                                   struct CtGrid **out);

/**
 * Stationary Gaussian field, mean 0, standard deviation 1, exponential
 * covariance with the given ranges in cells.
 *
 * # Safety
 * `ranges` must point to three doubles and `out` must be writable.
 */
enum CtStatus ct_generate_sgs(size_t nx,
                              size_t ny,
                              size_t nz,
                              const double *ranges,
                              uint64_t seed,
                              struct CtGrid **out);

/**
 * Betti numbers of one excursion set.
 *
 * # Safety
 * `grid` must come from this library and `out` must be writable.
 */
enum CtStatus ct_betti(const struct CtGrid *grid,
                       double level,
                       enum CtDirection dir,
                       struct CtBetti *out);

/**
 * Barcode of dimension `q` over `n_levels` levels in schedule order.
 *
 * # Safety
 * `levels` must point to `n_levels` doubles and `out` must be writable.
 */
enum CtStatus ct_barcode(const struct CtGrid *grid,
                         const double *levels,
                         size_t n_levels,
                         enum CtDirection dir,
                         uint32_t q,
                         struct CtBarcode **out);

/**
 * Number of intervals; 0 for a null handle.
 *
 * # Safety
 * `bc` must be null or come from this library.
 */
size_t ct_barcode_len(const struct CtBarcode *bc);

/**
 * # Safety
 * `bc` must come from this library and `out` must be writable.
 */
enum CtStatus ct_barcode_get(const struct CtBarcode *bc, size_t index, struct CtInterval *out);

/**
 * # Safety
 * `bc` must be null or come from this library, and must not be used afterwards.
 */
void ct_barcode_free(struct CtBarcode *bc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBETOPO_H */
