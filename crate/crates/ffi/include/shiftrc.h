#ifndef SHIFTRC_H
#define SHIFTRC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  SHIFTRC_STATUS_OK = 0,
  SHIFTRC_STATUS_NULL_POINTER = 1,
  SHIFTRC_STATUS_INVALID_ARGUMENT = 2,
  SHIFTRC_STATUS_SHAPE = 3,
  SHIFTRC_STATUS_SINGULAR = 4,
  SHIFTRC_STATUS_LENGTH = 5,
  SHIFTRC_STATUS_DOMAIN = 6,
  SHIFTRC_STATUS_BUFFER_TOO_SMALL = 7,
  SHIFTRC_STATUS_INTERNAL = 99,
} ShiftrcStatus;

typedef enum {
  SHIFTRC_NRMSE_MODE_GLOBAL = 0,
  SHIFTRC_NRMSE_MODE_PAPER_LITERAL = 1,
} ShiftrcNrmseMode;

/**
 * Dense `f64` matrix.
 */
typedef struct ShiftrcMatrix ShiftrcMatrix;

/**
 * Column-pivoted QR factorization of a [`ShiftrcMatrix`].
 */
typedef struct ShiftrcQr ShiftrcQr;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failing call on this thread, or null. Owned by the
 * library.
 */
const char *shiftrc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *shiftrc_version(void);

/**
 * Copies `rows*cols` row-major values into a new matrix.
 *
 * # Safety
 * `data` must point to `rows*cols` readable doubles; `out` must be writable.
 */
ShiftrcStatus shiftrc_matrix_new(size_t rows, size_t cols, const double *data, ShiftrcMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library not yet freed.
 */
void shiftrc_matrix_free(ShiftrcMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; `rows` and `cols` may be null.
 */
ShiftrcStatus shiftrc_matrix_shape(const ShiftrcMatrix *m, size_t *rows, size_t *cols);

/**
 * Writes the matrix row-major into `buf` (capacity `len`).
 *
 * # Safety
 * `m` must be a live handle and `buf` writable for `len` doubles.
 */
ShiftrcStatus shiftrc_matrix_copy(const ShiftrcMatrix *m, double *buf, size_t len);

/**
 * Time-shift augmentation of a `T×M` state matrix into
 * `(T−tau_max)×M(tau_max+1)`. Column `shift*M + node` holds `node` delayed
 * by `shift` samples.
 *
 * # Safety
 * `states` must be a live handle; `out` must be writable.
 */
ShiftrcStatus shiftrc_build_shifted(const ShiftrcMatrix *states,
                                    size_t tau_max,
                                    ShiftrcMatrix **out);

/**
 * # Safety
 * `m` must be a live handle; `out` must be writable.
 */
ShiftrcStatus shiftrc_qr_new(const ShiftrcMatrix *m, ShiftrcQr **out);

/**
 * # Safety
 * `qr` must be null or a handle from this library not yet freed.
 */
void shiftrc_qr_free(ShiftrcQr *qr);

/**
 * Number of columns `M` of the factored matrix.
 *
 * # Safety
 * `qr` must be a live handle; `out` writable.
 */
ShiftrcStatus shiftrc_qr_ncols(const ShiftrcQr *qr, size_t *out);

/**
 * Pivot order: `perm[k]` is the source column at position `k`.
 *
 * # Safety
 * `qr` must be a live handle and `buf` writable for `len` elements.
 */
ShiftrcStatus shiftrc_qr_perm(const ShiftrcQr *qr, size_t *buf, size_t len);

/**
 * `|R_kk|` in pivot order.
 *
 * # Safety
 * `qr` must be a live handle and `buf` writable for `len` doubles.
 */
ShiftrcStatus shiftrc_qr_r_diag(const ShiftrcQr *qr, double *buf, size_t len);

/**
 * Count of `|R_kk| > tol_rel·|R_00|`.
 *
 * # Safety
 * `qr` must be a live handle; `out` writable.
 */
ShiftrcStatus shiftrc_qr_rank(const ShiftrcQr *qr, double tol_rel, size_t *out);

/**
 * Indices of the `m_red` columns ranked first by pivoted QR.
 *
 * # Safety
 * `m` must be a live handle and `buf` writable for `len` elements.
 */
ShiftrcStatus shiftrc_select_rrqr(const ShiftrcMatrix *m, size_t m_red, size_t *buf, size_t len);

/**
 * `m_red` distinct column indices drawn uniformly with the given seed.
 *
 * # Safety
 * `m` must be a live handle and `buf` writable for `len` elements.
 */
ShiftrcStatus shiftrc_select_random(const ShiftrcMatrix *m,
                                    size_t m_red,
                                    uint64_t seed,
                                    size_t *buf,
                                    size_t len);

/**
 * Ridge readout for `x` (`T×K`) and target `g` (length `T`). Writes `K`
 * weights, or `K+1` with the bias last when `bias` is nonzero.
 *
 * # Safety
 * `x` must be a live handle, `g` readable for `g_len` doubles and `w`
 * writable for `w_len` doubles.
 */
ShiftrcStatus shiftrc_ridge_fit(const ShiftrcMatrix *x,
                                const double *g,
                                size_t g_len,
                                double lambda,
                                bool bias,
                                double *w,
                                size_t w_len);

/**
 * # Safety
 * `g` and `h` must be readable for `n` doubles; `out` writable.
 */
ShiftrcStatus shiftrc_nrmse(const double *g,
                            const double *h,
                            size_t n,
                            ShiftrcNrmseMode mode,
                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHIFTRC_H */
