#ifndef DYNFRAME_H
#define DYNFRAME_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum DfStatus {
  DF_STATUS_OK = 0,
  DF_STATUS_NULL_POINTER = 1,
  DF_STATUS_INVALID_INPUT = 2,
  DF_STATUS_DIMENSION_MISMATCH = 3,
  DF_STATUS_UNSTABLE = 4,
  DF_STATUS_BORDERLINE = 5,
  DF_STATUS_NOT_ADMISSIBLE = 6,
  DF_STATUS_NOT_A_FRAME = 7,
  DF_STATUS_NOT_CONTRACTION = 8,
  DF_STATUS_CERTIFICATE_FAILED = 9,
  DF_STATUS_NUMERICAL = 10,
  DF_STATUS_BUFFER_TOO_SMALL = 11,
  DF_STATUS_PANIC = 12,
} DfStatus;

/**
 * Opaque frame-system handle.
 */
typedef struct DfFrameSystem DfFrameSystem;

/**
 * Opaque operator handle.
 */
typedef struct DfOperator DfOperator;

typedef struct DfComplex {
  double re;
  double im;
} DfComplex;

typedef struct DfAdmissibility {
  double norm;
  double spectral_radius;
  bool is_contraction;
  bool adjoint_strongly_stable;
  bool admits_parseval;
  bool admits_frame;
} DfAdmissibility;

typedef struct DfFrameBounds {
  double lower;
  double upper;
  double parseval_defect;
  double stein_residual;
  bool is_frame;
  bool is_parseval;
} DfFrameBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty if none.
 * The pointer stays valid until the next failing call on the thread.
 */
const char *df_last_error_message(void);

/**
 * Creates a dense `dim × dim` operator from row-major `data`.
 *
 * # Safety
 * `data` must point to `dim * dim` values and `out` must be writable.
 */
enum DfStatus df_operator_dense(const struct DfComplex *data, size_t dim, struct DfOperator **out);

/**
 * Creates a diagonal operator.
 *
 * # Safety
 * `entries` must point to `dim` values and `out` must be writable.
 */
enum DfStatus df_operator_diagonal(const struct DfComplex *entries,
                                   size_t dim,
                                   struct DfOperator **out);

/**
 * Dimension of the operator, `0` for a null handle.
 *
 * # Safety
 * `op` must be null or a live handle.
 */
size_t df_operator_dim(const struct DfOperator *op);

/**
 * # Safety
 * `op` must be null or a handle not yet freed.
 */
void df_operator_free(struct DfOperator *op);

/**
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum DfStatus df_admissibility(const struct DfOperator *op,
                               double tol,
                               struct DfAdmissibility *out);

/**
 * Minimal generator count of a Parseval frame of iterations (0 if none).
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum DfStatus df_parseval_index(const struct DfOperator *op, size_t *out);

/**
 * Certified frame index: minimal generator count of any frame of iterations.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum DfStatus df_frame_index(const struct DfOperator *op, uint64_t seed, size_t *out);

/**
 * Builds a frame system from `count` generators of length `dim(op)`,
 * stored one after another.
 *
 * # Safety
 * `op` must be a live handle, `generators` must hold `count * dim(op)`
 * values and `out` must be writable.
 */
enum DfStatus df_frame_system_new(const struct DfOperator *op,
                                  const struct DfComplex *generators,
                                  size_t count,
                                  struct DfFrameSystem **out);

/**
 * The Parseval frame generated by the defect operator of `op`.
 *
 * # Safety
 * `op` must be a live handle and `out` writable.
 */
enum DfStatus df_parseval_generators(const struct DfOperator *op, struct DfFrameSystem **out);

/**
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t df_frame_system_dim(const struct DfFrameSystem *sys);

/**
 * # Safety
 * `sys` must be null or a live handle.
 */
size_t df_frame_system_generator_count(const struct DfFrameSystem *sys);

/**
 * Copies the generators, one after another, into `buf` of length `len`.
 *
 * # Safety
 * `sys` must be a live handle and `buf` must hold `len` values.
 */
enum DfStatus df_frame_system_generators(const struct DfFrameSystem *sys,
                                         struct DfComplex *buf,
                                         size_t len);

/**
 * Copies the system's operator, row-major, into `buf` of length `len`.
 *
 * # Safety
 * `sys` must be a live handle and `buf` must hold `len` values.
 */
enum DfStatus df_frame_system_operator(const struct DfFrameSystem *sys,
                                       struct DfComplex *buf,
                                       size_t len);

/**
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum DfStatus df_frame_bounds(const struct DfFrameSystem *sys, struct DfFrameBounds *out);

/**
 * Canonical tightening: a new system whose operator is
 * `S^{-1/2} T S^{1/2}` and whose generators form a Parseval frame.
 *
 * # Safety
 * `sys` must be a live handle and `out` writable.
 */
enum DfStatus df_tighten(const struct DfFrameSystem *sys, struct DfFrameSystem **out);

/**
 * # Safety
 * `sys` must be null or a handle not yet freed.
 */
void df_frame_system_free(struct DfFrameSystem *sys);

/**
 * Taylor coefficients `0..=m` of the Blaschke product with the given zeros.
 *
 * # Safety
 * `zeros` must hold `count` values and `out` must hold `m + 1` values.
 */
enum DfStatus df_blaschke_coeffs(const struct DfComplex *zeros,
                                 size_t count,
                                 size_t m,
                                 struct DfComplex *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DYNFRAME_H */
