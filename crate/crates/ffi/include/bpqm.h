#ifndef BPQM_H
#define BPQM_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of every fallible call.
 */
typedef enum BpqmStatus {
  BPQM_STATUS_OK = 0,
  BPQM_STATUS_NULL_POINTER = 1,
  BPQM_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A size guard was exceeded (code too long, too many codewords, ...).
   */
  BPQM_STATUS_GUARD = 3,
  BPQM_STATUS_NOT_TREE = 4,
  BPQM_STATUS_RANK_DEFICIENT = 5,
  BPQM_STATUS_UNKNOWN_CODE = 6,
  BPQM_STATUS_BIT_OUT_OF_RANGE = 7,
  BPQM_STATUS_IO = 8,
  /**
   * An internal panic was caught.
   */
  BPQM_STATUS_PANIC = 9,
} BpqmStatus;

/**
 * Opaque handle to a binary linear code.
 */
typedef struct BpqmCode BpqmCode;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Create one of the built-in codes: `code5`, `code6`, `code8`, `code17`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a writable pointer.
 */
enum BpqmStatus bpqm_code_builtin(const char *name, struct BpqmCode **out);

/**
 * Load a code from a file path or a `builtin:<name>` source string.
 *
 * # Safety
 * `source` must be a NUL-terminated string and `out` a writable pointer.
 */
enum BpqmStatus bpqm_code_load(const char *source, struct BpqmCode **out);

/**
 * Create a code from a full-rank row-major parity-check matrix of 0/1 bytes.
 *
 * # Safety
 * `h` must point to `rows * n` readable bytes and `out` must be writable.
 */
enum BpqmStatus bpqm_code_from_parity_check(const uint8_t *h,
                                            size_t rows,
                                            size_t n,
                                            struct BpqmCode **out);

/**
 * Release a code handle. Passing null is a no-op.
 *
 * # Safety
 * `code` must be null or a handle returned by a `bpqm_code_*` constructor
 * that has not been freed yet.
 */
void bpqm_code_free(struct BpqmCode *code);

/**
 * Block length n, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t bpqm_code_n(const struct BpqmCode *code);

/**
 * Dimension k, or 0 for a null handle.
 *
 * # Safety
 * `code` must be null or a live handle.
 */
size_t bpqm_code_k(const struct BpqmCode *code);

/**
 * BPQM success probability for bit `r` (1-based), averaged over codewords.
 *
 * # Safety
 * `code` must be a live handle, `thetas` must point to `len` doubles and
 * `out` must be writable.
 */
enum BpqmStatus bpqm_bit_success(const struct BpqmCode *code,
                                 const double *thetas,
                                 size_t len,
                                 size_t r,
                                 double *out);

/**
 * BPQM block success with sequential decoding in `order` (1-based
 * positions); pass `order_len = 0` for the default information set.
 *
 * # Safety
 * As for [`bpqm_bit_success`]; `order` must point to `order_len` values.
 */
enum BpqmStatus bpqm_block_success(const struct BpqmCode *code,
                                   const double *thetas,
                                   size_t len,
                                   const size_t *order,
                                   size_t order_len,
                                   double *out);

/**
 * Success of discretized message-passing decoding of bit `r` on codeword
 * `x` (`n` bytes of 0/1) with a `bits`-qubit angle register; `bits = 0`
 * disables quantization.
 *
 * # Safety
 * As for [`bpqm_bit_success`]; `x` must point to `len` bytes.
 */
enum BpqmStatus bpqm_mp_bit_success(const struct BpqmCode *code,
                                    const double *thetas,
                                    const uint8_t *x,
                                    size_t len,
                                    size_t r,
                                    uint32_t bits,
                                    double *out);

/**
 * Optimal (Helstrom) success probability for bit `r`.
 *
 * # Safety
 * As for [`bpqm_bit_success`].
 */
enum BpqmStatus bpqm_helstrom_bit_success(const struct BpqmCode *code,
                                          const double *thetas,
                                          size_t len,
                                          size_t r,
                                          double *out);

/**
 * Optimal (pretty-good-measurement) block success probability.
 *
 * # Safety
 * As for [`bpqm_bit_success`].
 */
enum BpqmStatus bpqm_pgm_block_success(const struct BpqmCode *code,
                                       const double *thetas,
                                       size_t len,
                                       double *out);

/**
 * Success of measuring every output in the ± basis followed by classical
 * MAP decoding: of bit `r` when `r > 0`, of the whole codeword when `r = 0`.
 *
 * # Safety
 * As for [`bpqm_bit_success`].
 */
enum BpqmStatus bpqm_classical_map_success(const struct BpqmCode *code,
                                           const double *thetas,
                                           size_t len,
                                           size_t r,
                                           double *out);

/**
 * Success for bit `r` of BPQM on the depth-`h` computation tree with ENU
 * cloning, every channel at angle `theta`.
 *
 * # Safety
 * `code` must be a live handle and `out` writable.
 */
enum BpqmStatus bpqm_nontree_bit_success(const struct BpqmCode *code,
                                         double theta,
                                         size_t r,
                                         size_t h,
                                         double *out);

/**
 * Message of the last failure on this thread, or null if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *bpqm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *bpqm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BPQM_H */
