#ifndef JDLP_H
#define JDLP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a C API call. Error values match the CLI exit codes.
 */
typedef enum JdlpStatus {
  JDLP_STATUS_OK = 0,
  JDLP_STATUS_USAGE = 2,
  JDLP_STATUS_INPUT = 3,
  JDLP_STATUS_IO = 4,
  JDLP_STATUS_SOLVER = 5,
  JDLP_STATUS_ANALYSIS = 6,
  JDLP_STATUS_NULL_POINTER = 7,
  JDLP_STATUS_PANIC = 8,
} JdlpStatus;

/**
 * Finite-state channel.
 */
typedef struct JdlpChannel JdlpChannel;

/**
 * Binary parity-check code.
 */
typedef struct JdlpCode JdlpCode;

/**
 * Joint LP decoder bound to one channel and code.
 */
typedef struct JdlpDecoder JdlpDecoder;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty if none). The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *jdlp_last_error_message(void);

/**
 * Creates a channel from a built-in name (`dic`, `pdic`, optionally with a
 * `-uniform` suffix) or a channel file path.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum JdlpStatus jdlp_channel_from_spec(const char *spec, struct JdlpChannel **out);

/**
 * Parses a channel description given as text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum JdlpStatus jdlp_channel_parse(const char *text, struct JdlpChannel **out);

/**
 * # Safety
 * `channel` must come from this library and not be used afterwards.
 */
void jdlp_channel_free(struct JdlpChannel *channel);

/**
 * Noise standard deviation for an SNR (output power over noise variance) in dB.
 *
 * # Safety
 * `channel` must be a live handle; `sigma` must be writable.
 */
enum JdlpStatus jdlp_snr_db_to_sigma(const struct JdlpChannel *channel,
                                     double snr_db,
                                     double *sigma);

/**
 * Reads a code from alist text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum JdlpStatus jdlp_code_from_alist(const char *text, struct JdlpCode **out);

/**
 * Generates a (dv, dc)-regular code without double edges or 4-cycles.
 *
 * # Safety
 * `out` must be writable.
 */
enum JdlpStatus jdlp_code_generate(size_t n,
                                   size_t dv,
                                   size_t dc,
                                   uint64_t seed,
                                   struct JdlpCode **out);

/**
 * Single parity-check code of length `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum JdlpStatus jdlp_code_single_parity_check(size_t n, struct JdlpCode **out);

/**
 * Block length of a code.
 *
 * # Safety
 * `code` must be a live handle; `n` must be writable.
 */
enum JdlpStatus jdlp_code_length(const struct JdlpCode *code, size_t *n);

/**
 * Serializes a code as alist text. Release the string with
 * [`jdlp_string_free`].
 *
 * # Safety
 * `code` must be a live handle; `out` must be writable.
 */
enum JdlpStatus jdlp_code_to_alist(const struct JdlpCode *code, char **out);

/**
 * # Safety
 * `code` must come from this library and not be used afterwards.
 */
void jdlp_code_free(struct JdlpCode *code);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void jdlp_string_free(char *s);

/**
 * Builds the joint LP decoder for a channel and code. The handles may be
 * freed afterwards.
 *
 * # Safety
 * `channel` and `code` must be live handles; `out` must be writable.
 */
enum JdlpStatus jdlp_decoder_new(const struct JdlpChannel *channel,
                                 const struct JdlpCode *code,
                                 struct JdlpDecoder **out);

/**
 * # Safety
 * `decoder` must come from this library and not be used afterwards.
 */
void jdlp_decoder_free(struct JdlpDecoder *decoder);

/**
 * LP joint decoding of `y` (length `len`, equal to the block length).
 *
 * Writes the bit projection of the optimal flow to `bits` (`len` values),
 * `1` to `is_codeword` for an integral (codeword) output and `0` for a
 * pseudo-codeword, and the optimal cost to `objective`.
 *
 * # Safety
 * `y` and `bits` must hold `len` doubles; the other pointers must be valid.
 */
enum JdlpStatus jdlp_decoder_decode(const struct JdlpDecoder *decoder,
                                    const double *y,
                                    size_t len,
                                    double sigma,
                                    double *bits,
                                    int32_t *is_codeword,
                                    double *objective);

/**
 * Turbo-equalization baseline: `outer_iters` rounds of forward-backward
 * detection and `inner_bp_iters` sum-product iterations, stopping on a
 * valid codeword. Writes hard decisions to `bits` and `1` to `valid` when
 * they satisfy every check.
 *
 * # Safety
 * `y` and `bits` must hold `len` elements; the other pointers must be valid.
 */
enum JdlpStatus jdlp_jimpd_decode(const struct JdlpDecoder *decoder,
                                  const double *y,
                                  size_t len,
                                  double sigma,
                                  size_t outer_iters,
                                  size_t inner_bp_iters,
                                  uint8_t *bits,
                                  int32_t *valid);

/**
 * Gaussian tail probability Q(x).
 */
double jdlp_q_function(double x);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* JDLP_H */
