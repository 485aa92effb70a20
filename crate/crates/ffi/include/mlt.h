/* C interface to the mlt reversible tokenizer. */

#ifndef MLT_H
#define MLT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call. Zero is success.
 */
typedef enum {
  MLT_STATUS_OK = 0,
  MLT_STATUS_NULL_POINTER = 1,
  MLT_STATUS_INVALID_ARGUMENT = 2,
  MLT_STATUS_NOT_PRIME = 3,
  MLT_STATUS_OVERFLOW = 4,
  MLT_STATUS_MODULUS_MISMATCH = 5,
  MLT_STATUS_NOT_INVERTIBLE = 6,
  MLT_STATUS_ID_OUT_OF_RANGE = 7,
  MLT_STATUS_DIGIT_OUT_OF_RANGE = 8,
  MLT_STATUS_DIMENSION_MISMATCH = 9,
  MLT_STATUS_SINGULAR_MATRIX = 10,
  MLT_STATUS_GENERATION_FAILED = 11,
  MLT_STATUS_FORMAT = 12,
  MLT_STATUS_INTEGRITY = 13,
  MLT_STATUS_VERSION = 14,
  MLT_STATUS_CAPACITY = 15,
  MLT_STATUS_UNKNOWN_VALUE = 16,
  MLT_STATUS_MISSING_COLUMN = 17,
  MLT_STATUS_ID_ABOVE_VOCAB = 18,
  MLT_STATUS_IO = 19,
  MLT_STATUS_UTF8 = 20,
  MLT_STATUS_PANIC = 21,
} MltStatus;

/**
 * Opaque tokenizer handle.
 */
typedef struct MltTokenizer MltTokenizer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fits a tokenizer for `vocab_size` ids. Exactly one of `fix_p` and
 * `fix_n` must be nonzero.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
MltStatus mlt_fit(uint64_t vocab_size,
                  uint64_t fix_p,
                  uint32_t fix_n,
                  uint64_t seed,
                  MltTokenizer **out);

/**
 * Loads and validates a config file.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
MltStatus mlt_load(const char *path, MltTokenizer **out);

/**
 * Parses and validates a config document held in memory.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
MltStatus mlt_from_json(const char *json, MltTokenizer **out);

/**
 * Writes the config document to `path`.
 *
 * # Safety
 * `tok` must be a live handle; `path` a nul-terminated string.
 */
MltStatus mlt_save(const MltTokenizer *tok, const char *path);

/**
 * The config document as a newly allocated string, or null if `tok` is
 * null. Release it with [`mlt_string_free`].
 *
 * # Safety
 * `tok` must be a live handle or null.
 */
char *mlt_to_json(const MltTokenizer *tok);

/**
 * # Safety
 * `s` must come from [`mlt_to_json`] and not have been freed already.
 */
void mlt_string_free(char *s);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `tok` must come from this library and not have been freed already.
 */
void mlt_free(MltTokenizer *tok);

/**
 * Field modulus `p`, or 0 for a null handle.
 *
 * # Safety
 * `tok` must be a live handle or null.
 */
uint64_t mlt_prime(const MltTokenizer *tok);

/**
 * Token length `n`, or 0 for a null handle.
 *
 * # Safety
 * `tok` must be a live handle or null.
 */
size_t mlt_digits(const MltTokenizer *tok);

/**
 * # Safety
 * `tok` must be a live handle or null.
 */
uint64_t mlt_vocab_size(const MltTokenizer *tok);

/**
 * # Safety
 * `tok` must be a live handle or null.
 */
uint64_t mlt_seed(const MltTokenizer *tok);

/**
 * Writes the `n` token digits of `id` to `out`.
 *
 * # Safety
 * `tok` must be a live handle; `out` must hold `out_len` elements.
 */
MltStatus mlt_encode(const MltTokenizer *tok, uint64_t id, uint32_t *out, size_t out_len);

/**
 * Decodes `len` token digits into `*out_id`.
 *
 * # Safety
 * `tok` must be a live handle; `digits` must hold `len` elements.
 */
MltStatus mlt_decode(const MltTokenizer *tok, const uint32_t *digits, size_t len, uint64_t *out_id);

/**
 * Encodes `count` ids into `out`, row-major, `count * n` digits. On an
 * element error the failing index is written to `err_index` if non-null.
 *
 * # Safety
 * `ids` must hold `count` elements, `out` must hold `out_len`.
 */
MltStatus mlt_encode_batch(const MltTokenizer *tok,
                           const uint64_t *ids,
                           size_t count,
                           uint32_t *out,
                           size_t out_len,
                           size_t *err_index);

/**
 * Decodes `count` token vectors stored row-major in `digits`
 * (`digits_len` must be `count * n`) into `out_ids`.
 *
 * # Safety
 * `digits` must hold `digits_len` elements, `out_ids` must hold `count`.
 */
MltStatus mlt_decode_batch(const MltTokenizer *tok,
                           const uint32_t *digits,
                           size_t digits_len,
                           uint64_t *out_ids,
                           size_t count,
                           size_t *err_index);

/**
 * Writes `digit / p` for each of the `len` digits to `out`.
 *
 * # Safety
 * `digits` and `out` must each hold `len` elements.
 */
MltStatus mlt_normalize(const MltTokenizer *tok, const uint32_t *digits, size_t len, double *out);

/**
 * Per-head class targets of `class_id`; same digits as [`mlt_encode`].
 *
 * # Safety
 * See [`mlt_encode`].
 */
MltStatus mlt_factorize_label(const MltTokenizer *tok,
                              uint64_t class_id,
                              uint32_t *targets,
                              size_t len);

/**
 * Class id from per-head predictions. May exceed the vocabulary size.
 *
 * # Safety
 * See [`mlt_decode`].
 */
MltStatus mlt_reconstruct_label(const MltTokenizer *tok,
                                const uint32_t *predicted,
                                size_t len,
                                uint64_t *out_class);

/**
 * Message of the last failing call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *mlt_last_error(void);

/**
 * Static name of a status code, e.g. `"ID_OUT_OF_RANGE"`.
 */
const char *mlt_status_name(MltStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MLT_H */
