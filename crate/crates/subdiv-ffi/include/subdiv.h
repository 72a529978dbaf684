#ifndef SUBDIV_H
#define SUBDIV_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define SD_OK 0

#define SD_ERR_NULL -1

#define SD_ERR_INVALID -2

#define SD_ERR_OUT_OF_RANGE -3

#define SD_ERR_PRECONDITION -4

#define SD_ERR_INTERNAL -5

#define SD_ERR_PANIC -255

#define SD_VERDICT_ZERO 0

#define SD_VERDICT_NONZERO 1

#define SD_VERDICT_UNKNOWN 2

/**
 * Boundary argument meaning "subtraction below 1 is not a move".
 */
#define SD_BOUNDARY_DISALLOWED -1

/**
 * Opaque table of SG values for indices 1..=n_max.
 */
typedef struct SdTable SdTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the table of G_{a,b} for 1..=n_max with the default boundary.
 *
 * # Safety
 * `out` must be valid for writing one pointer.
 */
int32_t sd_table_build(uint64_t a, uint64_t b, uint64_t n_max, struct SdTable **out);

/**
 * Builds a table with an explicit boundary and fixed leading values.
 *
 * `boundary` is the phantom child value 0..=2, or `SD_BOUNDARY_DISALLOWED`.
 * `prefix[i]` fixes SG(i + 1); `prefix` may be null when `prefix_len` is 0.
 *
 * # Safety
 * `prefix` must point to `prefix_len` readable bytes and `out` must be valid
 * for writing one pointer.
 */
int32_t sd_table_build_with(uint64_t a,
                            uint64_t b,
                            int32_t boundary,
                            const uint8_t *prefix,
                            size_t prefix_len,
                            uint64_t n_max,
                            struct SdTable **out);

/**
 * Releases a table. Null is ignored.
 *
 * # Safety
 * `table` must come from `sd_table_build*` and not be freed twice.
 */
void sd_table_free(struct SdTable *table);

/**
 * # Safety
 * `table` must be a live table and `out` valid for writing.
 */
int32_t sd_table_len(const struct SdTable *table, uint64_t *out);

/**
 * SG(n) for 1 <= n <= n_max.
 *
 * # Safety
 * `table` must be a live table and `out` valid for writing.
 */
int32_t sd_table_get(const struct SdTable *table, uint64_t n, uint8_t *out);

/**
 * Copies up to `cap` values, SG(1) first, and stores the count in `written`.
 *
 * # Safety
 * `buf` must be writable for `cap` bytes; `table` live; `written` writable.
 */
int32_t sd_table_values(const struct SdTable *table, uint8_t *buf, size_t cap, size_t *written);

/**
 * Zero test for SG_{1,2d}(n) from the base-2d digits of n.
 *
 * # Safety
 * `verdict` must be valid for writing.
 */
int32_t sd_characterize_1_2d(uint64_t n, uint64_t d, int32_t *verdict);

/**
 * Verdict from n mod 4d alone; may be `SD_VERDICT_UNKNOWN`.
 *
 * # Safety
 * `verdict` must be valid for writing.
 */
int32_t sd_residue_rule(uint64_t n, uint64_t d, int32_t *verdict);

/**
 * Largest divisor of a coprime to b.
 *
 * # Safety
 * `out` must be valid for writing.
 */
int32_t sd_coprime_part(uint64_t a, uint64_t b, uint64_t *out);

/**
 * Value of SG_{1,2d}(n) reached through the reduction rules, and the number
 * of rules applied.
 *
 * # Safety
 * `value` and `steps` must be valid for writing.
 */
int32_t sd_reduce(uint64_t n, uint64_t d, uint8_t *value, uint32_t *steps);

/**
 * Runs the structural checks on the triple digraph with escape caps for
 * d = 1..=max_d. `passed` receives 1 or 0.
 *
 * # Safety
 * `passed` must be valid for writing.
 */
int32_t sd_blockgraph_verify(uint64_t max_d, int32_t *passed);

/**
 * Static description of a status code.
 */
const char *sd_error_message(int32_t code);

/**
 * Copies the calling thread's last error detail into `buf` (nul-terminated,
 * truncated to `cap`). Returns the full length without the nul, or 0 when
 * there is none.
 *
 * # Safety
 * `buf` must be writable for `cap` bytes or null with `cap` 0.
 */
size_t sd_last_error(char *buf, size_t cap);

/**
 * Library version, nul-terminated.
 */
const char *sd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBDIV_H */
