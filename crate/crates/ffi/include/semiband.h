#ifndef SEMIBAND_H
#define SEMIBAND_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum SbStatus {
  SB_STATUS_OK = 0,
  SB_STATUS_NULL_POINTER = 1,
  SB_STATUS_INVALID_UTF8 = 2,
  // Malformed input or a violated precondition.
  SB_STATUS_INPUT = 3,
  SB_STATUS_BUDGET = 4,
  SB_STATUS_INTERNAL = 5,
  // The self-test ran and at least one criterion failed.
  SB_STATUS_SELFTEST_FAILED = 6,
  SB_STATUS_PANIC = 7,
} SbStatus;

// Opaque handle to a parsed operator.
typedef struct SbOperator SbOperator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses an operator from its JSON description.
//
// # Safety
// `json` must be a valid nul-terminated string and `out` a valid pointer.
enum SbStatus sb_operator_from_json(const char *json, struct SbOperator **out);

// Releases an operator; null is ignored.
//
// # Safety
// `op` must come from [`sb_operator_from_json`] and not be used afterwards.
void sb_operator_free(struct SbOperator *op);

// Number of atoms.
//
// # Safety
// `op` must be a live operator handle and `out` a valid pointer.
enum SbStatus sb_operator_dim(const struct SbOperator *op, size_t *out);

// # Safety
// `op` must be a live operator handle and `out` a valid pointer.
enum SbStatus sb_operator_is_sbp(const struct SbOperator *op, bool *out);

// # Safety
// `op` must be a live operator handle and `out` a valid pointer.
enum SbStatus sb_operator_is_scp(const struct SbOperator *op, bool *out);

// # Safety
// `op` must be a live operator handle and `out` a valid pointer.
enum SbStatus sb_operator_is_projection(const struct SbOperator *op, bool *out);

// The full analysis report as JSON, identical to the `analyze` command.
//
// # Safety
// `op` must be a live operator handle and `out_json` a valid pointer.
enum SbStatus sb_operator_analyze_json(const struct SbOperator *op,
                                       size_t max_atoms,
                                       char **out_json);

// Interval report for a finite-rank operator given as JSON.
//
// # Safety
// `json` must be a valid nul-terminated string and `out_json` a valid
// pointer.
enum SbStatus sb_interval_analyze_json(const char *json, char **out_json);

// Probe report for exponent `p` (e.g. `"1"`, `"3/2"`) over the
// unweighted spaces with `dim_lo..=dim_hi` atoms.
//
// # Safety
// `p` must be a valid nul-terminated string and `out_json` a valid pointer.
enum SbStatus sb_probe_json(const char *p,
                            size_t dim_lo,
                            size_t dim_hi,
                            size_t budget,
                            uint64_t seed,
                            char **out_json);

// Runs the acceptance campaign. The summary is written even when a
// criterion fails, in which case the status is
// [`SbStatus::SelftestFailed`].
//
// # Safety
// `out_summary` must be a valid pointer.
enum SbStatus sb_selftest(uint64_t seed, char **out_summary);

// Releases a string returned by this library; null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void sb_string_free(char *s);

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library on the same thread.
const char *sb_last_error_message(void);

// Library version as a static string.
const char *sb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMIBAND_H */
