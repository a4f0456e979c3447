#ifndef PORLAB_H
#define PORLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum PorlabStatus {
  PORLAB_STATUS_OK = 0,
  PORLAB_STATUS_NULL_POINTER = 1,
  PORLAB_STATUS_INVALID_UTF8 = 2,
  PORLAB_STATUS_PARSE = 3,
  PORLAB_STATUS_DOMAIN = 4,
  PORLAB_STATUS_UNRESOLVED = 5,
  PORLAB_STATUS_DEPTH = 6,
  PORLAB_STATUS_BUDGET = 7,
  PORLAB_STATUS_CONFIG = 8,
  PORLAB_STATUS_IO = 9,
  PORLAB_STATUS_JSON = 10,
  PORLAB_STATUS_OUT_OF_RANGE = 11,
  PORLAB_STATUS_PANIC = 12,
} PorlabStatus;

// Arithmetic operator for [`porlab_decimal_arith`].
typedef enum PorlabOp {
  PORLAB_OP_ADD = 0,
  PORLAB_OP_SUB = 1,
  PORLAB_OP_MUL = 2,
} PorlabOp;

// Three-valued membership answer.
typedef enum PorlabVerdict {
  PORLAB_VERDICT_OUT = -1,
  PORLAB_VERDICT_UNKNOWN = 0,
  PORLAB_VERDICT_IN = 1,
} PorlabVerdict;

// Exact nonnegative decimal.
typedef struct PorlabDecimal PorlabDecimal;

// Control sequence built from a run configuration.
typedef struct PorlabSequence PorlabSequence;

// Closed digit-density set built from a run configuration.
typedef struct PorlabSet PorlabSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *porlab_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from a `char **` out-parameter of this library.
void porlab_string_free(char *s);

// # Safety
// `literal` must be a nul-terminated string; `out` must be writable.
enum PorlabStatus porlab_decimal_parse(const char *literal, struct PorlabDecimal **out);

// # Safety
// `d` must be a live handle or null.
void porlab_decimal_free(struct PorlabDecimal *d);

// Canonical decimal text of `d`.
//
// # Safety
// `d` must be a live handle; `out` must be writable.
enum PorlabStatus porlab_decimal_to_string(const struct PorlabDecimal *d, char **out);

// Sign of `a − b` as -1, 0 or 1.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum PorlabStatus porlab_decimal_cmp(const struct PorlabDecimal *a,
                                     const struct PorlabDecimal *b,
                                     int32_t *out);

// `a op b` as a new handle. Subtraction below zero is a domain error.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum PorlabStatus porlab_decimal_arith(enum PorlabOp op,
                                       const struct PorlabDecimal *a,
                                       const struct PorlabDecimal *b,
                                       struct PorlabDecimal **out);

// Builds `count` terms of the control sequence described by a TOML run
// configuration (`[f]` and `[sequence]` tables).
//
// # Safety
// `config_toml` must be a nul-terminated string; `out` must be writable.
enum PorlabStatus porlab_sequence_build(const char *config_toml,
                                        size_t count,
                                        struct PorlabSequence **out);

// # Safety
// `s` must be a live handle or null.
void porlab_sequence_free(struct PorlabSequence *s);

// Number of terms, or 0 for null.
//
// # Safety
// `s` must be a live handle or null.
size_t porlab_sequence_len(const struct PorlabSequence *s);

// Term `x_n`, 1-based, as a new decimal handle.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum PorlabStatus porlab_sequence_term(const struct PorlabSequence *s,
                                       size_t n,
                                       struct PorlabDecimal **out);

// Builds the set of the `[expansion]` and `[set]` tables of a TOML run
// configuration.
//
// # Safety
// `config_toml` must be a nul-terminated string; `out` must be writable.
enum PorlabStatus porlab_set_build(const char *config_toml, struct PorlabSet **out);

// # Safety
// `s` must be a live handle or null.
void porlab_set_free(struct PorlabSet *s);

// Membership of `x` checked through range `depth`.
//
// # Safety
// `s` and `x` must be live handles; `out` must be writable.
enum PorlabStatus porlab_set_membership(const struct PorlabSet *s,
                                        const struct PorlabDecimal *x,
                                        size_t depth,
                                        enum PorlabVerdict *out);

// A point of the set that is In through range `depth`. `strategy` is
// `"max-C"`, `"min-C"` or `"seeded-random"`.
//
// # Safety
// `s` must be a live handle; `strategy` a nul-terminated string; `out`
// writable.
enum PorlabStatus porlab_set_witness(const struct PorlabSet *s,
                                     size_t depth,
                                     const char *strategy,
                                     uint64_t seed,
                                     struct PorlabDecimal **out);

// Runs a pipeline command (`"sequence"`, `"construct"`, `"verify"` or
// `"metrics"`) on a TOML configuration. On success `report_json` receives
// the JSON report and `exit_code` the command-line exit code (0 pass,
// 2 falsified, 3 unresolved).
//
// # Safety
// String arguments must be nul-terminated; out-parameters writable.
enum PorlabStatus porlab_run(const char *command,
                             const char *config_toml,
                             char **report_json,
                             int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PORLAB_H */
