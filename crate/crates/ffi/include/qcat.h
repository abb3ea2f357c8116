#ifndef QCAT_H
#define QCAT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Outcome of a call. The first three double as verdicts.
typedef enum QcatStatus {
  QCAT_STATUS_OK = 0,
  QCAT_STATUS_FAIL = 1,
  QCAT_STATUS_INAPPLICABLE = 2,
  QCAT_STATUS_SCHEMA = 3,
  QCAT_STATUS_SIZE_CAP = 4,
  QCAT_STATUS_NO_STABILIZATION = 5,
  QCAT_STATUS_NULL_ARGUMENT = 6,
  QCAT_STATUS_PANIC = 7,
} QcatStatus;

// The algebras of a monad together with the comparison to Eilenberg-Moore.
typedef struct QcatAlgebras QcatAlgebras;

// A validated monad on a finite category.
typedef struct QcatMonad QcatMonad;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null. Valid until the next
// failing call on the same thread.
const char *qcat_last_error(void);

// Library version as a static string.
const char *qcat_version(void);

// # Safety
// `s` must come from this library and not have been freed.
void qcat_string_free(char *s);

// Parses a monad from its JSON description. Category references resolve
// against the bundled examples.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum QcatStatus qcat_monad_from_json(const char *json, struct QcatMonad **out);

// # Safety
// `m` must come from [`qcat_monad_from_json`] and not have been freed.
void qcat_monad_free(struct QcatMonad *m);

// Number of Eilenberg-Moore algebras.
//
// # Safety
// Pointers must be valid.
enum QcatStatus qcat_monad_em_count(const struct QcatMonad *m, size_t *out);

// Runs the tower with cells up to `width` and simplices up to `degree`.
// Returns `QCAT_STATUS_NO_STABILIZATION` (with the handle still written) when
// the last two width classes changed something.
//
// # Safety
// Pointers must be valid.
enum QcatStatus qcat_algebras_evaluate(const struct QcatMonad *m,
                                       size_t width,
                                       size_t degree,
                                       struct QcatAlgebras **out);

// # Safety
// `a` must come from [`qcat_algebras_evaluate`] and not have been freed.
void qcat_algebras_free(struct QcatAlgebras *a);

// Number of algebra simplices of a degree.
//
// # Safety
// Pointers must be valid.
enum QcatStatus qcat_algebras_count(const struct QcatAlgebras *a, size_t degree, size_t *out);

// Whether the comparison with the Eilenberg-Moore nerve is an isomorphism.
//
// # Safety
// Pointers must be valid.
enum QcatStatus qcat_algebras_em_iso(const struct QcatAlgebras *a, bool *out);

// The JSON report of a run; free with [`qcat_string_free`].
//
// # Safety
// Pointers must be valid.
enum QcatStatus qcat_algebras_report_json(const struct QcatAlgebras *a, char **out);

// Classifies a level sequence as JSON; malformed sequences give
// `QCAT_STATUS_SCHEMA` with the offending position in the error.
//
// # Safety
// `levels` must point to `len` bytes and `out` be writable.
enum QcatStatus qcat_squiggle_classify(size_t dim, const uint8_t *levels, size_t len, char **out);

// Runs the creation suite for a diagram shape (a bundled category name,
// `empty` or `delta1`) and writes the JSON report. The status is the verdict.
//
// # Safety
// Pointers must be valid; `shape` NUL-terminated.
enum QcatStatus qcat_verify_creation(const struct QcatMonad *m,
                                     const char *shape,
                                     size_t width,
                                     char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCAT_H */
