/* C interface to the hahnlab exact Hahn-series kernel. */

#ifndef HAHNLAB_H
#define HAHNLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of an ffi call; nonzero values mirror the CLI exit codes.
 */
typedef enum HlStatus {
  /**
   * Success.
   */
  HL_STATUS_OK = 0,
  /**
   * Certified unsolvable; the JSON carries the certificate.
   */
  HL_STATUS_UNSAT = 1,
  /**
   * Unknown or precision exhausted.
   */
  HL_STATUS_UNKNOWN = 2,
  /**
   * Parse or configuration error.
   */
  HL_STATUS_INVALID = 3,
  /**
   * Unsupported field or value-group combination.
   */
  HL_STATUS_UNSUPPORTED = 4,
  /**
   * A required pointer argument was null or not valid UTF-8.
   */
  HL_STATUS_BAD_POINTER = 5,
} HlStatus;

/**
 * Opaque session handle.
 */
typedef struct HlSession HlSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *hl_version(void);

/**
 * Most recent error message on this thread; do not free. Empty when the
 * last call succeeded.
 */
const char *hl_last_error(void);

/**
 * Creates a session. `field` is "Q" or "Qx"; `group` is "Z", "Q", "Z/d" or
 * "Z^nlex"; `cmap` uses the CLI literal syntax ("0", "1 -> x",
 * "e1 -> 1, e2 -> 1/x"); `bound` is a group-element literal or null for the
 * default. Returns null on error (see `hl_last_error`).
 *
 * # Safety
 * All non-null pointers must reference NUL-terminated UTF-8 strings valid
 * for the duration of the call.
 */
struct HlSession *hl_session_new(const char *field,
                                 const char *group,
                                 const char *cmap,
                                 const char *bound);

/**
 * Releases a session created by `hl_session_new`.
 *
 * # Safety
 * `session` must be a pointer returned by `hl_session_new` that has not
 * already been freed; null is ignored.
 */
void hl_session_free(struct HlSession *session);

/**
 * Runs one command against the session and stores a newly allocated JSON
 * string in `*json_out` (free with `hl_string_free`). Commands and status
 * codes mirror the CLI: eval, derive, dagger, valuation, residue, constant?,
 * solve-linear (arg1 = operator, arg2 = rhs), solve-dagger (arg1 = u,
 * `extra` = search bound), lift (arg1 = polynomial, `bound` = target),
 * nth-root (arg1 = series, `extra` = n, `bound` = target), kernel, classify,
 * purity (arg1 = generators), examples (arg1 = "run", arg2 = optional id).
 *
 * # Safety
 * `session` must come from `hl_session_new`; string pointers must be valid
 * NUL-terminated UTF-8 or null where documented; `json_out` must be null or
 * point to writable memory for one pointer.
 */
enum HlStatus hl_run(const struct HlSession *session,
                     const char *command,
                     const char *arg1,
                     const char *arg2,
                     const char *bound,
                     long long extra,
                     char **json_out);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be a pointer previously stored by `hl_run` (or null).
 */
void hl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HAHNLAB_H */
