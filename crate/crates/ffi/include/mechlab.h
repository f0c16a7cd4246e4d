#ifndef MECHLAB_H
#define MECHLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum MechlabStatus {
  MECHLAB_STATUS_OK = 0,
  MECHLAB_STATUS_NULL_POINTER = 1,
  MECHLAB_STATUS_INVALID_UTF8 = 2,
  // Malformed or invalid instance, unknown name, bad parameter.
  MECHLAB_STATUS_INVALID_INPUT = 3,
  // The instance exceeds a size guard.
  MECHLAB_STATUS_SIZE_GUARD = 4,
  // The mechanism does not apply to the instance.
  MECHLAB_STATUS_INAPPLICABLE = 5,
  // A panic was caught at the boundary.
  MECHLAB_STATUS_INTERNAL = 6,
} MechlabStatus;

// Opaque instance handle.
typedef struct MechlabInstance MechlabInstance;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next call on the same thread.
const char *mechlab_last_error(void);

// Library version as a static string.
const char *mechlab_version(void);

// Parses an instance document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum MechlabStatus mechlab_instance_from_json(const char *json, struct MechlabInstance **out);

// Loads a named catalog instance such as "figure1".
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable.
enum MechlabStatus mechlab_instance_from_catalog(const char *name, struct MechlabInstance **out);

// # Safety
// `instance` must come from this library and not be used afterwards.
void mechlab_instance_free(struct MechlabInstance *instance);

// # Safety
// `instance` must be a live handle and `out` writable.
enum MechlabStatus mechlab_instance_item_count(const struct MechlabInstance *instance, size_t *out);

// The instance as a JSON document in the file format.
//
// # Safety
// `instance` must be a live handle and `out` writable.
enum MechlabStatus mechlab_instance_to_json(const struct MechlabInstance *instance, char **out);

// Exact optimum as `{"packed": [...], "value": "p/q", "size": "p/q"}`.
//
// # Safety
// `instance` must be a live handle and `out` writable.
enum MechlabStatus mechlab_solve(const struct MechlabInstance *instance, char **out);

// Outcome distribution of a mechanism such as "greedy" or
// "fit_two:987/1597", as `{"branches": [{"probability", "outcome", "label"}]}`.
//
// # Safety
// `instance` must be a live handle, `mechanism` a NUL-terminated string
// and `out` writable.
enum MechlabStatus mechlab_run(const struct MechlabInstance *instance,
                               const char *mechanism,
                               char **out);

// Strategyproofness and ratio audit. `mode` is "full_subsets" or
// "single_item_closure"; `semantics` is "universal" or "expectation".
// Problems met during the audit are reported in the document's `error`
// field, not through the status.
//
// # Safety
// `instance` must be a live handle, the strings NUL-terminated and `out`
// writable.
enum MechlabStatus mechlab_audit(const struct MechlabInstance *instance,
                                 const char *mechanism,
                                 const char *mode,
                                 const char *semantics,
                                 char **out);

// # Safety
// `s` must come from this library and not be used afterwards.
void mechlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MECHLAB_H */
