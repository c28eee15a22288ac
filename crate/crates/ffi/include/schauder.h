#ifndef SCHAUDER_H
#define SCHAUDER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SchauderStatus {
  SCHAUDER_STATUS_OK = 0,
  SCHAUDER_STATUS_NULL_POINTER = 1,
  SCHAUDER_STATUS_INVALID_UTF8 = 2,
  SCHAUDER_STATUS_PARSE = 3,
  SCHAUDER_STATUS_VALIDATION = 4,
  SCHAUDER_STATUS_UNDETERMINED = 5,
  SCHAUDER_STATUS_PANIC = 6,
} SchauderStatus;

typedef enum SchauderDecider {
  SCHAUDER_DECIDER_GENERAL = 0,
  SCHAUDER_DECIDER_LP = 1,
  SCHAUDER_DECIDER_C0 = 2,
  SCHAUDER_DECIDER_HILBERT = 3,
  SCHAUDER_DECIDER_C = 4,
} SchauderDecider;

// Verdict codes, matching the command-line exit statuses.
typedef enum SchauderVerdict {
  // Converges, or precompact.
  SCHAUDER_VERDICT_POSITIVE = 0,
  // Diverges, or not precompact.
  SCHAUDER_VERDICT_NEGATIVE = 1,
  SCHAUDER_VERDICT_INCONCLUSIVE = 2,
} SchauderVerdict;

typedef struct SchauderElement SchauderElement;

typedef struct SchauderFamily SchauderFamily;

typedef struct SchauderSet SchauderSet;

typedef struct SchauderInterval {
  double lo;
  double hi;
} SchauderInterval;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or null. Valid until
// the next call into the library on the same thread.
const char *schauder_last_error(void);

// Library version as a static NUL-terminated string.
const char *schauder_version(void);

// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void schauder_string_free(char *s);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SchauderStatus schauder_element_from_json(const char *json, struct SchauderElement **out);

// # Safety
// `element` must be null or a live handle from this library.
void schauder_element_free(struct SchauderElement *element);

// # Safety
// `element` must be a live handle; `out` must be writable. The string
// written to `out` is released with `schauder_string_free`.
enum SchauderStatus schauder_element_to_json(const struct SchauderElement *element, char **out);

// Enclosure of `||x||`. A nonpositive `slack` selects the default.
//
// # Safety
// `element` must be a live handle; `out` must be writable.
enum SchauderStatus schauder_element_norm(const struct SchauderElement *element,
                                          double slack,
                                          struct SchauderInterval *out);

// Enclosure of `||R_K x||`.
//
// # Safety
// `element` must be a live handle; `out` must be writable.
enum SchauderStatus schauder_element_tail_norm(const struct SchauderElement *element,
                                               size_t k,
                                               double slack,
                                               struct SchauderInterval *out);

// Enclosure of the coordinate `c_k(x)`; `k = 0` is the limit in `c`.
//
// # Safety
// `element` must be a live handle; `out` must be writable.
enum SchauderStatus schauder_element_coordinate(const struct SchauderElement *element,
                                                size_t k,
                                                struct SchauderInterval *out);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SchauderStatus schauder_family_from_json(const char *json, struct SchauderFamily **out);

// # Safety
// `family` must be null or a live handle from this library.
void schauder_family_free(struct SchauderFamily *family);

// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SchauderStatus schauder_set_from_json(const char *json, struct SchauderSet **out);

// # Safety
// `set` must be null or a live handle from this library.
void schauder_set_free(struct SchauderSet *set);

// Decides whether `family` converges to `candidate`. `config_json` may be
// null for the defaults. The JSON report written to `report_out` (if not
// null) is released with `schauder_string_free`.
//
// # Safety
// Handles must be live; `config_json` null or NUL-terminated; output
// pointers null or writable.
enum SchauderStatus schauder_decide_convergence(const struct SchauderFamily *family,
                                                const struct SchauderElement *candidate,
                                                enum SchauderDecider decider,
                                                const char *config_json,
                                                enum SchauderVerdict *verdict_out,
                                                char **report_out);

// Decides whether `set` is precompact.
//
// # Safety
// As for `schauder_decide_convergence`.
enum SchauderStatus schauder_check_precompact(const struct SchauderSet *set,
                                              const char *config_json,
                                              enum SchauderVerdict *verdict_out,
                                              char **report_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCHAUDER_H */
