/* C interface to virtensor: exact computations in tensor products of Virasoro modules. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status of a call. Anything other than `Ok` leaves a message for
// [`vt_last_error`].
typedef enum VtStatus {
  VT_STATUS_OK = 0,
  // A required pointer argument was null.
  VT_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  VT_STATUS_INVALID_UTF8 = 2,
  // Spec JSON or element text failed to parse.
  VT_STATUS_PARSE = 3,
  // Structurally valid input describing an invalid module.
  VT_STATUS_BAD_MODULE_DATA = 4,
  // A hypothesis of the requested computation does not hold here.
  VT_STATUS_HYPOTHESIS = 5,
  // Certification or verification found a genuine failure.
  VT_STATUS_FAILED = 6,
  // Any other computational error.
  VT_STATUS_COMPUTE = 7,
  // The call panicked; the library state is still usable.
  VT_STATUS_PANIC = 8,
} VtStatus;

// Opaque element of the tensor module a spec describes.
typedef struct VtElement VtElement;

// Opaque module description: the factor list and the optional
// highest-weight factor.
typedef struct VtSpec VtSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// ABI revision; bump on any breaking change to this surface.
uint32_t vt_abi_version(void);

// Message for the most recent non-`Ok` status on this thread.  The pointer
// stays valid until the next failing call on the same thread; do not free it.
const char *vt_last_error(void);

// Releases a string obtained from any `vt_*` output parameter.
//
// # Safety
// `s` must come from this library and not have been freed already.
void vt_string_free(char *s);

// Builds a spec handle from its JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be a valid pointer.
enum VtStatus vt_spec_from_json(const char *json, struct VtSpec **out);

// Serializes a spec back to its JSON document.
//
// # Safety
// `spec` must be a live handle; `out` must be a valid pointer.
enum VtStatus vt_spec_to_json(const struct VtSpec *spec, char **out);

// # Safety
// `spec` must come from `vt_spec_from_json` and not have been freed already.
void vt_spec_free(struct VtSpec *spec);

// Parses an element expression (grammar in the README) against a spec.
//
// # Safety
// `spec` must be a live handle, `text` NUL-terminated, `out` valid.
enum VtStatus vt_element_parse(const struct VtSpec *spec, const char *text, struct VtElement **out);

// Canonical text of an element.
//
// # Safety
// `spec` and `element` must be live handles; `out` must be valid.
enum VtStatus vt_element_format(const struct VtSpec *spec,
                                const struct VtElement *element,
                                char **out);

// # Safety
// `element` must come from this library and not have been freed already.
void vt_element_free(struct VtElement *element);

// `d_k` applied to an element; writes a new handle.
//
// # Safety
// `spec` and `element` must be live handles; `out` must be valid.
enum VtStatus vt_act(const struct VtSpec *spec,
                     int64_t k,
                     const struct VtElement *element,
                     struct VtElement **out);

// The alternating quadratic operator `ω^(s)_{l,m}` applied to an element.
//
// # Safety
// `spec` and `element` must be live handles; `out` must be valid.
enum VtStatus vt_omega(const struct VtSpec *spec,
                       uint32_t s,
                       int64_t l,
                       int64_t m,
                       const struct VtElement *element,
                       struct VtElement **out);

// Stabilized rank of `{d_k f : k > K}`; `stabilized` reports whether the
// value was unchanged over a shifted window.
//
// # Safety
// `spec` and `element` must be live handles; `rank` and `stabilized` must be
// valid pointers.
enum VtStatus vt_rank(const struct VtSpec *spec,
                      const struct VtElement *element,
                      uint64_t *rank,
                      bool *stabilized);

// Produces an irreducibility certificate for `element` with the given bounds
// and replays it.  `Ok` means certified and replayed exactly;
// `Hypothesis` means the spec is outside the certifiable regime.
//
// # Safety
// `spec` and `element` must be live handles.
enum VtStatus vt_certify(const struct VtSpec *spec,
                         const struct VtElement *element,
                         uint32_t degree,
                         uint32_t level);

// Verifies the defining relation `[d_i,d_j] = (j−i)d_{i+j} +
// δ_{i,−j}((i³−i)/12)c` on every basis vector with slot exponents ≤
// `max_exp`, V-level ≤ `max_level`, and induced tails below `tails`, for all
// pairs in `[−window, window]`.  Returns `Failed` with a witness message if
// any defect is nonzero.
//
// # Safety
// `spec` must be a live handle.
enum VtStatus vt_check_relations(const struct VtSpec *spec,
                                 int64_t window,
                                 uint32_t max_exp,
                                 uint32_t max_level,
                                 uint32_t tails);

// Runs a verification suite (`bracket`, `determinant`, `submodule`,
// `quotient`, `extraction`, `rank`, `irreducible`, `omega`, `classify-self`,
// or `all`) and writes the JSON report.  `Ok` covers reports with unknown
// entries; `Failed` signals at least one failed check.
//
// # Safety
// `spec` must be a live handle, `suite` NUL-terminated, `report_json` valid.
enum VtStatus vt_run_suite(const struct VtSpec *spec,
                           const char *suite,
                           uint64_t seed,
                           int64_t max_index,
                           uint32_t max_exp,
                           uint32_t max_level,
                           uint32_t samples,
                           char **report_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
