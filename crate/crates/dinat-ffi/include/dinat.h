#ifndef DINAT_H
#define DINAT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DinatStatus {
  DINAT_STATUS_OK = 0,
  /**
   * A well-formed question with a negative answer: no witness exists or
   * the oracle found a counterexample.
   */
  DINAT_STATUS_NEGATIVE = 1,
  DINAT_STATUS_NULL_POINTER = 2,
  DINAT_STATUS_INVALID_UTF8 = 3,
  /**
   * The JSON does not describe a valid transformation.
   */
  DINAT_STATUS_INVALID_DOCUMENT = 4,
  /**
   * Out-of-range index, mismatched interfaces, missing semantics.
   */
  DINAT_STATUS_INVALID_ARGUMENT = 5,
  /**
   * A bug on the Rust side; the message says where.
   */
  DINAT_STATUS_INTERNAL = 6,
} DinatStatus;

/**
 * A transformation together with the document it was loaded from.
 */
typedef struct DinatTransformation DinatTransformation;

/**
 * Verdict for one connected component.
 */
typedef struct DinatCheck {
  bool acyclic;
  /**
   * The discriminant: acyclic and every constituent variable in the
   * component is dinatural.
   */
  bool guaranteed;
} DinatCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses and checks a JSON document.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum DinatStatus dinat_transformation_from_json(const char *json, struct DinatTransformation **out);

/**
 * # Safety
 * `t` must come from this library and not be used afterwards. Null is a no-op.
 */
void dinat_transformation_free(struct DinatTransformation *t);

/**
 * The document for `t`, with its graph, as pretty-printed JSON.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum DinatStatus dinat_transformation_to_json(const struct DinatTransformation *t, char **out);

/**
 * Number of variables, i.e. of connected components.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum DinatStatus dinat_transformation_vars(const struct DinatTransformation *t, size_t *out);

/**
 * The discriminant of `component` (1-based).
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum DinatStatus dinat_transformation_delta(const struct DinatTransformation *t,
                                            size_t component,
                                            bool *out);

/**
 * `second ∘ first`. Neither input is consumed.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer.
 */
enum DinatStatus dinat_vcompose(const struct DinatTransformation *first,
                                const struct DinatTransformation *second,
                                struct DinatTransformation **out);

/**
 * Substitutes `first` into variable `var` (1-based) of `second`.
 *
 * # Safety
 * Both handles must be live and `out` a valid pointer.
 */
enum DinatStatus dinat_hcompose(const struct DinatTransformation *first,
                                const struct DinatTransformation *second,
                                size_t var,
                                struct DinatTransformation **out);

/**
 * Acyclicity and guarantee for `component` (1-based).
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum DinatStatus dinat_check(const struct DinatTransformation *t,
                             size_t component,
                             struct DinatCheck *out);

/**
 * The firing sequence proving `component` dinatural, as JSON. Returns
 * `DINAT_STATUS_NEGATIVE` when the component is cyclic or uses a
 * constituent variable that is not dinatural.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum DinatStatus dinat_witness_json(const struct DinatTransformation *t,
                                    size_t component,
                                    char **out);

/**
 * The graph as Graphviz DOT.
 *
 * # Safety
 * `t` must be a live handle and `out` a valid pointer.
 */
enum DinatStatus dinat_render_dot(const struct DinatTransformation *t, char **out);

/**
 * Brute-forces every guaranteed variable over sets of size up to
 * `max_size`. Returns `DINAT_STATUS_NEGATIVE` on a counterexample and
 * `DINAT_STATUS_INVALID_ARGUMENT` if the document has no semantics.
 *
 * # Safety
 * `t` must be a live handle.
 */
enum DinatStatus dinat_oracle_check(const struct DinatTransformation *t, size_t max_size);

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library; valid until the next call.
 */
const char *dinat_last_error(void);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. Null is a no-op.
 */
void dinat_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DINAT_H */
