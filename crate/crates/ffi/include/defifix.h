#ifndef DEFIFIX_H
#define DEFIFIX_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a call. Non-negative values are answers, negative ones errors.
typedef enum DefifixStatus {
  DEFIFIX_STATUS_OK = 0,
  // A negative answer: not a neighbourhood, not certified, not a singleton.
  DEFIFIX_STATUS_NO = 1,
  DEFIFIX_STATUS_NULL_POINTER = -1,
  DEFIFIX_STATUS_INVALID_UTF8 = -2,
  DEFIFIX_STATUS_FIELD = -3,
  DEFIFIX_STATUS_PARSE = -4,
  DEFIFIX_STATUS_EVAL = -5,
  DEFIFIX_STATUS_NORMALIZE = -6,
  DEFIFIX_STATUS_NEIGHBOURHOOD = -7,
  DEFIFIX_STATUS_COMPILE = -8,
  DEFIFIX_STATUS_SCHEMA = -9,
  DEFIFIX_STATUS_CAP_EXCEEDED = -10,
  DEFIFIX_STATUS_INPUT = -11,
  DEFIFIX_STATUS_PANIC = -99,
} DefifixStatus;

// A field: `Q`, `F<p>` or `F<p>^<k>`.
typedef struct DefifixField DefifixField;

// A parsed formula.
typedef struct DefifixFormula DefifixFormula;

// A finite set of field elements with a distinguished member.
typedef struct DefifixNeighbourhood DefifixNeighbourhood;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call into the library on the same thread.
const char *defifix_last_error(void);

// Releases a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void defifix_string_free(char *s);

// # Safety
// `spec` must be a nul-terminated string; `out` must be writable.
enum DefifixStatus defifix_field_new(const char *spec, struct DefifixField **out);

// # Safety
// `field` must come from [`defifix_field_new`] or be null.
void defifix_field_free(struct DefifixField *field);

// Number of elements, or 0 for the rationals.
//
// # Safety
// `field` must be a live handle or null.
uint64_t defifix_field_order(const struct DefifixField *field);

// # Safety
// `source` must be a nul-terminated string; `out` must be writable.
enum DefifixStatus defifix_formula_parse(const char *source, struct DefifixFormula **out);

// # Safety
// `formula` must come from this library or be null.
void defifix_formula_free(struct DefifixFormula *formula);

// Canonical text of a formula.
//
// # Safety
// Handles must be live; `out` must be writable.
enum DefifixStatus defifix_formula_to_string(const struct DefifixFormula *formula, char **out);

// JSON array of the elements satisfying `formula` in `var`.
//
// # Safety
// Handles must be live; `var` nul-terminated; `out` writable.
enum DefifixStatus defifix_definable_set(const struct DefifixField *field,
                                         const struct DefifixFormula *formula,
                                         const char *var,
                                         char **out);

// Three-address listing of an existential formula with free variable `var`.
//
// # Safety
// Handles must be live; `var` nul-terminated; `out` writable.
enum DefifixStatus defifix_normalize(const struct DefifixFormula *formula,
                                     const char *var,
                                     char **out);

// # Safety
// `field` must be live; strings nul-terminated; `out` writable.
enum DefifixStatus defifix_neighbourhood_new(const struct DefifixField *field,
                                             const char *elements,
                                             const char *target,
                                             struct DefifixNeighbourhood **out);

// Neighbourhood of a rational number such as `-5/3`.
//
// # Safety
// `field` must be live; `value` nul-terminated; `out` writable.
enum DefifixStatus defifix_neighbourhood_rational(const struct DefifixField *field,
                                                  const char *value,
                                                  struct DefifixNeighbourhood **out);

// # Safety
// `a` must come from this library or be null.
void defifix_neighbourhood_free(struct DefifixNeighbourhood *a);

// JSON object with `field`, `elements` and `target`.
//
// # Safety
// `a` must be live; `out` writable.
enum DefifixStatus defifix_neighbourhood_to_json(const struct DefifixNeighbourhood *a, char **out);

// `Ok` when every arithmetic map fixes the target, `No` otherwise. When
// `witness` is not null it receives a JSON map moving the target, or null.
//
// # Safety
// `a` must be live; `witness` null or writable.
enum DefifixStatus defifix_is_neighbourhood(const struct DefifixNeighbourhood *a, char **witness);

// Propagation certificate; works over the rationals too.
//
// # Safety
// `a` must be live.
enum DefifixStatus defifix_certify(const struct DefifixNeighbourhood *a);

// Existential formula defining the target; `No` when the target takes part
// in no relation of the set.
//
// # Safety
// `a` must be live; `out` writable.
enum DefifixStatus defifix_neighbourhood_to_formula(const struct DefifixNeighbourhood *a,
                                                    struct DefifixFormula **out);

// Neighbourhood of the element a formula defines; `No` when it does not
// define exactly one element.
//
// # Safety
// Handles must be live; `out` writable.
enum DefifixStatus defifix_formula_to_neighbourhood(const struct DefifixField *field,
                                                    const struct DefifixFormula *formula,
                                                    struct DefifixNeighbourhood **out);

// JSON array of the elements fixed by every endomorphism.
//
// # Safety
// `field` must be live; `out` writable.
enum DefifixStatus defifix_fixed_subfield(const struct DefifixField *field, char **out);

// Emits a named template. `offset` is the integer parameter `i`; pass 0
// when the template does not take one.
//
// # Safety
// `name` nul-terminated; `out` writable.
enum DefifixStatus defifix_schema_emit(const char *name,
                                       int64_t offset,
                                       struct DefifixFormula **out);

// Runs the command-line tool in-process. Returns its exit status; `out` and
// `err` (each may be null) receive its standard output and error.
//
// # Safety
// `argv` must hold `argc` nul-terminated strings, not counting the program name.
int defifix_cli_run(int argc, const char *const *argv, char **out, char **err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DEFIFIX_H */
