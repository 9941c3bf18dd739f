/* Copyright 2026 The conebound Authors. Licensed under the Apache License, Version 2.0. */

#ifndef CONEBOUND_H
#define CONEBOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum CbStatus {
  CB_STATUS_OK = 0,
  CB_STATUS_NULL_POINTER = 1,
  CB_STATUS_INVALID_ARGUMENT = 2,
  CB_STATUS_INVALID_CONE = 3,
  CB_STATUS_DIMENSION_MISMATCH = 4,
  CB_STATUS_NUMERIC_FAILURE = 5,
  CB_STATUS_PARSE_ERROR = 6,
  CB_STATUS_PANIC = 7,
} CbStatus;

typedef enum CbConeKind {
  CB_CONE_KIND_SECOND_ORDER = 0,
  // `param` is the exponent `p > 1`.
  CB_CONE_KIND_P_CONE = 1,
  // `param` is the half-angle `θ ∈ (0, π/2)`.
  CB_CONE_KIND_CIRCULAR = 2,
  // Only `m = 2`.
  CB_CONE_KIND_ORTHANT = 3,
} CbConeKind;

typedef enum CbCase {
  CB_CASE_T51 = 0,
  CB_CASE_T52I = 1,
  CB_CASE_T52II = 2,
  CB_CASE_T52III = 3,
  CB_CASE_T53I = 4,
  CB_CASE_T53II = 5,
  CB_CASE_T53III = 6,
  CB_CASE_DEGENERATE_A_ZERO = 7,
  CB_CASE_INFEASIBLE = 8,
  CB_CASE_INDETERMINATE = 9,
} CbCase;

// Shared by the error-bound and Abadie verdicts; `TriviallyHolds` only
// occurs for the former.
typedef enum CbVerdict {
  CB_VERDICT_HOLDS = 0,
  CB_VERDICT_FAILS = 1,
  CB_VERDICT_TRIVIALLY_HOLDS = 2,
  CB_VERDICT_UNKNOWN = 3,
} CbVerdict;

// The outcome of classifying a problem.
typedef struct CbClassification CbClassification;

// A validated cone.
typedef struct CbCone CbCone;

// A validated inclusion `Ax + b ∈ K`.
typedef struct CbProblem CbProblem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. Valid until
// the next failing call on the same thread.
const char *cb_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *cb_version(void);

// Creates a cone in `R^m`. `param` is ignored for the second-order cone
// and the orthant.
enum CbStatus cb_cone_new(enum CbConeKind kind, size_t m, double param, struct CbCone **out);

void cb_cone_free(struct CbCone *cone);

// Ambient dimension, or 0 for NULL.
size_t cb_cone_dim(const struct CbCone *cone);

// Margin `φ(z)`; `z ∈ K` iff it is non-negative.
enum CbStatus cb_cone_margin(const struct CbCone *cone, const double *z, size_t len, double *out);

// Writes the projection of `z` onto the cone to `out[0..len]`.
enum CbStatus cb_cone_project(const struct CbCone *cone, const double *z, size_t len, double *out);

// Euclidean distance from `z` to the cone.
enum CbStatus cb_cone_distance(const struct CbCone *cone, const double *z, size_t len, double *out);

// Builds `Ax + b ∈ K` from a row-major `m × n` matrix, where `m` is the
// cone dimension. The cone is copied; the caller keeps ownership.
enum CbStatus cb_problem_new(const double *a,
                             size_t rows,
                             size_t cols,
                             const double *b,
                             const struct CbCone *cone,
                             struct CbProblem **out);

// Parses a problem file (`{"A": .., "b": .., "cone": {..}}`).
enum CbStatus cb_problem_from_json(const char *json, struct CbProblem **out);

void cb_problem_free(struct CbProblem *problem);

// Classifies with threshold `eps` (pass 0 for the default) and `seed`.
enum CbStatus cb_classify(const struct CbProblem *problem,
                          double eps,
                          uint64_t seed,
                          struct CbClassification **out);

void cb_classification_free(struct CbClassification *c);

// Theorem case; `CB_CASE_INDETERMINATE` for NULL.
enum CbCase cb_classification_case(const struct CbClassification *c);

// Global error bound verdict; `CB_VERDICT_UNKNOWN` for NULL.
enum CbVerdict cb_classification_geb(const struct CbClassification *c);

// Abadie constraint qualification verdict; `CB_VERDICT_UNKNOWN` for NULL.
enum CbVerdict cb_classification_acq(const struct CbClassification *c);

// Full classification as JSON. Release with [`cb_string_free`].
enum CbStatus cb_classification_to_json(const struct CbClassification *c, char **out);

// Releases a string returned by this library.
void cb_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONEBOUND_H */
