#ifndef KSMAGIC_H
#define KSMAGIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * `R1 + R2 + Σ Cj + 1 − R3·C_{q+1}`
 */
#define KS_FORM_GENERAL 0

/**
 * `R1 + R2 + R3 + C1 + C2 − C3`, q = 2 only
 */
#define KS_FORM_TWO_QUBIT 1

typedef enum {
  KS_STATUS_OK = 0,
  KS_STATUS_INVALID_ARGUMENT = 1,
  KS_STATUS_NULL_POINTER = 2,
  KS_STATUS_NOT_FOUND = 3,
  KS_STATUS_BUDGET_EXCEEDED = 4,
  KS_STATUS_INTERNAL = 5,
  KS_STATUS_PANIC = 6,
} KsStatus;

/**
 * Opaque magic array.
 */
typedef struct KsArray KsArray;

/**
 * Opaque statevector.
 */
typedef struct KsState KsState;

typedef struct {
  int64_t classical_max;
  int64_t quantum_value;
  uint64_t search_space_size;
} KsBound;

typedef struct {
  double value;
  double standard_error;
  double exact;
} KsEstimate;

typedef struct {
  uint64_t q;
  uint64_t classical_bound;
  uint64_t quantum_value;
  double ratio;
  double gap;
  double ghz_comparator;
} KsConvergenceRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL after a success.
 * The pointer stays valid until the next call into the library on the same
 * thread.
 */
const char *ks_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library and not yet freed.
 */
void ks_string_free(char *s);

/**
 * Product `a·b` of two Pauli strings in text form such as `"-iXYZ"`.
 *
 * # Safety
 * `a` and `b` must be NUL-terminated strings; `out` must be writable.
 */
KsStatus ks_pauli_mul(const char *a, const char *b, char **out);

/**
 * # Safety
 * `a` and `b` must be NUL-terminated strings; `out` must be writable.
 */
KsStatus ks_pauli_commutes(const char *a, const char *b, bool *out);

/**
 * Builds the array for a derangement given as `len` 1-based images.
 *
 * # Safety
 * `perm` must point to `len` readable values; `out` must be writable.
 */
KsStatus ks_array_build(size_t q, const size_t *perm, size_t len, KsArray **out);

/**
 * First contradiction array for `q` qubits. Returns `NotFound` when none
 * exists under the requested constraint.
 *
 * # Safety
 * `out` must be writable.
 */
KsStatus ks_array_find_contradiction(size_t q, bool require_commuting, KsArray **out);

/**
 * # Safety
 * `array` must be NULL or a handle from this library not yet freed.
 */
void ks_array_free(KsArray *array);

/**
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
KsStatus ks_array_q(const KsArray *array, size_t *out);

/**
 * Number of `j` with `π(j) < j`.
 *
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
KsStatus ks_array_m(const KsArray *array, size_t *out);

/**
 * Writes +1 or −1.
 *
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
KsStatus ks_array_grand_product(const KsArray *array, int32_t *out);

/**
 * Cell at 1-based `(row, col)` in text form. Free with `ks_string_free`.
 *
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
KsStatus ks_array_cell(const KsArray *array, size_t row, size_t col, char **out);

/**
 * JSON document `{q, perm, grid}`. Free with `ks_string_free`.
 *
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
KsStatus ks_array_to_json(const KsArray *array, char **out);

/**
 * Exhaustive classical maximum. `max_qubits` = 0 uses the default budget.
 *
 * # Safety
 * `array` must be a live handle; `out` must be writable.
 */
KsStatus ks_classical_brute_max(const KsArray *array,
                                uint32_t form,
                                size_t max_qubits,
                                KsBound *out);

/**
 * Computational basis state; qubit 1 is the most significant bit of `index`.
 *
 * # Safety
 * `out` must be writable.
 */
KsStatus ks_state_new_basis(size_t q, uint64_t index, KsState **out);

/**
 * Haar-random state, reproducible from `seed`.
 *
 * # Safety
 * `out` must be writable.
 */
KsStatus ks_state_new_random(size_t q, uint64_t seed, KsState **out);

/**
 * # Safety
 * `out` must be writable.
 */
KsStatus ks_state_new_ghz(size_t q, KsState **out);

/**
 * # Safety
 * `state` must be NULL or a handle from this library not yet freed.
 */
void ks_state_free(KsState *state);

/**
 * # Safety
 * `array` and `state` must be live handles; `out` must be writable.
 */
KsStatus ks_exact_xks(const KsArray *array, uint32_t form, const KsState *state, double *out);

/**
 * Shot-based estimate with readout flip probability `epsilon`.
 *
 * # Safety
 * `array` and `state` must be live handles; `out` must be writable.
 */
KsStatus ks_estimate_xks(const KsArray *array,
                         uint32_t form,
                         const KsState *state,
                         uint64_t shots,
                         double epsilon,
                         uint64_t seed,
                         KsEstimate *out);

/**
 * One row of the convergence table.
 *
 * # Safety
 * `out` must be writable.
 */
KsStatus ks_converge_row(uint64_t q, double epsilon, KsConvergenceRow *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KSMAGIC_H */
