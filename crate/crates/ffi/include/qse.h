#ifndef QSE_H
#define QSE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QseBackend {
  QSE_BACKEND_SIGNAL = 0,
  QSE_BACKEND_REFERENCE = 1,
  QSE_BACKEND_BOTH = 2,
} QseBackend;

typedef enum QsePolicy {
  QSE_POLICY_BORN = 0,
  QSE_POLICY_ARGMAX = 1,
} QsePolicy;

typedef enum QseQubitKind {
  QSE_QUBIT_KIND_FREQUENCY = 0,
  QSE_QUBIT_KIND_SPATIAL = 1,
  QSE_QUBIT_KIND_TIME = 2,
} QseQubitKind;

// Result code of every call.
typedef enum QseStatus {
  QSE_STATUS_OK = 0,
  QSE_STATUS_NULL_POINTER = 1,
  QSE_STATUS_INVALID_ARGUMENT = 2,
  QSE_STATUS_PARSE_ERROR = 3,
  QSE_STATUS_EXECUTION_ERROR = 4,
  QSE_STATUS_IO_ERROR = 5,
  QSE_STATUS_BUFFER_TOO_SMALL = 6,
  QSE_STATUS_PANIC = 7,
} QseStatus;

// Opaque emulated quantum state.
typedef struct QseState QseState;

// A 2x2 complex matrix, row major.
typedef struct QseGate {
  double re[4];
  double im[4];
} QseGate;

// Outcome of a single-qubit measurement.
typedef struct QseMeasurement {
  uint8_t outcome;
  double v0;
  double v1;
  double p1;
} QseMeasurement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call into this library from the same thread.
const char *qse_last_error(void);

// Library version as a static NUL-terminated string.
const char *qse_version(void);

// Creates the basis state `index` on `n_freq` frequency, `n_spatial`
// spatial and `n_time` time qubits.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum QseStatus qse_state_new_basis(size_t n_freq,
                                   size_t n_spatial,
                                   size_t n_time,
                                   size_t index,
                                   struct QseState **out);

// Encodes `len` amplitudes given as separate real and imaginary arrays.
//
// # Safety
// `re` and `im` must each point to `len` readable doubles; `out` must be
// writable.
enum QseStatus qse_state_from_amplitudes(size_t n_freq,
                                         size_t n_spatial,
                                         size_t n_time,
                                         const double *re,
                                         const double *im,
                                         size_t len,
                                         struct QseState **out);

// Copies a state into a new handle.
//
// # Safety
// `state` must be a live handle and `out` writable.
enum QseStatus qse_state_clone(const struct QseState *state, struct QseState **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `state` must be null or a handle not yet freed.
void qse_state_free(struct QseState *state);

// Number of amplitudes the state encodes, 0 for a null handle.
//
// # Safety
// `state` must be null or a live handle.
size_t qse_state_num_amplitudes(const struct QseState *state);

// Qubit counts of the state's current configuration.
//
// # Safety
// `state` must be a live handle; the three outputs must be writable.
enum QseStatus qse_state_shape(const struct QseState *state,
                               size_t *n_freq,
                               size_t *n_spatial,
                               size_t *n_time);

// Decodes the state into `len` real and imaginary parts. Fails with
// `BufferTooSmall` when `len` is under `qse_state_num_amplitudes`.
//
// # Safety
// `re_out` and `im_out` must each point to `len` writable doubles.
enum QseStatus qse_state_decode(const struct QseState *state,
                                double *re_out,
                                double *im_out,
                                size_t len);

// Euclidean norm of the encoded amplitudes, NaN for a null handle.
//
// # Safety
// `state` must be null or a live handle.
double qse_state_norm(const struct QseState *state);

// Applies a single-qubit gate in place.
//
// # Safety
// `state` must be a live handle and `gate` readable.
enum QseStatus qse_apply_gate(struct QseState *state,
                              const struct QseGate *gate,
                              enum QseQubitKind kind,
                              size_t index);

// Applies `gate` to the target when the control qubit is 1, in place.
//
// # Safety
// `state` must be a live handle and `gate` readable.
enum QseStatus qse_apply_controlled(struct QseState *state,
                                    const struct QseGate *gate,
                                    enum QseQubitKind ctrl_kind,
                                    size_t ctrl_index,
                                    enum QseQubitKind target_kind,
                                    size_t target_index);

// Applies the oracle of a truth table (`2^n_inputs` bytes, nonzero = 1) to
// frequency qubits `1..=n_inputs`, output on frequency qubit 0.
//
// # Safety
// `state` must be a live handle; `table` must hold `2^n_inputs` bytes.
enum QseStatus qse_apply_oracle(struct QseState *state, const uint8_t *table, size_t n_inputs);

// Adds complex Gaussian noise at `snr_db` in place.
//
// # Safety
// `state` must be a live handle.
enum QseStatus qse_add_noise(struct QseState *state, double snr_db, uint64_t seed);

// Measures one qubit and collapses the state in place; the qubit is removed
// and higher qubits of the same kind shift down by one.
//
// # Safety
// `state` must be a live handle; `result` must be writable.
enum QseStatus qse_measure(struct QseState *state,
                           enum QseQubitKind kind,
                           size_t index,
                           enum QsePolicy policy,
                           uint64_t seed,
                           struct QseMeasurement *result);

// Parses and runs a circuit program, returning its JSON report in
// `report_out` (free with `qse_string_free`). Relative oracle paths resolve
// against the current directory.
//
// # Safety
// `program` must be a NUL-terminated string; `report_out` must be writable.
enum QseStatus qse_run_program(const char *program,
                               enum QseBackend backend,
                               uint64_t seed,
                               char **report_out);

// Frees a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void qse_string_free(char *s);

// Single-query search over a truth table. Writes up to `capacity` solution
// indices to `solutions` and the total found to `n_found`; returns
// `BufferTooSmall` (after filling `n_found`) if they do not fit.
//
// # Safety
// `table` must hold `2^n_inputs` bytes, `solutions` must have room for
// `capacity` entries (may be null when `capacity` is 0), `n_found` writable.
enum QseStatus qse_search(const uint8_t *table,
                          size_t n_inputs,
                          double snr_db,
                          uint64_t seed,
                          size_t *solutions,
                          size_t capacity,
                          size_t *n_found);

// Estimated number of solutions of a truth table from one oracle query.
//
// # Safety
// `table` must hold `2^n_inputs` bytes; `count` must be writable.
enum QseStatus qse_count_solutions(const uint8_t *table,
                                   size_t n_inputs,
                                   double snr_db,
                                   uint64_t seed,
                                   size_t *count);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSE_H */
