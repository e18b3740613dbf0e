/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef BESN_H
#define BESN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum BesnStatus {
  BESN_STATUS_OK = 0,
  BESN_STATUS_NULL_POINTER = 1,
  BESN_STATUS_INVALID_ARGUMENT = 2,
  BESN_STATUS_DIMENSION_MISMATCH = 3,
  BESN_STATUS_INDEX_OUT_OF_RANGE = 4,
  BESN_STATUS_MISSING_RNG = 5,
  BESN_STATUS_IO = 6,
  BESN_STATUS_INTERNAL = 7,
} BesnStatus;

/**
 * Output of a neuron whose local field is exactly zero.
 */
typedef enum BesnZeroField {
  BESN_ZERO_FIELD_POSITIVE = 0,
  BESN_ZERO_FIELD_HOLD = 1,
} BesnZeroField;

typedef enum BesnSignalKind {
  BESN_SIGNAL_KIND_ZERO = 0,
  BESN_SIGNAL_KIND_WHITE_NOISE = 1,
  BESN_SIGNAL_KIND_MULTISINE = 2,
} BesnSignalKind;

typedef struct BesnReservoir BesnReservoir;

typedef struct BesnRng BesnRng;

typedef struct BesnState BesnState;

typedef struct BesnTrajectory BesnTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL terminated,
 * truncated to `capacity`) and returns its full length in bytes. Returns 0
 * when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or point to `capacity` writable bytes.
 */
size_t besn_last_error_message(char *buf, size_t capacity);

/**
 * Library version as a static NUL terminated string.
 */
const char *besn_version(void);

/**
 * Samples a reservoir with `n` neurons, mean degree `k` and asymmetry `d`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum BesnStatus besn_reservoir_generate(size_t n,
                                        double k,
                                        double d,
                                        uint64_t seed,
                                        struct BesnReservoir **out);

/**
 * # Safety
 * `reservoir` must be null or a handle from [`besn_reservoir_generate`] not yet freed.
 */
void besn_reservoir_free(struct BesnReservoir *reservoir);

/**
 * Neuron count, 0 for a null handle.
 *
 * # Safety
 * `reservoir` must be null or a live handle.
 */
size_t besn_reservoir_n_neurons(const struct BesnReservoir *reservoir);

/**
 * Number of nonzero weights, 0 for a null handle.
 *
 * # Safety
 * `reservoir` must be null or a live handle.
 */
size_t besn_reservoir_link_count(const struct BesnReservoir *reservoir);

/**
 * Writes the row-major `n * n` weight matrix into `out`.
 *
 * # Safety
 * `reservoir` must be a live handle and `out` must point to `len` writable bytes.
 */
enum BesnStatus besn_reservoir_to_dense(const struct BesnReservoir *reservoir,
                                        int8_t *out,
                                        size_t len);

/**
 * Builds a state from `len` entries, each `-1` or `+1`.
 *
 * # Safety
 * `signs` must point to `len` readable bytes and `out` to storage for one handle.
 */
enum BesnStatus besn_state_from_signs(const int8_t *signs, size_t len, struct BesnState **out);

/**
 * Random state whose entries are `+1` with probability `bias`, drawn from
 * the initial-state stream of `seed`.
 *
 * # Safety
 * `out` must point to storage for one handle.
 */
enum BesnStatus besn_state_random(size_t n, double bias, uint64_t seed, struct BesnState **out);

/**
 * # Safety
 * `state` must be null or a live handle.
 */
void besn_state_free(struct BesnState *state);

/**
 * # Safety
 * `state` must be null or a live handle.
 */
size_t besn_state_len(const struct BesnState *state);

/**
 * Writes the `len` entries of `state` as `-1`/`+1` bytes.
 *
 * # Safety
 * `state` must be a live handle and `out` must point to `len` writable bytes.
 */
enum BesnStatus besn_state_to_signs(const struct BesnState *state, int8_t *out, size_t len);

/**
 * Random stream `stream` of `seed`.
 *
 * # Safety
 * `out` must point to storage for one handle.
 */
enum BesnStatus besn_rng_new(uint64_t seed, uint64_t stream, struct BesnRng **out);

/**
 * # Safety
 * `rng` must be null or a live handle.
 */
void besn_rng_free(struct BesnRng *rng);

/**
 * One synchronous update with scalar input `input`. `rng` may be null when
 * `noise_gain` is zero.
 *
 * # Safety
 * `reservoir` and `state` must be live handles, `rng` null or live, and
 * `out` must point to storage for one handle.
 */
enum BesnStatus besn_step(const struct BesnReservoir *reservoir,
                          const struct BesnState *state,
                          double input,
                          double noise_gain,
                          enum BesnZeroField rule,
                          struct BesnRng *rng,
                          struct BesnState **out);

/**
 * Simulates `horizon` steps from `initial`. White noise drive draws from
 * `signal_seed`; per-neuron noise draws from `rng`, which may be null when
 * `noise_gain` is zero.
 *
 * # Safety
 * `reservoir` and `initial` must be live handles, `rng` null or live, and
 * `out` must point to storage for one handle.
 */
enum BesnStatus besn_run(const struct BesnReservoir *reservoir,
                         const struct BesnState *initial,
                         enum BesnSignalKind signal,
                         double signal_gain,
                         uint64_t signal_seed,
                         double noise_gain,
                         size_t horizon,
                         enum BesnZeroField rule,
                         struct BesnRng *rng,
                         struct BesnTrajectory **out);

/**
 * # Safety
 * `trajectory` must be null or a live handle.
 */
void besn_trajectory_free(struct BesnTrajectory *trajectory);

/**
 * Number of stored states, `horizon + 1`.
 *
 * # Safety
 * `trajectory` must be null or a live handle.
 */
size_t besn_trajectory_len(const struct BesnTrajectory *trajectory);

/**
 * Copy of the state at step `n`.
 *
 * # Safety
 * `trajectory` must be a live handle and `out` must point to storage for one handle.
 */
enum BesnStatus besn_trajectory_state(const struct BesnTrajectory *trajectory,
                                      size_t n,
                                      struct BesnState **out);

/**
 * Writes energy, activity and entropy per step. Each buffer must hold
 * exactly the trajectory length; any of them may be null to skip it.
 * Activity at step 0 is written as NaN.
 *
 * # Safety
 * `trajectory` must be a live handle; non-null buffers must hold `len` doubles.
 */
enum BesnStatus besn_trajectory_indicators(const struct BesnTrajectory *trajectory,
                                           double *energy,
                                           double *activity,
                                           double *entropy,
                                           size_t len);

/**
 * Entropy averaged over steps `t0..=t_end`.
 *
 * # Safety
 * `trajectory` must be a live handle and `out` a valid pointer.
 */
enum BesnStatus besn_trajectory_mean_entropy(const struct BesnTrajectory *trajectory,
                                             size_t t0,
                                             size_t t_end,
                                             double *out);

/**
 * Binary entropy of the positive fraction; NaN for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
double besn_entropy(const struct BesnState *state);

/**
 * Mean entry; NaN for a null handle.
 *
 * # Safety
 * `state` must be null or a live handle.
 */
double besn_energy(const struct BesnState *state);

/**
 * Normalized Hamming distance.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` a valid pointer.
 */
enum BesnStatus besn_hamming(const struct BesnState *a, const struct BesnState *b, double *out);

/**
 * `1 / (2 d^2)`, infinity at `d = 0`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BesnStatus besn_critical_degree(double d, double *out);

/**
 * `1 / sqrt(2 k)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum BesnStatus besn_critical_asymmetry(double k, double *out);

/**
 * Whether `(k, d)` lies on the chaotic side of the annealed criterion.
 */
bool besn_chaos_condition(double k, double d);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BESN_H */
