#ifndef QSUPERMAP_H
#define QSUPERMAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsmEncoding {
  QSM_ENCODING_BLOCH = 0,
  QSM_ENCODING_COMPUTATIONAL_BASIS = 1,
} QsmEncoding;

typedef enum QsmStatus {
  QSM_STATUS_OK = 0,
  QSM_STATUS_NULL_POINTER = 1,
  QSM_STATUS_INVALID_ARGUMENT = 2,
  QSM_STATUS_DIMENSION_MISMATCH = 3,
  QSM_STATUS_INVALID_STATE = 4,
  QSM_STATUS_UNMAPPED_CLOSED_FORM = 5,
  QSM_STATUS_PANIC = 6,
} QsmStatus;

typedef enum QsmConfiguration {
  QSM_CONFIGURATION_SWITCH = 0,
  QSM_CONFIGURATION_COHERENT_SUPERPOSITION = 1,
  QSM_CONFIGURATION_SWITCH_OF_SWITCH = 2,
  QSM_CONFIGURATION_SWITCH_OF_COHERENT = 3,
  QSM_CONFIGURATION_COHERENT_OF_SWITCH = 4,
  QSM_CONFIGURATION_COHERENT_OF_COHERENT = 5,
} QsmConfiguration;

typedef enum QsmFamily {
  QSM_FAMILY_BIT_FLIP = 0,
  QSM_FAMILY_PHASE_FLIP = 1,
  QSM_FAMILY_MIXED_ALTERNATING = 2,
  QSM_FAMILY_MIXED_BLOCK = 3,
  QSM_FAMILY_DEPOLARIZING = 4,
} QsmFamily;

typedef enum QsmCapacityType {
  QSM_CAPACITY_TYPE_CLASSICAL = 0,
  QSM_CAPACITY_TYPE_QUANTUM = 1,
} QsmCapacityType;

typedef enum QsmReadout {
  QSM_READOUT_TARGET_BASIS = 0,
  QSM_READOUT_FULL_HOLEVO = 1,
} QsmReadout;

// Opaque channel handle.
typedef struct QsmChannel QsmChannel;

typedef struct QsmOptimizerConfig {
  size_t restarts;
  size_t max_iterations;
  double tolerance;
  uint64_t seed;
  size_t ensemble_size;
  enum QsmEncoding encoding;
} QsmOptimizerConfig;

typedef struct QsmCapacity {
  double value;
  double raw_value;
  bool converged;
  size_t evaluations;
} QsmCapacity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. Owned by the
// library and valid until the next failing call on this thread.
const char *qsm_last_error_message(void);

struct QsmOptimizerConfig qsm_optimizer_config_default(void);

// Builds a channel from `count` Kraus operators of shape `d_out × d_in`,
// stored back to back. `kraus_im` may be null for real operators.
//
// # Safety
// `kraus_re` (and `kraus_im` when non-null) must point to
// `count * d_out * d_in` doubles; `out` must be writable.
enum QsmStatus qsm_channel_new(const double *kraus_re,
                               const double *kraus_im,
                               size_t count,
                               size_t d_out,
                               size_t d_in,
                               struct QsmChannel **out);

// Bit flip with probability `p`.
//
// # Safety
// `out` must be writable.
enum QsmStatus qsm_channel_bit_flip(double p, struct QsmChannel **out);

// Phase flip with probability `p`.
//
// # Safety
// `out` must be writable.
enum QsmStatus qsm_channel_phase_flip(double p, struct QsmChannel **out);

// Depolarizing channel with total error probability `p`.
//
// # Safety
// `out` must be writable.
enum QsmStatus qsm_channel_depolarizing(double p, struct QsmChannel **out);

// Quantum switch of two channels on `control ⊗ target`.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum QsmStatus qsm_switch(const struct QsmChannel *a,
                          const struct QsmChannel *b,
                          struct QsmChannel **out);

// Fixes the leading `qubits` control qubits of `ch` at `|+⟩` each.
//
// # Safety
// `ch` must be a live handle; `out` must be writable.
enum QsmStatus qsm_fix_control_plus(const struct QsmChannel *ch,
                                    size_t qubits,
                                    struct QsmChannel **out);

// Fixed-control channel (target in, full output out) for a configuration,
// family and noise level.
//
// # Safety
// `out` must be writable.
enum QsmStatus qsm_scenario_channel(enum QsmConfiguration configuration,
                                    enum QsmFamily family,
                                    double p,
                                    struct QsmChannel **out);

// # Safety
// `ch` must be a live handle or null; it must not be used afterwards.
void qsm_channel_free(struct QsmChannel *ch);

// # Safety
// `ch` must be a live handle; the out pointers must be writable.
enum QsmStatus qsm_channel_dims(const struct QsmChannel *ch,
                                size_t *d_in,
                                size_t *d_out,
                                size_t *kraus_count);

// Applies `ch` to the `d_in × d_in` state `rho`, writing a `d_out × d_out` state.
//
// # Safety
// Input arrays hold `d_in²` doubles (`rho_im` may be null); output arrays
// hold `d_out²` doubles.
enum QsmStatus qsm_channel_apply(const struct QsmChannel *ch,
                                 const double *rho_re,
                                 const double *rho_im,
                                 double *out_re,
                                 double *out_im);

// # Safety
// As for [`qsm_channel_apply`]; `out` must be writable.
enum QsmStatus qsm_coherent_information(const struct QsmChannel *ch,
                                        const double *rho_re,
                                        const double *rho_im,
                                        double *out);

// # Safety
// `ch` and `cfg` must be valid; `out` must be writable.
enum QsmStatus qsm_classical_capacity(const struct QsmChannel *ch,
                                      const struct QsmOptimizerConfig *cfg,
                                      struct QsmCapacity *out);

// # Safety
// `ch` and `cfg` must be valid; `out` must be writable.
enum QsmStatus qsm_quantum_capacity(const struct QsmChannel *ch,
                                    const struct QsmOptimizerConfig *cfg,
                                    struct QsmCapacity *out);

// Capacity of one configuration/family point under the given readout.
//
// # Safety
// `cfg` must be valid; `out` must be writable.
enum QsmStatus qsm_scenario_capacity(enum QsmConfiguration configuration,
                                     enum QsmFamily family,
                                     double p,
                                     enum QsmCapacityType capacity_type,
                                     enum QsmReadout readout,
                                     const struct QsmOptimizerConfig *cfg,
                                     struct QsmCapacity *out);

// Closed-form capacity in bits, or `QSM_STATUS_UNMAPPED_CLOSED_FORM`.
//
// # Safety
// `out` must be writable.
enum QsmStatus qsm_closed_form(enum QsmConfiguration configuration,
                               enum QsmFamily family,
                               enum QsmCapacityType capacity_type,
                               double p,
                               double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSUPERMAP_H */
