#ifndef SWINGSIM_H
#define SWINGSIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SwStatus {
  SW_STATUS_OK = 0,
  SW_STATUS_NULL_POINTER = 1,
  SW_STATUS_INVALID_PARAMS = 2,
  SW_STATUS_SINGULAR_STATE = 3,
  SW_STATUS_NO_EQUILIBRIUM = 4,
  SW_STATUS_CONDITION_VIOLATED = 5,
  SW_STATUS_SHAPE_MISMATCH = 6,
  SW_STATUS_INVALID_CONFIG = 7,
  SW_STATUS_NUMERICAL = 8,
  SW_STATUS_OUT_OF_RANGE = 9,
  SW_STATUS_PANIC = 10,
} SwStatus;

typedef enum SwModel {
  SW_MODEL_CONVENTIONAL_LOAD = 0,
  SW_MODEL_IMPROVED_LOAD = 1,
  SW_MODEL_IMPROVED_LOAD_WITH_LOSSES = 2,
  SW_MODEL_IMPROVED_CLOSED_LOOP = 3,
  SW_MODEL_SMIB_IMPROVED = 4,
  SW_MODEL_SMIB_CONVENTIONAL = 5,
} SwModel;

typedef enum SwRoaKind {
  SW_ROA_KIND_OMEGA_S = 0,
  SW_ROA_KIND_OMEGA_K = 1,
  SW_ROA_KIND_OVAL_O = 2,
  SW_ROA_KIND_SMIB_LEVEL_SET = 3,
  SW_ROA_KIND_SMIB_CONVENTIONAL_LEVEL_SET = 4,
} SwRoaKind;

typedef enum SwVerdict {
  SW_VERDICT_CONVERGED = 0,
  SW_VERDICT_DIVERGED = 1,
  SW_VERDICT_HIT_SINGULARITY = 2,
  SW_VERDICT_MAX_TIME = 3,
} SwVerdict;

/**
 * Opaque parameter set.
 */
typedef struct SwParams SwParams;

/**
 * Opaque region-of-attraction estimate.
 */
typedef struct SwRoaSet SwRoaSet;

/**
 * Opaque integrated trajectory.
 */
typedef struct SwTrajectory SwTrajectory;

/**
 * Read-only view of a parameter set; `gamma` is NaN when unset.
 */
typedef struct SwParamValues {
  double j;
  double d_d;
  double m;
  double a;
  double omega_star;
  double d_m;
  double p_m;
  double p_e;
  double gamma;
} SwParamValues;

/**
 * Speed `omega` (rad/s), rotor angle `delta` (rad) and integrator state `xi`.
 */
typedef struct SwState {
  double omega;
  double delta;
  double xi;
} SwState;

/**
 * Speed equilibria; the roots are NaN when `exists` is false.
 */
typedef struct SwEquilibriumPair {
  double discriminant;
  double omega_s;
  double omega_u;
  bool exists;
} SwEquilibriumPair;

typedef struct SwSmibEquilibrium {
  double delta_bar;
  double omega;
  bool roa_eligible;
} SwSmibEquilibrium;

/**
 * Level-set constants of the infinite-bus estimate; `c_k` is NaN for the conventional model.
 */
typedef struct SwSmibConstants {
  double c_k;
  double c_p;
  double c;
  double delta_bar;
  double delta_minus;
} SwSmibConstants;

/**
 * Integration settings. `angle_bound <= 0` or NaN disables the angle check,
 * and `lyapunov` is only read when `has_lyapunov` is true.
 */
typedef struct SwIntegrationConfig {
  double dt;
  double t_max;
  double conv_tol;
  double div_bound;
  double angle_bound;
  size_t record_every;
  bool has_lyapunov;
  enum SwRoaKind lyapunov;
} SwIntegrationConfig;

/**
 * One recorded point; `v` and `vdot` are NaN when no Lyapunov function was attached.
 */
typedef struct SwSample {
  double t;
  struct SwState state;
  double v;
  double vdot;
} SwSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or null if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *sw_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sw_version(void);

/**
 * Creates parameters from inertia `j`, damping `d_d` and nominal speed `omega_star`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum SwStatus sw_params_from_inertia(double j,
                                     double d_d,
                                     double omega_star,
                                     struct SwParams **out);

/**
 * Creates parameters from angular momentum `m`, damping `a` and nominal speed `omega_star`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum SwStatus sw_params_from_momentum(double m, double a, double omega_star, struct SwParams **out);

/**
 * Sets mechanical and electrical power.
 *
 * # Safety
 * `params` must be a live handle from this library.
 */
enum SwStatus sw_params_set_powers(struct SwParams *params, double p_m, double p_e);

/**
 * Sets the infinite-bus coupling `gamma`.
 *
 * # Safety
 * `params` must be a live handle from this library.
 */
enum SwStatus sw_params_set_gamma(struct SwParams *params, double gamma);

/**
 * Sets the mechanical loss coefficient `d_m`.
 *
 * # Safety
 * `params` must be a live handle from this library.
 */
enum SwStatus sw_params_set_mech_losses(struct SwParams *params, double d_m);

/**
 * Copies all parameter values into `out`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum SwStatus sw_params_get(const struct SwParams *params, struct SwParamValues *out);

/**
 * Releases a parameter handle. Null is ignored.
 *
 * # Safety
 * `params` must be null or a handle not yet freed.
 */
void sw_params_free(struct SwParams *params);

/**
 * Evaluates the right-hand side of `model` at `state`.
 *
 * # Safety
 * `params` must be a live handle, `state` readable and `out` writable.
 */
enum SwStatus sw_rhs(enum SwModel model,
                     const struct SwParams *params,
                     const struct SwState *state,
                     struct SwState *out);

/**
 * Speed equilibria of the improved load model under reference input `u_bar`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum SwStatus sw_equilibria_load(const struct SwParams *params,
                                 double u_bar,
                                 struct SwEquilibriumPair *out);

/**
 * Operating point of the infinite-bus model.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum SwStatus sw_equilibrium_smib(const struct SwParams *params, struct SwSmibEquilibrium *out);

/**
 * Level-set constants for the improved (`improved = true`) or conventional infinite-bus model.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum SwStatus sw_smib_constants(const struct SwParams *params,
                                bool improved,
                                struct SwSmibConstants *out);

/**
 * Builds a region-of-attraction estimate. `u_bar` is only used by `OmegaK`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum SwStatus sw_roa_new(enum SwRoaKind kind,
                         const struct SwParams *params,
                         double u_bar,
                         struct SwRoaSet **out);

/**
 * Sublevel value bounding the set.
 *
 * # Safety
 * `set` must be a live handle and `out` writable.
 */
enum SwStatus sw_roa_level(const struct SwRoaSet *set, double *out);

/**
 * Lyapunov function of the set evaluated at `state`.
 *
 * # Safety
 * `set` must be a live handle, `state` readable and `out` writable.
 */
enum SwStatus sw_roa_value(const struct SwRoaSet *set, const struct SwState *state, double *out);

/**
 * Whether `state` lies in the set.
 *
 * # Safety
 * `set` must be a live handle, `state` readable and `out` writable.
 */
enum SwStatus sw_roa_contains(const struct SwRoaSet *set, const struct SwState *state, bool *out);

/**
 * Releases a set handle. Null is ignored.
 *
 * # Safety
 * `set` must be null or a handle not yet freed.
 */
void sw_roa_free(struct SwRoaSet *set);

/**
 * Fills `out` with the default integration settings for `params`.
 *
 * # Safety
 * `params` must be a live handle and `out` writable.
 */
enum SwStatus sw_integration_config_default(const struct SwParams *params,
                                            struct SwIntegrationConfig *out);

/**
 * Integrates `model` from `initial`.
 *
 * # Safety
 * `params` must be a live handle, `initial` and `config` readable and `out` writable.
 */
enum SwStatus sw_integrate(enum SwModel model,
                           const struct SwParams *params,
                           const struct SwState *initial,
                           const struct SwIntegrationConfig *config,
                           struct SwTrajectory **out);

/**
 * Number of recorded samples, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t sw_trajectory_len(const struct SwTrajectory *traj);

/**
 * Copies sample `index` into `out`.
 *
 * # Safety
 * `traj` must be a live handle and `out` writable.
 */
enum SwStatus sw_trajectory_sample(const struct SwTrajectory *traj,
                                   size_t index,
                                   struct SwSample *out);

/**
 * Outcome of the run. `event_time` receives the singularity time, or the final time otherwise.
 *
 * # Safety
 * `traj` must be a live handle, `out` writable and `event_time` null or writable.
 */
enum SwStatus sw_trajectory_verdict(const struct SwTrajectory *traj,
                                    enum SwVerdict *out,
                                    double *event_time);

/**
 * Releases a trajectory handle. Null is ignored.
 *
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void sw_trajectory_free(struct SwTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWINGSIM_H */
