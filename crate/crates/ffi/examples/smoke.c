/* Integrates the 60 Hz start of the under-loaded example and reports the settling frequency. */
#include <math.h>
#include <stdio.h>

#include "swingsim.h"

#define CHECK(call)                                                         \
  do {                                                                      \
    SwStatus st_ = (call);                                                  \
    if (st_ != SW_STATUS_OK) {                                              \
      fprintf(stderr, "%s failed (%d): %s\n", #call, st_, sw_last_error()); \
      return 1;                                                             \
    }                                                                       \
  } while (0)

int main(void) {
  const double w = 2.0 * M_PI * 60.0;
  SwParams *p = NULL;
  CHECK(sw_params_from_momentum(0.2, 0.04, w, &p));
  CHECK(sw_params_set_powers(p, 1.0, 2.0));

  SwEquilibriumPair eq;
  CHECK(sw_equilibria_load(p, 0.0, &eq));

  SwIntegrationConfig cfg;
  CHECK(sw_integration_config_default(p, &cfg));
  cfg.dt = 1e-3;

  SwState s0 = {w, NAN, NAN};
  SwTrajectory *tr = NULL;
  CHECK(sw_integrate(SW_MODEL_IMPROVED_LOAD, p, &s0, &cfg, &tr));

  SwVerdict verdict;
  CHECK(sw_trajectory_verdict(tr, &verdict, NULL));
  SwSample last;
  CHECK(sw_trajectory_sample(tr, sw_trajectory_len(tr) - 1, &last));

  SwStatus bad = sw_params_from_momentum(-1.0, 0.04, w, NULL);

  printf("omega_s=%.6f verdict=%d f_final=%.4f bad=%d\n", eq.omega_s, (int)verdict,
         last.state.omega / (2.0 * M_PI), (int)bad);

  sw_trajectory_free(tr);
  sw_params_free(p);
  return 0;
}
