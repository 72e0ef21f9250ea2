#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "lpflow.h"

#define CHECK(call)                                                        \
  do {                                                                     \
    LpflowStatus s_ = (call);                                              \
    if (s_ != LPFLOW_STATUS_OK) {                                          \
      fprintf(stderr, "%s: status %d: %s\n", #call, (int)s_,              \
              lpflow_last_error());                                        \
      return 1;                                                            \
    }                                                                      \
  } while (0)

int main(void) {
  const size_t n = 32;
  const double pi = 3.14159265358979323846;
  LpflowGrid *grid = NULL;
  CHECK(lpflow_grid_new(n, 2.0 * pi, &grid));

  double *f = malloc(n * n * sizeof(double));
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < n; ++i)
      f[j * n + i] = cos(2.0 * pi * (double)i / (double)n);
  double bmo = 0.0;
  CHECK(lpflow_bmo_norm(grid, f, n * n, &bmo));
  if (!(bmo > 0.6 && bmo < 0.7)) {
    fprintf(stderr, "bmo of cos x = %g\n", bmo);
    return 1;
  }
  if (lpflow_holder_norm(grid, f, n * n, 1.0, &bmo) != LPFLOW_STATUS_INVALID_ARGUMENT ||
      lpflow_last_error() == NULL) {
    fprintf(stderr, "alpha = 1 accepted\n");
    return 1;
  }

  LpflowSimulation *sim = NULL;
  CHECK(lpflow_simulation_new("system = \"oldroyd\"\nn = 16\n"
                              "[initial.velocity]\nrecipe = \"taylor-green\"\n",
                              &sim));
  CHECK(lpflow_simulation_step(sim, 10));
  LpflowSample sample;
  CHECK(lpflow_simulation_sample(sim, &sample));
  if (!(sample.energy > 0.0) || fabs(sample.t - 0.01) > 1e-12) {
    fprintf(stderr, "t = %g energy = %g\n", sample.t, sample.energy);
    return 1;
  }
  lpflow_simulation_free(sim);
  lpflow_grid_free(grid);
  free(f);
  printf("ok %s\n", lpflow_version());
  return 0;
}
