#include <math.h>
#include <stdio.h>
#include <string.h>

#include "freejacobi.h"

#define CHECK(cond)                                                           \
  do {                                                                        \
    if (!(cond)) {                                                            \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, #cond,          \
              fj_last_error_message());                                       \
      return 1;                                                               \
    }                                                                         \
  } while (0)

int main(void) {
  CHECK(strlen(fj_version()) > 0);

  double stat[4];
  CHECK(fj_stationary_moments(3, 3, stat, 4) == FJ_STATUS_OK);
  CHECK(fabs(stat[1] - 1.0 / 3.0) < 1e-15);
  CHECK(fj_stationary_moments(3, 3, stat, 2) == FJ_STATUS_BUFFER_TOO_SMALL);

  FjMoments *m = NULL;
  CHECK(fj_moments_integrate(1.0, 1.0 / 3.0, 4, 1.0, 0.01, &m) == FJ_STATUS_OK);
  size_t times = 0, n_max = 0;
  CHECK(fj_moments_shape(m, &times, &n_max) == FJ_STATUS_OK);
  CHECK(n_max == 4 && times == 101);
  double row[5];
  CHECK(fj_moments_row(m, times - 1, row, 5) == FJ_STATUS_OK);
  CHECK(fabs(row[1] - (1.0 / 3.0 + 2.0 / 3.0 * exp(-1.0))) < 1e-10);
  fj_moments_free(m);

  CHECK(fj_moments_integrate(2.0, 0.9, 4, 1.0, 0.01, &m) == FJ_STATUS_INVALID_ARGUMENT);
  CHECK(strlen(fj_last_error_message()) > 0);

  size_t checked = 0, failed = 1;
  CHECK(fj_expansion_verify(6, &checked, &failed) == FJ_STATUS_OK);
  CHECK(checked > 0 && failed == 0);

  puts("ok");
  return 0;
}
