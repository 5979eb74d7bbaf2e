// Last-passage shape function: single realizations of H(n,n)/n approaching
// the limit value 4, and the rate function along a ray.

#include <cstdio>

#include "taseplab/lpp.hpp"

using namespace taseplab;

int main() {
  std::printf("H(n,n)/n for one realization per n (limit 4):\n");
  for (std::int64_t n : {50, 100, 200, 500, 1000, 2000})
    std::printf("  n=%5lld  %.4f\n", (long long)n, lpp_h(n, n, 42 + std::uint64_t(n)) / double(n));

  std::printf("\nupper-tail rate Psi_{1,t}(1):\n");
  for (double t : {4.5, 5.0, 6.0, 8.0, 12.0})
    std::printf("  t=%4.1f  Psi=%.6f  exp(-20 Psi)=%.3g\n", t, rate_psi(1, t, 1),
                std::exp(-20 * rate_psi(1, t, 1)));
  return 0;
}
