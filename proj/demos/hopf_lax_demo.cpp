// Solve the conservation law for the two Riemann cases and print the density
// profile at t = 1: a rarefaction fan for decreasing data, a travelling shock
// for increasing data.

#include <cstdio>

#include "taseplab/scalar_law.hpp"

using namespace taseplab;

static void show(const char* name, const Profile& p) {
  Antiderivative u0(p);
  std::printf("%s\n  x:     ", name);
  for (double x = -1.0; x <= 1.01; x += 0.25) std::printf("%7.2f", x);
  std::printf("\n  rho:   ");
  for (double x = -1.0; x <= 1.01; x += 0.25) std::printf("%7.3f", hopf_lax(u0, x, 1.0).rho);
  std::printf("\n  shock: ");
  for (double x = -1.0; x <= 1.01; x += 0.25)
    std::printf("%7s", hopf_lax(u0, x, 1.0).is_shock ? "*" : ".");
  Characteristic ch = characteristic(u0, 0.0, 1.0);
  std::printf("\n  forward characteristic from 0: w- = %.4f, w+ = %.4f\n\n", ch.w_minus,
              ch.w_plus);
}

int main() {
  show("Riemann 0.8 -> 0.2 (rarefaction)", Profile::riemann(0.8, 0.2));
  show("Riemann 0.2 -> 0.8 (shock at x = 0)", Profile::riemann(0.2, 0.8));
  return 0;
}
