#pragma once

// Samplers for the initial laws used by the experiments: local equilibrium
// with a macroscopic profile (independent sites, mean equal to the exact cell
// integral of rho0), Riemann product measures and deterministic step data.
// Occupancies come from per-site keyed streams, so enlarging the window never
// changes the draw at an existing site. Site 0 is forced vacant by the
// product-measure samplers: that is where a second-class particle starts.

#include <cstdint>
#include <stdexcept>

#include "taseplab/clocks.hpp"
#include "taseplab/lattice.hpp"
#include "taseplab/rng.hpp"
#include "taseplab/scalar_law.hpp"

namespace taseplab {

// Independent occupancies with E[eta_i] = n * int_{(i-1)/n}^{i/n} rho0.
inline Configuration sample_local_equilibrium(const Profile& profile, std::int64_t n, Window w,
                                              std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_local_equilibrium: scale n must be >= 1");
  w.validate();
  Antiderivative u0(profile);
  Configuration cfg(w);
  for (std::int64_t i = w.left; i <= w.right; ++i) {
    double p = double(n) * u0.integral(double(i - 1) / double(n), double(i) / double(n));
    if (!(p >= -1e-12 && p <= 1 + 1e-12))
      throw std::logic_error("sample_local_equilibrium: cell mean outside [0,1]");
    Stream st = site_stream(seed, StreamKind::Occupancy, i);
    cfg.at(i) = st.next_bool(p) ? 1 : 0;
  }
  cfg.at(0) = 0;
  return cfg;
}

// Product measure nu_{lambda,rho}: density lambda left of the origin, rho to
// the right, origin vacant.
inline Configuration sample_riemann(double lambda, double rho, Window w, std::uint64_t seed) {
  if (!(lambda >= 0 && lambda <= 1 && rho >= 0 && rho <= 1))
    throw std::invalid_argument("sample_riemann: densities must lie in [0,1]");
  w.validate();
  Configuration cfg(w);
  for (std::int64_t i = w.left; i <= w.right; ++i) {
    Stream st = site_stream(seed, StreamKind::Occupancy, i);
    cfg.at(i) = st.next_bool(i < 0 ? lambda : rho) ? 1 : 0;
  }
  cfg.at(0) = 0;
  return cfg;
}

// Deterministic step: sites <= k occupied, sites > k vacant.
inline Configuration step_ic(std::int64_t k, Window w) {
  w.validate();
  if (!w.contains(k)) throw std::invalid_argument("step_ic: step index outside window");
  Configuration cfg(w);
  for (std::int64_t i = w.left; i <= k; ++i) cfg.at(i) = 1;
  return cfg;
}

}  // namespace taseplab
