#pragma once

// Exponential-weights last-passage percolation. H(M,N) is the maximal weight
// of an up-right path from (1,1) to (M,N) through i.i.d. mean-1 exponentials,
// realized by the dynamic-programming recursion
//   G(i,j) = u_{i,j} + max(G(i-1,j), G(i,j-1)).
// Cell weights are keyed by (seed, row) with sequential draws along the row,
// so tables can be re-swept or extended reproducibly. Scalar queries roll a
// single row of storage; the growth-interface law is obtained by inverting
// passage times along a probe line.
//
// The module also evaluates the upper-tail rate function Psi_{w,t}(r), its
// boundary expansion, and the resulting probability bound for lower-tail
// deviations of the growth interface, and it probes the lower-tail hypothesis
// at depth C n^{1/3} below the shape value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "taseplab/rng.hpp"
#include "taseplab/stats.hpp"

namespace taseplab {

inline Stream lpp_row_stream(std::uint64_t seed, std::int64_t row) {
  return Stream(seed, static_cast<std::uint64_t>(StreamKind::LppWeights),
                static_cast<std::uint64_t>(row));
}

// Full passage-time table for small instances.
class PassageTable {
 public:
  PassageTable(std::int64_t m, std::int64_t n, std::uint64_t seed) : m_(m), n_(n), seed_(seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("passage_table: dimensions must be >= 1");
    g_.resize(std::size_t(m * n));
    std::vector<double> prev(std::size_t(n), 0.0);
    for (std::int64_t i = 1; i <= m; ++i) {
      Stream row = lpp_row_stream(seed, i);
      double left = 0.0;
      for (std::int64_t j = 1; j <= n; ++j) {
        double w = row.next_exp();
        double up = prev[std::size_t(j - 1)];
        double v = w + std::max(up, left);
        g_[std::size_t((i - 1) * n + (j - 1))] = v;
        prev[std::size_t(j - 1)] = v;
        left = v;
      }
    }
  }

  std::int64_t rows() const { return m_; }
  std::int64_t cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  double at(std::int64_t i, std::int64_t j) const {
    if (i < 1 || i > m_ || j < 1 || j > n_) throw std::invalid_argument("passage_table: index");
    return g_[std::size_t((i - 1) * n_ + (j - 1))];
  }
  double h() const { return at(m_, n_); }

 private:
  std::int64_t m_, n_;
  std::uint64_t seed_;
  std::vector<double> g_;
};

inline PassageTable passage_table(std::int64_t m, std::int64_t n, std::uint64_t seed) {
  return PassageTable(m, n, seed);
}

// H(M,N) with O(N) memory.
inline double lpp_h(std::int64_t m, std::int64_t n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("lpp_h: dimensions must be >= 1");
  std::vector<double> row(std::size_t(n), 0.0);
  for (std::int64_t i = 1; i <= m; ++i) {
    Stream rs = lpp_row_stream(seed, i);
    double left = 0.0;
    for (std::int64_t j = 1; j <= n; ++j) {
      double v = rs.next_exp() + std::max(row[std::size_t(j - 1)], left);
      row[std::size_t(j - 1)] = v;
      left = v;
    }
  }
  return row[std::size_t(n - 1)];
}

// Law-of-large-numbers shape: lim H([n alpha],[n beta])/n.
inline double shape_limit(double alpha, double beta) {
  if (alpha < 0 || beta < 0) throw std::invalid_argument("shape_limit: negative argument");
  double s = std::sqrt(alpha) + std::sqrt(beta);
  return s * s;
}

namespace detail {
inline double acosh_clamped(double z) {
  if (z < 1.0) {
    if (z < 1.0 - 1e-12) throw std::domain_error("rate_psi: cosh^{-1} argument below 1");
    z = 1.0;
  }
  return std::log(z + std::sqrt(std::max(z * z - 1.0, 0.0)));
}
}  // namespace detail

// Upper-tail rate function Psi_{w,t}(r) on { sqrt(w)+sqrt(r) <= sqrt(t) }:
//   sqrt((t-r-w)^2 - 4rw) - 2r acosh((t+r-w)/(2 sqrt(tr)))
//                         - 2w acosh((t+w-r)/(2 sqrt(tw))).
// Vanishes exactly on the boundary r = (sqrt(t)-sqrt(w))^2.
inline double psi_expansion_prefactor(double w, double t);

inline double rate_psi(double w, double t, double r) {
  if (w < 0 || t < 0 || r < 0) throw std::domain_error("rate_psi: negative argument");
  if (std::sqrt(w) + std::sqrt(r) > std::sqrt(t) + 1e-12)
    throw std::domain_error("rate_psi: outside domain sqrt(w)+sqrt(r) <= sqrt(t)");
  if (w > 0 && r > 0) {
    // Within h of the boundary the three terms cancel to O(h^{3/2}) but each
    // carries O(sqrt(eps)) rounding noise, so evaluate the expansion instead.
    double u = (std::sqrt(t) - std::sqrt(w)) * (std::sqrt(t) - std::sqrt(w));
    double h = u - r;
    if (h < 1e-6 * (1.0 + t)) {
      if (h <= 0) return 0.0;
      return psi_expansion_prefactor(w, t) * h * std::sqrt(h);
    }
  }
  double disc = (t - r - w) * (t - r - w) - 4.0 * r * w;
  double value = std::sqrt(std::max(disc, 0.0));
  if (r > 0) value -= 2.0 * r * detail::acosh_clamped((t + r - w) / (2.0 * std::sqrt(t * r)));
  if (w > 0) value -= 2.0 * w * detail::acosh_clamped((t + w - r) / (2.0 * std::sqrt(t * w)));
  return std::max(value, 0.0);
}

// Leading coefficient of Psi_{w,t}(u-h) = coef * h^{3/2} + O(h^{5/2}) at the
// boundary u = (sqrt(t)-sqrt(w))^2.
inline double psi_expansion_prefactor(double w, double t) {
  if (!(w > 0) || !(t > 0)) throw std::invalid_argument("psi_expansion: need w, t > 0");
  double u = (std::sqrt(t) - std::sqrt(w)) * (std::sqrt(t) - std::sqrt(w));
  if (!(u > 0)) throw std::invalid_argument("psi_expansion: u must be positive");
  return (4.0 / 3.0) * std::pow(w, 0.25) / (std::pow(t, 0.25) * std::sqrt(u));
}

inline double psi_expansion(double w, double t, double h) {
  if (!(h >= 0)) throw std::invalid_argument("psi_expansion: h must be nonnegative");
  return psi_expansion_prefactor(w, t) * std::pow(h, 1.5);
}

// Least-squares estimate of C in Psi(u-h) ~ coef h^{3/2} - C h^{5/2} over a
// log grid of small h. C is a reported fit, never an assumed constant.
inline double fit_psi_correction(double w, double t, double h_lo = 1e-4, double h_hi = 1e-2,
                                 int points = 20) {
  double u = (std::sqrt(t) - std::sqrt(w)) * (std::sqrt(t) - std::sqrt(w));
  double num = 0, den = 0;
  for (int k = 0; k < points; ++k) {
    double h = h_lo * std::pow(h_hi / h_lo, double(k) / double(points - 1));
    double d = psi_expansion(w, t, h) - rate_psi(w, t, u - h);
    double h52 = std::pow(h, 2.5);
    num += d * h52;
    den += h52 * h52;
  }
  return num / den;
}

// Right-hand side of the lower-tail deviation bound for the growth interface:
//   P{ xi_[nx](nt) <= n t g(x/t) - 2nh } <= exp{-n (a(x,t) h^{3/2} - C h^{5/2})}
// with a(x,t) = (4 sqrt(2)/3) sqrt(t-x)/(t+x) and C fitted from rate_psi via
// the substitution w = t g(x/t), u = x + t g(x/t).
struct InterfaceTailBound {
  double constant = 0;    // a(x,t)
  double correction = 0;  // fitted C
  double exponent = 0;    // n (a h^{3/2} - C h^{5/2}), clamped at 0
  double bound = 1;       // exp(-exponent)
};

inline InterfaceTailBound interface_tail_bound(double x, double t, double h, double n) {
  if (!(t > 0) || !(x > -t) || !(x < t))
    throw std::domain_error("interface_tail_bound: need x in (-t, t)");
  if (h < 0 || n < 0) throw std::domain_error("interface_tail_bound: h and n must be nonnegative");
  InterfaceTailBound b;
  b.constant = (4.0 * std::sqrt(2.0) / 3.0) * std::sqrt(t - x) / (t + x);
  double w = (t - x) * (t - x) / (4.0 * t);  // = t g(x/t) for |x| < t
  b.correction = fit_psi_correction(w, t);
  b.exponent = std::max(0.0, n * (b.constant * std::pow(h, 1.5) - b.correction * std::pow(h, 2.5)));
  b.bound = std::exp(-b.exponent);
  return b;
}

// Single sample of xi_i(t) by inverting passage times along {(i+j, j)}:
// xi_i(t) = max{ j >= max(-i,0) : G(i+j, j) <= t }, falling back to the
// initial value when no j qualifies.
inline std::int64_t sample_xi_from_lpp(std::int64_t i, double t, std::uint64_t seed) {
  std::int64_t j0 = std::max<std::int64_t>(-i, 0);
  if (!(t > 0)) return j0;
  double jstar = (t - double(i)) * (t - double(i)) / (4.0 * t);
  std::int64_t jcap = std::int64_t(jstar + 8.0 * std::cbrt(jstar + 1.0) + 24.0);
  for (;;) {
    std::int64_t amax = i + jcap;
    std::vector<double> row(std::size_t(jcap), 0.0);
    std::int64_t xi = j0;
    bool exceeded = false;
    for (std::int64_t a = 1; a <= amax && !exceeded; ++a) {
      Stream rs = lpp_row_stream(seed, a);
      double left = 0.0;
      for (std::int64_t j = 1; j <= jcap; ++j) {
        double v = rs.next_exp() + std::max(row[std::size_t(j - 1)], left);
        row[std::size_t(j - 1)] = v;
        left = v;
        if (a - i == j && j > j0) {
          if (v <= t) xi = j;
          else { exceeded = true; break; }
        }
      }
    }
    if (exceeded && xi < jcap) return xi;
    jcap *= 2;  // left tail fell below the probe cap; extend reproducibly
  }
}

struct TailRow {
  std::int64_t n = 0;
  std::int64_t reps = 0;
  double c = 0;          // probe depth constant
  double threshold = 0;  // tail cut in absolute units
  double empirical_p = 0;
  double ci_lo = 0, ci_hi = 0;
};

struct LowerTailReport {
  std::vector<TailRow> rows;
  double smallest_c = std::numeric_limits<double>::quiet_NaN();
  double eps = 0;
};

// Monte Carlo probe of the lower-tail hypothesis: for each n in the grid,
// estimates P{ H([n a_n],[n b_n]) < n (sqrt(a_n)+sqrt(b_n))^2 - C n^{1/3} }
// for every C in c_grid, with Wilson intervals, and reports the smallest C
// whose empirical tail is <= eps at every n. Evidence only, not a proof.
inline LowerTailReport lower_tail_probe(const std::vector<std::int64_t>& ns,
                                            const std::vector<double>& alpha_n,
                                            const std::vector<double>& beta_n, double alpha,
                                            double beta, double big_b,
                                            const std::vector<double>& c_grid, int reps,
                                            std::uint64_t seed, double eps = 0.05) {
  if (ns.size() != alpha_n.size() || ns.size() != beta_n.size())
    throw std::invalid_argument("lower_tail_probe: mismatched sequences");
  for (std::size_t k = 0; k < ns.size(); ++k) {
    double n = double(ns[k]);
    double closeness = std::abs(alpha_n[k] - alpha) + std::abs(beta_n[k] - beta);
    if (closeness > big_b * std::pow(n, -1.0 / 3.0) * std::cbrt(std::log(n)) + 1e-12)
      throw std::invalid_argument("lower_tail_probe: sequence violates the closeness condition");
  }
  LowerTailReport rep;
  rep.eps = eps;
  if (reps <= 0) return rep;
  std::vector<bool> c_ok(c_grid.size(), true);
  for (std::size_t k = 0; k < ns.size(); ++k) {
    std::int64_t n = ns[k];
    std::int64_t m = std::int64_t(double(n) * alpha_n[k]);
    std::int64_t nn = std::int64_t(double(n) * beta_n[k]);
    std::vector<double> samples(std::size_t(std::max(reps, 0)));
    for (int r = 0; r < reps; ++r)
      samples[std::size_t(r)] =
          lpp_h(m, nn, derive_stream(seed, std::uint64_t(n), std::uint64_t(r)));
    std::sort(samples.begin(), samples.end());
    double center = double(n) * shape_limit(alpha_n[k], beta_n[k]);
    for (std::size_t ci = 0; ci < c_grid.size(); ++ci) {
      double cut = center - c_grid[ci] * std::cbrt(double(n));
      auto below = std::size_t(std::lower_bound(samples.begin(), samples.end(), cut) -
                               samples.begin());
      TailRow row;
      row.n = n;
      row.reps = reps;
      row.c = c_grid[ci];
      row.threshold = cut;
      row.empirical_p = double(below) / double(reps);
      Interval w = wilson_interval(below, std::size_t(reps));
      row.ci_lo = w.lo;
      row.ci_hi = w.hi;
      if (row.empirical_p > eps) c_ok[ci] = false;
      rep.rows.push_back(row);
    }
  }
  if (reps > 0)
    for (std::size_t ci = 0; ci < c_grid.size(); ++ci)
      if (c_ok[ci]) {
        rep.smallest_c = c_grid[ci];
        break;
      }
  return rep;
}

struct BoundCheckRow {
  std::int64_t n = 0;
  std::int64_t reps = 0;
  double threshold = 0;
  double empirical_p = 0;
  double ci_lo = 0, ci_hi = 0;
  double bound = 0;  // exp(-n Psi) + 3 binomial SE
  bool violated = false;
};

// Non-asymptotic direction of the upper-tail bound: for every n,
// P{ H([nr],[nw]) > nt } <= exp(-n Psi_{w,t}(r)).
inline std::vector<BoundCheckRow> ld_bound_check(double w, double r, double t,
                                                 const std::vector<std::int64_t>& ns, int reps,
                                                 std::uint64_t seed) {
  double psi = rate_psi(w, t, r);
  std::vector<BoundCheckRow> rows;
  for (std::int64_t n : ns) {
    std::int64_t m = std::int64_t(double(n) * r);
    std::int64_t nn = std::int64_t(double(n) * w);
    std::size_t count = 0;
    for (int rep = 0; rep < reps; ++rep) {
      double h = lpp_h(m, nn, derive_stream(seed, std::uint64_t(n), std::uint64_t(rep)));
      if (h > double(n) * t) ++count;
    }
    BoundCheckRow row;
    row.n = n;
    row.reps = reps;
    row.threshold = double(n) * t;
    row.empirical_p = reps > 0 ? double(count) / double(reps) : 0.0;
    if (reps > 0) {
      Interval wi = wilson_interval(count, std::size_t(reps));
      row.ci_lo = wi.lo;
      row.ci_hi = wi.hi;
      double se = std::sqrt(row.empirical_p * (1 - row.empirical_p) / double(reps));
      row.bound = std::exp(-double(n) * psi) + 3.0 * se;
      row.violated = row.empirical_p > row.bound;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace taseplab
