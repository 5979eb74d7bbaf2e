#pragma once

// Small statistics toolbox used by the verification suites: moments,
// quantiles, Kolmogorov-Smirnov distances, Wilson score intervals and
// log-log regression with a bootstrap confidence interval.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "taseplab/rng.hpp"

namespace taseplab {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty sample");
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need at least 2 samples");
  double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

inline double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

// Linear-interpolation quantile (R type 7) on a copy of the data.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty sample");
  if (q < 0 || q > 1) throw std::invalid_argument("quantile: q outside [0,1]");
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  std::size_t lo = std::size_t(pos);
  if (lo + 1 >= v.size()) return v.back();
  double frac = pos - double(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

inline double iqr(const std::vector<double>& v) {
  return quantile(v, 0.75) - quantile(v, 0.25);
}

// One-sample KS distance against Uniform[a,b].
inline double ks_distance_uniform(std::vector<double> samples, double a, double b) {
  if (samples.empty()) throw std::invalid_argument("ks_distance_uniform: empty sample");
  if (!(b > a)) throw std::invalid_argument("ks_distance_uniform: b must exceed a");
  std::sort(samples.begin(), samples.end());
  double n = double(samples.size());
  double d = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = std::clamp((samples[i] - a) / (b - a), 0.0, 1.0);
    d = std::max(d, std::abs(f - double(i) / n));
    d = std::max(d, std::abs(double(i + 1) / n - f));
  }
  return d;
}

// Two-sample KS distance; ties are handled by advancing both walks past the
// tied value before comparing.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  return d;
}

// Asymptotic two-sample KS critical value at level alpha (0.01 or 0.05).
inline double ks_two_sample_critical(double alpha, std::size_t n, std::size_t m) {
  double c;
  if (alpha == 0.01) c = 1.62762;
  else if (alpha == 0.05) c = 1.35810;
  else c = std::sqrt(-0.5 * std::log(alpha / 2));
  return c * std::sqrt(double(n + m) / (double(n) * double(m)));
}

struct Interval {
  double lo = 0, hi = 0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Wilson score interval for a binomial proportion, default 95%.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959964) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: zero trials");
  double n = double(trials);
  double p = double(successes) / n;
  double z2 = z * z;
  double denom = 1 + z2 / n;
  double center = (p + z2 / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {center - half, center + half};
}

struct LinearFit {
  double slope = 0, intercept = 0;
};

inline LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("linear_fit: need matched samples of size >= 2");
  double xb = mean(xs), yb = mean(ys);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xb) * (xs[i] - xb);
    sxy += (xs[i] - xb) * (ys[i] - yb);
  }
  if (sxx == 0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  double slope = sxy / sxx;
  return {slope, yb - slope * xb};
}

// Percentile bootstrap CI for the slope of log(spread) against log(scale).
// `groups[g]` holds the per-replica observations at scale `scales[g]`;
// `spread` maps a group to its dispersion statistic.
template <class SpreadFn>
Interval bootstrap_slope_ci(const std::vector<double>& scales,
                            const std::vector<std::vector<double>>& groups, SpreadFn spread,
                            int resamples, std::uint64_t seed, double level = 0.95) {
  if (scales.size() != groups.size() || scales.size() < 2)
    throw std::invalid_argument("bootstrap_slope_ci: mismatched groups");
  Stream rng(seed, static_cast<std::uint64_t>(StreamKind::Bootstrap));
  std::vector<double> slopes;
  slopes.reserve(std::size_t(resamples));
  std::vector<double> lxs(scales.size()), lys(scales.size());
  std::vector<double> resampled;
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const auto& grp = groups[g];
      resampled.resize(grp.size());
      for (auto& x : resampled) x = grp[rng.next_index(grp.size())];
      lxs[g] = std::log(scales[g]);
      lys[g] = std::log(spread(resampled));
    }
    slopes.push_back(linear_fit(lxs, lys).slope);
  }
  std::sort(slopes.begin(), slopes.end());
  double tail = (1 - level) / 2;
  auto pick = [&](double q) {
    double pos = q * double(slopes.size() - 1);
    return slopes[std::size_t(pos + 0.5)];
  };
  return {pick(tail), pick(1 - tail)};
}

}  // namespace taseplab
