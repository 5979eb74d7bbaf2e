#pragma once

// Deterministic numerics for the conservation law rho_t + (rho(1-rho))_x = 0:
// the flux and its concave conjugate, piecewise initial profiles and their
// exact antiderivatives, the Hopf-Lax variational solution with extremal
// maximizers, Lax-Oleinik densities, forward characteristics by monotone
// bisection, standing-assumption checks and empirical estimation of the
// local quadratic-separation constants.
//
// Profiles are piecewise linear between strictly increasing breakpoints and
// may jump at a breakpoint (Riemann data is represented exactly, not
// smoothed). The antiderivative is then piecewise quadratic, so each piece of
// the Hopf-Lax objective is a quadratic with a closed-form argmax and no
// generic optimizer is involved.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace taseplab {

inline constexpr double kTieTol = 1e-9;  // y-space tolerance: maximizer ties, shock flag

// f(rho) = rho(1-rho) on [0,1].
inline double flux(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("flux: rho outside [0,1]");
  return rho * (1.0 - rho);
}

// g(x) = sup_{0<=rho<=1} { f(rho) - x rho }, the nonincreasing convex conjugate.
inline double legendre_g(double x) {
  if (x < -1.0) return -x;
  if (x > 1.0) return 0.0;
  return 0.25 * (1.0 - x) * (1.0 - x);
}

inline double legendre_g_prime(double x) {
  if (x < -1.0) return -1.0;
  if (x > 1.0) return 0.0;
  return 0.5 * (x - 1.0);
}

enum class ProfileKind { Constant, Riemann, Bump, Piecewise };

// Macroscopic initial density 0 <= rho0(x) <= 1.
class Profile {
 public:
  static Profile constant(double c) {
    check_density(c);
    Profile p;
    p.kind_ = ProfileKind::Constant;
    p.ext_left_ = p.ext_right_ = c;
    p.p0_ = c;
    return p;
  }

  // Density lambda left of the origin, rho to the right; exact step.
  static Profile riemann(double lambda, double rho) {
    check_density(lambda);
    check_density(rho);
    Profile p;
    p.kind_ = ProfileKind::Riemann;
    p.xs_ = {0.0};
    p.vleft_ = {lambda};
    p.vright_ = {rho};
    p.ext_left_ = lambda;
    p.ext_right_ = rho;
    p.p0_ = lambda;
    p.p1_ = rho;
    return p;
  }

  // base + amp*exp(-x^2), tabulated piecewise linearly on [-halfwidth, halfwidth].
  static Profile bump(double base, double amp, double halfwidth = 8.0, int points = 4001) {
    if (points < 3 || halfwidth <= 0) throw std::invalid_argument("bump: bad tabulation");
    check_density(base);
    check_density(base + amp);
    Profile p;
    p.kind_ = ProfileKind::Bump;
    p.p0_ = base;
    p.p1_ = amp;
    p.xs_.resize(std::size_t(points));
    p.vleft_.resize(std::size_t(points));
    p.vright_.resize(std::size_t(points));
    for (int i = 0; i < points; ++i) {
      double x = -halfwidth + 2.0 * halfwidth * double(i) / double(points - 1);
      double v = base + amp * std::exp(-x * x);
      p.xs_[std::size_t(i)] = x;
      p.vleft_[std::size_t(i)] = v;
      p.vright_[std::size_t(i)] = v;
    }
    p.ext_left_ = p.vleft_.front();
    p.ext_right_ = p.vright_.back();
    return p;
  }

  // Continuous piecewise-linear data; extended by its end values.
  static Profile piecewise(std::vector<double> xs, std::vector<double> vals) {
    if (xs.size() != vals.size() || xs.size() < 2)
      throw std::invalid_argument("piecewise: need matching breakpoints/values, size >= 2");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (!(xs[i] < xs[i + 1]))
        throw std::invalid_argument("piecewise: breakpoints must be strictly increasing");
    for (double v : vals) check_density(v);
    Profile p;
    p.kind_ = ProfileKind::Piecewise;
    p.xs_ = std::move(xs);
    p.vleft_ = vals;
    p.vright_ = std::move(vals);
    p.ext_left_ = p.vleft_.front();
    p.ext_right_ = p.vright_.back();
    return p;
  }

  ProfileKind kind() const { return kind_; }
  const std::vector<double>& breakpoints() const { return xs_; }
  double ext_left() const { return ext_left_; }
  double ext_right() const { return ext_right_; }
  // Closed-form parameters: constant value, (lambda,rho) or (base,amp).
  double param0() const { return p0_; }
  double param1() const { return p1_; }
  const std::vector<double>& values_left() const { return vleft_; }
  const std::vector<double>& values_right() const { return vright_; }

  double value_right(double x) const {  // lim_{u -> x+} rho0(u)
    if (xs_.empty()) return ext_left_;
    if (x < xs_.front()) return ext_left_;
    if (x >= xs_.back()) return ext_right_;
    std::size_t j = segment_of(x);
    if (x == xs_[j]) return vright_[j];
    double w = (x - xs_[j]) / (xs_[j + 1] - xs_[j]);
    return vright_[j] + w * (vleft_[j + 1] - vright_[j]);
  }

  double value_left(double x) const {  // lim_{u -> x-} rho0(u)
    if (xs_.empty()) return ext_left_;
    if (x <= xs_.front()) return ext_left_;
    if (x > xs_.back()) return ext_right_;
    std::size_t j = segment_of_left(x);
    if (x == xs_[j + 1]) return vleft_[j + 1];
    double w = (x - xs_[j]) / (xs_[j + 1] - xs_[j]);
    return vright_[j] + w * (vleft_[j + 1] - vright_[j]);
  }

  double value(double x) const { return value_right(x); }

  bool analytic() const { return kind_ != ProfileKind::Piecewise; }

  // Exact rho0 for tagged closed forms (falls back to the tabulation).
  double analytic_value(double x) const {
    switch (kind_) {
      case ProfileKind::Constant: return p0_;
      case ProfileKind::Riemann: return x < 0 ? p0_ : p1_;
      case ProfileKind::Bump: return p0_ + p1_ * std::exp(-x * x);
      case ProfileKind::Piecewise: return value(x);
    }
    return 0;
  }

  double analytic_slope(double x) const {
    switch (kind_) {
      case ProfileKind::Constant: return 0.0;
      case ProfileKind::Riemann:
        if (p0_ == p1_) return 0.0;
        return std::numeric_limits<double>::quiet_NaN();
      case ProfileKind::Bump: return -2.0 * x * p1_ * std::exp(-x * x);
      case ProfileKind::Piecewise: break;
    }
    // one-sided slopes of the containing segments
    double sl = slope_right(x);
    double sr = slope_left(x);
    if (std::abs(sl - sr) < 1e-12) return 0.5 * (sl + sr);
    return std::numeric_limits<double>::quiet_NaN();
  }

  double slope_right(double x) const {
    if (xs_.size() < 2 || x < xs_.front() || x >= xs_.back()) return 0.0;
    std::size_t j = segment_of(x);
    return (vleft_[j + 1] - vright_[j]) / (xs_[j + 1] - xs_[j]);
  }

  double slope_left(double x) const {
    if (xs_.size() < 2 || x <= xs_.front() || x > xs_.back()) return 0.0;
    std::size_t j = segment_of_left(x);
    return (vleft_[j + 1] - vright_[j]) / (xs_[j + 1] - xs_[j]);
  }

  bool continuous_at(double x) const {
    return std::abs(value_left(x) - value_right(x)) < 1e-12;
  }

 private:
  static void check_density(double v) {
    if (!(v >= 0.0 && v <= 1.0))
      throw std::invalid_argument("profile density outside [0,1]: " + std::to_string(v));
  }

  // index j with xs_[j] <= x < xs_[j+1]
  std::size_t segment_of(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t j = std::size_t(it - xs_.begin());
    return j == 0 ? 0 : j - 1;
  }
  // index j with xs_[j] < x <= xs_[j+1]
  std::size_t segment_of_left(double x) const {
    auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
    std::size_t j = std::size_t(it - xs_.begin());
    return j == 0 ? 0 : j - 1;
  }

  ProfileKind kind_ = ProfileKind::Constant;
  std::vector<double> xs_, vleft_, vright_;
  double ext_left_ = 0, ext_right_ = 0;
  double p0_ = 0, p1_ = 0;
};

// u0 with u0(0) = 0, u0(b)-u0(a) = int_a^b rho0; piecewise quadratic, global.
class Antiderivative {
 public:
  explicit Antiderivative(const Profile& p) : xs_(p.breakpoints()) {
    ext_left_ = p.ext_left();
    ext_right_ = p.ext_right();
    std::size_t m = xs_.size();
    if (m > 0) {
      U_.resize(m);
      rho_.resize(m > 1 ? m - 1 : 0);
      slope_.resize(m > 1 ? m - 1 : 0);
      U_[0] = 0.0;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        double w = xs_[j + 1] - xs_[j];
        double a = p.values_right()[j];
        double b = p.values_left()[j + 1];
        rho_[j] = a;
        slope_[j] = (b - a) / w;
        U_[j + 1] = U_[j] + 0.5 * (a + b) * w;
      }
    }
    double shift = raw(0.0);
    for (auto& u : U_) u -= shift;
  }

  double operator()(double y) const { return raw(y); }

  // Exact integral of rho0 over [a,b].
  double integral(double a, double b) const { return raw(b) - raw(a); }

  const std::vector<double>& breakpoints() const { return xs_; }
  double ext_left_density() const { return ext_left_; }
  double ext_right_density() const { return ext_right_; }
  double breakpoint_value(std::size_t j) const { return U_[j]; }
  double segment_density(std::size_t j) const { return rho_[j]; }
  double segment_slope(std::size_t j) const { return slope_[j]; }

 private:
  friend struct HopfLaxSolver;

  double raw(double y) const {
    if (xs_.empty()) return ext_left_ * y;
    if (y <= xs_.front()) return U_.front() + ext_left_ * (y - xs_.front());
    if (y >= xs_.back()) return U_.back() + ext_right_ * (y - xs_.back());
    auto it = std::upper_bound(xs_.begin(), xs_.end(), y);
    std::size_t j = std::size_t(it - xs_.begin()) - 1;
    double dy = y - xs_[j];
    return U_[j] + rho_[j] * dy + 0.5 * slope_[j] * dy * dy;
  }

  std::vector<double> xs_, U_, rho_, slope_;
  double ext_left_ = 0, ext_right_ = 0;
};

struct HopfLaxResult {
  double u = 0;        // solution value
  double y_minus = 0;  // minimal maximizer
  double y_plus = 0;   // maximal maximizer
  double rho = 0;      // Lax-Oleinik density -g'((x - y_plus)/t), right-continuous at shocks
  bool is_shock = false;
};

struct HopfLaxSolver {
  const Antiderivative& u0;
  double x, t;

  double objective(double y) const {
    double d = y + t - x;
    return u0(y) - d * d / (4.0 * t);
  }

  // Closed-form candidates of one quadratic piece [a,b] with density rho_a at
  // ya and density slope s; appends (y, objective) pairs.
  void piece_candidates(double a, double b, double ya, double rho_a, double s,
                        std::vector<std::pair<double, double>>& out) const {
    if (!(a < b)) {
      if (a == b) out.emplace_back(a, objective(a));
      return;
    }
    double curv = s - 0.5 / t;  // phi'' = curv
    if (curv < -1e-13 * (std::abs(s) + 0.5 / t + 1.0)) {
      double yv = (s * ya - rho_a - (x - t) * 0.5 / t) / curv;
      double yc = std::clamp(yv, a, b);
      out.emplace_back(yc, objective(yc));
    } else {
      out.emplace_back(a, objective(a));
      out.emplace_back(b, objective(b));
    }
  }
};

// Hopf-Lax solution u(x,t) = sup_y { u0(y) - t g((x-y)/t) } with extremal
// maximizers resolved exactly per quadratic piece. The sup restricts to
// [x-t, x+t] because u0 is 1-Lipschitz and g vanishes on [1,inf).
inline HopfLaxResult hopf_lax(const Antiderivative& u0, double x, double t,
                              double tie_tol = kTieTol) {
  if (!(t > 0)) throw std::invalid_argument("hopf_lax: t must be positive");
  const double lo = x - t, hi = x + t;
  HopfLaxSolver solver{u0, x, t};
  std::vector<std::pair<double, double>> cand;
  cand.reserve(16);

  const auto& xs = u0.breakpoints();
  if (xs.empty()) {
    solver.piece_candidates(lo, hi, lo, u0.ext_left_density(), 0.0, cand);
  } else {
    if (lo < xs.front()) {
      double b = std::min(hi, xs.front());
      solver.piece_candidates(lo, b, xs.front(), u0.ext_left_density(), 0.0, cand);
    }
    // interior segments overlapping [lo, hi]
    auto first = std::upper_bound(xs.begin(), xs.end(), lo);
    std::size_t j = (first == xs.begin()) ? 0 : std::size_t(first - xs.begin()) - 1;
    for (; j + 1 < xs.size() && xs[j] <= hi; ++j) {
      double a = std::max(lo, xs[j]);
      double b = std::min(hi, xs[j + 1]);
      if (a > b) continue;
      solver.piece_candidates(a, b, xs[j], u0.segment_density(j), u0.segment_slope(j), cand);
    }
    if (hi > xs.back()) {
      double a = std::max(lo, xs.back());
      solver.piece_candidates(a, hi, xs.back(), u0.ext_right_density(), 0.0, cand);
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cand) best = std::max(best, c.second);
  const double val_tol = 1e-12 * (1.0 + std::abs(x) + t);
  double ymin = hi, ymax = lo;
  for (const auto& c : cand) {
    if (c.second >= best - val_tol) {
      ymin = std::min(ymin, c.first);
      ymax = std::max(ymax, c.first);
    }
  }
  HopfLaxResult r;
  r.u = best;
  r.y_minus = ymin;
  r.y_plus = ymax;
  r.is_shock = (ymax - ymin) > tie_tol;
  r.rho = std::clamp(-legendre_g_prime((x - ymax) / t), 0.0, 1.0);
  return r;
}

struct Characteristic {
  double b = 0, t = 0;
  double w_minus = 0, w_plus = 0;
  bool unique(double tol = 1e-6) const { return w_plus - w_minus <= tol; }
  double mid() const { return 0.5 * (w_minus + w_plus); }
};

// Forward characteristics w^-(b,t) = inf{x : y^+(x,t) >= b} and
// w^+(b,t) = sup{x : y^-(x,t) <= b} by bisection over the monotone maps
// x -> y^{+/-}(x,t), bracketed by finite propagation speed in [b-t, b+t].
inline Characteristic characteristic(const Antiderivative& u0, double b, double t,
                                     double tol = 1e-9) {
  if (!(t > 0)) throw std::invalid_argument("characteristic: t must be positive");
  const double eps = 1e-12 * (1.0 + std::abs(b) + t);
  Characteristic ch;
  ch.b = b;
  ch.t = t;

  auto yplus_ge = [&](double x) { return hopf_lax(u0, x, t).y_plus >= b - eps; };
  auto yminus_le = [&](double x) { return hopf_lax(u0, x, t).y_minus <= b + eps; };

  {
    double lo = b - t, hi = b + t;
    if (yplus_ge(lo)) {
      ch.w_minus = lo;
    } else {
      for (int it = 0; it < 80 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        (yplus_ge(mid) ? hi : lo) = mid;
      }
      ch.w_minus = 0.5 * (lo + hi);
    }
  }
  {
    double lo = b - t, hi = b + t;
    if (yminus_le(hi)) {
      ch.w_plus = hi;
    } else {
      for (int it = 0; it < 80 && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        (yminus_le(mid) ? lo : hi) = mid;
      }
      ch.w_plus = 0.5 * (lo + hi);
    }
  }
  if (ch.w_plus < ch.w_minus) std::swap(ch.w_plus, ch.w_minus);
  return ch;
}

// Standing-assumption report for the fluctuation experiments: C^1 regularity of
// rho0 near 0, 0 < rho0(0) < 1, rho0'(0) < 1/(2t), and absence of a shock at
// (w(0,t), t). Smoothness is decided from the closed-form tag where present.
struct AssumptionReport {
  bool c1_at_origin = false;
  double rho0_left = 0, rho0_right = 0;
  bool density_interior = false;
  double slope0 = 0;
  bool slope_bound = false;
  bool characteristic_unique = false;
  double w = 0;
  bool not_shock = false;
  bool all_pass() const {
    return c1_at_origin && density_interior && slope_bound && characteristic_unique && not_shock;
  }
};

inline AssumptionReport check_assumptions(const Profile& p, double t) {
  if (!(t > 0)) throw std::invalid_argument("check_assumptions: t must be positive");
  AssumptionReport rep;
  rep.rho0_left = p.value_left(0.0);
  rep.rho0_right = p.value_right(0.0);
  bool continuous = std::abs(rep.rho0_left - rep.rho0_right) < 1e-12;

  switch (p.kind()) {
    case ProfileKind::Constant: rep.c1_at_origin = true; break;
    case ProfileKind::Bump: rep.c1_at_origin = true; break;
    case ProfileKind::Riemann: rep.c1_at_origin = (p.param0() == p.param1()); break;
    case ProfileKind::Piecewise: {
      double sl = p.slope_left(0.0), sr = p.slope_right(0.0);
      rep.c1_at_origin = continuous && std::abs(sl - sr) < 1e-12;
      break;
    }
  }

  double rho00 = 0.5 * (rep.rho0_left + rep.rho0_right);
  rep.density_interior = continuous && rho00 > 0.0 && rho00 < 1.0;
  rep.slope0 = p.analytic() ? p.analytic_slope(0.0)
                            : 0.5 * (p.slope_left(0.0) + p.slope_right(0.0));
  rep.slope_bound = rep.c1_at_origin && rep.slope0 < 0.5 / t;

  // Shock structure is macroscopic; resolve maximizer ties at 1e-4 so that
  // the value-tolerance tie width of finely tabulated profiles (~1e-6 in y)
  // is not mistaken for a shock.
  const double macro_tie = 1e-4;
  Antiderivative u0(p);
  Characteristic ch = characteristic(u0, 0.0, t);
  rep.characteristic_unique = ch.unique(macro_tie * (1.0 + t));
  rep.w = ch.mid();
  rep.not_shock = rep.characteristic_unique && !hopf_lax(u0, rep.w, t, macro_tie).is_shock;
  return rep;
}

// Empirical constants for the local quadratic separation of the Hopf-Lax
// objective and the bi-Lipschitz dependence of maximizers on x. The
// inequalities are existential in the source material; we report the largest
// constants that hold on a 201x201 grid, shrinking the x-radius geometrically
// until the estimate stabilizes.
struct SeparationEstimate {
  double delta1 = 0;        // final x-radius around w(0,t)
  double c0 = 0;            // combined constant for both inequalities
  double c0_quadratic = 0;  // from the quadratic separation
  double min_ratio = 0;     // min (y-y0)/(x-x0) over grid pairs
  double max_ratio = 0;     // max of the same
  double min_residual = 0;  // min of separation - c0*(eta-y)^2 over grid
  int iterations = 0;
};

inline SeparationEstimate separation_constants(const Profile& p, double t, double a0) {
  if (!(a0 > 0)) throw std::invalid_argument("separation_constants: a0 must be positive");
  AssumptionReport rep = check_assumptions(p, t);
  if (!rep.all_pass())
    throw std::invalid_argument("separation_constants: standing assumptions violated");

  Antiderivative u0(p);
  const double r = rep.w;
  const int nx = 201, ne = 201;
  double delta = std::min(a0, t) / 2.0;
  SeparationEstimate est;
  double prev_c0 = -1.0;

  for (int iter = 0; iter < 12; ++iter) {
    est.iterations = iter + 1;
    std::vector<double> xg(nx), yg(nx);
    bool degenerate = false;
    for (int i = 0; i < nx; ++i) {
      xg[i] = r - delta + 2.0 * delta * double(i) / double(nx - 1);
      HopfLaxResult h = hopf_lax(u0, xg[i], t);
      if (h.y_plus - h.y_minus > 1e-6) { degenerate = true; break; }
      yg[i] = h.y_plus;
    }
    if (degenerate) { delta *= 0.5; prev_c0 = -1.0; continue; }

    double c0_quad = std::numeric_limits<double>::infinity();
    double min_res_raw = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i) {
      double x = xg[i], y = yg[i];
      double fy = u0(y) - t * legendre_g((x - y) / t);
      for (int k = 0; k < ne; ++k) {
        double eta = -a0 + 2.0 * a0 * double(k) / double(ne - 1);
        if (std::abs(eta - y) < 1e-7) continue;
        double fe = u0(eta) - t * legendre_g((x - eta) / t);
        double sep = fy - fe;
        min_res_raw = std::min(min_res_raw, sep);
        c0_quad = std::min(c0_quad, std::max(sep, 0.0) / ((eta - y) * (eta - y)));
      }
    }

    double min_q = std::numeric_limits<double>::infinity();
    double max_q = 0.0;
    for (int i = 0; i < nx; ++i)
      for (int k = i + 1; k < nx; ++k) {
        double q = (yg[k] - yg[i]) / (xg[k] - xg[i]);
        min_q = std::min(min_q, q);
        max_q = std::max(max_q, q);
      }

    double c0 = std::min({c0_quad, min_q, max_q > 0 ? 1.0 / max_q : 0.0});
    est.delta1 = delta;
    est.c0 = c0;
    est.c0_quadratic = c0_quad;
    est.min_ratio = min_q;
    est.max_ratio = max_q;
    est.min_residual = min_res_raw;
    if (c0 > 0 && prev_c0 > 0 && std::abs(c0 - prev_c0) <= 0.02 * prev_c0) break;
    prev_c0 = c0;
    delta *= 0.5;
  }
  return est;
}

}  // namespace taseplab
