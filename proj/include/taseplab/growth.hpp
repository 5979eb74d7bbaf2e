#pragma once

// The variational coupling: corner-growth interfaces xi^k driven by the same
// clocks as the exclusion process, the identity expressing the height field
// as a supremum over k of initial heights minus xi^k growth, the induced
// formula for the second-class particle, and the monotonicity properties the
// coupling guarantees.
//
// xi^k starts from the wedge xi^k_i(0) = max(-i, 0) and column i advances one
// step up at each epoch of D_{k+i} provided xi^k_i <= xi^k_{i-1} and
// xi^k_i <= xi^k_{i+1} + 1 survive the move. On the truncated window the
// missing exterior columns are replaced by boundary conventions that mirror
// the lattice conventions exactly: the rightmost column is unconstrained from
// the right (vacant ghost), and the left constraint is a frozen phantom
// column. For a coupled family the phantom equals z_k(0) - z_{left-1}(0) --
// every member then sees the same frozen height below the window edge as the
// height field itself, which is what makes the variational identity an exact
// per-realization statement on the finite window rather than an approximation.
// A standalone interface uses its own frozen wedge value instead.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "taseplab/clocks.hpp"
#include "taseplab/lattice.hpp"

namespace taseplab {

class XiProcess {
 public:
  // Standalone interface with base k: frozen-wedge phantom.
  static XiProcess wedge(std::int64_t k, Window w) {
    return XiProcess(k, w, std::max<std::int64_t>(k - w.left + 1, 0));
  }

  // Member of a family coupled to the height field with initial data z0.
  static XiProcess coupled(std::int64_t k, Window w, const HeightField& z0) {
    return XiProcess(k, w, z0.at(k) - z0.phantom_left);
  }

  std::int64_t base() const { return base_; }
  double time() const { return time_; }
  std::int64_t col_lo() const { return col_lo_; }
  std::int64_t col_hi() const { return col_hi_; }

  std::int64_t value(std::int64_t col) const {
    if (col < col_lo_ || col > col_hi_)
      throw std::invalid_argument("xi: column outside window coverage");
    return xi_[std::size_t(col - col_lo_)];
  }
  std::int64_t value_at_site(std::int64_t site) const { return value(site - base_); }

  // Consume the epochs of `events` with time in (current, until]; `events`
  // must be the same globally ordered sweep on every call.
  void advance(const std::vector<ClockEvent>& events, double until) {
    while (cursor_ < events.size() && events[cursor_].time <= until) {
      const auto& ev = events[cursor_++];
      std::int64_t j = ev.site - base_;
      std::size_t idx = std::size_t(j - col_lo_);
      std::int64_t up = xi_[idx] + 1;
      bool left_ok = (j == col_lo_) ? (up <= phantom_) : (up <= xi_[idx - 1]);
      bool right_ok = (j == col_hi_) || (xi_[idx] <= xi_[std::size_t(j + 1 - col_lo_)]);
      if (left_ok && right_ok) xi_[idx] = up;
    }
    time_ = until;
  }

  // Interface constraints at the current state, ignoring the phantoms.
  bool constraints_hold() const {
    for (std::size_t i = 1; i < xi_.size(); ++i) {
      if (xi_[i] > xi_[i - 1]) return false;
      if (xi_[i - 1] > xi_[i] + 1) return false;
    }
    return true;
  }

 private:
  XiProcess(std::int64_t k, Window w, std::int64_t phantom)
      : base_(k), col_lo_(w.left - k), col_hi_(w.right - k), phantom_(phantom) {
    if (!w.contains(k)) throw std::invalid_argument("xi: base outside window");
    xi_.resize(std::size_t(col_hi_ - col_lo_ + 1));
    for (std::int64_t j = col_lo_; j <= col_hi_; ++j)
      xi_[std::size_t(j - col_lo_)] = std::max<std::int64_t>(-j, 0);
  }

  std::int64_t base_, col_lo_, col_hi_, phantom_;
  std::vector<std::int64_t> xi_;
  std::size_t cursor_ = 0;
  double time_ = 0;
};

// Standalone growth interface with base k evolved through the log's epochs.
inline XiProcess xi_evolve(std::int64_t k, const ClockLog& clocks, double until) {
  if (until > clocks.window().horizon)
    throw std::invalid_argument("xi_evolve: until beyond the clock horizon");
  XiProcess xi = XiProcess::wedge(k, clocks.window());
  xi.advance(clocks.merged(), until);
  return xi;
}

struct VariationalValue {
  std::int64_t value = 0;
  std::vector<std::int64_t> argmax;  // all k attaining the supremum
  bool edge = false;                 // argmax touches the window truncation
};

// Lazily evolved family {xi^k : k in window} over one clock log, coupled to
// the height field with initial data z0.
class XiFamily {
 public:
  XiFamily(const ClockLog& clocks, HeightField z0)
      : window_(clocks.window()), events_(clocks.merged()), z0_(std::move(z0)) {}

  const Window& window() const { return window_; }
  const HeightField& initial_heights() const { return z0_; }

  void set_time(double t) {
    if (t < time_) throw std::invalid_argument("xi family cannot rewind");
    time_ = t;
  }

  XiProcess& at(std::int64_t k) {
    auto it = cache_.find(k);
    if (it == cache_.end())
      it = cache_.emplace(k, XiProcess::coupled(k, window_, z0_)).first;
    it->second.advance(events_, time_);
    return it->second;
  }

  // z_i(t) = sup_k { z_k(0) - xi^k_{i-k}(t) } over the window's k range.
  VariationalValue variational_z(std::int64_t i) {
    VariationalValue out;
    out.value = std::numeric_limits<std::int64_t>::min();
    for (std::int64_t k = window_.left; k <= window_.right; ++k) {
      std::int64_t v = z0_.at(k) - at(k).value_at_site(i);
      if (v > out.value) {
        out.value = v;
        out.argmax.clear();
      }
      if (v == out.value) out.argmax.push_back(k);
    }
    out.edge = !out.argmax.empty() &&
               (out.argmax.front() == window_.left || out.argmax.back() == window_.right);
    return out;
  }

  // X(t) = inf{ i : the sup is attained by some k >= x0 }.
  std::int64_t variational_x(std::int64_t x0) {
    for (std::int64_t i = window_.left; i <= window_.right; ++i) {
      std::int64_t full = std::numeric_limits<std::int64_t>::min();
      std::int64_t restricted = full;
      for (std::int64_t k = window_.left; k <= window_.right; ++k) {
        std::int64_t v = z0_.at(k) - at(k).value_at_site(i);
        full = std::max(full, v);
        if (k >= x0) restricted = std::max(restricted, v);
      }
      if (restricted == full) return i;
    }
    throw std::runtime_error("variational_x: no attaining site inside the window");
  }

 private:
  Window window_;
  std::vector<ClockEvent> events_;
  HeightField z0_;
  std::map<std::int64_t, XiProcess> cache_;
  double time_ = 0;
};

struct MonotonicityReport {
  std::int64_t checks = 0;
  std::int64_t coupling_violations = 0;  // failures of xi^k_{i-k} <= xi^l_{i-l}, k <= l
  std::int64_t argmax_violations = 0;    // failures of max-argmax monotone in i
};

// Verifies the coupling inequality for adjacent bases (which implies it for
// all k <= l by transitivity) plus a strided sample of distant pairs, and the
// argmax-monotonicity property at the family's current time.
inline MonotonicityReport check_monotonicity(XiFamily& fam) {
  MonotonicityReport rep;
  const Window& w = fam.window();
  auto check_pair = [&](std::int64_t k, std::int64_t l) {
    for (std::int64_t i = w.left; i <= w.right; ++i) {
      ++rep.checks;
      if (fam.at(k).value_at_site(i) > fam.at(l).value_at_site(i)) ++rep.coupling_violations;
    }
  };
  for (std::int64_t k = w.left; k + 1 <= w.right; ++k) check_pair(k, k + 1);
  for (std::int64_t gap : {std::int64_t(7), std::int64_t(33), w.size() / 2})
    for (std::int64_t k = w.left; k + gap <= w.right; k += std::max<std::int64_t>(gap, 1))
      check_pair(k, k + gap);

  // Sites whose argmax touches the truncation boundary are excluded: there
  // the supremum over all of Z is invisible and the maximal index is an
  // artifact of the cut.
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t i = w.left; i <= w.right; ++i) {
    auto v = fam.variational_z(i);
    if (v.edge) continue;
    ++rep.checks;
    if (v.argmax.back() < prev) ++rep.argmax_violations;
    prev = v.argmax.back();
  }
  return rep;
}

struct VariationalSuiteResult {
  std::int64_t z_checks = 0, z_violations = 0;
  std::int64_t x_checks = 0, x_violations = 0;
  std::int64_t mono_checks = 0, mono_coupling_violations = 0, mono_argmax_violations = 0;
  std::int64_t edge_flags = 0;
  std::int64_t argmax_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t argmax_max = std::numeric_limits<std::int64_t>::min();
  bool clean() const {
    return z_violations == 0 && x_violations == 0 && mono_coupling_violations == 0 &&
           mono_argmax_violations == 0;
  }
  void merge(const VariationalSuiteResult& o) {
    z_checks += o.z_checks;
    z_violations += o.z_violations;
    x_checks += o.x_checks;
    x_violations += o.x_violations;
    mono_checks += o.mono_checks;
    mono_coupling_violations += o.mono_coupling_violations;
    mono_argmax_violations += o.mono_argmax_violations;
    edge_flags += o.edge_flags;
    argmax_min = std::min(argmax_min, o.argmax_min);
    argmax_max = std::max(argmax_max, o.argmax_max);
  }
};

// One coupled realization: evolve (eta, z, X) directly event by event, and at
// each snapshot compare against the variational formulas and run the
// monotonicity checks. All comparisons are exact integer equalities.
inline VariationalSuiteResult run_variational_suite(const Configuration& initial, std::int64_t x0,
                                                    const ClockLog& clocks,
                                                    const std::vector<double>& snapshots,
                                                    bool check_mono = true) {
  if (initial.at(x0) != 0)
    throw std::invalid_argument("variational suite: discrepancy start site must be vacant");
  Configuration cfg = initial;
  HeightField z = height_process(cfg);
  HeightField z0 = z;
  EventCore<true, true> core{cfg, &z};
  core.x = x0;

  XiFamily fam(clocks, z0);
  auto events = clocks.merged();
  std::size_t cursor = 0;

  VariationalSuiteResult res;
  std::vector<double> snap = snapshots;
  std::sort(snap.begin(), snap.end());
  for (double t : snap) {
    while (cursor < events.size() && events[cursor].time <= t) {
      core.apply(events[cursor].site);
      ++cursor;
    }
    fam.set_time(t);
    const Window& w = cfg.window;
    for (std::int64_t i = w.left; i <= w.right; ++i) {
      auto v = fam.variational_z(i);
      ++res.z_checks;
      if (v.value != z.at(i)) ++res.z_violations;
      if (v.edge) ++res.edge_flags;
      res.argmax_min = std::min(res.argmax_min, v.argmax.front());
      res.argmax_max = std::max(res.argmax_max, v.argmax.back());
    }
    ++res.x_checks;
    if (core.x == kSecondClassExited || fam.variational_x(x0) != core.x) ++res.x_violations;
    if (check_mono) {
      auto mono = check_monotonicity(fam);
      res.mono_checks += mono.checks;
      res.mono_coupling_violations += mono.coupling_violations;
      res.mono_argmax_violations += mono.argmax_violations;
    }
  }
  return res;
}

}  // namespace taseplab
