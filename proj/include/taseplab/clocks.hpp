#pragma once

// Per-site Poisson clock processes: the single source of randomness shared by
// every coupled process of one realization. Epochs of site i are generated
// from the stream keyed (seed, Clocks, i), so enlarging the window leaves the
// clocks of existing sites bit-identical.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "taseplab/rng.hpp"

namespace taseplab {

struct Window {
  std::int64_t left = 0, right = 0;  // inclusive site bounds
  double horizon = 0;                // total simulated time

  std::int64_t size() const { return right - left + 1; }
  bool contains(std::int64_t site) const { return site >= left && site <= right; }
  void validate() const {
    if (!(left < 0 && 0 < right)) throw std::invalid_argument("window must straddle the origin");
    if (!(horizon >= 0)) throw std::invalid_argument("window horizon must be nonnegative");
  }
};

struct ClockEvent {
  double time;
  std::int64_t site;
  bool operator<(const ClockEvent& o) const {
    return time != o.time ? time < o.time : site < o.site;
  }
};

// Materialized per-site sorted epoch lists on (0, horizon].
class ClockLog {
 public:
  ClockLog(Window w, std::uint64_t seed) : window_(w), seed_(seed) {
    w.validate();
    epochs_.resize(std::size_t(w.size()));
    for (std::int64_t s = w.left; s <= w.right; ++s) {
      Stream st = site_stream(seed, StreamKind::Clocks, s);
      auto& v = epochs_[std::size_t(s - w.left)];
      double t = st.next_exp();
      while (t <= w.horizon) {
        v.push_back(t);
        t += st.next_exp();
      }
    }
  }

  const Window& window() const { return window_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<double>& site_epochs(std::int64_t site) const {
    if (!window_.contains(site)) throw std::invalid_argument("site outside clock window");
    return epochs_[std::size_t(site - window_.left)];
  }

  std::size_t total_epochs() const {
    std::size_t n = 0;
    for (const auto& v : epochs_) n += v.size();
    return n;
  }

  // Single global time-ordered sweep of all epochs: the order every coupled
  // process consumes.
  std::vector<ClockEvent> merged() const {
    std::vector<ClockEvent> ev;
    ev.reserve(total_epochs());
    for (std::int64_t s = window_.left; s <= window_.right; ++s)
      for (double t : epochs_[std::size_t(s - window_.left)]) ev.push_back({t, s});
    std::sort(ev.begin(), ev.end());
    return ev;
  }

 private:
  Window window_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> epochs_;
};

inline ClockLog sample_clocks(Window w, std::uint64_t seed) { return ClockLog(w, seed); }

}  // namespace taseplab
