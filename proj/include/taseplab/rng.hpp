#pragma once

// Counter-based random number streams. Every random object in the library is
// derived from a (seed, key...) tuple through a splitmix64 finalizer, so that
// enlarging a site window or reordering replicas never perturbs the stream of
// any existing key. This is what makes window-doubling an exact test rather
// than a statistical one.

#include <cmath>
#include <cstdint>

namespace taseplab {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stream-key derivation: order-sensitive hash of up to three subkeys.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t k1 = 0,
                                   std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (k1 + 0x8000000000000001ull));
  h = mix64(h ^ (k2 + 0x4000000000000003ull));
  h = mix64(h ^ (k3 + 0x2000000000000005ull));
  return h;
}

// Fixed salts separating the independent uses of one user seed.
enum class StreamKind : std::uint64_t {
  Clocks = 1,
  Occupancy = 2,
  LppWeights = 3,
  Bootstrap = 4,
  Replica = 5,
};

// Uniform on the open interval (0,1); 2^52 equally spaced values, never 0 or 1.
inline double u01(std::uint64_t bits) { return (double)((bits >> 12) + 0.5) * 0x1.0p-52; }

namespace detail {

// Marsaglia-Tsang ziggurat tables for the Exp(1) density, 256 layers.
struct ZigguratExpTable {
  double x[257];
  ZigguratExpTable() {
    const double r = 7.69711747013104972;
    const double v = 0.0039496598225815571993;
    x[256] = v * std::exp(r);
    x[255] = r;
    for (int i = 254; i >= 1; --i) x[i] = -std::log(std::exp(-x[i + 1]) + v / x[i + 1]);
    x[0] = 0.0;
  }
};

inline const ZigguratExpTable& zig_exp() {
  static const ZigguratExpTable table;
  return table;
}

}  // namespace detail

// Exp(1) variate from a splitmix64 state. The layer index reuses the low bits
// of the same word whose high bits form the uniform, which keeps the common
// path at one RNG step per sample. The table-reference overload lets hot
// loops hoist the static lookup.
inline double exp_variate(std::uint64_t& state, const detail::ZigguratExpTable& zt) {
  for (;;) {
    std::uint64_t b = splitmix64(state);
    int i = int(b & 255);
    double ux = u01(b) * zt.x[i + 1];
    if (ux < zt.x[i]) return ux;
    if (i == 255) return zt.x[255] - std::log(u01(splitmix64(state)));
    double f0 = std::exp(-zt.x[i]);
    double f1 = std::exp(-zt.x[i + 1]);
    if (f1 + u01(splitmix64(state)) * (f0 - f1) < std::exp(-ux)) return ux;
  }
}

inline double exp_variate(std::uint64_t& state) { return exp_variate(state, detail::zig_exp()); }

// Lightweight keyed stream handle.
class Stream {
 public:
  Stream() : state_(derive_stream(0)) {}
  explicit Stream(std::uint64_t seed, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
                  std::uint64_t k3 = 0)
      : state_(derive_stream(seed, k1, k2, k3)) {}

  std::uint64_t next_u64() { return splitmix64(state_); }
  double next_u01() { return u01(splitmix64(state_)); }
  double next_exp() { return exp_variate(state_); }
  // Bernoulli(p) draw.
  bool next_bool(double p) { return next_u01() < p; }
  // Uniform index in [0, n).
  std::size_t next_index(std::size_t n) { return std::size_t(next_u01() * double(n)) % n; }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

inline Stream site_stream(std::uint64_t seed, StreamKind kind, std::int64_t site) {
  return Stream(seed, static_cast<std::uint64_t>(kind), static_cast<std::uint64_t>(site));
}

}  // namespace taseplab
