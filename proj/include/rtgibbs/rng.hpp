#ifndef RTGIBBS_RNG_HPP
#define RTGIBBS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace rtgibbs {

namespace detail {
// splitmix64 finalizer, used to spread (seed, stream) pairs into independent
// engine seeds. Distinct streams from one master seed never share state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

/// Deterministic random stream: identical (seed, stream) pairs reproduce
/// identical variate sequences. The engine is the bit-exact standard
/// mt19937_64 and every distribution transform below is hand-rolled, so
/// output does not depend on the standard library implementation.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(detail::splitmix64(detail::splitmix64(seed) ^ stream)) {}

  std::uint64_t seed_word() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the Marsaglia polar method (second variate cached).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rtgibbs

#endif
