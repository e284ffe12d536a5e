#ifndef STEEP_RNG_HPP
#define STEEP_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace steep {

// Counter-based generator: output k of stream (seed, stream) is a fixed
// mix of (seed, stream, k), so streams can be created per batch and drawn
// from in parallel while staying bit-reproducible for a given seed.
class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ mix(stream + 0x6a09e667f3bcc909ull)),
        counter_(0) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

  // Uniform on (0, 1]: never returns 0, safe under log().
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Circular complex Gaussian CN(0, 1): radius^2 ~ Exp(1), phase uniform.
  std::complex<double> next_cgauss() {
    const double r = std::sqrt(-std::log(next_unit()));
    const double th = 2.0 * M_PI * next_unit();
    return {r * std::cos(th), r * std::sin(th)};
  }

  // Real standard normal (one Box-Muller half; the pair is not cached so
  // the draw count stays a pure function of the call sequence).
  double next_gauss() {
    const double r = std::sqrt(-2.0 * std::log(next_unit()));
    return r * std::cos(2.0 * M_PI * next_unit());
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace steep

#endif
