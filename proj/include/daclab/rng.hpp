#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace daclab {

/// splitmix64 mixing step, used to derive substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream.
///
/// The engine (mt19937_64) and all transforms below are fully specified,
/// so a given seed yields the same sequence on every platform. Standard
/// library distributions are avoided on purpose: their output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream keyed by up to three indices. Substreams with
  /// distinct (master, a, b, c) never share state, which makes results
  /// reproducible under any trial scheduling.
  static Rng substream(std::uint64_t master, std::uint64_t a,
                       std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(master ^ 0x5851f42d4c957f2dULL);
    s = splitmix64(s ^ splitmix64(a));
    s = splitmix64(s ^ splitmix64(b ^ 0x9e3779b97f4a7c15ULL));
    s = splitmix64(s ^ splitmix64(c ^ 0xda942042e4dd58b5ULL));
    return Rng(s);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Rademacher sign in {-1, +1}.
  double sign() { return (next_u64() & 1u) ? 1.0 : -1.0; }

  /// Uniform integer in [lo, hi], inclusive, rejection-sampled (unbiased).
  int uniform_int(int lo, int hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return lo + static_cast<int>(v % span);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
};

}  // namespace daclab
