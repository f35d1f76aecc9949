#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace rwre {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Deterministic random stream. Every variate transform is implemented here
// from raw 64-bit engine output, so streams reproduce bit-for-bit across
// standard library implementations. Not thread-safe; use one stream per
// worker, derived with stream().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent substream from (master, index, tag).
  static Rng stream(std::uint64_t master, std::uint64_t index, std::uint64_t tag = 0) {
    std::uint64_t s = master;
    s += 0x9E3779B97F4A7C15ULL * (index + 1);
    s ^= 0xD1B54A32D192ED03ULL * (tag + 1);
    std::uint64_t seed = splitmix64(s);
    seed ^= splitmix64(s);
    return Rng(seed);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform_pos() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Geometric on {0,1,2,...} with success probability omega, by inversion:
  // P(X >= m) = (1-omega)^m. One uniform per variate.
  long long geometric(double omega) {
    if (omega >= 1.0) return 0;
    if (!(omega > 0.0)) throw std::domain_error("geometric: omega must be in (0,1]");
    const double denom = std::log1p(-omega);  // < 0
    const double g = std::floor(std::log(uniform_pos()) / denom);
    if (g > 9.0e18) return static_cast<long long>(9.0e18);
    return static_cast<long long>(g);
  }

  // Standard normal via Box-Muller (two uniforms per variate).
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  // Gamma(shape, scale 1), Marsaglia-Tsang; boosted for shape < 1.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be > 0");
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    if (x == 0.0 && y == 0.0) return 0.5;
    return x / (x + y);
  }

  long long poisson(double lambda) {
    if (!(lambda >= 0.0)) throw std::domain_error("poisson: lambda must be >= 0");
    if (lambda == 0.0) return 0;
    // Additive split keeps the PTRS acceptance test in its accurate range.
    if (lambda > 1.0e12) {
      long long total = 0;
      double rem = lambda;
      while (rem > 1.0e12) {
        total += poisson_ptrs(1.0e12);
        rem -= 1.0e12;
      }
      return total + poisson(rem);
    }
    if (lambda < 30.0) {
      const double limit = std::exp(-lambda);
      long long k = 0;
      double p = uniform01();
      while (p > limit) {
        ++k;
        p *= uniform01();
      }
      return k;
    }
    return poisson_ptrs(lambda);
  }

 private:
  // Hormann's PTRS transformed-rejection sampler, valid for lambda >= 10.
  long long poisson_ptrs(double lambda) {
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
      const double u = uniform01() - 0.5;
      const double v = uniform01();
      const double us = 0.5 - std::fabs(u);
      const double kd = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kd);
      if (kd < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kd * log_lambda - lambda - std::lgamma(kd + 1.0)) {
        return static_cast<long long>(kd);
      }
    }
  }

  std::mt19937_64 engine_;
};

}  // namespace rwre
