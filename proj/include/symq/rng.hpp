#pragma once

#include <cmath>
#include <cstdint>

#include "symq/spin_ops.hpp"

namespace symq {

// Counter-based generator: every output is a pure function of
// (seed, stream, counter), so parallel consumers drawing from disjoint
// streams produce identical results regardless of scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : base_(mix(seed + golden * (stream + 1)) ^ mix(stream + 0x1F123BB5ULL)) {}

  std::uint64_t next_u64() { return mix(base_ + golden * ++counter_); }

  // Uniform in [0, 1) with full 53-bit mantissa resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Standard normal via Box-Muller; second value of each pair is cached.
  double gaussian() {
    if (have_cache_) {
      have_cache_ = false;
      return cache_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    double u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    cache_ = r * std::sin(2.0 * pi * u2);
    have_cache_ = true;
    return r * std::cos(2.0 * pi * u2);
  }

  cd gaussian_cd() { return cd(gaussian(), gaussian()); }

  // Uniform point on the unit sphere.
  Vec3 sphere_point() {
    double z = uniform(-1.0, 1.0);
    double phi = uniform(0.0, 2.0 * pi);
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(r * std::cos(phi), r * std::sin(phi), z);
  }

  // Normalized complex Gaussian ket: Haar-uniform on the unit sphere of C^dim.
  Vec haar_ket(int dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = gaussian_cd();
    double n = v.norm();
    if (n < 1e-300) return haar_ket(dim);
    return v / n;
  }

 private:
  static constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ULL;

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  bool have_cache_ = false;
  double cache_ = 0.0;
};

}  // namespace symq
