#pragma once

#include <cstdint>

#include "lowreg/types.hpp"

namespace lowreg {

/// Deterministic 64-bit generator (splitmix update rule), identical output on
/// every platform. All randomized sampling in the library goes through this.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// uniform in [0,1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Point strictly inside the box; rel_inset shrinks the sampling window.
  Vec point_in(const BoxDomain& box, double rel_inset = 1e-6) {
    Vec p = Vec::zero(box.dim);
    for (int i = 0; i < box.dim; ++i) {
      double m = rel_inset * box.extent(i);
      p[i] = uniform(box.lo[i] + m, box.hi[i] - m);
    }
    return p;
  }

  /// Unit vector, dimension 1..3.
  Vec unit_vector(int dim) {
    if (dim == 1) return Vec::scalar(uniform() < 0.5 ? -1.0 : 1.0);
    if (dim == 2) {
      double a = uniform(0.0, 6.283185307179586476925286766559);
      return Vec(std::cos(a), std::sin(a));
    }
    // rejection sampling from the cube
    for (;;) {
      Vec v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
      double n = v.norm2();
      if (n > 1e-3 && n <= 1.0) return v * (1.0 / n);
    }
  }

  /// Derive an independent stream, e.g. per test case or per sample index.
  SplitMix64 fork(std::uint64_t salt) const {
    SplitMix64 s(state ^ (salt * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull));
    s.next();
    return s;
  }
};

/// Stable 64-bit hash of a short string, for deriving per-suite seeds.
inline std::uint64_t fnv1a(const char* s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (; *s; ++s) h = (h ^ static_cast<std::uint64_t>(*s)) * 0x100000001B3ull;
  return h;
}

}  // namespace lowreg
