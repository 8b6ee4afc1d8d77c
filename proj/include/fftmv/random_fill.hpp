#pragma once

// Deterministic fills. std::mt19937_64 is fully specified by the standard;
// the raw 64-bit draws are mapped to doubles by fixed bit arithmetic (no
// std::uniform_real_distribution, whose output is implementation-defined),
// so identical seeds give bitwise-identical buffers on every platform.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace fftmv {

/// Uniform doubles in [lo, hi): the top 53 bits of each draw form a dyadic
/// rational in [0, 1).
inline std::vector<double> uniform_fill(std::size_t count, std::uint64_t seed, double lo = -1.0,
                                        double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  const double scale = hi - lo;
  for (auto& x : out) {
    const double u01 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x = lo + scale * u01;
  }
  return out;
}

// Fixed xor-constants for deriving independent streams from one user seed.
inline std::uint64_t seed_stream(std::uint64_t seed, std::uint64_t stream) {
  return seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
}

}  // namespace fftmv
