#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fftmv/precision.hpp"

namespace fftmv {

/// Five-slot precision selection, one slot per pipeline phase:
///   [0] pad/broadcast, [1] FFT, [2] SBGEMV, [3] IFFT, [4] unpad/reduce.
/// The same positional slots configure the forward and the adjoint pipeline.
/// Rendered form is five chars over {d,s}, e.g. "dssdd".
struct PrecisionConfig {
  std::array<Precision, 5> phase{Precision::Double, Precision::Double, Precision::Double,
                                 Precision::Double, Precision::Double};

  Precision operator[](std::size_t i) const { return phase[i]; }

  std::string render() const {
    std::string s(5, 'd');
    for (std::size_t i = 0; i < 5; ++i) s[i] = precision_char(phase[i]);
    return s;
  }

  static PrecisionConfig all_double() { return {}; }

  friend bool operator==(const PrecisionConfig&, const PrecisionConfig&) = default;
};

/// Parses a 5-char {d,s} string. Errors name the 1-based offending position.
inline PrecisionConfig parse_precision_config(std::string_view s) {
  if (s.size() != 5)
    throw std::invalid_argument("precision config must be exactly 5 characters, got " +
                                std::to_string(s.size()));
  PrecisionConfig cfg;
  for (std::size_t i = 0; i < 5; ++i) {
    if (s[i] == 'd')
      cfg.phase[i] = Precision::Double;
    else if (s[i] == 's')
      cfg.phase[i] = Precision::Single;
    else
      throw std::invalid_argument("precision config: invalid character '" + std::string(1, s[i]) +
                                  "' at position " + std::to_string(i + 1) + " (expected 'd' or 's')");
  }
  return cfg;
}

/// All 2^5 = 32 configurations in lexicographic order of their rendered
/// strings ('d' < 's'): "ddddd" first, "sssss" last.
inline std::vector<PrecisionConfig> enumerate_configs() {
  std::vector<PrecisionConfig> all;
  all.reserve(32);
  for (unsigned bits = 0; bits < 32; ++bits) {
    PrecisionConfig cfg;
    for (std::size_t i = 0; i < 5; ++i)
      cfg.phase[i] = (bits >> (4 - i)) & 1u ? Precision::Single : Precision::Double;
    all.push_back(cfg);
  }
  return all;
}

}  // namespace fftmv
