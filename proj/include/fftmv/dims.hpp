#pragma once

#include <cstddef>
#include <stdexcept>

namespace fftmv {

/// Problem extents: n_m spatial parameters, n_d sensors (n_d << n_m in the
/// target applications), n_t time steps.
struct ProblemDims {
  std::size_t n_m = 0;
  std::size_t n_d = 0;
  std::size_t n_t = 0;

  ProblemDims() = default;
  ProblemDims(std::size_t nm, std::size_t nd, std::size_t nt) : n_m(nm), n_d(nd), n_t(nt) {
    if (n_m < 1 || n_d < 1 || n_t < 1)
      throw std::invalid_argument("ProblemDims: all extents must be >= 1");
  }

  // Minimal circulant embedding of a triangular Toeplitz block column.
  std::size_t fft_len() const { return 2 * n_t; }
  std::size_t n_bins() const { return n_t + 1; }

  friend bool operator==(const ProblemDims&, const ProblemDims&) = default;
};

}  // namespace fftmv
