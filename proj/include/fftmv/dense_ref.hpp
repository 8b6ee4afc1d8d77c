#pragma once

// Dense brute-force reference for the block-Toeplitz matvecs. Exists to pin
// correctness of the FFT path on small instances; performance is a non-goal.
//
//   forward:  d_i = sum_{j<=i} T_{i-j} m_j        (blocks 1-indexed i,j)
//   adjoint:  m_j = sum_{i>=j} T_{i-j}^T d_i
//
// where T_k is block k of the first block column. Accumulation is plain
// double with a fixed ascending summation order for reproducibility.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fftmv/operator.hpp"

namespace fftmv {

namespace detail {
inline void check_dense_size(const ProblemDims& d) {
  // Gross flop guard; the dense path is quadratic in n_t.
  const double work = static_cast<double>(d.n_d) * static_cast<double>(d.n_m) *
                      static_cast<double>(d.n_t) * static_cast<double>(d.n_t);
  if (work > 1e8) throw std::invalid_argument("dense reference: instance too large (n_d*n_m*n_t^2 > 1e8)");
}
}  // namespace detail

inline std::vector<double> dense_forward(const BlockColumn& col, std::span<const double> m) {
  const ProblemDims& dims = col.dims;
  detail::check_dense_size(dims);
  if (m.size() != dims.n_m * dims.n_t) throw std::invalid_argument("dense_forward: bad input length");
  std::vector<double> d(dims.n_d * dims.n_t, 0.0);
  for (std::size_t i = 0; i < dims.n_t; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      // d block i += T_{i-j} * m block j. m is SOTI: m_j[c] = m[c*n_t + j].
      const std::size_t tb = i - j;
      for (std::size_t c = 0; c < dims.n_m; ++c) {
        const double mv = m[c * dims.n_t + j];
        for (std::size_t r = 0; r < dims.n_d; ++r) d[r * dims.n_t + i] += col.at(tb, r, c) * mv;
      }
    }
  }
  return d;
}

inline std::vector<double> dense_adjoint(const BlockColumn& col, std::span<const double> d) {
  const ProblemDims& dims = col.dims;
  detail::check_dense_size(dims);
  if (d.size() != dims.n_d * dims.n_t) throw std::invalid_argument("dense_adjoint: bad input length");
  std::vector<double> m(dims.n_m * dims.n_t, 0.0);
  for (std::size_t j = 0; j < dims.n_t; ++j) {
    for (std::size_t i = j; i < dims.n_t; ++i) {
      const std::size_t tb = i - j;
      for (std::size_t c = 0; c < dims.n_m; ++c) {
        double acc = 0.0;
        for (std::size_t r = 0; r < dims.n_d; ++r) acc += col.at(tb, r, c) * d[r * dims.n_t + i];
        m[c * dims.n_t + j] += acc;
      }
    }
  }
  return m;
}

}  // namespace fftmv
