#pragma once

// Strided batched GEMV kernels for column-major matrix batches.
//
// Two implementations:
//  * gemv_batched_naive  -- straightforward triple loop, accumulation in the
//    operand precision. Reference semantics for everything else.
//  * gemv_batched_tiled  -- (conjugate-)transpose kernel optimized for short,
//    wide matrices (m <= n). Column tiles are walked in row chunks so the
//    x-chunk stays hot across a whole tile, and each column's partial dot
//    product runs over four independent accumulators so the compiler can
//    vectorize the reduction. Inner loops are unit-stride over memory.
//
// select_kernel picks between them from the matrix shape, mirroring
// empirically set transition points in a host-side dispatcher.
//
// Strides follow the rocBLAS naming (lda within a matrix, stride_a/x/y
// between batch entries). Strides may be zero or overlapping; batches are
// processed in ascending order, so aliased outputs are well defined. Only
// alpha=1, beta=0 semantics exist -- the pipeline needs nothing else.

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "fftmv/precision.hpp"

namespace fftmv {

enum class GemvMode : std::uint8_t { NoTrans, Trans, ConjTrans };

inline bool is_transpose(GemvMode m) { return m != GemvMode::NoTrans; }

template <class T>
struct MatrixBatch {
  std::span<const T> data;
  std::size_t rows = 0;   // m
  std::size_t cols = 0;   // n
  std::size_t batch = 1;
  std::size_t lda = 0;      // leading dimension, >= rows (column-major)
  std::size_t stride_a = 0; // elements between consecutive matrices

  static MatrixBatch tight(std::span<const T> data, std::size_t m, std::size_t n, std::size_t b) {
    return {data, m, n, b, m, m * n};
  }
};

template <class T>
struct VectorBatch {
  std::span<T> data;
  std::size_t len = 0;
  std::size_t stride = 0;  // elements between consecutive vectors
  std::size_t batch = 1;

  static VectorBatch tight(std::span<T> data, std::size_t len, std::size_t b) {
    return {data, len, len, b};
  }
};

struct TilingParams {
  std::size_t col_tile = 256;
  std::size_t row_chunk = 64;
  double dispatch_ratio = 1.0;   // tiled only when m < dispatch_ratio * n
  std::size_t row_cutoff = 1024; // and m <= row_cutoff
};

enum class KernelChoice : std::uint8_t { Naive, Tiled };

/// Shape-based dispatch: the tiled kernel handles transpose modes on short,
/// wide matrices; everything else goes to the naive kernel.
inline KernelChoice select_kernel(std::size_t m, std::size_t n, GemvMode mode, const TilingParams& p) {
  if (!is_transpose(mode)) return KernelChoice::Naive;
  if (static_cast<double>(m) < p.dispatch_ratio * static_cast<double>(n) && m <= p.row_cutoff)
    return KernelChoice::Tiled;
  return KernelChoice::Naive;
}

/// Bandwidth model of a batched GEMV: the matrix is read once and both
/// vectors are touched once per batch entry. Result in GB/s.
inline double effective_bandwidth(std::size_t m, std::size_t n, std::size_t batch, std::size_t elem_bytes,
                                  double seconds) {
  if (!(seconds > 0.0)) throw std::invalid_argument("effective_bandwidth: seconds must be > 0");
  const double elems = static_cast<double>(m) * static_cast<double>(n) + static_cast<double>(m) +
                       static_cast<double>(n);
  return static_cast<double>(batch) * elems * static_cast<double>(elem_bytes) / seconds / 1e9;
}

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class U>
struct is_complex<std::complex<U>> : std::true_type {};

// Hand-rolled multiply-add; keeps complex arithmetic out of the libcall
// slow path and identical between the two kernels.
template <class U>
inline std::complex<U> madd(std::complex<U> acc, std::complex<U> a, std::complex<U> b) {
  return {acc.real() + (a.real() * b.real() - a.imag() * b.imag()),
          acc.imag() + (a.real() * b.imag() + a.imag() * b.real())};
}
template <class T>
inline T madd(T acc, T a, T b) {
  return acc + a * b;
}

template <bool Conj, class T>
inline T op_elem(T v) {
  if constexpr (Conj && is_complex<T>::value)
    return std::conj(v);
  else
    return v;
}

template <class T>
void check_gemv_args(GemvMode mode, const MatrixBatch<T>& A, const VectorBatch<const T>& x,
                     const VectorBatch<T>& y) {
  const std::size_t xlen = is_transpose(mode) ? A.rows : A.cols;
  const std::size_t ylen = is_transpose(mode) ? A.cols : A.rows;
  if (A.rows == 0 || A.cols == 0 || A.batch == 0) throw std::invalid_argument("gemv: empty matrix batch");
  if (A.lda < A.rows) throw std::invalid_argument("gemv: lda < rows");
  if (A.data.size() < (A.batch - 1) * A.stride_a + A.lda * (A.cols - 1) + A.rows)
    throw std::invalid_argument("gemv: matrix buffer too small for strides");
  if (x.batch != A.batch || y.batch != A.batch) throw std::invalid_argument("gemv: batch count mismatch");
  if (x.len != xlen || y.len != ylen) throw std::invalid_argument("gemv: vector length mismatch");
  if (x.data.size() < (x.batch - 1) * x.stride + x.len)
    throw std::invalid_argument("gemv: x buffer too small for strides");
  if (y.data.size() < (y.batch - 1) * y.stride + y.len)
    throw std::invalid_argument("gemv: y buffer too small for strides");
}

template <bool Conj, class T>
void naive_trans(const MatrixBatch<T>& A, const VectorBatch<const T>& x, const VectorBatch<T>& y) {
  for (std::size_t b = 0; b < A.batch; ++b) {
    const T* Ab = A.data.data() + b * A.stride_a;
    const T* xb = x.data.data() + b * x.stride;
    T* yb = y.data.data() + b * y.stride;
    for (std::size_t j = 0; j < A.cols; ++j) {
      const T* col = Ab + j * A.lda;
      T acc{};
      for (std::size_t i = 0; i < A.rows; ++i) acc = madd(acc, op_elem<Conj>(col[i]), xb[i]);
      yb[j] = acc;
    }
  }
}

template <class T>
void naive_notrans(const MatrixBatch<T>& A, const VectorBatch<const T>& x, const VectorBatch<T>& y) {
  for (std::size_t b = 0; b < A.batch; ++b) {
    const T* Ab = A.data.data() + b * A.stride_a;
    const T* xb = x.data.data() + b * x.stride;
    T* yb = y.data.data() + b * y.stride;
    for (std::size_t i = 0; i < A.rows; ++i) yb[i] = T{};
    for (std::size_t j = 0; j < A.cols; ++j) {
      const T* col = Ab + j * A.lda;
      const T xj = xb[j];
      for (std::size_t i = 0; i < A.rows; ++i) yb[i] = madd(yb[i], col[i], xj);
    }
  }
}

// Partial dot product over [i0, i1) with four independent accumulator chains.
template <bool Conj, class T>
inline T dot_chunk(const T* col, const T* x, std::size_t i0, std::size_t i1) {
  T a0{}, a1{}, a2{}, a3{};
  std::size_t i = i0;
  for (; i + 4 <= i1; i += 4) {
    a0 = madd(a0, op_elem<Conj>(col[i]), x[i]);
    a1 = madd(a1, op_elem<Conj>(col[i + 1]), x[i + 1]);
    a2 = madd(a2, op_elem<Conj>(col[i + 2]), x[i + 2]);
    a3 = madd(a3, op_elem<Conj>(col[i + 3]), x[i + 3]);
  }
  for (; i < i1; ++i) a0 = madd(a0, op_elem<Conj>(col[i]), x[i]);
  return (a0 + a1) + (a2 + a3);
}

template <bool Conj, class T>
void tiled_trans(const MatrixBatch<T>& A, const VectorBatch<const T>& x, const VectorBatch<T>& y,
                 const TilingParams& p) {
  const std::size_t col_tile = p.col_tile < 1 ? 1 : p.col_tile;
  const std::size_t row_chunk = p.row_chunk < 1 ? 1 : p.row_chunk;
  std::vector<T> acc(col_tile);
  for (std::size_t b = 0; b < A.batch; ++b) {
    const T* Ab = A.data.data() + b * A.stride_a;
    const T* xb = x.data.data() + b * x.stride;
    T* yb = y.data.data() + b * y.stride;
    for (std::size_t j0 = 0; j0 < A.cols; j0 += col_tile) {
      const std::size_t j1 = j0 + col_tile < A.cols ? j0 + col_tile : A.cols;
      for (std::size_t j = j0; j < j1; ++j) acc[j - j0] = T{};
      for (std::size_t i0 = 0; i0 < A.rows; i0 += row_chunk) {
        const std::size_t i1 = i0 + row_chunk < A.rows ? i0 + row_chunk : A.rows;
        for (std::size_t j = j0; j < j1; ++j)
          acc[j - j0] += dot_chunk<Conj>(Ab + j * A.lda, xb, i0, i1);
      }
      for (std::size_t j = j0; j < j1; ++j) yb[j] = acc[j - j0];
    }
  }
}

}  // namespace detail

/// y_k = op(A_k) x_k for every matrix in the batch. Oracle-grade reference.
template <class T>
void gemv_batched_naive(GemvMode mode, const MatrixBatch<T>& A, VectorBatch<const T> x, VectorBatch<T> y) {
  detail::check_gemv_args(mode, A, x, y);
  switch (mode) {
    case GemvMode::NoTrans: detail::naive_notrans(A, x, y); break;
    case GemvMode::Trans: detail::naive_trans<false>(A, x, y); break;
    case GemvMode::ConjTrans: detail::naive_trans<true>(A, x, y); break;
  }
}

/// Tiled transpose / conjugate-transpose kernel. Identical math to the naive
/// kernel up to floating-point reassociation of the per-column dot products.
template <class T>
void gemv_batched_tiled(GemvMode mode, const MatrixBatch<T>& A, VectorBatch<const T> x, VectorBatch<T> y,
                        const TilingParams& params = {}) {
  if (!is_transpose(mode))
    throw std::invalid_argument("gemv_batched_tiled: NoTrans not supported, use the naive kernel");
  detail::check_gemv_args(mode, A, x, y);
  if (mode == GemvMode::Trans)
    detail::tiled_trans<false>(A, x, y, params);
  else
    detail::tiled_trans<true>(A, x, y, params);
}

/// Runs whichever kernel select_kernel picks.
template <class T>
KernelChoice gemv_batched_auto(GemvMode mode, const MatrixBatch<T>& A, VectorBatch<const T> x,
                               VectorBatch<T> y, const TilingParams& params = {}) {
  const KernelChoice choice = select_kernel(A.rows, A.cols, mode, params);
  if (choice == KernelChoice::Tiled)
    gemv_batched_tiled(mode, A, x, y, params);
  else
    gemv_batched_naive(mode, A, x, y);
  return choice;
}

}  // namespace fftmv
