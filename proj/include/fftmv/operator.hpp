#pragma once

// Block lower-triangular Toeplitz operator in its two materializations:
//  * BlockColumn      -- the first block column, n_t real n_d x n_m blocks;
//    the whole operator, by Toeplitz structure.
//  * SpectralOperator -- the circulant embedding's frequency-bin matrices:
//    zero-pad every scalar series of the block column from n_t to 2*n_t and
//    take the real FFT, giving n_t + 1 complex n_d x n_m matrices. Setup runs
//    entirely in double; a single-precision copy of the bins is cached
//    lazily and shared between copies of the operator.

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fftmv/dims.hpp"
#include "fftmv/fft.hpp"
#include "fftmv/gemv.hpp"
#include "fftmv/precision.hpp"

namespace fftmv {

/// First block column of the operator. Block t is stored column-major at
/// offset t * n_d * n_m; entry (i, j) of block t at t*n_d*n_m + i + j*n_d.
struct BlockColumn {
  ProblemDims dims;
  std::vector<double> data;

  BlockColumn() = default;
  BlockColumn(ProblemDims d, std::vector<double> values) : dims(d), data(std::move(values)) {
    if (data.size() != dims.n_t * dims.n_d * dims.n_m)
      throw std::invalid_argument("BlockColumn: buffer length does not match dims");
  }

  std::size_t block_elems() const { return dims.n_d * dims.n_m; }
  std::span<const double> block(std::size_t t) const {
    return std::span<const double>(data).subspan(t * block_elems(), block_elems());
  }
  double& at(std::size_t t, std::size_t i, std::size_t j) {
    return data[t * block_elems() + i + j * dims.n_d];
  }
  double at(std::size_t t, std::size_t i, std::size_t j) const {
    return data[t * block_elems() + i + j * dims.n_d];
  }

  static BlockColumn zeros(ProblemDims d) {
    return BlockColumn(d, std::vector<double>(d.n_t * d.n_d * d.n_m, 0.0));
  }
};

struct SpectralOperator {
  ProblemDims dims;
  // n_bins matrices of n_d x n_m complex doubles, column-major, bin-major.
  std::vector<std::complex<double>> bins_double;

  std::size_t bin_elems() const { return dims.n_d * dims.n_m; }

  MatrixBatch<std::complex<double>> bins_view() const {
    return MatrixBatch<std::complex<double>>::tight(bins_double, dims.n_d, dims.n_m, dims.n_bins());
  }

  bool has_single() const { return cache_ && !cache_->bins.empty(); }

  /// Idempotent: the first call casts, later calls return the same buffer.
  const std::vector<std::complex<float>>& ensure_single() const {
    std::call_once(cache_->once, [this] {
      cache_->bins = cast_buffer<float>(std::span<const std::complex<double>>(bins_double));
    });
    return cache_->bins;
  }

  MatrixBatch<std::complex<float>> bins_single_view() const {
    return MatrixBatch<std::complex<float>>::tight(ensure_single(), dims.n_d, dims.n_m, dims.n_bins());
  }

 private:
  struct SingleCache {
    std::once_flag once;
    std::vector<std::complex<float>> bins;
  };
  std::shared_ptr<SingleCache> cache_ = std::make_shared<SingleCache>();
};

/// Fills the operator's cached single-precision bins and returns it.
inline const SpectralOperator& materialize_single(const SpectralOperator& op) {
  op.ensure_single();
  return op;
}

/// Builds the frequency-bin matrices from the first block column: for each of
/// the n_d*n_m scalar time series, zero-pad n_t -> 2*n_t and take the real
/// FFT. Double precision throughout (setup is a one-time operation). The FFT
/// batch is chunked so the scratch stays bounded regardless of problem size.
inline SpectralOperator setup_operator(const BlockColumn& col) {
  const ProblemDims dims = col.dims;
  const std::size_t series_count = dims.n_d * dims.n_m;
  const std::size_t L = dims.fft_len();
  const std::size_t nb = dims.n_bins();

  SpectralOperator op;
  op.dims = dims;
  op.bins_double.assign(nb * series_count, {});

  const std::size_t scratch_target = std::size_t{1} << 21;  // ~16 MiB of doubles
  const std::size_t chunk = std::max<std::size_t>(1, std::min(series_count, scratch_target / L));
  std::vector<double> padded;
  for (std::size_t s0 = 0; s0 < series_count; s0 += chunk) {
    const std::size_t c = std::min(chunk, series_count - s0);
    padded.assign(c * L, 0.0);
    for (std::size_t s = 0; s < c; ++s)
      for (std::size_t t = 0; t < dims.n_t; ++t)
        padded[s * L + t] = col.data[t * series_count + s0 + s];
    const auto plan = shared_plan(L, c, Precision::Double, FftDirection::Forward);
    const auto spectra = forward_real_batched(*plan, padded);
    for (std::size_t s = 0; s < c; ++s)
      for (std::size_t k = 0; k < nb; ++k)
        op.bins_double[k * series_count + s0 + s] = spectra[s * nb + k];
  }
  return op;
}

}  // namespace fftmv
