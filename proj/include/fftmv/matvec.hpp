#pragma once

// The five-phase FFT matvec with per-phase precision configuration.
//
// Forward (d = F m):
//   1. zero-pad every parameter series n_t -> 2*n_t       [prec cfg[0]]
//   2. batched real FFT over the n_m series               [prec cfg[1]]
//   3. SOTI->TOSI reorder, per-bin GEMV (NoTrans),
//      TOSI->SOTI reorder                                 [prec cfg[2]]
//   4. batched inverse real FFT over the n_d series       [prec cfg[3]]
//   5. truncate every sensor series back to n_t           [prec cfg[4]]
// Adjoint (m = F* d): identical with the roles of m and d switched and a
// conjugate-transpose GEMV in phase 3.
//
// Input and output are always double. The working precision starts and ends
// double; a conversion happens exactly where consecutive phase precisions
// differ, and every conversion is fused into an adjacent memory pass (pad,
// reorder, unpad) whenever one exists. The reorder passes flanking phase 3
// run in the lower of the two adjacent compute precisions. Phase timings
// bracket each phase including its fused casts; the two reorders are charged
// to phase 3.

#include <array>
#include <chrono>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fftmv/block_vector.hpp"
#include "fftmv/config.hpp"
#include "fftmv/fft.hpp"
#include "fftmv/gemv.hpp"
#include "fftmv/operator.hpp"

namespace fftmv {

enum class MatvecKind : std::uint8_t { Forward, Adjoint };

struct PhaseTimings {
  std::array<double, 5> phase_s{};  // wall seconds per phase, fused casts included
  double total_s = 0.0;

  PhaseTimings& operator+=(const PhaseTimings& o) {
    for (std::size_t i = 0; i < 5; ++i) phase_s[i] += o.phase_s[i];
    total_s += o.total_s;
    return *this;
  }
};

inline const char* phase_name(std::size_t i) {
  static const char* names[5] = {"pad", "fft", "sbgemv", "ifft", "unpad"};
  return names[i];
}

struct MatvecResult {
  BlockVector output;  // Time domain, SOTI, double
  PhaseTimings timings;
};

namespace detail {

inline double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// Working buffers tagged with their runtime precision.
struct RealBuf {
  Precision prec = Precision::Double;
  std::vector<float> f;
  std::vector<double> d;
  std::size_t size() const { return prec == Precision::Double ? d.size() : f.size(); }
};

struct CplxBuf {
  Precision prec = Precision::Double;
  std::vector<std::complex<float>> f;
  std::vector<std::complex<double>> d;
};

template <class Src, class Dst>
std::vector<Dst> pad_cast(std::span<const Src> in, std::size_t n_series, std::size_t n_t, std::size_t L) {
  std::vector<Dst> out(n_series * L, Dst(0));
  for (std::size_t s = 0; s < n_series; ++s)
    for (std::size_t t = 0; t < n_t; ++t) out[s * L + t] = static_cast<Dst>(in[s * n_t + t]);
  if constexpr (!std::is_same_v<Src, Dst>) note_cast();
  return out;
}

// Phase 1 from the double-precision I/O boundary: pad with the cast fused.
inline RealBuf pad_stage(std::span<const double> in, std::size_t n_series, std::size_t n_t, std::size_t L,
                         Precision dst) {
  RealBuf out;
  out.prec = dst;
  if (dst == Precision::Double)
    out.d = pad_cast<double, double>(in, n_series, n_t, L);
  else
    out.f = pad_cast<double, float>(in, n_series, n_t, L);
  return out;
}

// Phase 1 from an already-cast payload (the adjoint's broadcast delivers the
// data vector pre-cast to cfg[0]); pads in the payload's own precision.
inline RealBuf pad_stage(const RealBuf& in, std::size_t n_series, std::size_t n_t, std::size_t L) {
  RealBuf out;
  out.prec = in.prec;
  if (in.prec == Precision::Double)
    out.d = pad_cast<double, double>(std::span<const double>(in.d), n_series, n_t, L);
  else
    out.f = pad_cast<float, float>(std::span<const float>(in.f), n_series, n_t, L);
  return out;
}

// Standalone conversion used where no memory op is adjacent (entry of the
// FFT phase).
inline void convert(RealBuf& buf, Precision dst) {
  if (buf.prec == dst) return;
  if (dst == Precision::Double) {
    buf.d = cast_buffer<double>(std::span<const float>(buf.f));
    buf.f.clear();
    buf.f.shrink_to_fit();
  } else {
    buf.f = cast_buffer<float>(std::span<const double>(buf.d));
    buf.d.clear();
    buf.d.shrink_to_fit();
  }
  buf.prec = dst;
}

inline CplxBuf fft_stage(const RealBuf& in, std::size_t L, std::size_t batch) {
  CplxBuf out;
  out.prec = in.prec;
  const auto plan = shared_plan(L, batch, in.prec, FftDirection::Forward);
  if (in.prec == Precision::Double)
    out.d = forward_real_batched(*plan, std::span<const double>(in.d));
  else
    out.f = forward_real_batched(*plan, std::span<const float>(in.f));
  return out;
}

inline RealBuf ifft_stage(const CplxBuf& in, std::size_t L, std::size_t batch) {
  RealBuf out;
  out.prec = in.prec;
  const auto plan = shared_plan(L, batch, in.prec, FftDirection::Inverse);
  if (in.prec == Precision::Double)
    out.d = inverse_real_batched(*plan, std::span<const std::complex<double>>(in.d));
  else
    out.f = inverse_real_batched(*plan, std::span<const std::complex<float>>(in.f));
  return out;
}

template <class Src, class Dst>
std::vector<std::complex<Dst>> transpose_cast(std::span<const std::complex<Src>> in, std::size_t rows,
                                              std::size_t cols) {
  std::vector<std::complex<Dst>> out(in.size());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = in[r * cols + c];
      out[c * rows + r] = std::complex<Dst>(static_cast<Dst>(v.real()), static_cast<Dst>(v.imag()));
    }
  if constexpr (!std::is_same_v<Src, Dst>) note_cast();
  return out;
}

// Reorder pass between two compute phases; runs once over memory with the
// conversion fused, in the lower of the two adjacent precisions.
inline CplxBuf transpose_stage(const CplxBuf& in, std::size_t rows, std::size_t cols, Precision dst) {
  CplxBuf out;
  out.prec = dst;
  if (in.prec == Precision::Double && dst == Precision::Double)
    out.d = transpose_cast<double, double>(std::span<const std::complex<double>>(in.d), rows, cols);
  else if (in.prec == Precision::Double && dst == Precision::Single)
    out.f = transpose_cast<double, float>(std::span<const std::complex<double>>(in.d), rows, cols);
  else if (in.prec == Precision::Single && dst == Precision::Double)
    out.d = transpose_cast<float, double>(std::span<const std::complex<float>>(in.f), rows, cols);
  else
    out.f = transpose_cast<float, float>(std::span<const std::complex<float>>(in.f), rows, cols);
  return out;
}

template <class Src, class Mid>
std::vector<double> unpad_cast(std::span<const Src> in, std::size_t n_series, std::size_t L, std::size_t n_t) {
  std::vector<double> out(n_series * n_t);
  for (std::size_t s = 0; s < n_series; ++s)
    for (std::size_t t = 0; t < n_t; ++t)
      out[s * n_t + t] = static_cast<double>(static_cast<Mid>(in[s * L + t]));
  if constexpr (!std::is_same_v<Src, Mid>) note_cast();
  if constexpr (!std::is_same_v<Mid, double>) note_cast();
  return out;
}

// Phase 5: truncate to the leading n_t samples, casting to the phase's
// precision and then back up to the double I/O boundary in the same pass.
inline std::vector<double> unpad_stage(const RealBuf& in, std::size_t n_series, std::size_t L, std::size_t n_t,
                                       Precision mid) {
  if (in.prec == Precision::Double && mid == Precision::Double)
    return unpad_cast<double, double>(std::span<const double>(in.d), n_series, L, n_t);
  if (in.prec == Precision::Double && mid == Precision::Single)
    return unpad_cast<double, float>(std::span<const double>(in.d), n_series, L, n_t);
  if (in.prec == Precision::Single && mid == Precision::Double)
    return unpad_cast<float, double>(std::span<const float>(in.f), n_series, L, n_t);
  return unpad_cast<float, float>(std::span<const float>(in.f), n_series, L, n_t);
}

// Phase 3 GEMV over all frequency bins. x is TOSI (bin-major); operand
// precision selects the double or cached single copy of the bins.
inline CplxBuf gemv_stage(const SpectralOperator& op, const CplxBuf& x, GemvMode mode,
                          const TilingParams& tiling) {
  const std::size_t nb = op.dims.n_bins();
  const std::size_t xlen = is_transpose(mode) ? op.dims.n_d : op.dims.n_m;
  const std::size_t ylen = is_transpose(mode) ? op.dims.n_m : op.dims.n_d;
  CplxBuf out;
  out.prec = x.prec;
  const auto run = [&](const auto& bins, const auto& xv, auto& yv) {
    using C = typename std::decay_t<decltype(xv)>::value_type;
    yv.assign(nb * ylen, C{});
    auto xb = VectorBatch<const C>::tight(std::span<const C>(xv), xlen, nb);
    auto yb = VectorBatch<C>::tight(std::span<C>(yv), ylen, nb);
    gemv_batched_auto(mode, bins, xb, yb, tiling);
  };
  if (x.prec == Precision::Double)
    run(op.bins_view(), x.d, out.d);
  else
    run(op.bins_single_view(), x.f, out.f);
  return out;
}

// Shared pipeline core. `payload`, when set, is the broadcast-delivered
// input already in cfg[0] precision; otherwise `input` is the double I/O
// vector and phase 1 fuses the initial cast.
inline std::pair<std::vector<double>, PhaseTimings> run_pipeline(const SpectralOperator& op, MatvecKind kind,
                                                                 std::span<const double> input,
                                                                 const RealBuf* payload, PrecisionConfig cfg,
                                                                 const TilingParams& tiling) {
  const ProblemDims& dims = op.dims;
  const std::size_t L = dims.fft_len();
  const std::size_t nb = dims.n_bins();
  const bool forward = kind == MatvecKind::Forward;
  const std::size_t n_in = forward ? dims.n_m : dims.n_d;
  const std::size_t n_out = forward ? dims.n_d : dims.n_m;
  const GemvMode mode = forward ? GemvMode::NoTrans : GemvMode::ConjTrans;

  if (!payload && input.size() != n_in * dims.n_t)
    throw std::invalid_argument("matvec: input length does not match operator dims");

  PhaseTimings t;
  const double t_start = now_s();

  // Phase 1: zero-pad (+ fused cast to cfg[0]).
  double mark = now_s();
  RealBuf padded = payload ? pad_stage(*payload, n_in, dims.n_t, L)
                           : pad_stage(input, n_in, dims.n_t, L, cfg[0]);
  t.phase_s[0] = now_s() - mark;

  // Phase 2: FFT in cfg[1]; conversion first if the working precision differs.
  mark = now_s();
  convert(padded, cfg[1]);
  CplxBuf spectrum = fft_stage(padded, L, n_in);
  padded = RealBuf{};
  t.phase_s[1] = now_s() - mark;

  // Phase 3: reorder to bin-major, batched GEMV in cfg[2], reorder back.
  // Each reorder is one fused pass from the previous phase's precision to
  // the next one's, so its traffic runs at the lower of the two.
  mark = now_s();
  CplxBuf tosi = transpose_stage(spectrum, n_in, nb, cfg[2]);
  spectrum = CplxBuf{};
  CplxBuf product = gemv_stage(op, tosi, mode, tiling);
  tosi = CplxBuf{};
  CplxBuf soti = transpose_stage(product, nb, n_out, cfg[3]);
  product = CplxBuf{};
  t.phase_s[2] = now_s() - mark;

  // Phase 4: inverse FFT in cfg[3] (input already converted by the reorder).
  mark = now_s();
  RealBuf series = ifft_stage(soti, L, n_out);
  soti = CplxBuf{};
  t.phase_s[3] = now_s() - mark;

  // Phase 5: truncate to n_t, cast to cfg[4] and back to double, one pass.
  mark = now_s();
  std::vector<double> out = unpad_stage(series, n_out, L, dims.n_t, cfg[4]);
  t.phase_s[4] = now_s() - mark;

  t.total_s = now_s() - t_start;
  return {std::move(out), t};
}

inline void check_matvec_input(const SpectralOperator& op, const BlockVector& v, bool forward) {
  v.validate();
  const std::size_t n_in = forward ? op.dims.n_m : op.dims.n_d;
  if (v.precision != Precision::Double) throw std::invalid_argument("matvec: input must be double precision");
  if (v.domain != Domain::Time || v.layout != Layout::SOTI)
    throw std::invalid_argument("matvec: input must be a time-domain SOTI vector");
  if (v.space_extent != n_in || v.time_extent != op.dims.n_t)
    throw std::invalid_argument("matvec: input extents do not match operator dims");
}

}  // namespace detail

/// d = F m. Input m: n_m x n_t, Time/SOTI/double. Output d: n_d x n_t,
/// Time/SOTI/double.
inline MatvecResult forward_matvec(const SpectralOperator& op, const BlockVector& m, PrecisionConfig cfg,
                                   const TilingParams& tiling = {}) {
  detail::check_matvec_input(op, m, true);
  auto [out, t] = detail::run_pipeline(op, MatvecKind::Forward, m.f64, nullptr, cfg, tiling);
  return {BlockVector::time_double(op.dims.n_d, op.dims.n_t, std::move(out)), t};
}

/// m = F* d. Input d: n_d x n_t, Time/SOTI/double. Output m: n_m x n_t.
inline MatvecResult adjoint_matvec(const SpectralOperator& op, const BlockVector& d, PrecisionConfig cfg,
                                   const TilingParams& tiling = {}) {
  detail::check_matvec_input(op, d, false);
  auto [out, t] = detail::run_pipeline(op, MatvecKind::Adjoint, d.f64, nullptr, cfg, tiling);
  return {BlockVector::time_double(op.dims.n_m, op.dims.n_t, std::move(out)), t};
}

}  // namespace fftmv
