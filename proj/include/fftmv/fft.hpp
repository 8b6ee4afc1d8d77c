#pragma once

// Batched 1-D real<->complex FFT facade over FFTW3 (double) / FFTW3f (single).
//
// Conventions: the forward transform is the unnormalized DFT
//   bin_k = sum_t x[t] * exp(-2*pi*i*k*t/length),   k = 0 .. length/2,
// returning only the non-redundant half spectrum (length/2 + 1 bins); the
// inverse folds in the 1/length normalization so inverse(forward(x)) == x.
//
// Plans are created with FFTW_ESTIMATE so the chosen algorithm -- and thus
// the output bit pattern -- depends only on (length, batch, precision,
// direction), never on runtime measurements.

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <fftw3.h>

#include "fftmv/precision.hpp"

namespace fftmv {

enum class FftDirection : std::uint8_t { Forward, Inverse };

class FftPlan {
 public:
  FftPlan(std::size_t length, std::size_t batch, Precision precision, FftDirection direction)
      : length_(length), batch_(batch), precision_(precision), direction_(direction) {
    if (length < 2 || length % 2 != 0)
      throw std::invalid_argument("FftPlan: length must be even and >= 2");
    if (batch < 1) throw std::invalid_argument("FftPlan: batch must be >= 1");

    // The FFTW planner is not thread-safe; execution is.
    std::lock_guard<std::mutex> lock(planner_mutex());
    const int n = static_cast<int>(length);
    const int nb = static_cast<int>(n_bins());
    const int howmany = static_cast<int>(batch);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (precision_ == Precision::Double) {
      std::vector<double> re(length * batch);
      std::vector<std::complex<double>> cx(n_bins() * batch);
      auto* cxp = reinterpret_cast<fftw_complex*>(cx.data());
      if (direction_ == FftDirection::Forward)
        plan_ = fftw_plan_many_dft_r2c(1, &n, howmany, re.data(), nullptr, 1, n, cxp, nullptr, 1, nb, flags);
      else
        plan_ = fftw_plan_many_dft_c2r(1, &n, howmany, cxp, nullptr, 1, nb, re.data(), nullptr, 1, n, flags);
    } else {
      std::vector<float> re(length * batch);
      std::vector<std::complex<float>> cx(n_bins() * batch);
      auto* cxp = reinterpret_cast<fftwf_complex*>(cx.data());
      if (direction_ == FftDirection::Forward)
        planf_ = fftwf_plan_many_dft_r2c(1, &n, howmany, re.data(), nullptr, 1, n, cxp, nullptr, 1, nb, flags);
      else
        planf_ = fftwf_plan_many_dft_c2r(1, &n, howmany, cxp, nullptr, 1, nb, re.data(), nullptr, 1, n, flags);
    }
    if (!plan_ && !planf_) throw std::runtime_error("FftPlan: FFTW planner failed");
  }

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan_) fftw_destroy_plan(plan_);
    if (planf_) fftwf_destroy_plan(planf_);
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t length() const { return length_; }
  std::size_t batch() const { return batch_; }
  Precision precision() const { return precision_; }
  FftDirection direction() const { return direction_; }
  std::size_t n_bins() const { return length_ / 2 + 1; }

  fftw_plan native_d() const { return plan_; }
  fftwf_plan native_f() const { return planf_; }

  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

 private:
  std::size_t length_, batch_;
  Precision precision_;
  FftDirection direction_;
  fftw_plan plan_ = nullptr;
  fftwf_plan planf_ = nullptr;
};

namespace detail {
template <class T>
void check_plan(const FftPlan& plan, FftDirection dir, std::size_t got, std::size_t want) {
  if (plan.direction() != dir) throw std::invalid_argument("FFT: plan direction mismatch");
  if (plan.precision() != precision_of<T>) throw std::invalid_argument("FFT: plan precision mismatch");
  if (got != want)
    throw std::invalid_argument("FFT: length mismatch, got " + std::to_string(got) + " scalars, expected " +
                                std::to_string(want));
}
}  // namespace detail

/// batch contiguous series of plan.length() reals -> batch half spectra of
/// plan.n_bins() complex bins each.
inline std::vector<std::complex<double>> forward_real_batched(const FftPlan& plan, std::span<const double> series) {
  detail::check_plan<double>(plan, FftDirection::Forward, series.size(), plan.length() * plan.batch());
  std::vector<std::complex<double>> bins(plan.n_bins() * plan.batch());
  // Out-of-place r2c preserves its input; FFTW just lacks a const signature.
  fftw_execute_dft_r2c(plan.native_d(), const_cast<double*>(series.data()),
                       reinterpret_cast<fftw_complex*>(bins.data()));
  return bins;
}

inline std::vector<std::complex<float>> forward_real_batched(const FftPlan& plan, std::span<const float> series) {
  detail::check_plan<float>(plan, FftDirection::Forward, series.size(), plan.length() * plan.batch());
  std::vector<std::complex<float>> bins(plan.n_bins() * plan.batch());
  fftwf_execute_dft_r2c(plan.native_f(), const_cast<float*>(series.data()),
                        reinterpret_cast<fftwf_complex*>(bins.data()));
  return bins;
}

/// True inverse of forward_real_batched, 1/length normalization included.
/// The normalization is folded into the scratch copy of the bins (c2r is
/// allowed to clobber its input, so a copy is made anyway).
inline std::vector<double> inverse_real_batched(const FftPlan& plan, std::span<const std::complex<double>> bins) {
  detail::check_plan<double>(plan, FftDirection::Inverse, bins.size(), plan.n_bins() * plan.batch());
  const double inv_len = 1.0 / static_cast<double>(plan.length());
  std::vector<std::complex<double>> scratch(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) scratch[i] = bins[i] * inv_len;
  std::vector<double> series(plan.length() * plan.batch());
  fftw_execute_dft_c2r(plan.native_d(), reinterpret_cast<fftw_complex*>(scratch.data()), series.data());
  return series;
}

inline std::vector<float> inverse_real_batched(const FftPlan& plan, std::span<const std::complex<float>> bins) {
  detail::check_plan<float>(plan, FftDirection::Inverse, bins.size(), plan.n_bins() * plan.batch());
  const float inv_len = 1.0f / static_cast<float>(plan.length());
  std::vector<std::complex<float>> scratch(bins.size());
  for (std::size_t i = 0; i < bins.size(); ++i) scratch[i] = bins[i] * inv_len;
  std::vector<float> series(plan.length() * plan.batch());
  fftwf_execute_dft_c2r(plan.native_f(), reinterpret_cast<fftwf_complex*>(scratch.data()), series.data());
  return series;
}

/// Process-wide plan cache keyed by (length, batch, precision, direction).
/// Plans are immutable and execution is reentrant, so sharing is safe.
inline std::shared_ptr<const FftPlan> shared_plan(std::size_t length, std::size_t batch, Precision precision,
                                                  FftDirection direction) {
  using Key = std::tuple<std::size_t, std::size_t, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const FftPlan>> cache;
  const Key key{length, batch, static_cast<int>(precision), static_cast<int>(direction)};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const FftPlan>(length, batch, precision, direction);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace fftmv
