#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fftmv/precision.hpp"

namespace fftmv {

/// Memory layout of a (space, time) block vector.
///   SOTI: space-outer/time-inner, element (s,t) at offset s*T + t
///         (each spatial point's series is contiguous -- what the FFT wants).
///   TOSI: time-outer/space-inner, element (t,s) at offset t*S + s
///         (each time step / frequency bin is contiguous -- what the GEMV wants).
enum class Layout : std::uint8_t { SOTI, TOSI };

enum class Domain : std::uint8_t { Time, Frequency };

/// Flat block vector over a (space_extent x time_extent) grid. Time-domain
/// vectors hold real scalars; frequency-domain vectors hold complex elements
/// stored as interleaved (re, im) scalar pairs, with time_extent counting bins.
struct BlockVector {
  std::size_t space_extent = 0;
  std::size_t time_extent = 0;
  Layout layout = Layout::SOTI;
  Precision precision = Precision::Double;
  Domain domain = Domain::Time;
  std::vector<double> f64;  // active when precision == Double
  std::vector<float> f32;   // active when precision == Single

  std::size_t elements() const { return space_extent * time_extent; }
  std::size_t scalars_per_element() const { return domain == Domain::Frequency ? 2 : 1; }
  std::size_t scalar_count() const { return elements() * scalars_per_element(); }

  std::span<const double> as_f64() const { return f64; }
  std::span<const float> as_f32() const { return f32; }

  void validate() const {
    const std::size_t n = scalar_count();
    const std::size_t have = precision == Precision::Double ? f64.size() : f32.size();
    const std::size_t other = precision == Precision::Double ? f32.size() : f64.size();
    if (space_extent == 0 || time_extent == 0)
      throw std::invalid_argument("BlockVector: zero extent");
    if (have != n || other != 0)
      throw std::invalid_argument("BlockVector: buffer length " + std::to_string(have) +
                                  " does not match extents (" + std::to_string(n) + " scalars)");
  }

  static BlockVector time_double(std::size_t space, std::size_t time, std::vector<double> data,
                                 Layout lay = Layout::SOTI) {
    BlockVector v;
    v.space_extent = space;
    v.time_extent = time;
    v.layout = lay;
    v.f64 = std::move(data);
    v.validate();
    return v;
  }
};

namespace detail {
// Plain 2-D transpose of the element grid; complex elements move as pairs.
template <class T>
void transpose_elems(std::span<const T> in, std::span<T> out, std::size_t outer, std::size_t inner,
                     std::size_t comps) {
  for (std::size_t a = 0; a < outer; ++a)
    for (std::size_t b = 0; b < inner; ++b)
      for (std::size_t c = 0; c < comps; ++c)
        out[(b * outer + a) * comps + c] = in[(a * inner + b) * comps + c];
}
}  // namespace detail

/// Relayouts v to the target layout. Values are moved bitwise; a vector
/// already in the target layout comes back as a plain copy.
inline BlockVector reorder(const BlockVector& v, Layout target) {
  v.validate();
  BlockVector out = v;
  if (v.layout == target) return out;
  out.layout = target;
  // SOTI has space outer; TOSI has time outer.
  const std::size_t outer = v.layout == Layout::SOTI ? v.space_extent : v.time_extent;
  const std::size_t inner = v.layout == Layout::SOTI ? v.time_extent : v.space_extent;
  const std::size_t comps = v.scalars_per_element();
  if (v.precision == Precision::Double)
    detail::transpose_elems<double>(v.f64, out.f64, outer, inner, comps);
  else
    detail::transpose_elems<float>(v.f32, out.f32, outer, inner, comps);
  return out;
}

}  // namespace fftmv
