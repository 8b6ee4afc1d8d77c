#pragma once

#include <atomic>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace fftmv {

/// Compute precision of a buffer or pipeline phase. Single is IEEE-754
/// binary32, Double is binary64; nothing narrower is supported.
enum class Precision : std::uint8_t { Single, Double };

inline char precision_char(Precision p) { return p == Precision::Double ? 'd' : 's'; }

template <Precision P>
using precision_t = std::conditional_t<P == Precision::Double, double, float>;

template <class T>
inline constexpr Precision precision_of = std::is_same_v<T, float> || std::is_same_v<T, std::complex<float>>
                                              ? Precision::Single
                                              : Precision::Double;

namespace detail {
inline std::atomic<std::uint64_t>& cast_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}
}  // namespace detail

/// One tick per elementwise conversion pass over a buffer. Same-precision
/// copies are copies, not conversions, and do not tick. The all-double
/// configuration must leave this counter untouched.
inline void note_cast() { detail::cast_counter().fetch_add(1, std::memory_order_relaxed); }
inline std::uint64_t casts_performed() { return detail::cast_counter().load(std::memory_order_relaxed); }
inline void reset_cast_counter() { detail::cast_counter().store(0, std::memory_order_relaxed); }

/// Elementwise precision conversion. Double->Single rounds to nearest-even,
/// Single->Double is exact, same-type is a bitwise copy. Overflow to +-inf
/// follows IEEE semantics.
template <class Dst, class Src>
std::vector<Dst> cast_buffer(std::span<const Src> src) {
  static_assert(std::is_floating_point_v<Dst> && std::is_floating_point_v<Src>);
  std::vector<Dst> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) out[i] = static_cast<Dst>(src[i]);
  if constexpr (!std::is_same_v<Dst, Src>) note_cast();
  return out;
}

/// Complex variant: converts the interleaved components.
template <class Dst, class Src>
std::vector<std::complex<Dst>> cast_buffer(std::span<const std::complex<Src>> src) {
  std::vector<std::complex<Dst>> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i)
    out[i] = std::complex<Dst>(static_cast<Dst>(src[i].real()), static_cast<Dst>(src[i].imag()));
  if constexpr (!std::is_same_v<Dst, Src>) note_cast();
  return out;
}

}  // namespace fftmv
