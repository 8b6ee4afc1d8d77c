#pragma once

// Deterministic in-process simulation of the 1 x p partitioned matvec. The
// operator is split column-wise (by parameter index) over p workers, so the
// only nontrivial communication is a reduction of partial data vectors in
// the forward matvec and a broadcast of the data vector in the adjoint.
// Workers run sequentially; results are independent of any scheduling by
// construction, and the reduction is a fixed left-balanced binary tree.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fftmv/matvec.hpp"
#include "fftmv/operator.hpp"

namespace fftmv {

/// Column partition of [0, n_m) into p contiguous ranges, sizes differing by
/// at most one (the leading ranges take the remainder).
struct Grid1xP {
  std::size_t p = 1;
  std::vector<std::pair<std::size_t, std::size_t>> shard_ranges;  // [begin, end)

  static Grid1xP split(std::size_t p, std::size_t n_m) {
    if (p < 1) throw std::invalid_argument("Grid1xP: p must be >= 1");
    if (p > n_m) throw std::invalid_argument("Grid1xP: more workers than parameter columns");
    Grid1xP g;
    g.p = p;
    const std::size_t base = n_m / p, rem = n_m % p;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < p; ++w) {
      const std::size_t size = base + (w < rem ? 1 : 0);
      g.shard_ranges.emplace_back(begin, begin + size);
      begin += size;
    }
    return g;
  }

  std::size_t shard_size(std::size_t w) const { return shard_ranges[w].second - shard_ranges[w].first; }
};

/// Communication step descriptor: both collectives move a data-vector-sized
/// buffer of n_d * n_t values.
struct CommSpec {
  enum class Op : std::uint8_t { Reduce, Broadcast };
  Op op = Op::Reduce;
  Precision precision = Precision::Double;
  std::size_t buffer_len = 0;

  static CommSpec forward_reduce(PrecisionConfig cfg, const ProblemDims& dims) {
    return {Op::Reduce, cfg[4], dims.n_d * dims.n_t};
  }
  static CommSpec adjoint_broadcast(PrecisionConfig cfg, const ProblemDims& dims) {
    return {Op::Broadcast, cfg[0], dims.n_d * dims.n_t};
  }
};

/// Worker w gets the slice of every block restricted to its parameter
/// columns; concatenating the shards reconstructs the column bitwise.
inline std::vector<BlockColumn> shard_operator(const BlockColumn& col, const Grid1xP& grid) {
  const ProblemDims& dims = col.dims;
  if (grid.shard_ranges.empty() || grid.shard_ranges.back().second != dims.n_m)
    throw std::invalid_argument("shard_operator: grid does not cover n_m");
  std::vector<BlockColumn> shards;
  shards.reserve(grid.p);
  for (std::size_t w = 0; w < grid.p; ++w) {
    const auto [lo, hi] = grid.shard_ranges[w];
    const ProblemDims sd(hi - lo, dims.n_d, dims.n_t);
    std::vector<double> data(sd.n_t * sd.n_d * sd.n_m);
    for (std::size_t t = 0; t < dims.n_t; ++t)
      for (std::size_t j = lo; j < hi; ++j)
        for (std::size_t i = 0; i < dims.n_d; ++i)
          data[t * sd.n_d * sd.n_m + i + (j - lo) * sd.n_d] = col.at(t, i, j);
    shards.emplace_back(sd, std::move(data));
  }
  return shards;
}

namespace detail {
template <class T>
std::vector<double> tree_reduce_impl(const std::vector<std::vector<double>>& buffers) {
  const std::size_t n = buffers.front().size();
  // Cast every input in, then fold adjacent pairs round by round:
  // p=4 gives ((b0+b1)+(b2+b3)), p=3 gives ((b0+b1)+b2).
  std::vector<std::vector<T>> level;
  level.reserve(buffers.size());
  for (const auto& b : buffers) {
    if (b.size() != n) throw std::invalid_argument("tree_reduce: buffer length mismatch");
    level.push_back(cast_to<T>(b));
  }
  while (level.size() > 1) {
    std::vector<std::vector<T>> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t k = 0; k + 1 < level.size(); k += 2) {
      std::vector<T>& a = level[k];
      const std::vector<T>& b = level[k + 1];
      for (std::size_t i = 0; i < n; ++i) a[i] = a[i] + b[i];
      next.push_back(std::move(a));
    }
    if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
    level = std::move(next);
  }
  return cast_to<double>(level.front());
}

template <class T>
std::vector<T> cast_to(const std::vector<double>& v) {
  if constexpr (std::is_same_v<T, double>)
    return v;
  else
    return cast_buffer<float>(std::span<const double>(v));
}
template <class T>
std::vector<double> cast_to(const std::vector<T>& v) {
  if constexpr (std::is_same_v<T, double>)
    return v;
  else
    return cast_buffer<double>(std::span<const float>(v));
}
}  // namespace detail

/// Fixed left-balanced binary-tree sum. Inputs are cast to `precision`
/// first, every partial sum is held and added in that precision, and the
/// root is cast back to double.
inline std::vector<double> tree_reduce(const std::vector<std::vector<double>>& buffers, Precision precision) {
  if (buffers.empty()) throw std::invalid_argument("tree_reduce: no buffers");
  if (precision == Precision::Double) return detail::tree_reduce_impl<double>(buffers);
  return detail::tree_reduce_impl<float>(buffers);
}

/// Per-worker spectral operators plus the grid that produced them.
struct PartitionedOperator {
  ProblemDims dims;
  Grid1xP grid;
  std::vector<SpectralOperator> workers;
};

inline PartitionedOperator setup_partitioned(const BlockColumn& col, const Grid1xP& grid) {
  PartitionedOperator pop;
  pop.dims = col.dims;
  pop.grid = grid;
  for (const BlockColumn& shard : shard_operator(col, grid)) pop.workers.push_back(setup_operator(shard));
  return pop;
}

struct PartitionedResult {
  BlockVector output;
  PhaseTimings timings;  // phase seconds summed over workers; comm time in its phase
};

/// d = F m over the grid: every worker runs the full five-phase pipeline on
/// its parameter slice, producing a full-length partial data vector; the
/// partials meet in a tree reduction carried out in cfg[4] precision.
inline PartitionedResult forward_matvec_partitioned(const PartitionedOperator& pop, const BlockVector& m,
                                                    PrecisionConfig cfg, const TilingParams& tiling = {}) {
  detail::check_matvec_input(pop.workers.empty() ? SpectralOperator{} : pop.workers.front(), m, true);
  // the check above validates form only for the shard; re-check full extents
  if (m.space_extent != pop.dims.n_m || m.time_extent != pop.dims.n_t)
    throw std::invalid_argument("partitioned matvec: input extents do not match dims");

  PhaseTimings total;
  std::vector<std::vector<double>> partials;
  partials.reserve(pop.grid.p);
  for (std::size_t w = 0; w < pop.grid.p; ++w) {
    const auto [lo, hi] = pop.grid.shard_ranges[w];
    const std::span<const double> slice =
        std::span<const double>(m.f64).subspan(lo * pop.dims.n_t, (hi - lo) * pop.dims.n_t);
    auto [part, t] = detail::run_pipeline(pop.workers[w], MatvecKind::Forward, slice, nullptr, cfg, tiling);
    total += t;
    partials.push_back(std::move(part));
  }
  const CommSpec comm = CommSpec::forward_reduce(cfg, pop.dims);
  const double t0 = detail::now_s();
  std::vector<double> d = tree_reduce(partials, comm.precision);
  const double dt = detail::now_s() - t0;
  total.phase_s[4] += dt;
  total.total_s += dt;
  return {BlockVector::time_double(pop.dims.n_d, pop.dims.n_t, std::move(d)), total};
}

/// m = F* d over the grid: the data vector is cast to cfg[0] once (the
/// simulated broadcast payload) and delivered to every worker; each worker
/// computes its parameter shard and the shards concatenate, no reduction.
inline PartitionedResult adjoint_matvec_partitioned(const PartitionedOperator& pop, const BlockVector& d,
                                                    PrecisionConfig cfg, const TilingParams& tiling = {}) {
  d.validate();
  if (d.precision != Precision::Double || d.domain != Domain::Time || d.layout != Layout::SOTI)
    throw std::invalid_argument("partitioned matvec: input must be a time-domain SOTI double vector");
  if (d.space_extent != pop.dims.n_d || d.time_extent != pop.dims.n_t)
    throw std::invalid_argument("partitioned matvec: input extents do not match dims");

  PhaseTimings total;
  const CommSpec comm = CommSpec::adjoint_broadcast(cfg, pop.dims);
  const double t0 = detail::now_s();
  detail::RealBuf payload;
  payload.prec = comm.precision;
  if (comm.precision == Precision::Double)
    payload.d = d.f64;
  else
    payload.f = cast_buffer<float>(std::span<const double>(d.f64));
  const double bt = detail::now_s() - t0;
  total.phase_s[0] += bt;
  total.total_s += bt;

  std::vector<double> out(pop.dims.n_m * pop.dims.n_t);
  for (std::size_t w = 0; w < pop.grid.p; ++w) {
    const auto [lo, hi] = pop.grid.shard_ranges[w];
    auto [shard, t] =
        detail::run_pipeline(pop.workers[w], MatvecKind::Adjoint, {}, &payload, cfg, tiling);
    total += t;
    std::copy(shard.begin(), shard.end(), out.begin() + lo * pop.dims.n_t);
  }
  return {BlockVector::time_double(pop.dims.n_m, pop.dims.n_t, std::move(out)), total};
}

/// Convenience overloads working straight from operator shards.
inline PartitionedResult forward_matvec_partitioned(const std::vector<BlockColumn>& shards,
                                                    const BlockVector& m, PrecisionConfig cfg,
                                                    const Grid1xP& grid, const TilingParams& tiling = {}) {
  PartitionedOperator pop;
  pop.grid = grid;
  pop.dims = ProblemDims(grid.shard_ranges.back().second, shards.front().dims.n_d, shards.front().dims.n_t);
  for (const auto& s : shards) pop.workers.push_back(setup_operator(s));
  return forward_matvec_partitioned(pop, m, cfg, tiling);
}

inline PartitionedResult adjoint_matvec_partitioned(const std::vector<BlockColumn>& shards,
                                                    const BlockVector& d, PrecisionConfig cfg,
                                                    const Grid1xP& grid, const TilingParams& tiling = {}) {
  PartitionedOperator pop;
  pop.grid = grid;
  pop.dims = ProblemDims(grid.shard_ranges.back().second, shards.front().dims.n_d, shards.front().dims.n_t);
  for (const auto& s : shards) pop.workers.push_back(setup_operator(s));
  return adjoint_matvec_partitioned(pop, d, cfg, tiling);
}

}  // namespace fftmv
