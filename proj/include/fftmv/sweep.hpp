#pragma once

// Mixed-precision experiment engine: initialization that provably loses
// information under double->single casts, the relative-error metric, the
// 32-configuration sweep, and the Pareto-front configuration selection.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fftmv/config.hpp"
#include "fftmv/matvec.hpp"

namespace fftmv {

/// Doubles whose low 29 significand bits are forced to one, so every value
/// rounds when cast to single and the f64->f32->f64 round trip never returns
/// the original. Magnitudes are uniform in [0.5, 1) (one binade, away from
/// exponent boundaries), signs random. Deterministic: std::mt19937_64 with
/// fixed bit mappings, as in random_fill.hpp.
inline std::vector<double> non_representable_fill(std::size_t count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("non_representable_fill: count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out(count);
  for (auto& x : out) {
    const std::uint64_t u = rng();
    // Significand from the top 52 bits => magnitude in [0.5, 1).
    double mag = 0.5 + static_cast<double>(u >> 12) * 0x1.0p-53;
    std::uint64_t bits = std::bit_cast<std::uint64_t>(mag);
    bits |= (std::uint64_t{1} << 29) - 1;  // significand bits 0..28 := 1
    mag = std::bit_cast<double>(bits);
    x = (u & 1u) ? -mag : mag;
  }
  return out;
}

/// ||x - ref||_2 / ||ref||_2, accumulated in double.
inline double relative_error(std::span<const double> x, std::span<const double> ref) {
  if (x.size() != ref.size()) throw std::invalid_argument("relative_error: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - ref[i];
    num += diff * diff;
    den += ref[i] * ref[i];
  }
  if (den == 0.0) throw std::invalid_argument("relative_error: zero-norm reference");
  return std::sqrt(num) / std::sqrt(den);
}

/// One sweep row.
struct ConfigResult {
  PrecisionConfig config;
  double mean_s = 0.0;
  double min_s = 0.0;
  double max_s = 0.0;
  double rel_error = 0.0;
};

/// Sweeps all 32 configurations in enumerate_configs order. "ddddd" runs
/// first and fixes the baseline output; each configuration gets `warmup`
/// untimed runs followed by `repetitions` timed runs. Outputs are
/// deterministic, timings of course are not.
template <class MatvecFn>  // MatvecFn: PrecisionConfig -> std::vector<double>
std::vector<ConfigResult> sweep_configs(MatvecFn&& run_cfg, int repetitions, int warmup) {
  if (repetitions < 1) throw std::invalid_argument("sweep_configs: repetitions must be >= 1");
  if (warmup < 0) throw std::invalid_argument("sweep_configs: warmup must be >= 0");
  std::vector<ConfigResult> rows;
  rows.reserve(32);
  std::vector<double> baseline;
  for (const PrecisionConfig& cfg : enumerate_configs()) {
    for (int i = 0; i < warmup; ++i) (void)run_cfg(cfg);
    ConfigResult row;
    row.config = cfg;
    row.min_s = std::numeric_limits<double>::infinity();
    std::vector<double> out;
    double sum = 0.0;
    for (int i = 0; i < repetitions; ++i) {
      const double t0 = detail::now_s();
      out = run_cfg(cfg);
      const double dt = detail::now_s() - t0;
      sum += dt;
      row.min_s = std::min(row.min_s, dt);
      row.max_s = std::max(row.max_s, dt);
    }
    row.mean_s = sum / repetitions;
    if (baseline.empty()) baseline = out;  // first config is "ddddd"
    row.rel_error = cfg == PrecisionConfig::all_double()
                        ? 0.0
                        : relative_error(out, baseline);
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Sweep of a serial matvec. The operator's single-precision bins are
/// materialized up front so no setup cost leaks into the timed region.
inline std::vector<ConfigResult> sweep_configs(const SpectralOperator& op, std::span<const double> input,
                                               MatvecKind kind, int repetitions, int warmup,
                                               const TilingParams& tiling = {}) {
  materialize_single(op);
  const std::size_t n_in = kind == MatvecKind::Forward ? op.dims.n_m : op.dims.n_d;
  if (input.size() != n_in * op.dims.n_t) throw std::invalid_argument("sweep_configs: bad input length");
  return sweep_configs(
      [&](PrecisionConfig cfg) {
        return detail::run_pipeline(op, kind, input, nullptr, cfg, tiling).first;
      },
      repetitions, warmup);
}

inline bool dominates(const ConfigResult& r, const ConfigResult& q) {
  return r.mean_s <= q.mean_s && r.rel_error <= q.rel_error &&
         (r.mean_s < q.mean_s || r.rel_error < q.rel_error);
}

/// All results not dominated in (mean_s, rel_error), input order preserved.
inline std::vector<ConfigResult> pareto_front(std::span<const ConfigResult> results) {
  std::vector<ConfigResult> front;
  for (const auto& r : results) {
    bool dominated = false;
    for (const auto& q : results)
      if (dominates(q, r)) {
        dominated = true;
        break;
      }
    if (!dominated) front.push_back(r);
  }
  return front;
}

/// Fastest configuration whose error stays within tol (inclusive). Ties go
/// to the lower error, then to the lexicographically smaller config string.
inline PrecisionConfig optimal_config(std::span<const ConfigResult> results, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("optimal_config: tolerance must be > 0");
  const ConfigResult* best = nullptr;
  for (const auto& r : results) {
    if (r.rel_error > tol) continue;
    if (!best || r.mean_s < best->mean_s ||
        (r.mean_s == best->mean_s &&
         (r.rel_error < best->rel_error ||
          (r.rel_error == best->rel_error && r.config.render() < best->config.render()))))
      best = &r;
  }
  if (!best) throw std::invalid_argument("optimal_config: no result within tolerance");
  return best->config;
}

struct SweepReport {
  ProblemDims dims;
  MatvecKind kind = MatvecKind::Forward;
  int repetitions = 0;
  double tolerance = 0.0;
  std::vector<ConfigResult> rows;  // 32, enumerate_configs order; rows[0] is the baseline
  PrecisionConfig chosen;
};

inline const char* kind_name(MatvecKind k) { return k == MatvecKind::Forward ? "forward" : "adjoint"; }

inline SweepReport make_report(ProblemDims dims, MatvecKind kind, int repetitions, double tol,
                               std::vector<ConfigResult> rows) {
  SweepReport rep;
  rep.dims = dims;
  rep.kind = kind;
  rep.repetitions = repetitions;
  rep.tolerance = tol;
  rep.chosen = optimal_config(rows, tol);
  rep.rows = std::move(rows);
  return rep;
}

inline std::string sweep_csv_header() { return "config,mean_s,min_s,max_s,rel_error"; }

inline std::string to_csv(const SweepReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << sweep_csv_header() << '\n';
  for (const auto& r : rep.rows)
    os << r.config.render() << ',' << r.mean_s << ',' << r.min_s << ',' << r.max_s << ',' << r.rel_error
       << '\n';
  return os.str();
}

inline nlohmann::json to_json(const SweepReport& rep) {
  nlohmann::json j;
  j["dims"] = {{"n_m", rep.dims.n_m}, {"n_d", rep.dims.n_d}, {"n_t", rep.dims.n_t}};
  j["kind"] = kind_name(rep.kind);
  j["repetitions"] = rep.repetitions;
  j["tolerance"] = rep.tolerance;
  j["chosen"] = rep.chosen.render();
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"config", r.config.render()},
                    {"mean_s", r.mean_s},
                    {"min_s", r.min_s},
                    {"max_s", r.max_s},
                    {"rel_error", r.rel_error}});
  return j;
}

/// Parses rows in the sweep CSV schema (header optional, '#' lines skipped).
inline std::vector<ConfigResult> parse_sweep_csv(const std::string& text) {
  std::vector<ConfigResult> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line == sweep_csv_header()) continue;
    std::istringstream ls(line);
    std::string cfg, field;
    ConfigResult r;
    if (!std::getline(ls, cfg, ',')) continue;
    r.config = parse_precision_config(cfg);
    if (!std::getline(ls, field, ',')) throw std::invalid_argument("sweep csv: missing mean_s");
    r.mean_s = std::stod(field);
    if (!std::getline(ls, field, ',')) throw std::invalid_argument("sweep csv: missing min_s");
    r.min_s = std::stod(field);
    if (!std::getline(ls, field, ',')) throw std::invalid_argument("sweep csv: missing max_s");
    r.max_s = std::stod(field);
    if (!std::getline(ls, field, ',')) throw std::invalid_argument("sweep csv: missing rel_error");
    r.rel_error = std::stod(field);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace fftmv
