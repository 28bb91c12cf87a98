#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "citest/errors.hpp"
#include "citest/grid.hpp"
#include "citest/index.hpp"
#include "citest/parallel.hpp"
#include "citest/process.hpp"
#include "citest/rng.hpp"
#include "citest/sample.hpp"
#include "citest/stats.hpp"
#include "citest/transform.hpp"

namespace citest {

/// Mammen two-point multiplier law: values -(sqrt5-1)/2 and (sqrt5+1)/2 with
/// masses (sqrt5+1)/(2 sqrt5) and (sqrt5-1)/(2 sqrt5); exact mean 0, variance 1.
namespace mammen {
inline const double sqrt5 = std::sqrt(5.0);
inline const double low = -(sqrt5 - 1.0) / 2.0;
inline const double high = (sqrt5 + 1.0) / 2.0;
inline const double low_mass = (sqrt5 + 1.0) / (2.0 * sqrt5);
}  // namespace mammen

namespace detail {
inline constexpr std::uint64_t stream_multipliers = 0x6d756c74;  // RNG domain tags
inline constexpr std::uint64_t stream_data = 0x64617461;
}  // namespace detail

/// One multiplier row from the substream indexed by (seed, b); row b of
/// draw_multipliers(n, B, seed) equals this call for every B >= b.
inline std::vector<double> draw_multiplier_row(std::size_t n, std::size_t b, std::uint64_t seed) {
  rng_stream stream = rng_stream::from_path(seed, {detail::stream_multipliers, b});
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    row[i] = stream.next_uniform() < mammen::low_mass ? mammen::low : mammen::high;
  }
  return row;
}

/// B x n matrix of wild-bootstrap multipliers, row-major.
struct multiplier_draws {
  std::size_t n = 0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> omega;

  std::span<const double> row(std::size_t b) const {
    return std::span<const double>(omega.data() + b * n, n);
  }
};

inline multiplier_draws draw_multipliers(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (n < 1 || count < 1) throw invalid_input("draw_multipliers: n and B must be positive");
  multiplier_draws d;
  d.n = n;
  d.count = count;
  d.seed = seed;
  d.omega.reserve(n * count);
  for (std::size_t b = 0; b < count; ++b) {
    const std::vector<double> row = draw_multiplier_row(n, b, seed);
    d.omega.insert(d.omega.end(), row.begin(), row.end());
  }
  return d;
}

/// Bootstrap critical value c_{alpha,n,B}: the smallest order statistic t
/// with at least a 1-alpha fraction of bootstrap statistics <= t.
inline double critical_value(std::span<const double> bootstrap_stats, double alpha) {
  if (bootstrap_stats.empty()) throw invalid_input("critical_value: need B >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_input("critical_value: alpha outside (0, 1)");
  const std::size_t b_count = bootstrap_stats.size();
  const double target = static_cast<double>(b_count) * (1.0 - alpha);
  auto rank = static_cast<std::size_t>(std::ceil(target - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, b_count);
  std::vector<double> sorted(bootstrap_stats.begin(), bootstrap_stats.end());
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  return sorted[rank - 1];
}

/// Finite-sample p-value (1 + #{T*_b >= T}) / (B + 1); never exactly zero.
inline double p_value(double statistic, std::span<const double> bootstrap_stats) {
  if (bootstrap_stats.empty()) throw invalid_input("p_value: need B >= 1");
  std::size_t count = 0;
  for (double t : bootstrap_stats) {
    if (t >= statistic) ++count;
  }
  return static_cast<double>(1 + count) / static_cast<double>(bootstrap_stats.size() + 1);
}

/// Everything about a test run except the level: statistic, the full set of
/// bootstrap statistics, and diagnostics. Lets callers evaluate several
/// levels from one bootstrap pass.
struct bootstrap_run {
  double statistic = 0.0;
  std::vector<double> bootstrap_stats;
  std::size_t n = 0;
  std::vector<double> theta;
  bool theta_estimated = false;
  transform_warnings warnings;
};

/// Statistical knobs of a run. grid_resolution 0 picks the default for the
/// z kind (10 per axis continuous, 20 per axis discrete).
struct test_config {
  beta_family family = beta_family::exponential;
  functional_kind functional = functional_kind::ks2;
  bandwidth h_z;                     // z-side smoothing (propensities when discrete)
  bandwidth h_y;                     // response-side smoothing
  std::size_t grid_resolution = 0;
  std::size_t bootstrap_samples = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 42;
  unsigned threads = 1;

  std::size_t resolve_grid(z_kind kind) const {
    if (grid_resolution > 0) return grid_resolution;
    return kind == z_kind::continuous ? 10 : 20;
  }

  void validate() const {
    if (bootstrap_samples < 1) throw invalid_input("config: bootstrap size B must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw invalid_input("config: alpha outside (0, 1)");
    if (!(h_z.constant > 0.0) || !(h_y.constant > 0.0)) {
      throw invalid_input("config: bandwidth constants must be positive");
    }
    if (!(h_z.exponent > 0.0) || !(h_y.exponent > 0.0)) {
      throw invalid_input("config: bandwidth exponents must be positive");
    }
  }
};

/// Final verdict at one level alpha.
struct test_result {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  std::size_t bootstrap_samples = 0;
  std::size_t n = 0;
  std::vector<double> theta;
  bool theta_estimated = false;
  transform_warnings warnings;
};

/// Runs the pipeline once: resolve theta, transform, evaluate the process
/// and statistic, then B multiplier draws against the same factor tables
/// (nothing is re-estimated per draw). Deterministic given the seed and
/// independent of `threads`.
inline bootstrap_run run_bootstrap(const sample& data, const index_spec& index,
                                   const test_config& config) {
  config.validate();
  data.validate();
  const std::size_t n = data.size();

  bootstrap_run run;
  run.n = n;
  if (index.theta.kind == theta_spec::mode::probit) {
    const probit_fit fit = probit_mle(data.z, data.x, index.model, index.theta.probit);
    run.theta = fit.theta;
    run.theta_estimated = true;
  } else {
    run.theta = index.theta.values;
  }

  const std::vector<double> index_values = eval_index(index.model, run.theta, data.x);
  const transformed_sample ts = rosenblatt_transform(data, index_values, config.h_y, config.h_z);
  run.warnings = ts.warnings;

  const std::size_t g = config.resolve_grid(data.kind);
  const eval_grid grid = data.kind == z_kind::continuous
                             ? eval_grid::midpoint(g)
                             : eval_grid::midpoint_discrete(g, data.z_support);
  const process_tables tables =
      data.kind == z_kind::continuous
          ? make_process_tables(ts, config.family, grid)
          : make_discrete_process_tables(ts, data.z, config.family, grid);

  run.statistic = apply_functional(detail::accumulate_process(tables, {}), config.functional);

  run.bootstrap_stats.assign(config.bootstrap_samples, 0.0);
  parallel_for(config.bootstrap_samples, config.threads, [&](std::size_t b) {
    const std::vector<double> omega = draw_multiplier_row(n, b, config.seed);
    run.bootstrap_stats[b] =
        apply_functional(detail::accumulate_process(tables, omega), config.functional);
  });
  return run;
}

/// Full conditional-independence test at level config.alpha.
inline test_result run_test(const sample& data, const index_spec& index,
                            const test_config& config) {
  const bootstrap_run run = run_bootstrap(data, index, config);
  test_result result;
  result.statistic = run.statistic;
  result.critical_value = critical_value(run.bootstrap_stats, config.alpha);
  result.p_value = p_value(run.statistic, run.bootstrap_stats);
  result.reject = result.statistic > result.critical_value;
  result.alpha = config.alpha;
  result.bootstrap_samples = config.bootstrap_samples;
  result.n = run.n;
  result.theta = run.theta;
  result.theta_estimated = run.theta_estimated;
  result.warnings = run.warnings;
  return result;
}

}  // namespace citest
