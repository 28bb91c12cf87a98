#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "citest/bootstrap.hpp"
#include "citest/errors.hpp"
#include "citest/index.hpp"
#include "citest/math.hpp"
#include "citest/parallel.hpp"
#include "citest/rng.hpp"
#include "citest/sample.hpp"

namespace citest {

/// Simulation designs. A-family: null with continuous z. B-family:
/// alternatives with continuous z. C: null with binary z and estimated
/// probit index. D-family: binary-z alternatives with deviation strength kappa.
enum class dgp_name { a1, a2, b1, b2, b3, b4, c, d1, d2 };

inline std::string to_string(dgp_name d) {
  switch (d) {
    case dgp_name::a1: return "A1";
    case dgp_name::a2: return "A2";
    case dgp_name::b1: return "B1";
    case dgp_name::b2: return "B2";
    case dgp_name::b3: return "B3";
    case dgp_name::b4: return "B4";
    case dgp_name::c: return "C";
    case dgp_name::d1: return "D1";
    case dgp_name::d2: return "D2";
  }
  return "?";
}

inline dgp_name parse_dgp(const std::string& name) {
  for (dgp_name d : {dgp_name::a1, dgp_name::a2, dgp_name::b1, dgp_name::b2, dgp_name::b3,
                     dgp_name::b4, dgp_name::c, dgp_name::d1, dgp_name::d2}) {
    if (to_string(d) == name) return d;
  }
  throw invalid_input("unknown DGP: " + name);
}

inline bool dgp_is_binary(dgp_name d) {
  return d == dgp_name::c || d == dgp_name::d1 || d == dgp_name::d2;
}

inline bool dgp_uses_a(dgp_name d) { return !dgp_is_binary(d); }

inline bool dgp_uses_kappa(dgp_name d) { return d == dgp_name::d1 || d == dgp_name::d2; }

struct dgp_spec {
  dgp_name name = dgp_name::a1;
  double a = 0.2;      // x-z dependence, continuous designs
  double kappa = 0.5;  // deviation strength, D designs
  std::size_t n = 100;

  /// Index scale 0.5 and theta_0 = (0, 1, 1) of the binary designs.
  static index_model binary_index_model() { return index_model::linear(0.5); }
  static std::vector<double> binary_theta() { return {0.0, 1.0, 1.0}; }
};

/// Draws one sample from the design; deterministic in the seed. Continuous
/// designs emit a single covariate column (the index is x itself); binary
/// designs emit two columns and binary z with support {0, 1}.
inline sample generate(const dgp_spec& spec, std::uint64_t seed) {
  rng_stream stream = rng_stream::from_path(seed, {detail::stream_data});
  const std::size_t n = spec.n;
  const double inv_sqrt02 = 1.0 / std::sqrt(0.2);
  sample out;
  out.y.resize(n);
  out.z.resize(n);

  if (!dgp_is_binary(spec.name)) {
    out.kind = z_kind::continuous;
    out.x = matrix(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = stream.next_uniform();
      const double eta = stream.next_uniform();
      const double eps = stream.next_normal();
      const double z = spec.a * x + (1.0 - spec.a) * eta;
      double y = 0.0;
      switch (spec.name) {
        case dgp_name::a1: y = norm_cdf((x - 0.5) * inv_sqrt02); break;
        case dgp_name::a2: y = std::sin(5.0 * x); break;
        case dgp_name::b1:
          y = norm_cdf((x - 0.5) * inv_sqrt02) + norm_cdf((z - 0.5) * inv_sqrt02);
          break;
        case dgp_name::b2: y = norm_cdf((x - 0.5) * inv_sqrt02) + std::sin(5.0 * z); break;
        case dgp_name::b3: y = std::sin(5.0 * x) + norm_cdf((z - 0.5) * inv_sqrt02); break;
        case dgp_name::b4: y = norm_cdf((x - 0.5) * inv_sqrt02) * std::sin(5.0 * z); break;
        default: break;
      }
      out.x(i, 0) = x;
      out.z[i] = z;
      out.y[i] = y + eps;
    }
    return out;
  }

  out.kind = z_kind::discrete;
  out.z_support = {0.0, 1.0};
  out.x = matrix(n, 2);
  const index_model model = dgp_spec::binary_index_model();
  const std::vector<double> theta0 = dgp_spec::binary_theta();
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = stream.next_uniform() + 0.2;
    const double x2 = stream.next_uniform() - 0.2;
    const double row[2] = {x1, x2};
    const double lam = model.eval_row(theta0, row);
    const double eta = stream.next_normal();
    const double eps = stream.next_normal();
    const double z = lam > eta ? 1.0 : 0.0;
    const double s = z * (1.0 + std::abs(x1) + std::abs(x2));
    double y = 0.0;
    switch (spec.name) {
      case dgp_name::c: y = 2.0 * norm_cdf(lam * inv_sqrt02); break;
      case dgp_name::d1: y = 0.5 * lam + spec.kappa * s; break;
      case dgp_name::d2: y = 2.0 * norm_cdf((lam + spec.kappa * s) * inv_sqrt02); break;
      default: break;
    }
    out.x(i, 0) = x1;
    out.x(i, 1) = x2;
    out.z[i] = z;
    out.y[i] = y + eps;
  }
  return out;
}

/// One Monte Carlo cell: a design instance, bandwidth constants, and a
/// weight family.
struct sim_cell_spec {
  dgp_spec dgp;
  double h1_const = 1.0;  // z-side (propensity) bandwidth constant
  double h2_const = 1.0;  // response bandwidth constant
  beta_family family = beta_family::exponential;
};

struct sim_cell_result {
  sim_cell_spec spec;
  std::vector<double> reject_rate;  // aligned with sim_config.levels
  std::vector<double> mc_se;        // sqrt(p(1-p)/completed)
  std::size_t completed = 0;
  std::size_t failures = 0;
};

struct sim_config {
  std::vector<double> levels = {0.01, 0.05, 0.10};
  std::size_t reps = 500;
  std::size_t bootstrap_samples = 200;
  functional_kind functional = functional_kind::ks2;
  double h_exponent = 0.2;
  std::size_t grid_resolution = 0;  // 0 => per-kind default
  std::uint64_t master_seed = 42;
  unsigned threads = 1;

  void validate() const {
    if (reps < 1) throw invalid_input("simulate: reps must be >= 1");
    if (bootstrap_samples < 1) throw invalid_input("simulate: bootstrap size must be >= 1");
    if (levels.empty()) throw invalid_input("simulate: need at least one level");
    for (double a : levels) {
      if (!(a > 0.0 && a < 1.0)) throw invalid_input("simulate: level outside (0, 1)");
    }
  }
};

struct sim_report {
  sim_config config;
  std::vector<sim_cell_result> cells;
};

namespace detail {

inline constexpr std::uint64_t stream_cell_data = 0x73696d64;
inline constexpr std::uint64_t stream_cell_test = 0x73696d74;

struct rep_outcome {
  bool failed = false;
  std::vector<std::uint8_t> reject;
};

inline rep_outcome run_replication(const sim_cell_spec& cell, const sim_config& config,
                                   std::size_t cell_index, std::size_t rep) {
  const std::uint64_t data_seed =
      rng_stream::from_path(config.master_seed, {stream_cell_data, cell_index, rep}).next_u64();
  const sample data = generate(cell.dgp, data_seed);

  index_spec index;
  if (dgp_is_binary(cell.dgp.name)) {
    index.model = dgp_spec::binary_index_model();
    index.theta = theta_spec::probit_mle();
  } else {
    index.model = index_model::linear(1.0);
    index.theta = theta_spec::known({0.0, 1.0});
  }

  test_config tc;
  tc.family = cell.family;
  tc.functional = config.functional;
  tc.h_z = bandwidth{cell.h1_const, config.h_exponent};
  tc.h_y = bandwidth{cell.h2_const, config.h_exponent};
  tc.grid_resolution = config.grid_resolution;
  tc.bootstrap_samples = config.bootstrap_samples;
  tc.seed =
      rng_stream::from_path(config.master_seed, {stream_cell_test, cell_index, rep}).next_u64();
  tc.threads = 1;

  rep_outcome out;
  out.reject.assign(config.levels.size(), 0);
  try {
    const bootstrap_run run = run_bootstrap(data, index, tc);
    for (std::size_t l = 0; l < config.levels.size(); ++l) {
      const double crit = critical_value(run.bootstrap_stats, config.levels[l]);
      out.reject[l] = run.statistic > crit ? 1 : 0;
    }
  } catch (const degenerate_response&) {
    out.failed = true;
  } catch (const nonconvergence&) {
    out.failed = true;
  }
  return out;
}

}  // namespace detail

/// Monte Carlo rejection-rate sweep over cells. Replication r of cell c uses
/// substreams keyed by (master_seed, c, r), so results do not depend on the
/// thread count or execution order. Estimation failures inside a replication
/// are counted per cell, not propagated.
inline sim_report rejection_table(const std::vector<sim_cell_spec>& cells,
                                  const sim_config& config) {
  config.validate();
  sim_report report;
  report.config = config;
  report.cells.resize(cells.size());

  const std::size_t reps = config.reps;
  std::vector<detail::rep_outcome> outcomes(cells.size() * reps);
  parallel_for(cells.size() * reps, config.threads, [&](std::size_t task) {
    const std::size_t c = task / reps;
    const std::size_t r = task % reps;
    outcomes[task] = detail::run_replication(cells[c], config, c, r);
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    sim_cell_result& cell = report.cells[c];
    cell.spec = cells[c];
    std::vector<std::size_t> rejections(config.levels.size(), 0);
    for (std::size_t r = 0; r < reps; ++r) {
      const detail::rep_outcome& o = outcomes[c * reps + r];
      if (o.failed) {
        ++cell.failures;
        continue;
      }
      ++cell.completed;
      for (std::size_t l = 0; l < config.levels.size(); ++l) rejections[l] += o.reject[l];
    }
    cell.reject_rate.assign(config.levels.size(), 0.0);
    cell.mc_se.assign(config.levels.size(), 0.0);
    for (std::size_t l = 0; l < config.levels.size(); ++l) {
      if (cell.completed > 0) {
        const double p =
            static_cast<double>(rejections[l]) / static_cast<double>(cell.completed);
        cell.reject_rate[l] = p;
        cell.mc_se[l] = std::sqrt(p * (1.0 - p) / static_cast<double>(cell.completed));
      }
    }
  }
  return report;
}

}  // namespace citest
