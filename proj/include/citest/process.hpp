#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "citest/errors.hpp"
#include "citest/grid.hpp"
#include "citest/transform.hpp"
#include "citest/weights.hpp"

namespace citest {

/// Process evaluated on a grid, stored u-major, then y, then z.
struct process_values {
  eval_grid grid;
  std::size_t n = 0;
  std::vector<double> values;

  double at(std::size_t iu, std::size_t iy, std::size_t iz) const {
    return values[(iu * grid.y.size() + iy) * grid.z.size() + iz];
  }
};

/// Per-axis, per-observation factor tables. All transcendental evaluations
/// happen once here; the grid combination and every bootstrap draw are then
/// pure multiply-adds over these tables.
struct process_tables {
  std::size_t n = 0;
  eval_grid grid;
  std::vector<double> beta_u;   // n x |u axis|
  std::vector<double> gamma_y;  // n x |y axis|
  std::vector<double> z_factor; // n x |z axis|
};

namespace detail {

inline process_tables make_tables_common(const transformed_sample& ts, beta_family family,
                                         const eval_grid& grid) {
  grid.validate();
  process_tables t;
  t.n = ts.size();
  t.grid = grid;
  const std::size_t gu = grid.u.size();
  const std::size_t gy = grid.y.size();
  t.beta_u.resize(t.n * gu);
  t.gamma_y.resize(t.n * gy);
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t a = 0; a < gu; ++a) {
      t.beta_u[i * gu + a] = beta_eval(family, ts.u_hat[i], grid.u[a]);
    }
    for (std::size_t b = 0; b < gy; ++b) {
      t.gamma_y[i * gy + b] = gamma_perp(grid.y[b], ts.y_hat[i]);
    }
  }
  return t;
}

// Fixed-order accumulation: ascending observation index, then u, y, z axes.
// The same routine serves the plain process (empty omega) and every bootstrap
// draw, so a multiplier row of ones reproduces the plain process bit for bit.
inline process_values accumulate_process(const process_tables& t, std::span<const double> omega) {
  if (!omega.empty() && omega.size() != t.n) {
    throw invalid_input("process: multiplier row length mismatch");
  }
  const std::size_t gu = t.grid.u.size();
  const std::size_t gy = t.grid.y.size();
  const std::size_t gz = t.grid.z.size();
  process_values pv;
  pv.grid = t.grid;
  pv.n = t.n;
  pv.values.assign(gu * gy * gz, 0.0);
  for (std::size_t i = 0; i < t.n; ++i) {
    const double w = omega.empty() ? 1.0 : omega[i];
    const double* beta_row = &t.beta_u[i * gu];
    const double* y_row = &t.gamma_y[i * gy];
    const double* z_row = &t.z_factor[i * gz];
    double* out = pv.values.data();
    for (std::size_t a = 0; a < gu; ++a) {
      const double wb = w * beta_row[a];
      for (std::size_t b = 0; b < gy; ++b) {
        const double wby = wb * y_row[b];
        for (std::size_t c = 0; c < gz; ++c) {
          *out++ += wby * z_row[c];
        }
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(t.n));
  for (double& v : pv.values) v *= scale;
  return pv;
}

}  // namespace detail

/// Factor tables for the continuous-z process: z factor gamma_z_perp(Z_hat_i).
inline process_tables make_process_tables(const transformed_sample& ts, beta_family family,
                                          const eval_grid& grid) {
  if (ts.discrete()) throw invalid_input("make_process_tables: transformed sample is discrete");
  if (ts.z_hat.size() != ts.size()) throw invalid_input("make_process_tables: z_hat missing");
  if (grid.discrete_z) throw invalid_input("make_process_tables: grid has discrete z axis");
  process_tables t = detail::make_tables_common(ts, family, grid);
  const std::size_t gz = grid.z.size();
  t.z_factor.resize(t.n * gz);
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t c = 0; c < gz; ++c) {
      t.z_factor[i * gz + c] = gamma_perp(grid.z[c], ts.z_hat[i]);
    }
  }
  return t;
}

/// Factor tables for the discrete-z process: standardized residual
/// (1{Z_i = z} - p_hat) / sqrt(p_hat (1 - p_hat)) per support point.
inline process_tables make_discrete_process_tables(const transformed_sample& ts,
                                                   std::span<const double> z_codes,
                                                   beta_family family, const eval_grid& grid) {
  if (!ts.discrete()) throw invalid_input("make_discrete_process_tables: p_hat missing");
  if (z_codes.size() != ts.size()) {
    throw invalid_input("make_discrete_process_tables: z code length mismatch");
  }
  if (!grid.discrete_z || grid.z.size() != ts.support_size()) {
    throw invalid_input("make_discrete_process_tables: grid z axis must equal the support");
  }
  for (std::size_t c = 0; c < grid.z.size(); ++c) {
    if (grid.z[c] != ts.z_support[c]) {
      throw invalid_input("make_discrete_process_tables: grid z axis must equal the support");
    }
  }
  process_tables t = detail::make_tables_common(ts, family, grid);
  const std::size_t gz = grid.z.size();
  t.z_factor.resize(t.n * gz);
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t c = 0; c < gz; ++c) {
      const double p = ts.propensity(i, c);
      if (!(p > 0.0 && p < 1.0)) {
        throw invalid_input("discrete process: propensity outside (0, 1) after clamping");
      }
      const double indicator = z_codes[i] == grid.z[c] ? 1.0 : 0.0;
      t.z_factor[i * gz + c] = (indicator - p) / std::sqrt(p - p * p);
    }
  }
  return t;
}

/// nu_hat_n on the grid: n^{-1/2} sum_i beta_u(U_hat_i) gamma_z(Z_hat_i) gamma_y(Y_hat_i).
inline process_values feasible_process(const transformed_sample& ts, beta_family family,
                                       const eval_grid& grid) {
  return detail::accumulate_process(make_process_tables(ts, family, grid), {});
}

/// nu_bar_n on the grid: standardized discrete-z analog of feasible_process.
inline process_values discrete_process(const transformed_sample& ts,
                                       std::span<const double> z_codes, beta_family family,
                                       const eval_grid& grid) {
  return detail::accumulate_process(make_discrete_process_tables(ts, z_codes, family, grid), {});
}

/// Wild-bootstrap draw of the continuous-z process: each summand multiplied
/// by its multiplier omega_i. No re-estimation of transforms takes place.
inline process_values bootstrap_process(const transformed_sample& ts, beta_family family,
                                        const eval_grid& grid, std::span<const double> omega) {
  return detail::accumulate_process(make_process_tables(ts, family, grid), omega);
}

/// Discrete-z bootstrap draw.
inline process_values bootstrap_process(const transformed_sample& ts,
                                        std::span<const double> z_codes, beta_family family,
                                        const eval_grid& grid, std::span<const double> omega) {
  return detail::accumulate_process(make_discrete_process_tables(ts, z_codes, family, grid),
                                    omega);
}

}  // namespace citest
