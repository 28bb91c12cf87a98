#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "citest/errors.hpp"
#include "citest/kernel.hpp"
#include "citest/sample.hpp"

namespace citest {

/// Bandwidth rule h = constant * n^(-exponent). The built-in simulation
/// designs use exponent 1/5; exponents in (1/6, 1/4) are also standard.
struct bandwidth {
  double constant = 1.0;
  double exponent = 0.2;

  double resolve(std::size_t n) const {
    const double h = constant * std::pow(static_cast<double>(n), -exponent);
    if (!(h > 0.0)) throw invalid_input("bandwidth: resolved h must be positive");
    return h;
  }
};

/// Degeneracy counters accumulated while building a transformed sample.
struct transform_warnings {
  std::size_t zero_denominator_fallbacks = 0;
  std::size_t clamped_propensities = 0;

  bool empty() const { return zero_denominator_fallbacks == 0 && clamped_propensities == 0; }

  std::vector<std::string> messages() const {
    std::vector<std::string> out;
    if (zero_denominator_fallbacks > 0) {
      out.push_back("kernel denominator vanished " +
                    std::to_string(zero_denominator_fallbacks) +
                    " time(s); fell back to uniform weights");
    }
    if (clamped_propensities > 0) {
      out.push_back("propensity estimate clamped " + std::to_string(clamped_propensities) +
                    " time(s)");
    }
    return out;
  }
};

/// Per-observation empirical Rosenblatt transforms. Continuous z fills
/// (u_hat, y_hat, z_hat); discrete z fills (u_hat, y_hat) plus the n x |Z|
/// propensity matrix p_hat and keeps the z codes for residual construction.
struct transformed_sample {
  std::vector<double> u_hat;
  std::vector<double> y_hat;
  std::vector<double> z_hat;       // continuous case
  std::vector<double> p_hat;       // discrete case, row-major n x |support|
  std::vector<double> z_support;   // discrete case
  std::vector<double> z_codes;     // discrete case
  transform_warnings warnings;

  std::size_t size() const { return u_hat.size(); }
  bool discrete() const { return !p_hat.empty(); }
  std::size_t support_size() const { return z_support.size(); }
  double propensity(std::size_t i, std::size_t k) const {
    return p_hat[i * z_support.size() + k];
  }
};

/// Leave-one-out empirical CDF rank of values[i] among values[j], j != i,
/// with weak inequality: #{j != i : values[j] <= values[i]} / (n - 1).
inline double ecdf_leave_one_out(std::span<const double> values, std::size_t i) {
  const std::size_t n = values.size();
  if (n < 2) throw invalid_input("ecdf_leave_one_out: need n >= 2");
  if (i >= n) throw invalid_input("ecdf_leave_one_out: index out of range");
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i && values[j] <= values[i]) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(n - 1);
}

namespace detail {

// Shared core of the leave-one-out kernel estimators: weighted fraction of
// j != i with flag[j] set, weights K_h(u_hat[j] - u). A vanished denominator
// (no neighbor within h) falls back to uniform weights over j != i.
template <class Kernel, class Flag>
double kernel_weighted_fraction(std::span<const double> u_hat, double u, double h,
                                std::size_t leave_out, Flag&& flag, const Kernel& kern,
                                transform_warnings* warnings) {
  const std::size_t n = u_hat.size();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == leave_out) continue;
    const double w = kern((u_hat[j] - u) / h) / h;
    den += w;
    if (flag(j)) num += w;
  }
  if (den > 0.0) return num / den;
  if (warnings != nullptr) ++warnings->zero_denominator_fallbacks;
  std::size_t count = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j != leave_out && flag(j)) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(n - 1);
}

}  // namespace detail

/// Leave-one-out kernel estimate of the conditional CDF P{response <= y | U = u},
/// a Nadaraya-Watson ratio over j != i. h > 0 required.
template <class Kernel = quartic_kernel_t>
double kernel_conditional_cdf(double y, double u, std::span<const double> responses,
                              std::span<const double> u_hat, double h, std::size_t leave_out,
                              transform_warnings* warnings = nullptr,
                              const Kernel& kern = quartic_kernel) {
  if (responses.size() != u_hat.size()) {
    throw invalid_input("kernel_conditional_cdf: size mismatch");
  }
  if (!(h > 0.0)) throw invalid_input("kernel_conditional_cdf: h must be positive");
  return detail::kernel_weighted_fraction(
      u_hat, u, h, leave_out, [&](std::size_t j) { return responses[j] <= y; }, kern, warnings);
}

inline constexpr double propensity_clamp = 1e-3;

/// Leave-one-out kernel estimate of P{Z = z | U = u}, clamped into
/// [propensity_clamp, 1 - propensity_clamp] so the standardization
/// denominator sqrt(p(1-p)) stays bounded away from zero.
template <class Kernel = quartic_kernel_t>
double kernel_propensity(double z, double u, std::span<const double> z_codes,
                         std::span<const double> u_hat, double h, std::size_t leave_out,
                         std::span<const double> support,
                         transform_warnings* warnings = nullptr,
                         const Kernel& kern = quartic_kernel) {
  if (z_codes.size() != u_hat.size()) throw invalid_input("kernel_propensity: size mismatch");
  if (!(h > 0.0)) throw invalid_input("kernel_propensity: h must be positive");
  if (!std::binary_search(support.begin(), support.end(), z)) {
    throw invalid_input("kernel_propensity: z not in support");
  }
  const double raw = detail::kernel_weighted_fraction(
      u_hat, u, h, leave_out, [&](std::size_t j) { return z_codes[j] == z; }, kern, warnings);
  const double clamped = std::clamp(raw, propensity_clamp, 1.0 - propensity_clamp);
  if (clamped != raw && warnings != nullptr) ++warnings->clamped_propensities;
  return clamped;
}

/// Builds the empirical Rosenblatt transforms from index values and the
/// sample. h_y smooths the response CDF; h_z smooths the z-side object
/// (conditional CDF of z for continuous z, propensities for discrete z).
template <class Kernel = quartic_kernel_t>
transformed_sample rosenblatt_transform(const sample& data, std::span<const double> index_values,
                                        const bandwidth& h_y, const bandwidth& h_z,
                                        const Kernel& kern = quartic_kernel) {
  data.validate();
  const std::size_t n = data.size();
  if (index_values.size() != n) throw invalid_input("rosenblatt_transform: index length mismatch");
  const double hy = h_y.resolve(n);
  const double hz = h_z.resolve(n);

  transformed_sample out;
  out.u_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.u_hat[i] = ecdf_leave_one_out(index_values, i);

  out.y_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.y_hat[i] = kernel_conditional_cdf(data.y[i], out.u_hat[i], data.y, out.u_hat, hy, i,
                                          &out.warnings, kern);
  }

  if (data.kind == z_kind::continuous) {
    out.z_hat.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      out.z_hat[i] = kernel_conditional_cdf(data.z[i], out.u_hat[i], data.z, out.u_hat, hz, i,
                                            &out.warnings, kern);
    }
  } else {
    out.z_support = data.z_support;
    out.z_codes = data.z;
    const std::size_t m = out.z_support.size();
    out.p_hat.resize(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        out.p_hat[i * m + k] =
            kernel_propensity(out.z_support[k], out.u_hat[i], data.z, out.u_hat, hz, i,
                              out.z_support, &out.warnings, kern);
      }
    }
  }
  return out;
}

}  // namespace citest
