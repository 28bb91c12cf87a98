#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "citest/errors.hpp"

namespace citest {

inline constexpr double pi = 3.14159265358979323846;

inline double norm_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

/// Standard normal CDF via the complementary error function.
inline double norm_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

namespace detail {

// Rational approximation for the normal quantile (Acklam), |err| < 1.2e-9,
// then one Halley refinement against erfc-based norm_cdf.
inline double norm_quantile_approx(double p) {
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

/// Standard normal quantile for p in (0, 1).
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw invalid_input("norm_quantile: p must be in (0, 1)");
  }
  double x = detail::norm_quantile_approx(p);
  // Halley step on f(x) = norm_cdf(x) - p.
  const double e = norm_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

/// Solves A x = b in place for a small symmetric positive definite A
/// (row-major d x d) via Cholesky. Throws if A is not positive definite.
inline std::vector<double> cholesky_solve(std::span<const double> a, std::span<const double> b,
                                          std::size_t d) {
  std::vector<double> l(d * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= l[j * d + k] * l[j * d + k];
    if (!(diag > 0.0)) {
      throw invalid_input("cholesky_solve: matrix not positive definite");
    }
    l[j * d + j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * d + k] * l[j * d + k];
      l[i * d + j] = s / l[j * d + j];
    }
  }
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < d; ++i) {       // forward: L y = b
    for (std::size_t k = 0; k < i; ++k) x[i] -= l[i * d + k] * x[k];
    x[i] /= l[i * d + i];
  }
  for (std::size_t ii = d; ii-- > 0;) {       // backward: L^T x = y
    for (std::size_t k = ii + 1; k < d; ++k) x[ii] -= l[k * d + ii] * x[k];
    x[ii] /= l[ii * d + ii];
  }
  return x;
}

}  // namespace citest
