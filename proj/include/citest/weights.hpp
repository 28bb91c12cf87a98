#pragma once

#include <cmath>
#include <string>

#include "citest/errors.hpp"

namespace citest {

/// Weight family beta_u(U) indexing the process in its u direction.
/// indicator: 1{U <= u}. exponential: exp(U u) (Bierens weight).
enum class beta_family { indicator, exponential };

inline double beta_eval(beta_family family, double big_u, double u) {
  switch (family) {
    case beta_family::indicator:
      return big_u <= u ? 1.0 : 0.0;
    case beta_family::exponential:
      return std::exp(big_u * u);
  }
  throw invalid_input("beta_eval: unknown family");
}

inline std::string to_string(beta_family f) {
  return f == beta_family::indicator ? "ind" : "exp";
}

inline beta_family parse_beta_family(const std::string& name) {
  if (name == "ind" || name == "indicator") return beta_family::indicator;
  if (name == "exp" || name == "exponential") return beta_family::exponential;
  throw invalid_input("unknown beta family: " + name);
}

/// Centered exponential moment function: gamma_z(t) - integral of gamma_z,
/// i.e. z e^{tz} - (e^z - 1). Identically zero at z = 0 and mean-zero in t.
inline double gamma_perp(double z, double t) {
  return z * std::exp(t * z) - std::expm1(z);
}

namespace detail {

// (e^s - 1)/s continued through s = 0.
inline double expm1_over(double s) { return s == 0.0 ? 1.0 : std::expm1(s) / s; }

}  // namespace detail

/// L2[0,1] inner product <gamma_z1_perp, gamma_z2_perp> in closed form:
/// z1 z2 (e^{z1+z2}-1)/(z1+z2) - (e^{z1}-1)(e^{z2}-1).
inline double gamma_perp_inner(double z1, double z2) {
  return z1 * z2 * detail::expm1_over(z1 + z2) - std::expm1(z1) * std::expm1(z2);
}

/// L2[0,1] inner product <beta_u1, beta_u2>: min(u1, u2) for the indicator
/// family, (e^{u1+u2}-1)/(u1+u2) for the exponential family.
inline double beta_inner(beta_family family, double u1, double u2) {
  if (family == beta_family::indicator) return std::min(u1, u2);
  return detail::expm1_over(u1 + u2);
}

struct grid_point {
  double u = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Covariance kernel of the limit process for continuous z:
/// <beta_u1, beta_u2> <gamma_z1, gamma_z2> <gamma_y1, gamma_y2>.
inline double covariance_kernel(beta_family family, const grid_point& r1, const grid_point& r2) {
  return beta_inner(family, r1.u, r2.u) * gamma_perp_inner(r1.z, r2.z) *
         gamma_perp_inner(r1.y, r2.y);
}

/// Discrete-z variant: <beta_u1, beta_u2> <gamma_y1, gamma_y2> when the two
/// support codes match, zero otherwise.
inline double covariance_kernel_discrete(beta_family family, double u1, double y1, double z_code1,
                                         double u2, double y2, double z_code2) {
  if (z_code1 != z_code2) return 0.0;
  return beta_inner(family, u1, u2) * gamma_perp_inner(y1, y2);
}

}  // namespace citest
