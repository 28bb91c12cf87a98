#pragma once

#include <cmath>

namespace citest {

/// Quartic (biweight-squared) smoothing kernel (15/16)(1 - u^2)^2 on [-1, 1].
/// Symmetric, nonnegative, integrates to one.
struct quartic_kernel_t {
  static constexpr double support_radius = 1.0;

  double operator()(double u) const noexcept {
    if (std::abs(u) > 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return 0.9375 * w * w;  // 15/16
  }
};

inline constexpr quartic_kernel_t quartic_kernel{};

}  // namespace citest
