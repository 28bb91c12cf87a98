#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "citest/errors.hpp"

namespace citest {

/// Rectangular evaluation grid on [0,1]^3 (continuous z) or [0,1]^2 x support
/// (discrete z). Default axes use midpoints (2k-1)/(2G), which keeps the CM
/// quadrature a proper midpoint rule and skips the vanishing y=0/z=0 planes.
struct eval_grid {
  std::vector<double> u;
  std::vector<double> y;
  std::vector<double> z;
  bool discrete_z = false;

  static std::vector<double> midpoint_axis(std::size_t g) {
    if (g == 0) throw invalid_input("eval_grid: resolution must be positive");
    std::vector<double> pts(g);
    for (std::size_t k = 0; k < g; ++k) {
      pts[k] = (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(g));
    }
    return pts;
  }

  static eval_grid midpoint(std::size_t g) { return midpoint(g, g, g); }

  static eval_grid midpoint(std::size_t gu, std::size_t gy, std::size_t gz) {
    eval_grid grid;
    grid.u = midpoint_axis(gu);
    grid.y = midpoint_axis(gy);
    grid.z = midpoint_axis(gz);
    grid.validate();
    return grid;
  }

  static eval_grid midpoint_discrete(std::size_t g, std::span<const double> support) {
    eval_grid grid;
    grid.u = midpoint_axis(g);
    grid.y = midpoint_axis(g);
    grid.z.assign(support.begin(), support.end());
    grid.discrete_z = true;
    grid.validate();
    return grid;
  }

  std::size_t size() const { return u.size() * y.size() * z.size(); }

  /// Quadrature weight of one grid cell; the discrete z axis contributes an
  /// unweighted sum over support points.
  double cell_weight() const {
    double w = 1.0 / (static_cast<double>(u.size()) * static_cast<double>(y.size()));
    if (!discrete_z) w /= static_cast<double>(z.size());
    return w;
  }

  void validate() const {
    if (u.empty() || y.empty() || z.empty()) throw invalid_input("eval_grid: empty axis");
    auto check_axis = [](const std::vector<double>& pts, bool unit_interval) {
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k > 0 && !(pts[k] > pts[k - 1])) {
          throw invalid_input("eval_grid: axis must be strictly increasing");
        }
        if (unit_interval && (pts[k] < 0.0 || pts[k] > 1.0)) {
          throw invalid_input("eval_grid: axis point outside [0, 1]");
        }
      }
    };
    check_axis(u, true);
    check_axis(y, true);
    check_axis(z, !discrete_z);
  }
};

}  // namespace citest
