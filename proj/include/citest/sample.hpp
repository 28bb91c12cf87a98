#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "citest/errors.hpp"

namespace citest {

/// Dense row-major matrix, just big enough for covariate blocks.
struct matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  matrix() = default;
  matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

enum class z_kind { continuous, discrete };

/// Observed data: y response, z variable under test, x covariates feeding the
/// single index. For discrete z, z_support lists the finite support.
struct sample {
  std::vector<double> y;
  std::vector<double> z;
  matrix x;
  z_kind kind = z_kind::continuous;
  std::vector<double> z_support;  // sorted, discrete case only

  std::size_t size() const { return y.size(); }

  void validate() const {
    const std::size_t n = y.size();
    if (n < 2) throw invalid_input("sample: need at least 2 observations");
    if (z.size() != n || x.rows != n) throw invalid_input("sample: column lengths differ");
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
    };
    if (!finite(y) || !finite(z) || !finite(x.data)) {
      throw invalid_input("sample: non-finite entry");
    }
    if (kind == z_kind::discrete) {
      if (z_support.size() < 2) throw invalid_input("sample: discrete z needs |support| >= 2");
      if (!std::is_sorted(z_support.begin(), z_support.end())) {
        throw invalid_input("sample: z_support must be sorted");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::binary_search(z_support.begin(), z_support.end(), z[i])) {
          throw invalid_input("sample: z[" + std::to_string(i) + "] outside declared support");
        }
      }
    }
  }
};

}  // namespace citest
