#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "citest/errors.hpp"
#include "citest/process.hpp"

namespace citest {

/// Scalar functionals of the process. ks2/cm2 are the two-sided
/// Kolmogorov-Smirnov and Cramer-von Mises forms; ks1/cm1 their one-sided
/// variants (ks1 may be negative).
enum class functional_kind { ks2, cm2, ks1, cm1 };

inline std::string to_string(functional_kind f) {
  switch (f) {
    case functional_kind::ks2: return "ks2";
    case functional_kind::cm2: return "cm2";
    case functional_kind::ks1: return "ks1";
    case functional_kind::cm1: return "cm1";
  }
  return "?";
}

inline functional_kind parse_functional(const std::string& name) {
  if (name == "ks2") return functional_kind::ks2;
  if (name == "cm2") return functional_kind::cm2;
  if (name == "ks1") return functional_kind::ks1;
  if (name == "cm1") return functional_kind::cm1;
  throw invalid_input("unknown functional: " + name);
}

/// Applies the functional over the grid. KS forms take the max; CM forms use
/// the midpoint quadrature weight of the grid (discrete z axes sum unweighted).
inline double apply_functional(const process_values& pv, functional_kind f) {
  if (pv.values.empty()) throw invalid_input("apply_functional: empty process");
  switch (f) {
    case functional_kind::ks2: {
      double m = 0.0;
      for (double v : pv.values) m = std::max(m, std::abs(v));
      return m;
    }
    case functional_kind::ks1: {
      double m = pv.values.front();
      for (double v : pv.values) m = std::max(m, v);
      return m;
    }
    case functional_kind::cm2: {
      double s = 0.0;
      for (double v : pv.values) s += v * v;
      return std::sqrt(pv.grid.cell_weight() * s);
    }
    case functional_kind::cm1: {
      double s = 0.0;
      for (double v : pv.values) {
        const double p = std::max(v, 0.0);
        s += p * p;
      }
      return std::sqrt(pv.grid.cell_weight() * s);
    }
  }
  throw invalid_input("apply_functional: unknown functional");
}

}  // namespace citest
