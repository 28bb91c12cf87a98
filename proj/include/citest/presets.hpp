#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "citest/errors.hpp"
#include "citest/simulate.hpp"
#include "citest/weights.hpp"

namespace citest {

/// A named simulation sweep: its cells plus the levels its text rendering
/// shows by default (all configured levels are always computed).
struct sim_preset {
  std::string name;
  std::vector<sim_cell_spec> cells;
  std::vector<double> display_levels;
};

/// Expands table1..table5. Bandwidth constants sweep {0.25, 0.5, 1, 2}.
/// table1/table2 enumerate both weight families; table3/4/5 default to the
/// exponential family unless `family` is given.
inline sim_preset make_preset(const std::string& name, std::size_t n,
                              std::optional<beta_family> family = std::nullopt) {
  static const std::vector<double> h_sweep = {0.25, 0.5, 1.0, 2.0};
  sim_preset preset;
  preset.name = name;

  auto continuous_cells = [&](const std::vector<dgp_name>& dgps) {
    for (dgp_name d : dgps) {
      for (double a : {0.2, 0.5}) {
        for (double h : h_sweep) {
          for (beta_family fam : {beta_family::exponential, beta_family::indicator}) {
            if (family && fam != *family) continue;
            sim_cell_spec cell;
            cell.dgp = dgp_spec{d, a, 0.0, n};
            cell.h1_const = h;
            cell.h2_const = h;
            cell.family = fam;
            preset.cells.push_back(cell);
          }
        }
      }
    }
  };
  auto binary_cells = [&](dgp_name d, const std::vector<double>& kappas) {
    for (double h1 : h_sweep) {
      for (double h2 : h_sweep) {
        for (double kappa : kappas) {
          sim_cell_spec cell;
          cell.dgp = dgp_spec{d, 0.0, kappa, n};
          cell.h1_const = h1;
          cell.h2_const = h2;
          cell.family = family.value_or(beta_family::exponential);
          preset.cells.push_back(cell);
        }
      }
    }
  };

  if (name == "table1") {
    continuous_cells({dgp_name::a1, dgp_name::a2});
    preset.display_levels = {0.01, 0.05, 0.10};
  } else if (name == "table2") {
    continuous_cells({dgp_name::b1, dgp_name::b2, dgp_name::b3, dgp_name::b4});
    preset.display_levels = {0.05};
  } else if (name == "table3") {
    binary_cells(dgp_name::c, {0.0});
    preset.display_levels = {0.01, 0.05, 0.10};
  } else if (name == "table4") {
    binary_cells(dgp_name::d1, {0.5, 1.0});
    preset.display_levels = {0.05};
  } else if (name == "table5") {
    binary_cells(dgp_name::d2, {0.5, 1.0});
    preset.display_levels = {0.05};
  } else {
    throw invalid_input("unknown preset: " + name +
                        " (expected table1, table2, table3, table4 or table5)");
  }
  return preset;
}

}  // namespace citest
