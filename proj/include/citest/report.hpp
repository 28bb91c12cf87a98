#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "citest/bootstrap.hpp"
#include "citest/io.hpp"
#include "citest/simulate.hpp"
#include "citest/stats.hpp"
#include "citest/version.hpp"
#include "citest/weights.hpp"

namespace citest {

using json = nlohmann::json;

/// Full configuration of a `test` run, echoed verbatim into the report so the
/// run can be reproduced from its output alone.
struct run_config {
  std::string data_path;
  std::string y_column;
  std::string z_column;
  std::vector<std::string> x_columns;
  z_kind kind = z_kind::continuous;
  beta_family family = beta_family::exponential;
  functional_kind functional = functional_kind::ks2;
  std::string kernel = "quartic";
  double h_const = 1.0;
  double h_const2 = 1.0;
  double h_exponent = 0.2;
  std::size_t grid = 0;  // 0 = per-kind default
  std::size_t bootstrap_samples = 2000;
  double alpha = 0.05;
  std::uint64_t seed = default_seed;
  bool estimate_theta = false;
  std::vector<double> theta;  // known values when estimate_theta is false

  test_config to_test_config() const {
    test_config tc;
    tc.family = family;
    tc.functional = functional;
    tc.h_z = bandwidth{h_const, h_exponent};
    tc.h_y = bandwidth{h_const2, h_exponent};
    tc.grid_resolution = grid;
    tc.bootstrap_samples = bootstrap_samples;
    tc.alpha = alpha;
    tc.seed = seed;
    return tc;
  }
};

inline json to_json(const run_config& c) {
  json j;
  j["data"] = c.data_path;
  j["y_column"] = c.y_column;
  j["z_column"] = c.z_column;
  j["x_columns"] = c.x_columns;
  j["z_kind"] = c.kind == z_kind::continuous ? "continuous" : "discrete";
  j["beta_family"] = to_string(c.family);
  j["functional"] = to_string(c.functional);
  j["kernel"] = c.kernel;
  j["h_const"] = c.h_const;
  j["h_const2"] = c.h_const2;
  j["h_exponent"] = c.h_exponent;
  j["grid"] = c.grid;
  j["bootstrap_samples"] = c.bootstrap_samples;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  if (c.estimate_theta) {
    j["estimate_theta"] = "probit";
  } else {
    j["theta"] = c.theta;
  }
  return j;
}

inline run_config run_config_from_json(const json& j) {
  run_config c;
  c.data_path = j.at("data").get<std::string>();
  c.y_column = j.at("y_column").get<std::string>();
  c.z_column = j.at("z_column").get<std::string>();
  c.x_columns = j.at("x_columns").get<std::vector<std::string>>();
  c.kind = j.at("z_kind").get<std::string>() == "discrete" ? z_kind::discrete
                                                           : z_kind::continuous;
  c.family = parse_beta_family(j.at("beta_family").get<std::string>());
  c.functional = parse_functional(j.at("functional").get<std::string>());
  c.kernel = j.at("kernel").get<std::string>();
  c.h_const = j.at("h_const").get<double>();
  c.h_const2 = j.at("h_const2").get<double>();
  c.h_exponent = j.at("h_exponent").get<double>();
  c.grid = j.at("grid").get<std::size_t>();
  c.bootstrap_samples = j.at("bootstrap_samples").get<std::size_t>();
  c.alpha = j.at("alpha").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("estimate_theta")) {
    c.estimate_theta = true;
  } else {
    c.theta = j.at("theta").get<std::vector<double>>();
  }
  return c;
}

inline json tool_info() {
  json j;
  j["name"] = tool_name;
  j["version"] = tool_version;
  return j;
}

inline json report_document(const run_config& config, const test_result& result) {
  json r;
  r["statistic"] = result.statistic;
  r["critical_value"] = result.critical_value;
  r["p_value"] = result.p_value;
  r["reject"] = result.reject;
  r["alpha"] = result.alpha;
  r["bootstrap_samples"] = result.bootstrap_samples;
  r["n"] = result.n;
  r["theta"] = result.theta;
  r["theta_estimated"] = result.theta_estimated;
  r["warnings"] = result.warnings.messages();

  json doc;
  doc["command"] = "test";
  doc["config"] = to_json(config);
  doc["result"] = r;
  doc["tool"] = tool_info();
  return doc;
}

/// Configuration echo of a `simulate` run.
struct sim_run_config {
  std::string preset = "custom";
  sim_config mc;
  std::vector<sim_cell_spec> cells;
};

inline json report_document(const sim_run_config& config, const sim_report& report) {
  json cfg;
  cfg["preset"] = config.preset;
  cfg["levels"] = report.config.levels;
  cfg["reps"] = report.config.reps;
  cfg["bootstrap_samples"] = report.config.bootstrap_samples;
  cfg["functional"] = to_string(report.config.functional);
  cfg["h_exponent"] = report.config.h_exponent;
  cfg["grid"] = report.config.grid_resolution;
  cfg["seed"] = report.config.master_seed;
  cfg["kernel"] = "quartic";

  json cells = json::array();
  for (const sim_cell_result& cell : report.cells) {
    json c;
    c["dgp"] = to_string(cell.spec.dgp.name);
    c["n"] = cell.spec.dgp.n;
    if (dgp_uses_a(cell.spec.dgp.name)) c["a"] = cell.spec.dgp.a;
    if (dgp_uses_kappa(cell.spec.dgp.name)) c["kappa"] = cell.spec.dgp.kappa;
    c["h1_const"] = cell.spec.h1_const;
    c["h2_const"] = cell.spec.h2_const;
    c["family"] = to_string(cell.spec.family);
    c["reject_rate"] = cell.reject_rate;
    c["mc_se"] = cell.mc_se;
    c["completed"] = cell.completed;
    c["failures"] = cell.failures;
    cells.push_back(std::move(c));
  }

  json doc;
  doc["command"] = "simulate";
  doc["config"] = std::move(cfg);
  doc["result"] = json{{"cells", std::move(cells)}};
  doc["tool"] = tool_info();
  return doc;
}

/// Key/value terminal rendering of a test result. Values use the same
/// shortest round-trip formatting as the JSON output.
inline std::string render_test_table(const test_result& result) {
  std::string out;
  auto row = [&out](const std::string& key, const std::string& value) {
    std::string k = key;
    k.resize(18, ' ');
    out += k + value + "\n";
  };
  row("statistic", format_double(result.statistic));
  row("critical value", format_double(result.critical_value));
  row("p-value", format_double(result.p_value));
  row("reject", result.reject ? "true" : "false");
  row("alpha", format_double(result.alpha));
  row("bootstrap B", std::to_string(result.bootstrap_samples));
  row("n", std::to_string(result.n));
  if (!result.theta.empty()) {
    std::string theta;
    for (double t : result.theta) {
      if (!theta.empty()) theta += ", ";
      theta += format_double(t);
    }
    row(result.theta_estimated ? "theta (probit)" : "theta", theta);
  }
  for (const std::string& w : result.warnings.messages()) row("warning", w);
  return out;
}

namespace detail {

struct table_row_key {
  std::string dgp;
  double a = -1.0;      // -1 = unused
  double kappa = -1.0;
  double h1 = 0.0;
  double h2 = 0.0;

  bool operator<(const table_row_key& o) const {
    if (dgp != o.dgp) return dgp < o.dgp;
    if (a != o.a) return a < o.a;
    if (kappa != o.kappa) return kappa < o.kappa;
    if (h1 != o.h1) return h1 < o.h1;
    return h2 < o.h2;
  }
  bool operator==(const table_row_key& o) const {
    return dgp == o.dgp && a == o.a && kappa == o.kappa && h1 == o.h1 && h2 == o.h2;
  }
};

inline void pad_to(std::string& s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
}

}  // namespace detail

/// Aligned rejection-rate table: one row per design/bandwidth combination,
/// column groups per weight family, one column per displayed level.
/// `display_levels` defaults to every computed level.
inline std::string render_sim_table(const sim_report& report,
                                    std::vector<double> display_levels = {}) {
  if (display_levels.empty()) display_levels = report.config.levels;
  std::vector<std::size_t> level_index;
  for (double lvl : display_levels) {
    const auto it = std::find(report.config.levels.begin(), report.config.levels.end(), lvl);
    if (it == report.config.levels.end()) {
      throw invalid_input("render_sim_table: display level was not computed");
    }
    level_index.push_back(static_cast<std::size_t>(it - report.config.levels.begin()));
  }

  // Collect row keys (in first-appearance order) and the families present.
  std::vector<detail::table_row_key> rows;
  std::vector<beta_family> families;
  auto key_of = [](const sim_cell_spec& s) {
    detail::table_row_key k;
    k.dgp = to_string(s.dgp.name);
    if (dgp_uses_a(s.dgp.name)) k.a = s.dgp.a;
    if (dgp_uses_kappa(s.dgp.name)) k.kappa = s.dgp.kappa;
    k.h1 = s.h1_const;
    k.h2 = s.h2_const;
    return k;
  };
  for (const sim_cell_result& cell : report.cells) {
    const detail::table_row_key k = key_of(cell.spec);
    if (std::find(rows.begin(), rows.end(), k) == rows.end()) rows.push_back(k);
    if (std::find(families.begin(), families.end(), cell.spec.family) == families.end()) {
      families.push_back(cell.spec.family);
    }
  }

  const bool any_a = std::any_of(rows.begin(), rows.end(),
                                 [](const auto& k) { return k.a >= 0.0; });
  const bool any_kappa = std::any_of(rows.begin(), rows.end(),
                                     [](const auto& k) { return k.kappa >= 0.0; });
  bool split_h = false;
  for (const auto& k : rows) split_h = split_h || k.h1 != k.h2;

  std::vector<std::string> headers = {"dgp"};
  if (any_a) headers.push_back("a");
  if (any_kappa) headers.push_back("kappa");
  if (split_h) {
    headers.push_back("h1");
    headers.push_back("h2");
  } else {
    headers.push_back("h");
  }
  for (beta_family fam : families) {
    for (double lvl : display_levels) {
      headers.push_back(to_string(fam) + " " + format_double(lvl));
    }
  }

  std::vector<std::vector<std::string>> body;
  for (const detail::table_row_key& k : rows) {
    std::vector<std::string> line = {k.dgp};
    if (any_a) line.push_back(k.a >= 0.0 ? format_double(k.a) : "-");
    if (any_kappa) line.push_back(k.kappa >= 0.0 ? format_double(k.kappa) : "-");
    line.push_back(format_double(k.h1));
    if (split_h) line.push_back(format_double(k.h2));
    for (beta_family fam : families) {
      const sim_cell_result* found = nullptr;
      for (const sim_cell_result& cell : report.cells) {
        if (cell.spec.family == fam && key_of(cell.spec) == k) {
          found = &cell;
          break;
        }
      }
      for (std::size_t li : level_index) {
        line.push_back(found != nullptr ? format_double(found->reject_rate[li]) : "-");
      }
    }
    body.push_back(std::move(line));
  }

  std::vector<std::size_t> widths(headers.size());
  for (std::size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& line : body) widths[c] = std::max(widths[c], line[c].size());
  }
  std::string out;
  for (std::size_t c = 0; c < headers.size(); ++c) {
    std::string cell = headers[c];
    detail::pad_to(cell, widths[c] + 2);
    out += cell;
  }
  out += "\n";
  for (const auto& line : body) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      std::string cell = line[c];
      detail::pad_to(cell, widths[c] + 2);
      out += cell;
    }
    out += "\n";
  }
  return out;
}

}  // namespace citest
