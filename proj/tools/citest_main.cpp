// citest: conditional-independence testing of Y vs Z given a single index of X,
// via empirical Rosenblatt transforms and wild-bootstrap calibration, plus a
// Monte Carlo harness for the built-in simulation designs.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "citest/citest.hpp"

namespace {

std::uint64_t seed_from_env_or_default() {
  if (const char* env = std::getenv("CITEST_SEED")) {
    std::uint64_t v = 0;
    std::istringstream ss(env);
    if (ss >> v && ss.eof()) return v;
    throw citest::invalid_input("CITEST_SEED is not an unsigned integer");
  }
  return citest::default_seed;
}

std::vector<double> parse_theta_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw citest::invalid_input("--theta: not a number: '" + field + "'");
    }
  }
  if (out.empty()) throw citest::invalid_input("--theta: empty list");
  return out;
}

struct test_cli {
  std::string data_path;
  std::string y_column = "y";
  std::string z_column = "z";
  std::vector<std::string> x_columns;
  std::string z_kind_name = "continuous";
  std::string family_name = "exp";
  std::string functional_name = "ks2";
  double h_const = 1.0;
  double h_const2 = -1.0;  // -1 => same as h_const
  double h_exponent = 0.2;
  std::size_t grid = 0;
  std::size_t bootstrap_samples = 2000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string estimate_theta;
  std::string theta_text;
  unsigned threads = 1;
  std::string format = "json";
};

int cmd_test(const test_cli& cli) {
  citest::run_config config;
  config.data_path = cli.data_path;
  config.y_column = cli.y_column;
  config.z_column = cli.z_column;
  config.x_columns = cli.x_columns.empty() ? std::vector<std::string>{"x"} : cli.x_columns;
  config.kind =
      cli.z_kind_name == "discrete" ? citest::z_kind::discrete : citest::z_kind::continuous;
  config.family = citest::parse_beta_family(cli.family_name);
  config.functional = citest::parse_functional(cli.functional_name);
  config.h_const = cli.h_const;
  config.h_const2 = cli.h_const2 < 0.0 ? cli.h_const : cli.h_const2;
  config.h_exponent = cli.h_exponent;
  config.grid = cli.grid;
  config.bootstrap_samples = cli.bootstrap_samples;
  config.alpha = cli.alpha;
  config.seed = cli.seed_given ? cli.seed : seed_from_env_or_default();

  citest::index_spec index;
  index.model = citest::index_model::linear(1.0);
  if (!cli.estimate_theta.empty()) {
    if (cli.estimate_theta != "probit") {
      throw citest::invalid_input("--estimate-theta: only 'probit' is supported");
    }
    if (!cli.theta_text.empty()) {
      throw citest::invalid_input("--theta and --estimate-theta are mutually exclusive");
    }
    config.estimate_theta = true;
    index.theta = citest::theta_spec::probit_mle();
  } else if (!cli.theta_text.empty()) {
    config.theta = parse_theta_list(cli.theta_text);
    index.theta = citest::theta_spec::known(config.theta);
  } else {
    if (config.x_columns.size() != 1) {
      throw citest::invalid_input(
          "with several x columns, pass --theta or --estimate-theta probit");
    }
    config.theta = {0.0, 1.0};  // index = the single covariate
    index.theta = citest::theta_spec::known(config.theta);
  }

  const citest::dataset data = citest::read_delimited_file(config.data_path);
  const citest::sample smp = citest::build_sample(data, config.y_column, config.z_column,
                                                  config.x_columns, config.kind);
  citest::test_config tc = config.to_test_config();
  tc.threads = cli.threads;
  const citest::test_result result = citest::run_test(smp, index, tc);

  if (cli.format == "table") {
    std::cout << citest::render_test_table(result);
  } else {
    std::cout << citest::report_document(config, result).dump(2) << "\n";
  }
  return 0;
}

struct simulate_cli {
  std::string preset;
  std::string dgp_name;
  std::vector<double> a_values;
  std::vector<double> kappa_values;
  double h_const = 1.0;
  double h_const2 = -1.0;
  double h_exponent = 0.2;
  std::string family_name;
  std::string functional_name = "ks2";
  std::size_t n = 100;
  std::size_t reps = 500;
  std::size_t bootstrap_samples = 200;
  std::size_t grid = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 1;
  std::string format = "json";
};

int cmd_simulate(const simulate_cli& cli) {
  citest::sim_run_config config;
  config.mc.reps = cli.reps;
  config.mc.bootstrap_samples = cli.bootstrap_samples;
  config.mc.functional = citest::parse_functional(cli.functional_name);
  config.mc.h_exponent = cli.h_exponent;
  config.mc.grid_resolution = cli.grid;
  config.mc.master_seed = cli.seed_given ? cli.seed : seed_from_env_or_default();
  config.mc.threads = cli.threads;

  std::vector<double> display_levels;
  if (!cli.preset.empty()) {
    std::optional<citest::beta_family> family;
    if (!cli.family_name.empty()) family = citest::parse_beta_family(cli.family_name);
    citest::sim_preset preset = citest::make_preset(cli.preset, cli.n, family);
    config.preset = preset.name;
    config.cells = std::move(preset.cells);
    display_levels = preset.display_levels;
  } else if (!cli.dgp_name.empty()) {
    const citest::dgp_name dgp = citest::parse_dgp(cli.dgp_name);
    const std::vector<double> a_list = citest::dgp_uses_a(dgp)
                                           ? (cli.a_values.empty() ? std::vector<double>{0.2}
                                                                   : cli.a_values)
                                           : std::vector<double>{0.0};
    const std::vector<double> kappa_list =
        citest::dgp_uses_kappa(dgp)
            ? (cli.kappa_values.empty() ? std::vector<double>{0.5} : cli.kappa_values)
            : std::vector<double>{0.0};
    for (double a : a_list) {
      for (double kappa : kappa_list) {
        citest::sim_cell_spec cell;
        cell.dgp = citest::dgp_spec{dgp, a, kappa, cli.n};
        cell.h1_const = cli.h_const;
        cell.h2_const = cli.h_const2 < 0.0 ? cli.h_const : cli.h_const2;
        cell.family = cli.family_name.empty()
                          ? citest::beta_family::exponential
                          : citest::parse_beta_family(cli.family_name);
        config.cells.push_back(cell);
      }
    }
  } else {
    throw citest::invalid_input("simulate: pass --preset tableN or --dgp NAME");
  }

  const citest::sim_report report = citest::rejection_table(config.cells, config.mc);
  if (cli.format == "table") {
    std::cout << citest::render_sim_table(report, display_levels);
  } else {
    std::cout << citest::report_document(config, report).dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional independence tests via Rosenblatt transforms"};
  app.set_version_flag("--version", std::string(citest::tool_version));
  app.require_subcommand(1);

  test_cli t;
  CLI::App* test_cmd = app.add_subcommand("test", "run the test on a delimited data file");
  test_cmd->add_option("--data", t.data_path, "input file (CSV or TSV with header)")
      ->required();
  test_cmd->add_option("--y", t.y_column, "response column name");
  test_cmd->add_option("--z", t.z_column, "tested-variable column name");
  test_cmd->add_option("--x", t.x_columns, "covariate column name (repeatable)");
  test_cmd->add_option("--z-kind", t.z_kind_name, "continuous or discrete")
      ->check(CLI::IsMember({"continuous", "discrete"}));
  test_cmd->add_option("--beta", t.family_name, "weight family: exp or ind")
      ->check(CLI::IsMember({"exp", "ind"}));
  test_cmd->add_option("--functional", t.functional_name, "ks2, cm2, ks1 or cm1")
      ->check(CLI::IsMember({"ks2", "cm2", "ks1", "cm1"}));
  test_cmd->add_option("--h-const", t.h_const, "bandwidth constant (z side)");
  test_cmd->add_option("--h-const2", t.h_const2, "bandwidth constant (y side; default h-const)");
  test_cmd->add_option("--h-exponent", t.h_exponent, "bandwidth exponent s in h = c n^-s");
  test_cmd->add_option("--grid", t.grid, "grid resolution per axis (0 = default)");
  test_cmd->add_option("--bootstrap", t.bootstrap_samples, "bootstrap replications B");
  test_cmd->add_option("--alpha", t.alpha, "test level in (0, 1)");
  auto* seed_opt = test_cmd->add_option("--seed", t.seed, "RNG seed (default 42 or CITEST_SEED)");
  test_cmd->add_option("--theta", t.theta_text, "known theta values v1,v2,...");
  test_cmd->add_option("--estimate-theta", t.estimate_theta, "estimate theta: probit");
  test_cmd->add_option("--threads", t.threads, "worker thread cap (does not change results)");
  test_cmd->add_option("--format", t.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));

  simulate_cli s;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo rejection-rate sweeps");
  sim_cmd->add_option("--preset", s.preset, "table1, table2, table3, table4 or table5");
  sim_cmd->add_option("--dgp", s.dgp_name, "single design: A1 A2 B1 B2 B3 B4 C D1 D2");
  sim_cmd->add_option("--a", s.a_values, "x-z dependence values (continuous designs)");
  sim_cmd->add_option("--kappa", s.kappa_values, "deviation strengths (D designs)");
  sim_cmd->add_option("--h-const", s.h_const, "bandwidth constant (z side)");
  sim_cmd->add_option("--h-const2", s.h_const2, "bandwidth constant (y side; default h-const)");
  sim_cmd->add_option("--h-exponent", s.h_exponent, "bandwidth exponent");
  sim_cmd->add_option("--beta", s.family_name, "weight family for --dgp and table3/4/5 presets")
      ->check(CLI::IsMember({"exp", "ind"}));
  sim_cmd->add_option("--functional", s.functional_name, "ks2, cm2, ks1 or cm1")
      ->check(CLI::IsMember({"ks2", "cm2", "ks1", "cm1"}));
  sim_cmd->add_option("--n", s.n, "sample size per replication");
  sim_cmd->add_option("--reps", s.reps, "Monte Carlo replications per cell");
  sim_cmd->add_option("--bootstrap", s.bootstrap_samples, "bootstrap replications B");
  sim_cmd->add_option("--grid", s.grid, "grid resolution per axis (0 = default)");
  auto* sim_seed_opt =
      sim_cmd->add_option("--seed", s.seed, "master seed (default 42 or CITEST_SEED)");
  sim_cmd->add_option("--threads", s.threads, "worker thread cap (does not change results)");
  sim_cmd->add_option("--format", s.format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    t.seed_given = seed_opt->count() > 0;
    s.seed_given = sim_seed_opt->count() > 0;
    if (test_cmd->parsed()) return cmd_test(t);
    if (sim_cmd->parsed()) return cmd_simulate(s);
  } catch (const citest::invalid_input& e) {
    std::cerr << "citest: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "citest: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
