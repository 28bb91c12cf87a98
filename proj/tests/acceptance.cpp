// Acceptance suite: runs every acceptance criterion end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "citest/citest.hpp"
#include "oracles.hpp"

using namespace citest;

namespace {

unsigned worker_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 4 : std::min(hw, 16u);
}

struct outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- criteria 1-4

outcome monte_carlo_cell(dgp_name name, double a, double kappa, double h1, double h2,
                         std::size_t reps, std::uint64_t seed, bool size_check,
                         double lo, double hi) {
  sim_cell_spec cell;
  cell.dgp = dgp_spec{name, a, kappa, 100};
  cell.h1_const = h1;
  cell.h2_const = h2;
  cell.family = beta_family::exponential;

  sim_config cfg;
  cfg.levels = {0.05};
  cfg.reps = reps;
  cfg.bootstrap_samples = 200;
  cfg.functional = functional_kind::ks2;
  cfg.master_seed = seed;
  cfg.threads = worker_threads();

  const sim_report report = rejection_table({cell}, cfg);
  const sim_cell_result& r = report.cells[0];
  const double rate = r.reject_rate[0];
  outcome out;
  out.pass = rate >= lo && rate <= hi;
  out.detail = "rate@5% = " + fmt(rate) + " over " + std::to_string(r.completed) +
               " reps (require " + (size_check ? "[" + fmt(lo) + ", " + fmt(hi) + "]"
                                               : ">= " + fmt(lo)) +
               ", mc se " + fmt(r.mc_se[0]) + ")";
  if (r.failures > 0) out.detail += ", failures " + std::to_string(r.failures);
  return out;
}

// ---------------------------------------------------------------- criterion 5

transformed_sample uniform_triples(std::size_t n, rng_stream& rng) {
  transformed_sample ts;
  ts.u_hat.resize(n);
  ts.z_hat.resize(n);
  ts.y_hat.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts.u_hat[i] = rng.next_uniform();
    ts.z_hat[i] = rng.next_uniform();
    ts.y_hat[i] = rng.next_uniform();
  }
  return ts;
}

std::vector<double> sorted_unique(double a, double b) {
  if (a == b) return {a};
  return a < b ? std::vector<double>{a, b} : std::vector<double>{b, a};
}

std::size_t axis_index(const std::vector<double>& axis, double v) {
  for (std::size_t k = 0; k < axis.size(); ++k) {
    if (axis[k] == v) return k;
  }
  return 0;
}

outcome covariance_oracle() {
  const std::size_t n = 100;
  const std::size_t reps = 2000;
  outcome out;
  out.pass = true;

  // continuous: sample covariance at five fixed pairs vs the closed form
  const grid_point pairs[5][2] = {
      {{0.3, 0.7, 0.5}, {0.6, 0.4, 0.8}},
      {{0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}},
      {{0.2, 0.9, 0.6}, {0.7, 0.3, 0.9}},
      {{0.8, 0.8, 0.8}, {0.4, 0.6, 0.2}},
      {{0.1, 1.0, 1.0}, {0.9, 1.0, 1.0}},
  };
  double worst_cont = 0.0;
  for (const auto& pair : pairs) {
    const grid_point r1 = pair[0];
    const grid_point r2 = pair[1];
    eval_grid grid;
    grid.u = sorted_unique(r1.u, r2.u);
    grid.y = sorted_unique(r1.y, r2.y);
    grid.z = sorted_unique(r1.z, r2.z);
    double m1 = 0.0, m2 = 0.0, cross = 0.0;
    std::vector<std::array<double, 2>> vals(reps);
    for (std::size_t m = 0; m < reps; ++m) {
      rng_stream rng = rng_stream::from_path(52001, {m});
      const transformed_sample ts = uniform_triples(n, rng);
      const process_values pv = feasible_process(ts, beta_family::exponential, grid);
      vals[m] = {pv.at(axis_index(grid.u, r1.u), axis_index(grid.y, r1.y),
                       axis_index(grid.z, r1.z)),
                 pv.at(axis_index(grid.u, r2.u), axis_index(grid.y, r2.y),
                       axis_index(grid.z, r2.z))};
      m1 += vals[m][0];
      m2 += vals[m][1];
    }
    m1 /= reps;
    m2 /= reps;
    for (const auto& v : vals) cross += (v[0] - m1) * (v[1] - m2);
    cross /= reps - 1;
    const double theory = covariance_kernel(beta_family::exponential, r1, r2);
    worst_cont = std::max(worst_cont, std::abs(cross - theory));
  }
  if (worst_cont >= 0.02) out.pass = false;
  out.detail = "continuous max|cov - kernel| = " + fmt(worst_cont) + " (tol 0.02)";

  // Discrete analog: the limit theory puts zero covariance between distinct
  // z slices at matched (u, y). For binary z the slices are exact negatives
  // of each other (propensities sum to one), so the measured covariance is
  // -Var(slice); the check asserts the zero form as given and fails honestly.
  const double pts[5][2] = {{0.3, 0.7}, {0.5, 0.5}, {0.7, 0.9}, {0.9, 0.3}, {0.6, 1.0}};
  eval_grid dgrid;
  dgrid.u = {0.3, 0.5, 0.6, 0.7, 0.9};
  dgrid.y = {0.3, 0.5, 0.7, 0.9, 1.0};
  dgrid.z = {0.0, 1.0};
  dgrid.discrete_z = true;
  const std::vector<double> support{0.0, 1.0};
  const double h = std::pow(static_cast<double>(n), -0.2);
  std::vector<std::vector<std::array<double, 2>>> slice_vals(
      5, std::vector<std::array<double, 2>>(reps));
  for (std::size_t m = 0; m < reps; ++m) {
    rng_stream rng = rng_stream::from_path(52002, {m});
    transformed_sample ts;
    ts.u_hat.resize(n);
    ts.y_hat.resize(n);
    ts.z_support = support;
    ts.z_codes.resize(n);
    ts.p_hat.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      ts.u_hat[i] = rng.next_uniform();
      ts.y_hat[i] = rng.next_uniform();
      ts.z_codes[i] = rng.next_uniform() < 0.5 ? 0.0 : 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < 2; ++k) {
        ts.p_hat[i * 2 + k] =
            kernel_propensity(support[k], ts.u_hat[i], ts.z_codes, ts.u_hat, h, i, support);
      }
    }
    const process_values pv = discrete_process(ts, ts.z_codes, beta_family::exponential, dgrid);
    for (int p = 0; p < 5; ++p) {
      slice_vals[p][m] = {pv.at(axis_index(dgrid.u, pts[p][0]), axis_index(dgrid.y, pts[p][1]), 0),
                          pv.at(axis_index(dgrid.u, pts[p][0]), axis_index(dgrid.y, pts[p][1]), 1)};
    }
  }
  double worst_disc = 0.0;
  std::string measured;
  for (int p = 0; p < 5; ++p) {
    double m1 = 0.0, m2 = 0.0, cross = 0.0;
    for (const auto& v : slice_vals[p]) {
      m1 += v[0];
      m2 += v[1];
    }
    m1 /= reps;
    m2 /= reps;
    for (const auto& v : slice_vals[p]) cross += (v[0] - m1) * (v[1] - m2);
    cross /= reps - 1;
    worst_disc = std::max(worst_disc, std::abs(cross));
    if (!measured.empty()) measured += " ";
    measured += fmt(cross);
  }
  if (worst_disc >= 0.02) out.pass = false;
  out.detail += "; discrete cross-slice cov at matched (u,y) = [" + measured +
                "] vs the zero-covariance limit (tol 0.02; binary slices are exact "
                "negatives, so the measured value is -Var)";
  return out;
}

// ---------------------------------------------------------------- criterion 6

outcome inner_product_oracle() {
  rng_stream rng = rng_stream::from_path(6001, {1});
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double z1 = rng.next_uniform();
    const double z2 = rng.next_uniform();
    const double quad = oracle::integrate(0.0, 1.0, [&](double t) {
      return oracle::gamma_centered(z1, t) * oracle::gamma_centered(z2, t);
    });
    worst = std::max(worst, std::abs(gamma_perp_inner(z1, z2) - quad));
  }
  const double g11 = gamma_perp_inner(1.0, 1.0);
  outcome out;
  out.pass = worst < 1e-8 && std::abs(g11 - 0.24203) < 1e-5;
  out.detail = "max|closed - quadrature| = " + fmt(worst) + " over 100 pairs; <g1,g1> = " +
               fmt(g11) + " (expected ~0.24203)";
  return out;
}

// ---------------------------------------------------------------- criterion 7

outcome factorization_oracle() {
  const std::size_t n = 20;
  rng_stream rng = rng_stream::from_path(7001, {1});
  const eval_grid grid = eval_grid::midpoint(5);

  transformed_sample ts = uniform_triples(n, rng);
  double worst = 0.0;
  for (beta_family fam : {beta_family::exponential, beta_family::indicator}) {
    const process_values pv = feasible_process(ts, fam, grid);
    const std::vector<double> naive = oracle::naive_continuous_process(
        ts.u_hat, ts.z_hat, ts.y_hat, fam == beta_family::exponential, grid.u, grid.y, grid.z);
    for (std::size_t g = 0; g < naive.size(); ++g) {
      worst = std::max(worst, std::abs(pv.values[g] - naive[g]));
    }
  }

  const std::vector<double> omega = draw_multiplier_row(n, 3, 7002);
  const process_values bpv = bootstrap_process(ts, beta_family::exponential, grid, omega);
  const std::vector<double> bnaive = oracle::naive_continuous_process(
      ts.u_hat, ts.z_hat, ts.y_hat, true, grid.u, grid.y, grid.z, omega);
  for (std::size_t g = 0; g < bnaive.size(); ++g) {
    worst = std::max(worst, std::abs(bpv.values[g] - bnaive[g]));
  }

  transformed_sample dts;
  dts.u_hat.resize(n);
  dts.y_hat.resize(n);
  dts.z_support = {0.0, 1.0};
  dts.z_codes.resize(n);
  dts.p_hat.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    dts.u_hat[i] = rng.next_uniform();
    dts.y_hat[i] = rng.next_uniform();
    dts.z_codes[i] = rng.next_uniform() < 0.5 ? 1.0 : 0.0;
    const double p = 0.15 + 0.7 * rng.next_uniform();
    dts.p_hat[i * 2] = 1.0 - p;
    dts.p_hat[i * 2 + 1] = p;
  }
  const eval_grid dgrid = eval_grid::midpoint_discrete(5, dts.z_support);
  const process_values dpv = discrete_process(dts, dts.z_codes, beta_family::exponential, dgrid);
  const std::vector<double> dnaive = oracle::naive_discrete_process(
      dts.u_hat, dts.y_hat, dts.z_codes, dts.p_hat, dts.z_support, true, dgrid.u, dgrid.y);
  for (std::size_t g = 0; g < dnaive.size(); ++g) {
    worst = std::max(worst, std::abs(dpv.values[g] - dnaive[g]));
  }
  const process_values dbpv =
      bootstrap_process(dts, dts.z_codes, beta_family::exponential, dgrid, omega);
  const std::vector<double> dbnaive = oracle::naive_discrete_process(
      dts.u_hat, dts.y_hat, dts.z_codes, dts.p_hat, dts.z_support, true, dgrid.u, dgrid.y, omega);
  for (std::size_t g = 0; g < dbnaive.size(); ++g) {
    worst = std::max(worst, std::abs(dbpv.values[g] - dbnaive[g]));
  }

  outcome out;
  out.pass = worst < 1e-12;
  out.detail = "max|factorized - naive| = " + fmt(worst) +
               " (n=20, G=5; feasible, discrete, bootstrap; tol 1e-12)";
  return out;
}

// ---------------------------------------------------------------- criterion 8

bool results_match(const test_result& a, const test_result& b) {
  return std::abs(a.statistic - b.statistic) <= 1e-12 &&
         std::abs(a.critical_value - b.critical_value) <= 1e-12 &&
         std::abs(a.p_value - b.p_value) <= 1e-12 && a.reject == b.reject;
}

outcome invariance_suite() {
  outcome out;
  out.pass = true;
  std::string failed;

  // continuous case, known theta
  const sample base = generate(dgp_spec{dgp_name::a1, 0.2, 0.0, 60}, 8001);
  test_config tc;
  tc.h_z = bandwidth{1.0, 0.2};
  tc.h_y = bandwidth{1.0, 0.2};
  tc.bootstrap_samples = 100;
  tc.seed = 8002;
  index_spec idx;
  idx.model = index_model::linear(1.0);
  idx.theta = theta_spec::known({0.0, 1.0});
  const test_result ref = run_test(base, idx, tc);

  auto check = [&](const char* name, const test_result& r) {
    if (!results_match(ref, r)) {
      out.pass = false;
      failed += std::string(" ") + name;
    }
  };

  sample warped = base;  // strictly increasing transform of y
  for (double& y : warped.y) y = std::exp(0.5 * y) + y;
  check("y-transform", run_test(warped, idx, tc));

  warped = base;  // of z
  for (double& z : warped.z) z = std::atan(3.0 * z) + z * z * z;
  check("z-transform", run_test(warped, idx, tc));

  warped = base;  // of the index values (the single covariate feeds the index)
  for (std::size_t i = 0; i < warped.x.rows; ++i) {
    warped.x(i, 0) = std::exp(2.0 * warped.x(i, 0)) - 1.0;
  }
  check("index-transform", run_test(warped, idx, tc));

  index_spec scaled;  // positive rescaling of a linear theta
  scaled.model = index_model::linear(1.0);
  scaled.theta = theta_spec::known({0.0, 5.5});
  check("theta-rescale", run_test(base, scaled, tc));

  // discrete case: y-transform with re-estimated probit index
  const sample dbase = generate(dgp_spec{dgp_name::c, 0.0, 0.0, 60}, 8003);
  index_spec didx;
  didx.model = dgp_spec::binary_index_model();
  didx.theta = theta_spec::probit_mle();
  const test_result dref = run_test(dbase, didx, tc);
  sample dwarped = dbase;
  for (double& y : dwarped.y) y = y * y * y + 2.0 * y;
  const test_result dgot = run_test(dwarped, didx, tc);
  if (!results_match(dref, dgot)) {
    out.pass = false;
    failed += " discrete-y-transform";
  }

  out.detail = out.pass ? "y/z/index transforms, theta rescale, discrete y-transform all "
                          "leave the result unchanged (tol 1e-12)"
                        : "failed:" + failed;
  return out;
}

// ---------------------------------------------------------------- criterion 9

outcome multiplier_law() {
  const std::size_t n = 1000, b = 1000;  // 1e6 draws
  const multiplier_draws d = draw_multipliers(n, b, 9001);
  bool support_ok = true;
  double mean = 0.0;
  for (double w : d.omega) {
    support_ok = support_ok && (w == mammen::low || w == mammen::high);
    mean += w;
  }
  mean /= static_cast<double>(d.omega.size());
  double var = 0.0;
  for (double w : d.omega) var += (w - mean) * (w - mean);
  var /= static_cast<double>(d.omega.size() - 1);

  outcome out;
  out.pass = support_ok && std::abs(mean) <= 0.005 && std::abs(var - 1.0) <= 0.01;
  out.detail = "1e6 draws: mean = " + fmt(mean) + " (tol 0.005), var = " + fmt(var) +
               " (tol 0.01), support " + (support_ok ? "exact" : "VIOLATED");
  return out;
}

// ---------------------------------------------------------------- criterion 10

outcome probit_oracle() {
  const std::vector<double> xs{0.035,  1.351,  -1.068, 1.346, -0.565, -0.230, 0.983,
                               -0.272, 0.149,  -1.417, 0.761, 0.114,  -0.511, 0.865,
                               -0.590, -0.140, -1.098, -0.291, -0.890, -0.713};
  const std::vector<double> zs{1, 1, 0, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 1, 0, 0};
  const double scale = 0.5;

  auto loglik = [&](double t0, double t1) {
    double ll = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double m = scale * (t0 + t1 * xs[i]);
      const double f = std::clamp(0.5 * std::erfc(-m / std::sqrt(2.0)), 1e-12, 1.0 - 1e-12);
      ll += zs[i] > 0.5 ? std::log(f) : std::log1p(-f);
    }
    return ll;
  };

  // exhaustive grid search over [-1.5, 1.5]^2, step 1e-3
  const int steps = 3001;
  std::vector<double> row_best(steps);
  std::vector<int> row_arg(steps);
  parallel_for(steps, worker_threads(), [&](std::size_t i0) {
    const double t0 = -1.5 + 1e-3 * static_cast<double>(i0);
    double best = -1e300;
    int arg = 0;
    for (int i1 = 0; i1 < steps; ++i1) {
      const double ll = loglik(t0, -1.5 + 1e-3 * i1);
      if (ll > best) {
        best = ll;
        arg = i1;
      }
    }
    row_best[i0] = best;
    row_arg[i0] = arg;
  });
  std::size_t best_row = 0;
  for (std::size_t i0 = 1; i0 < row_best.size(); ++i0) {
    if (row_best[i0] > row_best[best_row]) best_row = i0;
  }
  const double grid_t0 = -1.5 + 1e-3 * static_cast<double>(best_row);
  const double grid_t1 = -1.5 + 1e-3 * row_arg[best_row];

  matrix x(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) x(i, 0) = xs[i];
  const probit_fit fit = probit_mle(zs, x, index_model::linear(scale));
  const double d0 = std::abs(fit.theta[0] - grid_t0);
  const double d1 = std::abs(fit.theta[1] - grid_t1);

  // intercept-only closed form: theta0 = Phi^{-1}(zbar) / scale
  std::vector<double> z2(20, 0.0);
  for (int i = 0; i < 12; ++i) z2[i] = 1.0;
  const matrix empty_x(20, 0);
  const probit_fit icept = probit_mle(z2, empty_x, index_model::linear(scale));
  const double closed = norm_quantile(0.6) / scale;
  const double d_icept = std::abs(icept.theta[0] - closed);
  const double d_frozen = std::abs(icept.theta[0] - 0.5066942062715994);

  outcome out;
  out.pass = d0 <= 1e-3 && d1 <= 1e-3 && d_icept <= 1e-8 && d_frozen <= 1e-7;
  out.detail = "grid-search gap = (" + fmt(d0) + ", " + fmt(d1) +
               ") vs tol 1e-3; intercept-only gap = " + fmt(d_icept) + " vs tol 1e-8";
  return out;
}

// ---------------------------------------------------------------- criterion 11

std::string run_command(const std::string& cmd, int& exit_code) {
  std::string output;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) {
    exit_code = -1;
    return output;
  }
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
  exit_code = pclose(pipe);
  return output;
}

outcome determinism_via_cli() {
  const char* bin = std::getenv("CITEST_BIN");
  outcome out;
  if (bin == nullptr) {
    out.pass = false;
    out.detail = "CITEST_BIN not set; cannot exercise the CLI";
    return out;
  }

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "citest_acceptance";
  std::filesystem::create_directories(dir);
  const std::filesystem::path csv = dir / "accept.csv";
  {
    const sample s = generate(dgp_spec{dgp_name::a1, 0.2, 0.0, 80}, 11001);
    std::ofstream f(csv);
    f << "y,z,x\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      f << format_double(s.y[i]) << "," << format_double(s.z[i]) << ","
        << format_double(s.x(i, 0)) << "\n";
    }
  }

  const std::string base = std::string(bin) + " test --data " + csv.string() +
                           " --y y --z z --x x --seed 11 --bootstrap 150 --format json";
  int code1 = 0, code2 = 0, code3 = 0, code4 = 0;
  const std::string t1 = run_command(base + " --threads 1", code1);
  const std::string t4 = run_command(base + " --threads 4", code2);

  const std::string sim = std::string(bin) +
                          " simulate --dgp A1 --a 0.2 --reps 15 --bootstrap 50 --seed 12 "
                          "--format json";
  const std::string s1 = run_command(sim + " --threads 1", code3);
  const std::string s3 = run_command(sim + " --threads 3", code4);

  const bool codes_ok = code1 == 0 && code2 == 0 && code3 == 0 && code4 == 0;
  out.pass = codes_ok && !t1.empty() && t1 == t4 && !s1.empty() && s1 == s3;
  out.detail = std::string("test output ") +
               (t1 == t4 ? "byte-identical" : "DIFFERS") + " across --threads 1/4; " +
               "simulate output " + (s1 == s3 ? "byte-identical" : "DIFFERS") +
               " across --threads 1/3" + (codes_ok ? "" : "; nonzero exit status");
  std::filesystem::remove_all(dir);
  return out;
}

}  // namespace

int main() {
  struct criterion {
    int id;
    std::string name;
    outcome (*fn)();
  };

  const std::vector<criterion> criteria = {
      {1, "size, continuous null (A1, a=0.2, h=1.00)",
       [] {
         return monte_carlo_cell(dgp_name::a1, 0.2, 0.0, 1.0, 1.0, 500, 90001, true, 0.02, 0.08);
       }},
      {2, "power, continuous (B2, a=0.2, h=1.00)",
       [] {
         return monte_carlo_cell(dgp_name::b2, 0.2, 0.0, 1.0, 1.0, 200, 90002, false, 0.95, 1.0);
       }},
      {3, "size, binary null (C, h1=h2=1.00, probit re-fit)",
       [] {
         return monte_carlo_cell(dgp_name::c, 0.0, 0.0, 1.0, 1.0, 500, 90003, true, 0.02, 0.08);
       }},
      {4, "power, binary (D1, kappa=0.5, h1=h2=2.00)",
       [] {
         return monte_carlo_cell(dgp_name::d1, 0.0, 0.5, 2.0, 2.0, 200, 90004, false, 0.95, 1.0);
       }},
      {5, "covariance-kernel oracle (continuous + discrete cross-slice)", covariance_oracle},
      {6, "analytic inner products vs quadrature", inner_product_oracle},
      {7, "factorized process equals naive triple loop", factorization_oracle},
      {8, "invariance under strictly increasing transforms", invariance_suite},
      {9, "multiplier two-point law moments", multiplier_law},
      {10, "probit MLE vs grid-search and closed-form oracles", probit_oracle},
      {11, "byte-identical output across thread counts (CLI)", determinism_via_cli},
  };

  int failures = 0;
  for (const criterion& c : criteria) {
    const outcome o = c.fn();
    if (!o.pass) ++failures;
    std::printf("[%2d] %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
