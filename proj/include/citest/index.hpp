#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "citest/errors.hpp"
#include "citest/math.hpp"
#include "citest/sample.hpp"

namespace citest {

/// Single-index model lambda_theta(x). The linear form computes
/// scale * (theta_0 + theta_1 x_1 + ... + theta_d x_d); a custom evaluator
/// may be supplied for other shapes (no estimation support for those).
struct index_model {
  using evaluator = std::function<double(std::span<const double>, std::span<const double>)>;

  double scale = 1.0;
  evaluator custom;  // empty => linear

  static index_model linear(double scale = 1.0) {
    index_model m;
    m.scale = scale;
    return m;
  }

  static index_model custom_model(evaluator eval) {
    index_model m;
    m.custom = std::move(eval);
    return m;
  }

  bool is_linear() const { return !custom; }

  double eval_row(std::span<const double> theta, std::span<const double> x_row) const {
    if (custom) return custom(theta, x_row);
    if (theta.size() != x_row.size() + 1) {
      throw invalid_input("index_model: theta must have one entry per covariate plus intercept");
    }
    double s = theta[0];
    for (std::size_t k = 0; k < x_row.size(); ++k) s += theta[k + 1] * x_row[k];
    return scale * s;
  }
};

/// Evaluates lambda_theta(X_i) for every row of x.
inline std::vector<double> eval_index(const index_model& model, std::span<const double> theta,
                                      const matrix& x) {
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::span<const double> row(x.data.data() + i * x.cols, x.cols);
    out[i] = model.eval_row(theta, row);
  }
  return out;
}

struct probit_options {
  std::vector<double> init;  // empty => zeros
  double tol = 1e-8;
  std::size_t max_iter = 100;
};

struct probit_fit {
  std::vector<double> theta;
  std::size_t iterations = 0;
  double log_likelihood = 0.0;
};

namespace detail {

inline constexpr double probit_cdf_floor = 1e-12;

inline double probit_loglik(std::span<const double> z, const matrix& x, const index_model& model,
                            std::span<const double> theta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    std::span<const double> row(x.data.data() + i * x.cols, x.cols);
    const double m = model.eval_row(theta, row);
    const double f = std::clamp(norm_cdf(m), probit_cdf_floor, 1.0 - probit_cdf_floor);
    ll += z[i] > 0.5 ? std::log(f) : std::log1p(-f);
  }
  return ll;
}

}  // namespace detail

/// Probit maximum likelihood for a binary response and a linear scaled index:
/// Newton ascent with analytic gradient and Hessian, step-halving on
/// likelihood decrease. Converges when the score sup-norm drops below tol.
inline probit_fit probit_mle(std::span<const double> z, const matrix& x, const index_model& model,
                             const probit_options& opts = {}) {
  const std::size_t n = x.rows;
  if (z.size() != n || n == 0) throw invalid_input("probit_mle: size mismatch");
  if (!model.is_linear()) throw invalid_input("probit_mle: requires a linear index model");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw invalid_input("probit_mle: bad options");
  bool any0 = false, any1 = false;
  for (double zi : z) {
    if (zi != 0.0 && zi != 1.0) throw invalid_input("probit_mle: responses must be 0 or 1");
    (zi > 0.5 ? any1 : any0) = true;
  }
  if (!any0 || !any1) {
    throw degenerate_response("probit_mle: response is constant; likelihood unbounded");
  }

  const std::size_t d = x.cols + 1;
  std::vector<double> theta = opts.init.empty() ? std::vector<double>(d, 0.0) : opts.init;
  if (theta.size() != d) throw invalid_input("probit_mle: init has wrong dimension");

  double ll = detail::probit_loglik(z, x, model, theta);
  std::vector<double> grad(d), hess(d * d), xrow(d);
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    std::fill(hess.begin(), hess.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      xrow[0] = 1.0;
      for (std::size_t k = 0; k < x.cols; ++k) xrow[k + 1] = x(i, k);
      double m = theta[0];
      for (std::size_t k = 0; k < x.cols; ++k) m += theta[k + 1] * xrow[k + 1];
      m *= model.scale;
      const double f =
          std::clamp(norm_cdf(m), detail::probit_cdf_floor, 1.0 - detail::probit_cdf_floor);
      const double phi = norm_pdf(m);
      double psi1, psi2;  // d/dm and d^2/dm^2 of the log-likelihood term
      if (z[i] > 0.5) {
        const double r = phi / f;
        psi1 = r;
        psi2 = -r * (m + r);
      } else {
        const double r = phi / (1.0 - f);
        psi1 = -r;
        psi2 = r * (m - r);
      }
      const double s1 = model.scale * psi1;
      const double s2 = model.scale * model.scale * psi2;
      for (std::size_t a = 0; a < d; ++a) {
        grad[a] += s1 * xrow[a];
        for (std::size_t b = 0; b <= a; ++b) hess[a * d + b] += s2 * xrow[a] * xrow[b];
      }
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a + 1; b < d; ++b) hess[a * d + b] = hess[b * d + a];
    }

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < opts.tol) return {theta, iter, ll};

    // Newton direction from the negated (positive definite) Hessian.
    std::vector<double> neg_hess(d * d);
    for (std::size_t k = 0; k < d * d; ++k) neg_hess[k] = -hess[k];
    std::vector<double> step;
    try {
      step = cholesky_solve(neg_hess, grad, d);
    } catch (const invalid_input&) {
      throw nonconvergence("probit_mle: singular Hessian", theta);
    }

    // Predicted quadratic gain g' H^{-1} g / 2. Once it is below the rounding
    // noise of the log-likelihood the line search cannot resolve an
    // improvement; take the plain Newton step there.
    double predicted = 0.0;
    for (std::size_t a = 0; a < d; ++a) predicted += grad[a] * step[a];
    predicted *= 0.5;
    if (predicted <= 1e-12 * (1.0 + std::abs(ll))) {
      for (std::size_t a = 0; a < d; ++a) theta[a] += step[a];
      ll = detail::probit_loglik(z, x, model, theta);
      continue;
    }

    double lambda = 1.0;
    std::vector<double> cand(d);
    while (true) {
      for (std::size_t a = 0; a < d; ++a) cand[a] = theta[a] + lambda * step[a];
      const double cand_ll = detail::probit_loglik(z, x, model, cand);
      if (cand_ll >= ll || lambda < 1e-10) {
        theta = cand;
        ll = cand_ll;
        break;
      }
      lambda *= 0.5;
    }
  }
  throw nonconvergence("probit_mle: no convergence after max_iter iterations", theta);
}

/// How theta enters a test run: fixed values or a probit fit on (z, x).
struct theta_spec {
  enum class mode { known, probit };

  mode kind = mode::known;
  std::vector<double> values;
  probit_options probit;

  static theta_spec known(std::vector<double> theta) {
    theta_spec s;
    s.kind = mode::known;
    s.values = std::move(theta);
    return s;
  }

  static theta_spec probit_mle(probit_options opts = {}) {
    theta_spec s;
    s.kind = mode::probit;
    s.probit = std::move(opts);
    return s;
  }
};

/// Index model plus the rule for obtaining theta.
struct index_spec {
  index_model model = index_model::linear();
  theta_spec theta;
};

}  // namespace citest
