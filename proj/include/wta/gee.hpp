// Longitudinal comparator: generalized estimating equations with identity
// link, unit variance function, and an AR(1) working correlation, robust
// (sandwich) standard errors, and a Wald test on the treatment effect.
//
// The mean model is score = intercept + effect * treated, constant within a
// patient, and observation times are contiguous integers, so every matrix
// expression collapses to two scalars per patient: q = 1' R^{-1} 1 and
// h = 1' R^{-1} y, computed in O(length) from the tridiagonal AR(1) inverse.
#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "wta/test_result.hpp"
#include "wta/trial_data.hpp"

namespace wta {

struct GeeOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;     // on the max absolute coefficient update
  bool fix_alpha_zero = false; // keep the working independence model
};

struct GeeFit {
  double intercept = 0.0;
  double treatment_effect = 0.0;
  double alpha = 0.0;  // working lag-1 correlation
  double phi = 0.0;    // dispersion
  std::array<std::array<double, 2>, 2> robust_cov{};
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
  TestResult wald;  // z, chi_square, p_value for the treatment effect
};

namespace detail {

// Sums of R^{-1} 1 and R^{-1} y for an AR(1) correlation matrix on m
// contiguous times; also leaves the per-element products implicit since only
// the totals enter the estimating equations.
struct Ar1Sums {
  double q = 0.0;  // 1' R^{-1} 1
  double h = 0.0;  // 1' R^{-1} y
};

inline Ar1Sums ar1_sums(const std::vector<double>& y, double alpha) {
  const std::size_t m = y.size();
  Ar1Sums s;
  if (m == 1) {
    s.q = 1.0;
    s.h = y[0];
    return s;
  }
  const double denom = 1.0 - alpha * alpha;
  const double diag_interior = 1.0 + alpha * alpha;
  double q = 2.0 + static_cast<double>(m - 2) * diag_interior -
             2.0 * static_cast<double>(m - 1) * alpha;
  double h = y.front() + y.back();
  for (std::size_t t = 1; t + 1 < m; ++t) h += diag_interior * y[t];
  for (std::size_t t = 0; t + 1 < m; ++t) h -= alpha * (y[t] + y[t + 1]);
  s.q = q / denom;
  s.h = h / denom;
  return s;
}

}  // namespace detail

inline GeeFit fit_gee(const TrialDataset& ds, const ArmPair& arms,
                      const GeeOptions& options = {}) {
  ds.validate();
  require_arms(ds, arms);
  if (ds.arm_size(arms.a) < 2 || ds.arm_size(arms.b) < 2)
    throw ValidationError("GEE needs at least two patients per arm");

  struct Cluster {
    std::vector<double> y;
    double treated = 0.0;
  };
  std::vector<Cluster> clusters;
  long long n_obs = 0, n_pairs = 0;
  for (const auto& tr : ds.trajectories) {
    if (tr.arm != arms.a && tr.arm != arms.b) continue;
    Cluster c;
    c.treated = tr.arm == arms.b ? 1.0 : 0.0;
    c.y.assign(tr.scores.begin(), tr.scores.end());
    n_obs += static_cast<long long>(c.y.size());
    n_pairs += static_cast<long long>(c.y.size()) - 1;
    clusters.push_back(std::move(c));
  }

  GeeFit fit;
  double beta0 = 0.0, beta1 = 0.0;
  {
    // Ordinary least squares start: group means.
    double sum_c = 0.0, sum_t = 0.0;
    long long n_c = 0, n_t = 0;
    for (const auto& c : clusters)
      for (double v : c.y) {
        if (c.treated > 0.5) { sum_t += v; ++n_t; }
        else { sum_c += v; ++n_c; }
      }
    beta0 = sum_c / static_cast<double>(n_c);
    beta1 = sum_t / static_cast<double>(n_t) - beta0;
  }

  double alpha = 0.0, phi = 1.0;
  const auto estimate_moments = [&](double b0, double b1) {
    double rss = 0.0, lag = 0.0;
    for (const auto& c : clusters) {
      const double mu = b0 + b1 * c.treated;
      for (std::size_t t = 0; t < c.y.size(); ++t) {
        const double r = c.y[t] - mu;
        rss += r * r;
        if (t + 1 < c.y.size()) lag += r * (c.y[t + 1] - mu);
      }
    }
    phi = rss / static_cast<double>(n_obs - 2);
    if (options.fix_alpha_zero || phi <= 0.0 || n_pairs <= 2) {
      alpha = 0.0;
      return;
    }
    alpha = lag / (static_cast<double>(n_pairs - 2) * phi);
    alpha = std::clamp(alpha, -0.99, 0.99);
  };
  estimate_moments(beta0, beta1);

  for (fit.iterations = 1; fit.iterations <= options.max_iterations;
       ++fit.iterations) {
    // Generalized least squares step under the current working correlation.
    double a00 = 0.0, a01 = 0.0, a11 = 0.0, b0 = 0.0, b1 = 0.0;
    for (const auto& c : clusters) {
      const auto s = detail::ar1_sums(c.y, alpha);
      a00 += s.q;
      a01 += s.q * c.treated;
      a11 += s.q * c.treated;  // treated is 0/1 so x^2 = x
      b0 += s.h;
      b1 += s.h * c.treated;
    }
    const double det = a00 * a11 - a01 * a01;
    if (det <= 0.0) throw ValidationError("singular GEE design");
    const double new0 = (a11 * b0 - a01 * b1) / det;
    const double new1 = (a00 * b1 - a01 * b0) / det;
    const double delta = std::max(std::abs(new0 - beta0), std::abs(new1 - beta1));
    beta0 = new0;
    beta1 = new1;
    estimate_moments(beta0, beta1);
    if (delta < options.tolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.iterations = std::min(fit.iterations, options.max_iterations);

  fit.intercept = beta0;
  fit.treatment_effect = beta1;
  fit.alpha = alpha;
  fit.phi = phi;

  // Sandwich covariance: bread from the model-based information, meat from
  // the per-patient score outer products.
  double a00 = 0.0, a01 = 0.0, a11 = 0.0;
  double m00 = 0.0, m01 = 0.0, m11 = 0.0;
  for (const auto& c : clusters) {
    const auto s = detail::ar1_sums(c.y, alpha);
    const double mu = beta0 + beta1 * c.treated;
    const double g = s.h - mu * s.q;  // 1' R^{-1} residual
    a00 += s.q;
    a01 += s.q * c.treated;
    a11 += s.q * c.treated;
    m00 += g * g;
    m01 += g * g * c.treated;
    m11 += g * g * c.treated;
  }
  const double det = a00 * a11 - a01 * a01;
  if (det <= 0.0 || phi <= 0.0) {
    fit.degenerate = true;
    fit.wald.method = "gee";
    fit.wald.degenerate = true;
    fit.wald.p_value = 1.0;
    return fit;
  }
  // Bread inverse entries (phi cancels between bread and meat).
  const double i00 = a11 / det, i01 = -a01 / det, i11 = a00 / det;
  fit.robust_cov[0][0] = i00 * (m00 * i00 + m01 * i01) + i01 * (m01 * i00 + m11 * i01);
  fit.robust_cov[0][1] = i00 * (m00 * i01 + m01 * i11) + i01 * (m01 * i01 + m11 * i11);
  fit.robust_cov[1][0] = fit.robust_cov[0][1];
  fit.robust_cov[1][1] = i01 * (m00 * i01 + m01 * i11) + i11 * (m01 * i01 + m11 * i11);

  fit.wald.method = "gee";
  const double var1 = fit.robust_cov[1][1];
  if (var1 <= 0.0) {
    fit.degenerate = true;
    fit.wald.degenerate = true;
    fit.wald.p_value = 1.0;
    return fit;
  }
  fit.wald.z = beta1 / std::sqrt(var1);
  fit.wald.chi_square = fit.wald.z * fit.wald.z;
  fit.wald.p_value = chi_square1_upper_p(fit.wald.chi_square);
  return fit;
}

inline GeeFit fit_gee(const TrialDataset& ds, const GeeOptions& options = {}) {
  return fit_gee(ds, default_arm_pair(ds), options);
}

}  // namespace wta
