// Small numeric helpers shared by the test statistics and the power harness.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace wta {

// Two-sided tail probability of a standard normal statistic.
inline double two_sided_normal_p(double z) {
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

// Upper tail of a chi-square with one degree of freedom.
inline double chi_square1_upper_p(double x) {
  if (x <= 0.0) return 1.0;
  return std::erfc(std::sqrt(x) / std::numbers::sqrt2);
}

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Linear-interpolation sample quantile (the common "type 7" definition).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile level outside [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

// Kolmogorov-Smirnov distance between a sample and the uniform distribution
// on [0,1]: sup_x |F_n(x) - x|.
inline double ks_statistic_uniform(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("KS statistic of empty sample");
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double x = std::clamp(sample[i], 0.0, 1.0);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - x);
    d = std::max(d, x - static_cast<double>(i) / n);
  }
  return d;
}

// Asymptotic two-sided KS critical value: sqrt(-ln(alpha/2)/2) / sqrt(n).
inline double ks_critical_value(double alpha, std::size_t n) {
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("alpha outside (0,1)");
  if (n == 0) throw std::invalid_argument("KS critical value needs n > 0");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

// Standard error of a Monte Carlo rejection fraction.
inline double binomial_se(double p_hat, int n) {
  if (n <= 0) throw std::invalid_argument("binomial_se needs n > 0");
  return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
}

}  // namespace wta
