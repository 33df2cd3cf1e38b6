// Weighted logrank test over score-change tables.
//
// At each transition the pooled change counts per bucket form the margins of
// a multivariate hypergeometric draw: under the null, the reference arm's
// bucket counts are a sample of size n_a (its transition-complete patient
// count) without replacement from the pooled changes. Patients without an
// observation at the next time carry no change information, so the draw
// population is the transition-complete subset; this keeps the test exactly
// equal to the standard logrank on binary absorbing data.
//
// Bucket weights are the signed change sizes, so the statistic accumulates
// observed-minus-expected weighted change on the reference arm.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "wta/test_result.hpp"
#include "wta/trial_data.hpp"
#include "wta/wta_curve.hpp"

namespace wta {

struct MomentSet {
  std::vector<double> expectation;  // per-bucket expected count on arm a
  std::vector<double> covariance;   // row-major width x width
  double observed = 0.0;            // weighted observed change on arm a
  double expected = 0.0;            // weighted expectation
  double variance = 0.0;            // weighted variance

  double cov(int l, int q, int width) const {
    return covariance[static_cast<std::size_t>(l) * width + q];
  }
};

// Exact first and second moments of the reference arm's bucket counts under
// the null, conditional on the pooled margins. Tables whose
// transition-complete population has fewer than two patients contribute
// nothing. The zero-change bucket participates in the margins and the
// population like any other.
inline MomentSet hypergeo_moments(const ChangeTable& t) {
  const int width = t.width();
  MomentSet m;
  m.expectation.assign(width, 0.0);
  m.covariance.assign(static_cast<std::size_t>(width) * width, 0.0);
  const double n_a = t.observed_a();
  const double n_b = t.observed_b();
  const double n = n_a + n_b;
  for (int l = 0; l < width; ++l) m.observed += t.change_of(l) * t.arm_a[l];
  if (n <= 1.0) {
    // A single patient's change equals its own expectation; nothing varies.
    m.expected = m.observed;
    return m;
  }
  const double pair_factor = n_a * n_b / (n * n * (n - 1.0));
  for (int l = 0; l < width; ++l) {
    const double d_l = t.margin(l);
    m.expectation[l] = n_a * d_l / n;
    m.expected += t.change_of(l) * m.expectation[l];
    if (d_l == 0.0) continue;
    for (int q = 0; q < width; ++q) {
      const double d_q = t.margin(q);
      if (d_q == 0.0) continue;
      const double entry = l == q ? pair_factor * d_l * (n - d_l)
                                  : -pair_factor * d_l * d_q;
      m.covariance[static_cast<std::size_t>(l) * width + q] = entry;
    }
  }
  long double v = 0.0L;  // fixed-order accumulation over all bucket pairs
  for (int l = 0; l < width; ++l) {
    const double w_l = t.change_of(l);
    if (w_l == 0.0) continue;
    for (int q = 0; q < width; ++q) {
      const double w_q = t.change_of(q);
      if (w_q == 0.0) continue;
      v += static_cast<long double>(w_l) * w_q *
           m.covariance[static_cast<std::size_t>(l) * width + q];
    }
  }
  m.variance = static_cast<double>(v);
  return m;
}

inline Contribution weighted_contribution(const ChangeTable& t) {
  const MomentSet m = hypergeo_moments(t);
  return {t.time, m.observed, m.expected, m.variance};
}

inline TestResult weighted_logrank(const TrialDataset& ds, const ArmPair& arms) {
  const auto tables = change_tables(ds, arms);
  std::vector<Contribution> contributions;
  contributions.reserve(tables.size());
  for (const auto& t : tables) contributions.push_back(weighted_contribution(t));
  return assemble_test_result("wta-analytic", std::move(contributions));
}

inline TestResult weighted_logrank(const TrialDataset& ds) {
  return weighted_logrank(ds, default_arm_pair(ds));
}

}  // namespace wta
