#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "wta/km.hpp"
#include "wta/weighted_logrank.hpp"

using namespace wta;

namespace {

double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
  return c;
}

// Brute-force multivariate hypergeometric moments: enumerate every split of
// the pooled bucket margins into an arm-a draw of size n_a, weighting each
// split by its probability. Independent of the closed forms under test.
struct EnumeratedMoments {
  std::vector<double> e;
  std::vector<double> cov;
};

void enumerate_splits(const std::vector<int>& margins, std::size_t bucket,
                      int remaining, double weight, std::vector<int>& draw,
                      std::vector<double>& e, std::vector<double>& second) {
  const auto width = margins.size();
  if (bucket == width) {
    if (remaining != 0) return;
    for (std::size_t l = 0; l < width; ++l) {
      e[l] += weight * draw[l];
      for (std::size_t q = 0; q < width; ++q)
        second[l * width + q] += weight * draw[l] * draw[q];
    }
    return;
  }
  for (int a = 0; a <= std::min(margins[bucket], remaining); ++a) {
    draw[bucket] = a;
    enumerate_splits(margins, bucket + 1, remaining - a,
                     weight * choose(margins[bucket], a), draw, e, second);
  }
  draw[bucket] = 0;
}

EnumeratedMoments enumerate_moments(const std::vector<int>& margins, int n_a) {
  const auto width = margins.size();
  int n = 0;
  for (int d : margins) n += d;
  EnumeratedMoments m;
  m.e.assign(width, 0.0);
  std::vector<double> second(width * width, 0.0);
  std::vector<int> draw(width, 0);
  enumerate_splits(margins, 0, n_a, 1.0, draw, m.e, second);
  const double total = choose(n, n_a);
  m.cov.assign(width * width, 0.0);
  for (std::size_t l = 0; l < width; ++l) {
    m.e[l] /= total;
    for (std::size_t q = 0; q < width; ++q)
      m.cov[l * width + q] = second[l * width + q] / total - 0.0;
  }
  for (std::size_t l = 0; l < width; ++l)
    for (std::size_t q = 0; q < width; ++q)
      m.cov[l * width + q] -= m.e[l] * m.e[q];
  return m;
}

// A table with the given pooled margins and arm-a transition count; the
// moments only depend on those, so the arm split of each margin is arbitrary.
ChangeTable table_with_margins(const std::vector<int>& margins, int n_a,
                               int range) {
  ChangeTable t;
  t.time = 0;
  t.range = range;
  t.arm_a.assign(t.width(), 0);
  t.arm_b.assign(t.width(), 0);
  int left = n_a;
  for (int l = 0; l < t.width(); ++l) {
    const int take = std::min(left, margins[l]);
    t.arm_a[l] = take;
    t.arm_b[l] = margins[l] - take;
    left -= take;
  }
  t.at_risk_a = t.observed_a();
  t.at_risk_b = t.observed_b();
  return t;
}

TEST(HypergeoMoments, SingleChangeBetweenTwoPatients) {
  // One +1 change pooled between one patient per arm, arm a holding it.
  ChangeTable t;
  t.range = 1;
  t.arm_a = {0, 0, 1};
  t.arm_b = {0, 1, 0};
  t.at_risk_a = t.at_risk_b = 1;
  const auto m = hypergeo_moments(t);
  EXPECT_DOUBLE_EQ(m.expectation[2], 0.5);
  EXPECT_DOUBLE_EQ(m.cov(2, 2, t.width()), 0.25);
  EXPECT_DOUBLE_EQ(m.observed, 1.0);
  EXPECT_DOUBLE_EQ(m.expected, 0.5);
  EXPECT_DOUBLE_EQ(m.variance, 0.25);
}

TEST(HypergeoMoments, OppositeChangesAntiCorrelate) {
  // Margins: one +1, one -1, two no-change; two patients per arm.
  const ChangeTable t = table_with_margins({1, 2, 1}, 2, 1);
  const auto m = hypergeo_moments(t);
  EXPECT_NEAR(m.cov(0, 2, t.width()), -1.0 / 12.0, 1e-15);
  EXPECT_NEAR(m.cov(2, 0, t.width()), -1.0 / 12.0, 1e-15);
}

TEST(HypergeoMoments, EmptyTableIsAllZero) {
  ChangeTable t;
  t.range = 2;
  t.arm_a.assign(t.width(), 0);
  t.arm_b.assign(t.width(), 0);
  t.at_risk_a = 3;  // censored patients only
  const auto m = hypergeo_moments(t);
  EXPECT_DOUBLE_EQ(m.observed, 0.0);
  EXPECT_DOUBLE_EQ(m.expected, 0.0);
  EXPECT_DOUBLE_EQ(m.variance, 0.0);
}

TEST(HypergeoMoments, SinglePatientContributesNothing) {
  ChangeTable t;
  t.range = 1;
  t.arm_a = {0, 0, 1};
  t.arm_b = {0, 0, 0};
  t.at_risk_a = 1;
  const auto m = hypergeo_moments(t);
  EXPECT_DOUBLE_EQ(m.observed, m.expected);
  EXPECT_DOUBLE_EQ(m.variance, 0.0);
}

TEST(HypergeoMoments, MatchesExhaustiveEnumeration) {
  SplitMix64 rng(1234);
  int informative = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const int range = rng.uniform_int(1, 2);
    const int width = 2 * range + 1;
    const int n = rng.uniform_int(2, 8);
    std::vector<int> margins(width, 0);
    for (int i = 0; i < n; ++i) ++margins[rng.uniform_int(0, width - 1)];
    const int n_a = rng.uniform_int(1, n - 1);
    const auto t = table_with_margins(margins, n_a, range);
    const auto fast = hypergeo_moments(t);
    const auto slow = enumerate_moments(margins, n_a);
    for (int l = 0; l < width; ++l) {
      EXPECT_NEAR(fast.expectation[l], slow.e[l], 1e-10);
      for (int q = 0; q < width; ++q)
        EXPECT_NEAR(fast.cov(l, q, width), slow.cov[l * width + q], 1e-10)
            << "rep " << rep << " l " << l << " q " << q;
    }
    // The weighted variance is the same quadratic form on either matrix.
    double slow_v = 0.0;
    for (int l = 0; l < width; ++l)
      for (int q = 0; q < width; ++q)
        slow_v += (l - range) * (q - range) * slow.cov[l * width + q];
    EXPECT_NEAR(fast.variance, slow_v, 1e-10);
    informative += fast.variance > 0.0;
  }
  EXPECT_GT(informative, 20);
}

TEST(HypergeoMoments, StructuralInvariants) {
  SplitMix64 rng(4321);
  for (int rep = 0; rep < 60; ++rep) {
    const int range = rng.uniform_int(1, 3);
    const int width = 2 * range + 1;
    const int n = rng.uniform_int(2, 12);
    std::vector<int> margins(width, 0);
    for (int i = 0; i < n; ++i) ++margins[rng.uniform_int(0, width - 1)];
    const auto t = table_with_margins(margins, rng.uniform_int(1, n - 1), range);
    const auto m = hypergeo_moments(t);
    EXPECT_GE(m.variance, 0.0);
    double e_total = 0.0;
    for (int l = 0; l < width; ++l) {
      e_total += m.expectation[l];
      EXPECT_GE(m.cov(l, l, width), 0.0);
      double row = 0.0;
      for (int q = 0; q < width; ++q) {
        if (q != l) EXPECT_LE(m.cov(l, q, width), 1e-15);
        row += m.cov(l, q, width);
      }
      // Counts sum to the fixed draw size, so covariance rows sum to zero.
      EXPECT_NEAR(row, 0.0, 1e-12);
    }
    EXPECT_NEAR(e_total, t.observed_a(), 1e-12);
  }
}

TEST(WeightedContribution, OpposedSingleChanges) {
  // Arm a worsens by one, arm b recovers by one: observed +1 against a null
  // expectation of 0 with unit variance.
  ChangeTable t;
  t.range = 2;
  t.arm_a.assign(t.width(), 0);
  t.arm_b.assign(t.width(), 0);
  t.arm_a[t.range + 1] = 1;
  t.arm_b[t.range - 1] = 1;
  t.at_risk_a = t.at_risk_b = 1;
  const auto c = weighted_contribution(t);
  EXPECT_DOUBLE_EQ(c.observed, 1.0);
  EXPECT_DOUBLE_EQ(c.expected, 0.0);
  EXPECT_DOUBLE_EQ(c.variance, 1.0);
}

TEST(WeightedLogrank, ReducesToLogrankOnBinaryAbsorbingData) {
  SplitMix64 rng(20240901);
  int compared = 0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto ds = testgen::random_binary_absorbing_dataset(rng, 40);
    const auto weighted = weighted_logrank(ds);
    const auto classic = logrank_test(ds, 1);
    ASSERT_EQ(weighted.degenerate, classic.degenerate);
    if (weighted.degenerate) continue;
    EXPECT_NEAR(weighted.z, classic.z, 1e-12) << "rep " << rep;
    EXPECT_NEAR(weighted.p_value, classic.p_value, 1e-12);
    ++compared;
  }
  EXPECT_GT(compared, 40);
}

TEST(WeightedLogrank, MirroredArmsScoreZero) {
  TrialDataset ds;
  ds.scale = {0, 3, Polarity::kHigherIsWorse};
  ds.trajectories = {{"a1", "0", {0, 1, 2}},
                     {"a2", "0", {1, 1, 0}},
                     {"b1", "1", {0, 1, 2}},
                     {"b2", "1", {1, 1, 0}}};
  const auto r = weighted_logrank(ds);
  EXPECT_NEAR(r.z, 0.0, 1e-14);
  EXPECT_NEAR(r.p_value, 1.0, 1e-14);
  EXPECT_FALSE(r.degenerate);
}

TEST(WeightedLogrank, SwappingArmsFlipsTheSign) {
  SplitMix64 rng(606);
  for (int rep = 0; rep < 30; ++rep) {
    const auto ds = testgen::random_ordinal_dataset(rng, 24, 4);
    const auto fwd = weighted_logrank(ds, {"0", "1"});
    const auto rev = weighted_logrank(ds, {"1", "0"});
    if (fwd.degenerate) {
      EXPECT_TRUE(rev.degenerate);
      continue;
    }
    EXPECT_NEAR(fwd.z, -rev.z, 1e-12);
    EXPECT_NEAR(fwd.p_value, rev.p_value, 1e-12);
  }
}

TEST(WeightedLogrank, ConstantScoresAreDegenerate) {
  TrialDataset ds;
  ds.scale = {0, 4, Polarity::kHigherIsWorse};
  ds.trajectories = {{"a", "0", {2, 2, 2}}, {"b", "1", {1, 1, 1, 1}}};
  const auto r = weighted_logrank(ds);
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  EXPECT_DOUBLE_EQ(r.z, 0.0);
}

TEST(WeightedLogrank, ContributionLedgerCoversEveryTransition) {
  SplitMix64 rng(11);
  const auto ds = testgen::random_ordinal_dataset(rng, 16, 3);
  const auto r = weighted_logrank(ds);
  EXPECT_EQ(static_cast<int>(r.contributions.size()), ds.max_time());
  for (std::size_t j = 0; j < r.contributions.size(); ++j)
    EXPECT_EQ(r.contributions[j].time, static_cast<int>(j));
}

}  // namespace
