// Weighted trajectory curve: the ordinal generalization of the product-limit
// plot. Each arm carries a weighted health status U starting at 1; every
// score change moves U down (worsening) or up (improvement) by the change
// divided by the arm's initial weight n0 * range.
#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "wta/km.hpp"
#include "wta/trial_data.hpp"

namespace wta {

inline int initial_weight(int n0, int range) {
  if (n0 <= 0) throw ValidationError("initial_weight needs n0 > 0");
  if (range <= 0) throw ValidationError("initial_weight needs range > 0");
  return n0 * range;
}

// Sum of score changes from time j to j+1 over the arm's patients observed
// at both times. Positive means net worsening.
inline int net_change(const TrialDataset& ds, std::string_view arm, int j) {
  int d = 0;
  for (const auto& tr : ds.trajectories)
    if (tr.arm == arm && tr.observed_at(j) && tr.observed_at(j + 1))
      d += tr.scores[j + 1] - tr.scores[j];
  return d;
}

struct TrajectoryStep {
  int time = 0;
  double health_status = 1.0;  // U at this time
  int at_risk = 0;             // patients under observation at this time
  int net_change = 0;          // summed change from this time to the next
};

struct ArmCurve {
  std::string arm;
  int initial_weight = 0;
  std::vector<TrajectoryStep> steps;  // one entry per pooled grid time
  std::vector<CensorMark> censor_marks;
};

struct WeightedTrajectoryCurve {
  int range = 0;
  std::vector<ArmCurve> arms;
};

// One curve per arm over the pooled time grid 0..max_time. Requires a
// normalized dataset so that the weighting by n0 * range is meaningful.
inline WeightedTrajectoryCurve wta_curve(const TrialDataset& ds) {
  ds.validate();
  if (!ds.scale.is_normalized())
    throw ValidationError("wta_curve requires a normalized dataset");
  WeightedTrajectoryCurve curve;
  curve.range = ds.scale.range();
  const int max_t = ds.max_time();
  for (const auto& arm : ds.arm_labels()) {
    ArmCurve ac;
    ac.arm = arm;
    const auto patients = arm_view(ds, arm);
    ac.initial_weight = initial_weight(static_cast<int>(patients.size()),
                                       curve.range);
    std::vector<int> censored(max_t + 1, 0);
    for (const auto* tr : patients) ++censored[tr->censor_time()];
    for (int t = 0; t <= max_t; ++t)
      if (censored[t] > 0) ac.censor_marks.push_back({t, censored[t]});

    double u = 1.0;
    for (int j = 0; j <= max_t; ++j) {
      TrajectoryStep step;
      step.time = j;
      step.health_status = u;
      for (const auto* tr : patients) step.at_risk += tr->observed_at(j);
      if (j < max_t) {
        for (const auto* tr : patients)
          if (tr->observed_at(j) && tr->observed_at(j + 1))
            step.net_change += tr->scores[j + 1] - tr->scores[j];
      }
      ac.steps.push_back(step);
      u -= static_cast<double>(step.net_change) / ac.initial_weight;
    }
    curve.arms.push_back(std::move(ac));
  }
  return curve;
}

// Closed-form health status at time j: 1 - (sum of net changes before j) / w0.
// Equal to the iterative recursion up to rounding; used as a cross-check.
inline double health_status_closed_form(const TrialDataset& ds,
                                        std::string_view arm, int j) {
  const auto patients = arm_view(ds, arm);
  const int w0 = initial_weight(static_cast<int>(patients.size()),
                                ds.scale.range());
  long long total = 0;
  for (int jp = 0; jp < j; ++jp) total += net_change(ds, arm, jp);
  return 1.0 - static_cast<double>(total) / w0;
}

// Contingency table of score changes from time to time+1, bucketed by signed
// change size. Bucket l holds changes of l - range, l = 0..2*range.
struct ChangeTable {
  int time = 0;
  int range = 0;
  std::vector<int> arm_a, arm_b;  // per-bucket patient counts
  int at_risk_a = 0, at_risk_b = 0;  // under observation at `time`, including
                                     // patients censored before time+1

  int width() const { return 2 * range + 1; }
  int change_of(int bucket) const { return bucket - range; }
  // Patients with both endpoints observed; only these occupy buckets.
  int observed_a() const {
    int n = 0;
    for (int c : arm_a) n += c;
    return n;
  }
  int observed_b() const {
    int n = 0;
    for (int c : arm_b) n += c;
    return n;
  }
  int margin(int bucket) const { return arm_a[bucket] + arm_b[bucket]; }
};

// One table per transition j -> j+1 on the pooled grid. Patients censored at
// j appear in the at-risk counts but in no bucket.
inline std::vector<ChangeTable> change_tables(const TrialDataset& ds,
                                              const ArmPair& arms) {
  ds.validate();
  require_arms(ds, arms);
  if (!ds.scale.is_normalized())
    throw ValidationError("change_tables requires a normalized dataset");
  const int r = ds.scale.range();
  const int max_t = ds.max_time();
  std::vector<ChangeTable> tables;
  tables.reserve(static_cast<std::size_t>(std::max(max_t, 0)));
  for (int j = 0; j < max_t; ++j) {
    ChangeTable t;
    t.time = j;
    t.range = r;
    t.arm_a.assign(t.width(), 0);
    t.arm_b.assign(t.width(), 0);
    tables.push_back(std::move(t));
  }
  for (const auto& tr : ds.trajectories) {
    const bool in_a = tr.arm == arms.a;
    if (!in_a && tr.arm != arms.b) continue;
    const int last = tr.censor_time();
    for (int j = 0; j < std::min(last + 1, max_t); ++j) {
      auto& t = tables[j];
      (in_a ? t.at_risk_a : t.at_risk_b) += 1;
      if (j < last) {
        const int bucket = tr.scores[j + 1] - tr.scores[j] + r;
        (in_a ? t.arm_a : t.arm_b)[bucket] += 1;
      }
    }
  }
  return tables;
}

}  // namespace wta
