// Kaplan-Meier machinery on a binary endpoint derived from ordinal
// trajectories: the event is the first time the score reaches a threshold.
#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wta/test_result.hpp"
#include "wta/trial_data.hpp"

namespace wta {

enum class EventStatus { kEvent, kCensored };

struct BinaryEvent {
  int time = 0;  // event time, or last observation time when censored
  EventStatus status = EventStatus::kCensored;
};

inline BinaryEvent binary_event_transform(const Trajectory& tr,
                                          const OrdinalScale& scale,
                                          int threshold) {
  if (threshold <= scale.min_score || threshold > scale.max_score)
    throw ValidationError("event threshold must lie in (min_score, max_score]");
  for (int t = 0; t < static_cast<int>(tr.scores.size()); ++t)
    if (tr.scores[t] >= threshold) return {t, EventStatus::kEvent};
  return {tr.censor_time(), EventStatus::kCensored};
}

struct SurvivalStep {
  int time = 0;
  double survival = 1.0;
  int at_risk = 0;
  int events = 0;
};

struct CensorMark {
  int time = 0;
  int count = 0;
};

struct SurvivalCurve {
  int n0 = 0;                       // patients at time zero
  std::vector<SurvivalStep> steps;  // one entry per distinct event time
  std::vector<CensorMark> censor_marks;
};

namespace detail {

inline SurvivalCurve km_from_events(const std::vector<BinaryEvent>& events) {
  SurvivalCurve curve;
  curve.n0 = static_cast<int>(events.size());
  std::map<int, int> deaths, censored;
  for (const auto& e : events) {
    if (e.status == EventStatus::kEvent) ++deaths[e.time];
    else ++censored[e.time];
  }
  std::set<int> times;
  for (const auto& [t, _] : deaths) times.insert(t);
  for (const auto& [t, _] : censored) times.insert(t);
  double s = 1.0;
  int at_risk = curve.n0;
  for (int t : times) {
    const int d = deaths.count(t) ? deaths.at(t) : 0;
    const int c = censored.count(t) ? censored.at(t) : 0;
    if (d > 0) {
      s *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
      curve.steps.push_back({t, s, at_risk, d});
    }
    if (c > 0) curve.censor_marks.push_back({t, c});
    at_risk -= d + c;  // censored patients leave the risk set after their time
  }
  return curve;
}

}  // namespace detail

// Per-arm product-limit curves for the thresholded endpoint.
inline std::map<std::string, SurvivalCurve> km_estimate(const TrialDataset& ds,
                                                        int threshold) {
  ds.validate();
  std::map<std::string, std::vector<BinaryEvent>> per_arm;
  for (const auto& tr : ds.trajectories)
    per_arm[tr.arm].push_back(binary_event_transform(tr, ds.scale, threshold));
  std::map<std::string, SurvivalCurve> out;
  for (const auto& [arm, events] : per_arm)
    out[arm] = detail::km_from_events(events);
  return out;
}

// Two-sample logrank test on the thresholded endpoint. Timepoints where the
// pooled risk set has at most one patient contribute nothing.
inline TestResult logrank_test(const TrialDataset& ds, int threshold,
                               const ArmPair& arms) {
  ds.validate();
  require_arms(ds, arms);
  struct Exit { int time; bool event; bool in_a; };
  std::vector<Exit> exits;
  for (const auto& tr : ds.trajectories) {
    if (tr.arm != arms.a && tr.arm != arms.b) continue;
    const auto e = binary_event_transform(tr, ds.scale, threshold);
    exits.push_back({e.time, e.status == EventStatus::kEvent, tr.arm == arms.a});
  }
  std::set<int> event_times;
  for (const auto& e : exits)
    if (e.event) event_times.insert(e.time);

  std::vector<Contribution> contributions;
  for (int t : event_times) {
    int n = 0, n_a = 0, d = 0, d_a = 0;
    for (const auto& e : exits) {
      if (e.time >= t) {
        ++n;
        n_a += e.in_a;
      }
      if (e.event && e.time == t) {
        ++d;
        d_a += e.in_a;
      }
    }
    Contribution c;
    c.time = t;
    c.observed = d_a;
    c.expected = static_cast<double>(n_a) * d / n;
    c.variance = n <= 1 ? 0.0
                        : static_cast<double>(n_a) * (n - n_a) * d *
                              (n - d) / (static_cast<double>(n) * n * (n - 1));
    contributions.push_back(c);
  }
  return assemble_test_result("km", std::move(contributions));
}

inline TestResult logrank_test(const TrialDataset& ds, int threshold) {
  return logrank_test(ds, threshold, default_arm_pair(ds));
}

}  // namespace wta
