// Core data model: ordinal repeated-measures trial data.
//
// A trajectory is one patient's ordinal score recorded on a contiguous
// integer time grid 0, 1, ..., censor_time. Time is an index; the unit
// (days, weeks, cycles) is a label only. Higher scores are worse once a
// dataset is normalized.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wta {

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

enum class Polarity { kHigherIsWorse, kHigherIsBetter };

struct OrdinalScale {
  int min_score = 0;
  int max_score = 1;
  Polarity polarity = Polarity::kHigherIsWorse;

  int range() const { return max_score - min_score; }
  bool is_normalized() const {
    return min_score == 0 && polarity == Polarity::kHigherIsWorse;
  }
  void validate() const {
    if (max_score <= min_score)
      throw ValidationError("ordinal scale needs max_score > min_score");
  }
};

struct Trajectory {
  std::string patient_id;
  std::string arm;
  // scores[t] is the severity at time t; observation stops after the last
  // entry, so censor_time() is implicit in the length.
  std::vector<int> scores;

  int censor_time() const { return static_cast<int>(scores.size()) - 1; }
  bool observed_at(int t) const {
    return t >= 0 && t < static_cast<int>(scores.size());
  }
};

struct TrialDataset {
  OrdinalScale scale;
  std::vector<Trajectory> trajectories;
  std::string time_unit = "days";
  // True when the generating protocol stops observation at max_score, i.e.
  // the top score is absorbing by construction (set by the simulators).
  bool absorb_at_max = false;

  void validate() const {
    scale.validate();
    if (trajectories.empty())
      throw ValidationError("dataset has no trajectories");
    std::set<std::string> ids;
    for (const auto& tr : trajectories) {
      if (tr.scores.empty())
        throw ValidationError("patient " + tr.patient_id + " has no observations");
      if (!ids.insert(tr.patient_id).second)
        throw ValidationError("duplicate patient id " + tr.patient_id);
      for (int s : tr.scores) {
        if (s < scale.min_score || s > scale.max_score)
          throw ValidationError("patient " + tr.patient_id + " has score " +
                                std::to_string(s) + " outside scale [" +
                                std::to_string(scale.min_score) + "," +
                                std::to_string(scale.max_score) + "]");
      }
    }
  }

  std::vector<std::string> arm_labels() const {
    std::set<std::string> labels;
    for (const auto& tr : trajectories) labels.insert(tr.arm);
    return {labels.begin(), labels.end()};
  }

  int max_time() const {
    int t = 0;
    for (const auto& tr : trajectories) t = std::max(t, tr.censor_time());
    return t;
  }

  int arm_size(std::string_view arm) const {
    int n = 0;
    for (const auto& tr : trajectories) n += (tr.arm == arm);
    return n;
  }
};

struct ArmPair {
  std::string a;  // reference arm (control); the test statistic is computed on this arm
  std::string b;
};

// The conventional pair for a two-arm dataset: labels in sorted order, so
// the simulators' "0" (control) / "1" (treatment) map to (a, b).
inline ArmPair default_arm_pair(const TrialDataset& ds) {
  const auto labels = ds.arm_labels();
  if (labels.size() != 2)
    throw ValidationError("expected exactly two arm labels, found " +
                          std::to_string(labels.size()));
  return {labels[0], labels[1]};
}

// Checks that both arms of the pair are present and nothing else is required
// of the dataset; extra arms are simply ignored by two-sample procedures.
inline void require_arms(const TrialDataset& ds, const ArmPair& arms) {
  if (arms.a == arms.b) throw ValidationError("arm pair must name two distinct arms");
  if (ds.arm_size(arms.a) == 0)
    throw ValidationError("arm '" + arms.a + "' has no patients");
  if (ds.arm_size(arms.b) == 0)
    throw ValidationError("arm '" + arms.b + "' has no patients");
}

inline std::vector<const Trajectory*> arm_view(const TrialDataset& ds,
                                               std::string_view arm) {
  std::vector<const Trajectory*> out;
  for (const auto& tr : ds.trajectories)
    if (tr.arm == arm) out.push_back(&tr);
  return out;
}

// Shift the scale to start at zero and, for higher-is-better instruments,
// reflect scores so that larger always means worse. Idempotent.
inline TrialDataset normalize_scale(const TrialDataset& ds) {
  ds.validate();
  if (ds.scale.is_normalized()) return ds;
  TrialDataset out = ds;
  const int shift = ds.scale.min_score;
  const int r = ds.scale.range();
  const bool reflect = ds.scale.polarity == Polarity::kHigherIsBetter;
  for (auto& tr : out.trajectories)
    for (auto& s : tr.scores) {
      s -= shift;
      if (reflect) s = r - s;
    }
  out.scale = {0, r, Polarity::kHigherIsWorse};
  return out;
}

// Endpoint summary for response-category data (complete response, partial
// response, stable disease, progressive disease, death).
struct ResponseCounts {
  long long complete_response = 0;
  long long partial_response = 0;
  long long stable_disease = 0;
  long long progressive_disease = 0;
  long long death = 0;

  long long total() const {
    return complete_response + partial_response + stable_disease +
           progressive_disease + death;
  }
};

struct ResponseRates {
  double objective_response_rate = 0.0;  // (CR + PR) / total
  double disease_control_rate = 0.0;     // (CR + PR + SD) / total
};

inline ResponseRates response_rates(const ResponseCounts& c) {
  const long long n = c.total();
  if (n <= 0) throw ValidationError("response_rates needs a positive total");
  const auto responders = static_cast<double>(c.complete_response + c.partial_response);
  const auto controlled = responders + static_cast<double>(c.stable_disease);
  return {responders / static_cast<double>(n), controlled / static_cast<double>(n)};
}

}  // namespace wta
