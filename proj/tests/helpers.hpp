// Shared generators for randomized unit tests.
#pragma once

#include <string>
#include <vector>

#include "wta/rng.hpp"
#include "wta/trial_data.hpp"

namespace wta::testgen {

// Random two-arm dataset of clamped random walks on {0..range}; both arms
// are guaranteed at least one patient.
inline TrialDataset random_ordinal_dataset(SplitMix64& rng, int max_patients,
                                           int range, int max_length = 12) {
  TrialDataset ds;
  ds.scale = {0, range, Polarity::kHigherIsWorse};
  const int n = rng.uniform_int(2, max_patients);
  for (int i = 0; i < n; ++i) {
    Trajectory tr;
    tr.patient_id = "p" + std::to_string(i);
    tr.arm = i == 0 ? "0" : (i == 1 ? "1" : (rng.bernoulli(0.5) ? "1" : "0"));
    int state = rng.uniform_int(0, range);
    const int len = rng.uniform_int(1, max_length);
    tr.scores.push_back(state);
    for (int t = 1; t < len; ++t) {
      const double u = rng.uniform01();
      if (u < 0.25) state = std::max(0, state - 1);
      else if (u < 0.55) state = std::min(range, state + 1);
      tr.scores.push_back(state);
    }
    ds.trajectories.push_back(std::move(tr));
  }
  return ds;
}

// Binary 0/1 trajectories where 1 is absorbing: the patient either flips to 1
// at some time and is censored there, or stays 0 for its whole follow-up.
// This is the regime where the weighted logrank must reduce to the standard
// logrank on the thresholded endpoint.
inline TrialDataset random_binary_absorbing_dataset(SplitMix64& rng,
                                                    int max_patients) {
  TrialDataset ds;
  ds.scale = {0, 1, Polarity::kHigherIsWorse};
  ds.absorb_at_max = true;
  const int n = rng.uniform_int(4, max_patients);
  for (int i = 0; i < n; ++i) {
    Trajectory tr;
    tr.patient_id = "p" + std::to_string(i);
    tr.arm = i % 2 == 0 ? "0" : "1";
    const int follow_up = rng.uniform_int(1, 15);
    int event_day = 1;
    while (event_day <= follow_up && !rng.bernoulli(0.2)) ++event_day;
    const int last = std::min(event_day, follow_up);
    for (int t = 0; t < last; ++t) tr.scores.push_back(0);
    if (event_day <= follow_up) tr.scores.push_back(1);
    else tr.scores.push_back(0);
    ds.trajectories.push_back(std::move(tr));
  }
  return ds;
}

}  // namespace wta::testgen
