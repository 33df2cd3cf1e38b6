// Computational p-value: compare the observed weighted-logrank statistic to
// its distribution under a fitted arm-free Markov null.
//
// The null model is a discrete-time Markov chain over the normalized score
// states, fitted by maximum likelihood on the pooled arms (transition count
// ratios). Null trials clone the observed design: each simulated patient
// keeps a real patient's arm, start state, and observation span, so only the
// association between arm and score evolution is broken.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wta/rng.hpp"
#include "wta/stats.hpp"
#include "wta/test_result.hpp"
#include "wta/trial_data.hpp"
#include "wta/weighted_logrank.hpp"

namespace wta {

struct TransitionModel {
  int state_count = 0;
  std::vector<double> matrix;  // row-major, rows sum to 1
  bool absorb_at_max = false;

  double at(int from, int to) const {
    return matrix[static_cast<std::size_t>(from) * state_count + to];
  }
  double& at(int from, int to) {
    return matrix[static_cast<std::size_t>(from) * state_count + to];
  }
  void validate() const {
    if (state_count <= 0) throw ValidationError("transition model has no states");
    if (matrix.size() != static_cast<std::size_t>(state_count) * state_count)
      throw ValidationError("transition matrix shape mismatch");
    for (int s = 0; s < state_count; ++s) {
      double row = 0.0;
      for (int to = 0; to < state_count; ++to) {
        if (at(s, to) < 0.0) throw ValidationError("negative transition probability");
        row += at(s, to);
      }
      if (std::abs(row - 1.0) > 1e-9)
        throw ValidationError("transition row " + std::to_string(s) +
                              " sums to " + std::to_string(row));
    }
  }
};

// Pooled maximum-likelihood fit. States never visited as a transition source
// get an identity row (they stay put if a simulation ever lands there).
inline TransitionModel fit_transitions(const TrialDataset& ds) {
  ds.validate();
  if (!ds.scale.is_normalized())
    throw ValidationError("fit_transitions requires a normalized dataset");
  const int k = ds.scale.range() + 1;
  std::vector<long long> counts(static_cast<std::size_t>(k) * k, 0);
  long long total = 0;
  for (const auto& tr : ds.trajectories)
    for (std::size_t t = 0; t + 1 < tr.scores.size(); ++t) {
      ++counts[static_cast<std::size_t>(tr.scores[t]) * k + tr.scores[t + 1]];
      ++total;
    }
  if (total == 0)
    throw ValidationError("no observed transitions to fit");
  TransitionModel model;
  model.state_count = k;
  model.matrix.assign(static_cast<std::size_t>(k) * k, 0.0);
  model.absorb_at_max = ds.absorb_at_max;
  for (int s = 0; s < k; ++s) {
    long long row = 0;
    for (int to = 0; to < k; ++to) row += counts[static_cast<std::size_t>(s) * k + to];
    if (row == 0) {
      model.at(s, s) = 1.0;
      continue;
    }
    for (int to = 0; to < k; ++to)
      model.at(s, to) = static_cast<double>(counts[static_cast<std::size_t>(s) * k + to]) /
                        static_cast<double>(row);
  }
  model.validate();
  return model;
}

// One null replicate of the observed design. Patient i keeps its arm, start
// state, and observation span; its path is resampled from the model with an
// independent substream, so output is a pure function of (model, layout,
// seed). When the source protocol stops observation at the top score, the
// simulated patient is likewise censored on reaching it.
inline TrialDataset simulate_null_trial(const TransitionModel& model,
                                        const TrialDataset& layout,
                                        std::uint64_t seed) {
  model.validate();
  TrialDataset out;
  out.scale = layout.scale;
  out.time_unit = layout.time_unit;
  out.absorb_at_max = layout.absorb_at_max;
  out.trajectories.reserve(layout.trajectories.size());
  const int top = model.state_count - 1;
  for (std::size_t i = 0; i < layout.trajectories.size(); ++i) {
    const auto& src = layout.trajectories[i];
    SplitMix64 rng(substream(seed, i + 1));
    Trajectory tr;
    tr.patient_id = src.patient_id;
    tr.arm = src.arm;
    int state = src.scores.front();
    tr.scores.push_back(state);
    for (std::size_t t = 1; t < src.scores.size(); ++t) {
      if (model.absorb_at_max && state == top) break;
      const double u = rng.uniform01();
      double cum = 0.0;
      int next = top;
      for (int to = 0; to <= top; ++to) {
        cum += model.at(state, to);
        if (u < cum) {
          next = to;
          break;
        }
      }
      state = next;
      tr.scores.push_back(state);
    }
    out.trajectories.push_back(std::move(tr));
  }
  return out;
}

struct ComputationalResult {
  TestResult test;  // z and chi_square from the observed statistic; p_value
                    // from the null simulation
  int n_sims = 0;
  std::uint64_t seed = 0;
  double observed_statistic = 0.0;          // chi-square scale
  std::vector<double> null_quantiles;       // 50/90/95/99th percentiles
};

inline ComputationalResult computational_pvalue(const TrialDataset& ds,
                                                int n_sims, std::uint64_t seed,
                                                const ArmPair& arms) {
  if (n_sims <= 0) throw ValidationError("computational p-value needs n_sims > 0");
  ComputationalResult result;
  result.test = weighted_logrank(ds, arms);
  result.test.method = "wta-computational";
  result.n_sims = n_sims;
  result.seed = seed;
  result.observed_statistic = result.test.chi_square;
  if (result.test.degenerate) {
    result.test.p_value = 1.0;
    return result;
  }
  const TransitionModel model = fit_transitions(ds);
  std::vector<double> null_stats;
  null_stats.reserve(static_cast<std::size_t>(n_sims));
  int at_least = 0;
  for (int k = 0; k < n_sims; ++k) {
    const auto null_ds = simulate_null_trial(model, ds, substream(seed, k + 1));
    const auto null_test = weighted_logrank(null_ds, arms);
    // A degenerate null replicate carries no evidence against the null; it
    // enters the reference distribution as a zero statistic.
    const double stat = null_test.degenerate ? 0.0 : null_test.chi_square;
    null_stats.push_back(stat);
    at_least += stat >= result.observed_statistic;
  }
  result.test.p_value =
      (1.0 + at_least) / (1.0 + static_cast<double>(n_sims));
  result.null_quantiles = {quantile(null_stats, 0.50), quantile(null_stats, 0.90),
                           quantile(null_stats, 0.95), quantile(null_stats, 0.99)};
  return result;
}

inline ComputationalResult computational_pvalue(const TrialDataset& ds,
                                                int n_sims, std::uint64_t seed) {
  return computational_pvalue(ds, n_sims, seed, default_arm_pair(ds));
}

}  // namespace wta
