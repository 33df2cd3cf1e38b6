// Synthetic two-arm trial generators.
//
// Both models observe patients on a contiguous grid from time 0 until an
// assigned follow-up runs out or the top score is reached (fatal toxicity /
// maximal severity), whichever comes first. The control arm is made sicker
// by a hazard ratio: upward (worsening) step probabilities are multiplied by
// it and downward (recovery) probabilities divided by it, so hazard_ratio = 1
// is an exact null. Arms are labeled "0" (control) and "1" (treatment) with
// an exact 50/50 split, assigned by a seeded shuffle.
//
// Determinism: every patient draws from its own substream of the trial seed,
// so a dataset is a pure function of (config, seed) independent of the order
// in which patients are generated.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wta/rng.hpp"
#include "wta/trial_data.hpp"

namespace wta {

namespace detail {

// Exact-balance arm labels, shuffled with the trial-level stream.
inline std::vector<bool> balanced_arms(int n, SplitMix64& rng) {
  std::vector<bool> treated(static_cast<std::size_t>(n), false);
  for (int i = n / 2; i < n; ++i) treated[static_cast<std::size_t>(i)] = true;
  for (int i = n - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    const bool tmp = treated[static_cast<std::size_t>(i)];
    treated[static_cast<std::size_t>(i)] = treated[static_cast<std::size_t>(j)];
    treated[static_cast<std::size_t>(j)] = tmp;
  }
  return treated;
}

}  // namespace detail

// Adverse-event model: five severity grades mapped to scores 0..4, patients
// start healthy, and score 4 (fatal) ends observation.
struct ToxicitySimConfig {
  int n_patients = 0;
  double hazard_ratio = 1.0;
  double base_up = 0.10;    // per-step worsening probability (treatment arm)
  double base_down = 0.05;  // per-step recovery probability (treatment arm)
  int max_duration = 50;    // follow-up drawn uniformly from {0..max_duration}
  int max_score = 4;

  void validate() const {
    if (n_patients < 2 || n_patients % 2 != 0)
      throw ValidationError("toxicity model needs an even n_patients >= 2");
    if (hazard_ratio < 1.0)
      throw ValidationError("hazard_ratio must be >= 1 (control arm is scaled up)");
    if (base_up < 0.0 || base_down < 0.0 || base_up * hazard_ratio > 1.0)
      throw ValidationError("step probabilities must stay within [0,1]");
    if (max_duration < 0) throw ValidationError("max_duration must be >= 0");
    if (max_score < 1) throw ValidationError("max_score must be >= 1");
  }
};

inline TrialDataset simulate_toxicity_trial(const ToxicitySimConfig& config,
                                            std::uint64_t seed) {
  config.validate();
  SplitMix64 trial_rng(substream(seed, 0));
  const auto treated = detail::balanced_arms(config.n_patients, trial_rng);

  TrialDataset ds;
  ds.scale = {0, config.max_score, Polarity::kHigherIsWorse};
  ds.time_unit = "days";
  ds.absorb_at_max = true;
  ds.trajectories.reserve(static_cast<std::size_t>(config.n_patients));
  for (int i = 0; i < config.n_patients; ++i) {
    SplitMix64 rng(substream(seed, static_cast<std::uint64_t>(i) + 1));
    const bool on_treatment = treated[static_cast<std::size_t>(i)];
    const double p_up = on_treatment ? config.base_up
                                     : config.base_up * config.hazard_ratio;
    const double p_down = on_treatment ? config.base_down
                                       : config.base_down / config.hazard_ratio;
    const int duration = rng.uniform_int(0, config.max_duration);
    const int n_obs = std::max(duration, 1);  // at least the baseline visit

    Trajectory tr;
    tr.patient_id = std::to_string(i + 1);
    tr.arm = on_treatment ? "1" : "0";
    int state = 0;
    tr.scores.push_back(state);
    for (int t = 1; t < n_obs; ++t) {
      if (rng.bernoulli(p_up)) {
        ++state;
      } else if (state > 0 && rng.bernoulli(p_down)) {
        --state;
      }
      tr.scores.push_back(state);
      if (state == config.max_score) break;  // fatal: censored here
    }
    ds.trajectories.push_back(std::move(tr));
  }
  return ds;
}

// Symptom-severity model on a 0..6 scale with two-sided steps of size one or
// two. Everyone starts mid-scale at state 2 and is followed for a uniform
// 36..84 visits unless the top state ends observation first.
struct SchizophreniaStepKernel {
  double up1 = 0.10;
  double up2 = 0.03;
  double down1 = 0.05;
  double down2 = 0.015;
};

struct ScaledKernel {
  double up1 = 0.0, up2 = 0.0, down1 = 0.0, down2 = 0.0;
  bool renormalized = false;  // scaled masses exceeded 1 and were rescaled
};

inline ScaledKernel scale_kernel(const SchizophreniaStepKernel& kernel,
                                 double hazard_ratio) {
  ScaledKernel k;
  k.up1 = kernel.up1 * hazard_ratio;
  k.up2 = kernel.up2 * hazard_ratio;
  k.down1 = kernel.down1 / hazard_ratio;
  k.down2 = kernel.down2 / hazard_ratio;
  const double total = k.up1 + k.up2 + k.down1 + k.down2;
  if (total > 1.0) {
    k.up1 /= total;
    k.up2 /= total;
    k.down1 /= total;
    k.down2 /= total;
    k.renormalized = true;
  }
  return k;
}

struct SchizophreniaSimConfig {
  int n_patients = 0;
  double hazard_ratio = 1.0;
  SchizophreniaStepKernel kernel;
  int min_duration = 36;
  int max_duration = 84;
  int max_score = 6;
  int start_state = 2;

  void validate() const {
    if (n_patients < 2 || n_patients % 2 != 0)
      throw ValidationError("severity model needs an even n_patients >= 2");
    if (hazard_ratio < 1.0)
      throw ValidationError("hazard_ratio must be >= 1 (control arm is scaled up)");
    if (kernel.up1 < 0 || kernel.up2 < 0 || kernel.down1 < 0 || kernel.down2 < 0)
      throw ValidationError("step probabilities must be non-negative");
    if (kernel.up1 + kernel.up2 + kernel.down1 + kernel.down2 > 1.0)
      throw ValidationError("base step probabilities must sum to at most 1");
    if (min_duration < 1 || max_duration < min_duration)
      throw ValidationError("need 1 <= min_duration <= max_duration");
    if (max_score < 1) throw ValidationError("max_score must be >= 1");
    if (start_state < 0 || start_state > max_score)
      throw ValidationError("start_state outside the scale");
  }
};

inline TrialDataset simulate_schizophrenia_trial(
    const SchizophreniaSimConfig& config, std::uint64_t seed) {
  config.validate();
  SplitMix64 trial_rng(substream(seed, 0));
  const auto treated = detail::balanced_arms(config.n_patients, trial_rng);
  const ScaledKernel control = scale_kernel(config.kernel, config.hazard_ratio);
  const ScaledKernel treatment = scale_kernel(config.kernel, 1.0);

  TrialDataset ds;
  ds.scale = {0, config.max_score, Polarity::kHigherIsWorse};
  ds.time_unit = "months";
  ds.absorb_at_max = true;
  ds.trajectories.reserve(static_cast<std::size_t>(config.n_patients));
  for (int i = 0; i < config.n_patients; ++i) {
    SplitMix64 rng(substream(seed, static_cast<std::uint64_t>(i) + 1));
    const bool on_treatment = treated[static_cast<std::size_t>(i)];
    const ScaledKernel& k = on_treatment ? treatment : control;
    const int n_obs = rng.uniform_int(config.min_duration, config.max_duration);

    Trajectory tr;
    tr.patient_id = std::to_string(i + 1);
    tr.arm = on_treatment ? "1" : "0";
    int state = config.start_state;
    tr.scores.push_back(state);
    for (int t = 1; t < n_obs; ++t) {
      const double u = rng.uniform01();
      int step = 0;
      if (u < k.up1) step = 1;
      else if (u < k.up1 + k.up2) step = 2;
      else if (u < k.up1 + k.up2 + k.down1) step = -1;
      else if (u < k.up1 + k.up2 + k.down1 + k.down2) step = -2;
      state = std::clamp(state + step, 0, config.max_score);
      tr.scores.push_back(state);
      if (state == config.max_score) break;  // maximal severity: censored here
    }
    ds.trajectories.push_back(std::move(tr));
  }
  return ds;
}

}  // namespace wta
