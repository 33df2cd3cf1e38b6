// Monte Carlo power/Type-I-error harness over (model, n, hazard ratio,
// method) grids.
//
// Each replicate simulates one trial and runs the requested tests; a cell's
// power is the fraction of replicates with p < alpha. Replicate seeds are
// derived from (root seed, n, hazard ratio, replicate index) alone, so a
// cell's result does not depend on the rest of the grid, the thread count,
// or scheduling. Degenerate test results never count as rejections.
#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wta/gee.hpp"
#include "wta/km.hpp"
#include "wta/markov_null.hpp"
#include "wta/rng.hpp"
#include "wta/stats.hpp"
#include "wta/trial_sim.hpp"
#include "wta/weighted_logrank.hpp"

namespace wta {

enum class Method { kKm, kWtaAnalytic, kWtaComputational, kGee };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::kKm: return "km";
    case Method::kWtaAnalytic: return "wta-analytic";
    case Method::kWtaComputational: return "wta-computational";
    case Method::kGee: return "gee";
  }
  throw ValidationError("unknown method");
}

inline Method parse_method(std::string_view name) {
  if (name == "km" || name == "logrank-on-binary") return Method::kKm;
  if (name == "wta-analytic" || name == "wta") return Method::kWtaAnalytic;
  if (name == "wta-computational" || name == "wta-sim")
    return Method::kWtaComputational;
  if (name == "gee") return Method::kGee;
  throw ValidationError("unknown method '" + std::string(name) +
                        "' (expected km, wta-analytic, wta-computational, or gee)");
}

enum class SimModel { kToxicity, kSchizophrenia };

inline std::string model_name(SimModel m) {
  return m == SimModel::kToxicity ? "toxicity" : "schizophrenia";
}

inline SimModel parse_model(std::string_view name) {
  if (name == "toxicity" || name == "tox") return SimModel::kToxicity;
  if (name == "schizophrenia" || name == "scz") return SimModel::kSchizophrenia;
  throw ValidationError("unknown model '" + std::string(name) +
                        "' (expected toxicity or schizophrenia)");
}

struct PowerGrid {
  SimModel model = SimModel::kToxicity;
  std::vector<int> sample_sizes;
  std::vector<double> hazard_ratios;
  std::vector<Method> methods;
  int replicates = 1000;
  double alpha = 0.05;
  int inner_sims = 200;       // null simulations per computational p-value
  int km_threshold = 1;       // binary endpoint: first score >= threshold
  std::uint64_t seed = 0;
  int threads = 0;            // 0 = hardware concurrency
  bool keep_pvalues = false;  // retain per-replicate p-values per cell

  void validate() const {
    if (sample_sizes.empty()) throw ValidationError("no sample sizes in grid");
    if (hazard_ratios.empty()) throw ValidationError("no hazard ratios in grid");
    if (methods.empty()) throw ValidationError("no methods in grid");
    if (replicates <= 0) throw ValidationError("replicates must be positive");
    if (alpha <= 0.0 || alpha >= 1.0) throw ValidationError("alpha outside (0,1)");
    if (inner_sims <= 0) throw ValidationError("inner_sims must be positive");
    for (int n : sample_sizes)
      if (n < 4 || n % 2 != 0)
        throw ValidationError("sample sizes must be even and at least 4");
    for (double hr : hazard_ratios)
      if (hr < 1.0) throw ValidationError("hazard ratios must be >= 1");
  }
};

struct PowerCell {
  SimModel model;
  int n = 0;
  double hazard_ratio = 1.0;
  Method method;
  double power = 0.0;
  double mc_se = 0.0;
  int replicates = 0;
  std::vector<double> pvalues;  // filled only when keep_pvalues is set
};

struct PowerResult {
  PowerGrid grid;
  std::vector<PowerCell> cells;  // ordered by (n, hazard ratio, method)
};

namespace detail {

// Replicate seed: a pure function of the root seed and the cell coordinates,
// so any (n, hr, rep) triple yields the same trial in any grid.
inline std::uint64_t replicate_seed(std::uint64_t root, SimModel model, int n,
                                    double hr, int rep) {
  std::uint64_t s = substream(root, model == SimModel::kToxicity ? 1 : 2);
  s = substream(s, static_cast<std::uint64_t>(n));
  s = substream(s, std::bit_cast<std::uint64_t>(hr));
  return substream(s, static_cast<std::uint64_t>(rep));
}

inline TrialDataset simulate_grid_trial(SimModel model, int n, double hr,
                                        std::uint64_t seed) {
  if (model == SimModel::kToxicity) {
    ToxicitySimConfig config;
    config.n_patients = n;
    config.hazard_ratio = hr;
    return simulate_toxicity_trial(config, seed);
  }
  SchizophreniaSimConfig config;
  config.n_patients = n;
  config.hazard_ratio = hr;
  return simulate_schizophrenia_trial(config, seed);
}

// Streams used by the harness on top of a replicate's trial seed; patient
// streams inside the simulators use small indices, so stay clear of them.
constexpr std::uint64_t kComputationalStream = 1'000'003;

}  // namespace detail

// p-values for every requested method on one simulated trial, in grid
// method order.
inline std::vector<double> replicate_pvalues(const PowerGrid& grid,
                                             const TrialDataset& ds,
                                             std::uint64_t trial_seed) {
  const ArmPair arms = default_arm_pair(ds);
  std::vector<double> out;
  out.reserve(grid.methods.size());
  for (Method m : grid.methods) {
    switch (m) {
      case Method::kKm: {
        const auto r = logrank_test(ds, grid.km_threshold, arms);
        out.push_back(r.degenerate ? 1.0 : r.p_value);
        break;
      }
      case Method::kWtaAnalytic: {
        const auto r = weighted_logrank(ds, arms);
        out.push_back(r.degenerate ? 1.0 : r.p_value);
        break;
      }
      case Method::kWtaComputational: {
        const auto r = computational_pvalue(
            ds, grid.inner_sims,
            substream(trial_seed, detail::kComputationalStream), arms);
        out.push_back(r.test.degenerate ? 1.0 : r.test.p_value);
        break;
      }
      case Method::kGee: {
        const auto r = fit_gee(ds, arms);
        out.push_back(r.degenerate ? 1.0 : r.wald.p_value);
        break;
      }
    }
  }
  return out;
}

inline PowerResult run_power_study(const PowerGrid& grid) {
  grid.validate();
  PowerResult result;
  result.grid = grid;

  int thread_count = grid.threads > 0
                         ? grid.threads
                         : static_cast<int>(std::thread::hardware_concurrency());
  if (thread_count < 1) thread_count = 1;

  for (int n : grid.sample_sizes) {
    for (double hr : grid.hazard_ratios) {
      // p-value matrix for this cell, replicate-major: deterministic
      // regardless of which thread fills which row.
      const auto n_methods = grid.methods.size();
      std::vector<double> pmatrix(static_cast<std::size_t>(grid.replicates) *
                                  n_methods);
      auto run_replicate = [&](int rep) {
        const std::uint64_t seed =
            detail::replicate_seed(grid.seed, grid.model, n, hr, rep);
        const auto ds = detail::simulate_grid_trial(grid.model, n, hr, seed);
        const auto ps = replicate_pvalues(grid, ds, seed);
        std::copy(ps.begin(), ps.end(),
                  pmatrix.begin() + static_cast<std::size_t>(rep) * n_methods);
      };
      if (thread_count == 1) {
        for (int rep = 0; rep < grid.replicates; ++rep) run_replicate(rep);
      } else {
        std::atomic<int> next{0};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(thread_count));
        for (int w = 0; w < thread_count; ++w)
          workers.emplace_back([&] {
            for (int rep = next.fetch_add(1); rep < grid.replicates;
                 rep = next.fetch_add(1))
              run_replicate(rep);
          });
        for (auto& t : workers) t.join();
      }
      for (std::size_t m = 0; m < n_methods; ++m) {
        PowerCell cell;
        cell.model = grid.model;
        cell.n = n;
        cell.hazard_ratio = hr;
        cell.method = grid.methods[m];
        cell.replicates = grid.replicates;
        int rejections = 0;
        for (int rep = 0; rep < grid.replicates; ++rep) {
          const double p = pmatrix[static_cast<std::size_t>(rep) * n_methods + m];
          rejections += p < grid.alpha;
          if (grid.keep_pvalues) cell.pvalues.push_back(p);
        }
        cell.power = static_cast<double>(rejections) / grid.replicates;
        cell.mc_se = binomial_se(cell.power, grid.replicates);
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

inline std::string export_power_csv(const PowerResult& result) {
  std::ostringstream out;
  out << "model,n,hr,method,power,mc_se,replicates\n";
  out.precision(17);
  for (const auto& c : result.cells)
    out << model_name(c.model) << ',' << c.n << ',' << c.hazard_ratio << ','
        << method_name(c.method) << ',' << c.power << ',' << c.mc_se << ','
        << c.replicates << '\n';
  return out.str();
}

}  // namespace wta
