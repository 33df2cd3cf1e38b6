// JSON and CSV serialization of results, plus the run manifest written next
// to every output set. Kept separate so the analysis headers stay free of
// the JSON dependency.
#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wta/gee.hpp"
#include "wta/km.hpp"
#include "wta/markov_null.hpp"
#include "wta/power.hpp"
#include "wta/test_result.hpp"
#include "wta/version.hpp"
#include "wta/wta_curve.hpp"

namespace wta {

inline nlohmann::ordered_json to_json(const TestResult& r) {
  nlohmann::ordered_json j;
  j["method"] = r.method;
  j["z"] = r.z;
  j["chi_square"] = r.chi_square;
  j["p_value"] = r.p_value;
  j["df"] = 1;
  j["degenerate"] = r.degenerate;
  auto contributions = nlohmann::ordered_json::array();
  for (const auto& c : r.contributions) {
    nlohmann::ordered_json e;
    e["time"] = c.time;
    e["observed"] = c.observed;
    e["expected"] = c.expected;
    e["variance"] = c.variance;
    contributions.push_back(std::move(e));
  }
  j["contributions"] = std::move(contributions);
  return j;
}

inline nlohmann::ordered_json to_json(const ComputationalResult& r) {
  auto j = to_json(r.test);
  j["n_sims"] = r.n_sims;
  j["seed"] = r.seed;
  j["observed_statistic"] = r.observed_statistic;
  j["null_quantiles"] = r.null_quantiles;
  return j;
}

inline nlohmann::ordered_json to_json(const GeeFit& fit) {
  nlohmann::ordered_json j;
  j["method"] = "gee";
  j["beta"] = {fit.intercept, fit.treatment_effect};
  j["alpha"] = fit.alpha;
  j["phi"] = fit.phi;
  j["robust_se"] = fit.degenerate ? 0.0 : std::sqrt(fit.robust_cov[1][1]);
  j["robust_cov"] = {{fit.robust_cov[0][0], fit.robust_cov[0][1]},
                     {fit.robust_cov[1][0], fit.robust_cov[1][1]}};
  j["wald_chi_square"] = fit.wald.chi_square;
  j["wald_p"] = fit.wald.p_value;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["degenerate"] = fit.degenerate;
  return j;
}

// One file per arm: time,survival,at_risk,events,censored. A leading time-0
// row anchors the curve at survival 1 unless an event already sits there.
inline std::string export_survival_csv(const SurvivalCurve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "time,survival,at_risk,events,censored\n";
  std::map<int, std::pair<int, int>> rows;  // time -> (events, censored)
  for (const auto& s : curve.steps) rows[s.time].first = s.events;
  for (const auto& m : curve.censor_marks) rows[m.time].second = m.count;
  if (!rows.count(0)) rows[0] = {0, 0};
  double survival = 1.0;
  int at_risk = curve.n0;
  for (const auto& [t, ec] : rows) {
    for (const auto& s : curve.steps)
      if (s.time == t) survival = s.survival;
    out << t << ',' << survival << ',' << at_risk << ',' << ec.first << ','
        << ec.second << '\n';
    at_risk -= ec.first + ec.second;
  }
  return out.str();
}

inline std::string export_wta_curve_csv(const WeightedTrajectoryCurve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "arm,time,health_status,at_risk,net_change,censored\n";
  for (const auto& arm : curve.arms) {
    std::map<int, int> censored;
    for (const auto& m : arm.censor_marks) censored[m.time] = m.count;
    for (const auto& s : arm.steps)
      out << arm.arm << ',' << s.time << ',' << s.health_status << ','
          << s.at_risk << ',' << s.net_change << ','
          << (censored.count(s.time) ? censored.at(s.time) : 0) << '\n';
  }
  return out.str();
}

struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;     // exact invocation, for replay
  nlohmann::ordered_json config;     // resolved options after defaults/env
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string timestamp;             // the only field excluded from replay
                                     // comparisons
};

inline nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["tool"] = "wta";
  j["version"] = kVersion;
  j["subcommand"] = m.subcommand;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["timestamp"] = m.timestamp;
  return j;
}

}  // namespace wta
