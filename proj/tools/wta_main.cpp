// Command-line front end: analyze trial files, simulate synthetic trials,
// run power grids, and render plots.
//
// Exit codes: 0 success, 2 usage or input validation failure, 3 analysis
// completed but the test was degenerate (zero variance), 4 internal error.
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wta/wta.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitInternal = 4;

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("WTA_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 1;
}

int default_threads() {
  if (const char* env = std::getenv("WTA_THREADS"))
    return static_cast<int>(std::strtol(env, nullptr, 10));
  return 0;
}

wta::OrdinalScale parse_scale(const std::string& text, const std::string& polarity) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw wta::ValidationError("--scale expects MIN:MAX, e.g. 0:4");
  wta::OrdinalScale s;
  s.min_score = std::stoi(text.substr(0, colon));
  s.max_score = std::stoi(text.substr(colon + 1));
  if (polarity == "worse") s.polarity = wta::Polarity::kHigherIsWorse;
  else if (polarity == "better") s.polarity = wta::Polarity::kHigherIsBetter;
  else throw wta::ValidationError("--polarity expects worse or better");
  s.validate();
  return s;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void write_manifest(const fs::path& path, wta::RunManifest manifest) {
  manifest.timestamp = now_iso8601();
  wta::write_text_file(path.string(), wta::to_json(manifest).dump(2) + "\n");
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct CommonIngestOptions {
  std::string input;
  std::string format = "auto";
  std::string scale_text;
  std::string polarity = "worse";
  std::string time_unit;
  std::string arms_text;
};

wta::TrialDataset load_dataset(const CommonIngestOptions& opts,
                               std::vector<std::string>* warnings) {
  const std::string text = wta::read_text_file(opts.input);
  std::optional<wta::OrdinalScale> scale;
  if (!opts.scale_text.empty()) scale = parse_scale(opts.scale_text, opts.polarity);
  wta::TrialDataset ds;
  if (opts.format == "long") ds = wta::ingest_long_csv(text, scale, warnings);
  else if (opts.format == "wide") ds = wta::ingest_wide_csv(text, scale, warnings);
  else ds = wta::ingest_csv(text, scale, warnings);
  if (opts.scale_text.empty() && warnings)
    warnings->push_back("no --scale given; using observed range [" +
                        std::to_string(ds.scale.min_score) + "," +
                        std::to_string(ds.scale.max_score) + "]");
  if (!opts.time_unit.empty()) ds.time_unit = opts.time_unit;
  return ds;
}

wta::ArmPair resolve_arms(const wta::TrialDataset& ds, const std::string& arms_text) {
  if (arms_text.empty()) return wta::default_arm_pair(ds);
  const auto parts = split_list(arms_text);
  if (parts.size() != 2)
    throw wta::ValidationError("--arms expects two comma-separated labels");
  wta::ArmPair arms{parts[0], parts[1]};
  wta::require_arms(ds, arms);
  return arms;
}

struct AnalyzeOptions {
  CommonIngestOptions ingest;
  std::string method = "wta";
  std::string out_dir;
  int threshold = 1;
  int n_sims = 1000;
  std::uint64_t seed = default_seed();
  bool seed_given = false;
  std::string glyph = "wye";
  std::string title;
  bool json_stdout = false;
};

int cmd_analyze(const AnalyzeOptions& opts, const std::vector<std::string>& argv) {
  std::vector<std::string> warnings;
  wta::TrialDataset raw = load_dataset(opts.ingest, &warnings);
  print_warnings(warnings);
  const wta::TrialDataset ds = wta::normalize_scale(raw);
  const wta::ArmPair arms = resolve_arms(ds, opts.ingest.arms_text);

  fs::create_directories(opts.out_dir);
  const fs::path out_dir(opts.out_dir);

  wta::PlotOptions plot;
  plot.glyph = opts.glyph == "tick" ? wta::CensorGlyph::kTick : wta::CensorGlyph::kWye;
  plot.title = opts.title;
  plot.x_label = "Time (" + ds.time_unit + ")";

  wta::RunManifest manifest;
  manifest.subcommand = "analyze";
  manifest.argv = argv;
  manifest.seed = opts.seed;
  manifest.inputs = {opts.ingest.input};
  manifest.config = {{"method", opts.method},
                     {"threshold", opts.threshold},
                     {"n_sims", opts.n_sims},
                     {"arms", {arms.a, arms.b}},
                     {"scale", {raw.scale.min_score, raw.scale.max_score}},
                     {"normalized_range", ds.scale.range()},
                     {"censor_glyph", opts.glyph}};

  ordered_json result_json;
  bool degenerate = false;

  if (opts.method == "km") {
    const auto curves = wta::km_estimate(ds, opts.threshold);
    const auto test = wta::logrank_test(ds, opts.threshold, arms);
    degenerate = test.degenerate;
    result_json = wta::to_json(test);
    for (const auto& [arm, curve] : curves) {
      const fs::path p = out_dir / ("km_curve_" + arm + ".csv");
      wta::write_text_file(p.string(), wta::export_survival_csv(curve));
      manifest.outputs.push_back(p.string());
    }
    const fs::path svg = out_dir / "km_plot.svg";
    wta::write_text_file(svg.string(),
                         wta::km_plot_svg(curves, ds.max_time(), plot));
    manifest.outputs.push_back(svg.string());
  } else if (opts.method == "wta" || opts.method == "wta-sim") {
    const auto curve = wta::wta_curve(ds);
    if (opts.method == "wta") {
      const auto test = wta::weighted_logrank(ds, arms);
      degenerate = test.degenerate;
      result_json = wta::to_json(test);
    } else {
      const auto r = wta::computational_pvalue(ds, opts.n_sims, opts.seed, arms);
      degenerate = r.test.degenerate;
      result_json = wta::to_json(r);
    }
    const fs::path curve_csv = out_dir / "wta_curve.csv";
    wta::write_text_file(curve_csv.string(), wta::export_wta_curve_csv(curve));
    manifest.outputs.push_back(curve_csv.string());
    const fs::path svg = out_dir / "wta_plot.svg";
    wta::write_text_file(svg.string(), wta::wta_plot_svg(curve, plot));
    manifest.outputs.push_back(svg.string());
  } else if (opts.method == "gee") {
    const auto fit = wta::fit_gee(ds, arms);
    degenerate = fit.degenerate;
    result_json = wta::to_json(fit);
  } else {
    throw wta::ValidationError("unknown method '" + opts.method +
                               "' (expected km, wta, wta-sim, or gee)");
  }

  const fs::path result_path = out_dir / "result.json";
  wta::write_text_file(result_path.string(), result_json.dump(2) + "\n");
  manifest.outputs.push_back(result_path.string());
  write_manifest(out_dir / "manifest.json", manifest);

  if (opts.json_stdout) std::cout << result_json.dump(2) << '\n';
  else if (result_json.contains("p_value"))
    std::cout << opts.method << ": p = " << result_json["p_value"]
              << (degenerate ? " (degenerate)" : "") << '\n';
  else
    std::cout << opts.method << ": p = " << result_json["wald_p"]
              << (degenerate ? " (degenerate)" : "") << '\n';
  return degenerate ? kExitDegenerate : kExitOk;
}

struct SimulateOptions {
  std::string model = "toxicity";
  int n = 100;
  double hr = 1.0;
  std::uint64_t seed = default_seed();
  std::string out_file;
  std::string format = "wide";
  bool json_stdout = false;
};

int cmd_simulate(const SimulateOptions& opts, const std::vector<std::string>& argv) {
  const wta::SimModel model = wta::parse_model(opts.model);
  wta::TrialDataset ds;
  if (model == wta::SimModel::kToxicity) {
    wta::ToxicitySimConfig config;
    config.n_patients = opts.n;
    config.hazard_ratio = opts.hr;
    ds = wta::simulate_toxicity_trial(config, opts.seed);
  } else {
    wta::SchizophreniaSimConfig config;
    config.n_patients = opts.n;
    config.hazard_ratio = opts.hr;
    if (wta::scale_kernel(config.kernel, config.hazard_ratio).renormalized)
      std::cerr << "warning: control-arm step probabilities exceeded 1 and were "
                   "renormalized\n";
    ds = wta::simulate_schizophrenia_trial(config, opts.seed);
  }

  if (const auto parent = fs::path(opts.out_file).parent_path(); !parent.empty())
    fs::create_directories(parent);
  wta::write_text_file(opts.out_file, opts.format == "long"
                                          ? wta::export_long_csv(ds)
                                          : wta::export_wide_csv(ds));

  wta::RunManifest manifest;
  manifest.subcommand = "simulate";
  manifest.argv = argv;
  manifest.seed = opts.seed;
  manifest.config = {{"model", wta::model_name(model)},
                     {"n", opts.n},
                     {"hr", opts.hr},
                     {"format", opts.format}};
  manifest.outputs = {opts.out_file};
  write_manifest(opts.out_file + ".manifest.json", manifest);

  ordered_json summary;
  summary["model"] = wta::model_name(model);
  summary["n"] = static_cast<int>(ds.trajectories.size());
  summary["max_time"] = ds.max_time();
  summary["arms"] = ds.arm_labels();
  summary["out"] = opts.out_file;
  if (opts.json_stdout) std::cout << summary.dump(2) << '\n';
  else
    std::cout << "wrote " << opts.out_file << " (" << ds.trajectories.size()
              << " patients, max time " << ds.max_time() << ")\n";
  return kExitOk;
}

struct PowerOptions {
  std::string model = "toxicity";
  std::string sizes_text = "100";
  std::string hrs_text = "1.0";
  std::string methods_text = "km,wta-analytic,wta-computational,gee";
  int replicates = 1000;
  double alpha = 0.05;
  int inner_sims = 200;
  int threshold = 1;
  std::uint64_t seed = default_seed();
  int threads = default_threads();
  bool keep_pvalues = false;
  std::string out_dir;
  bool json_stdout = false;
};

int cmd_power(const PowerOptions& opts, const std::vector<std::string>& argv) {
  wta::PowerGrid grid;
  grid.model = wta::parse_model(opts.model);
  for (const auto& s : split_list(opts.sizes_text))
    grid.sample_sizes.push_back(std::stoi(s));
  for (const auto& s : split_list(opts.hrs_text))
    grid.hazard_ratios.push_back(std::stod(s));
  for (const auto& s : split_list(opts.methods_text))
    grid.methods.push_back(wta::parse_method(s));
  grid.replicates = opts.replicates;
  grid.alpha = opts.alpha;
  grid.inner_sims = opts.inner_sims;
  grid.km_threshold = opts.threshold;
  grid.seed = opts.seed;
  grid.threads = opts.threads;
  grid.keep_pvalues = opts.keep_pvalues;

  const auto result = wta::run_power_study(grid);

  fs::create_directories(opts.out_dir);
  const fs::path out_dir(opts.out_dir);
  const fs::path csv = out_dir / "power.csv";
  wta::write_text_file(csv.string(), wta::export_power_csv(result));
  const fs::path svg = out_dir / "power_plot.svg";
  wta::write_text_file(svg.string(), wta::power_plot_svg(result));

  wta::RunManifest manifest;
  manifest.subcommand = "power";
  manifest.argv = argv;
  manifest.seed = opts.seed;
  manifest.config = {{"model", opts.model},
                     {"sizes", opts.sizes_text},
                     {"hrs", opts.hrs_text},
                     {"methods", opts.methods_text},
                     {"replicates", opts.replicates},
                     {"alpha", opts.alpha},
                     {"inner_sims", opts.inner_sims},
                     {"threshold", opts.threshold},
                     {"threads", opts.threads}};
  manifest.outputs = {csv.string(), svg.string()};

  if (opts.keep_pvalues) {
    std::ostringstream pv;
    pv.precision(17);
    pv << "model,n,hr,method,replicate,p_value\n";
    for (const auto& cell : result.cells)
      for (std::size_t r = 0; r < cell.pvalues.size(); ++r)
        pv << wta::model_name(cell.model) << ',' << cell.n << ','
           << cell.hazard_ratio << ',' << wta::method_name(cell.method) << ','
           << r << ',' << cell.pvalues[r] << '\n';
    const fs::path pv_path = out_dir / "pvalues.csv";
    wta::write_text_file(pv_path.string(), pv.str());
    manifest.outputs.push_back(pv_path.string());
  }
  write_manifest(out_dir / "manifest.json", manifest);

  if (opts.json_stdout) {
    ordered_json j = ordered_json::array();
    for (const auto& c : result.cells)
      j.push_back({{"model", wta::model_name(c.model)},
                   {"n", c.n},
                   {"hr", c.hazard_ratio},
                   {"method", wta::method_name(c.method)},
                   {"power", c.power},
                   {"mc_se", c.mc_se},
                   {"replicates", c.replicates}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "wrote " << csv.string() << " (" << result.cells.size()
              << " cells)\n";
  }
  return kExitOk;
}

struct PlotOptions2 {
  CommonIngestOptions ingest;
  std::string type = "wta";
  std::string out_file;
  int threshold = 1;
  std::string glyph = "wye";
  std::string title;
};

int cmd_plot(const PlotOptions2& opts, const std::vector<std::string>& argv) {
  std::vector<std::string> warnings;
  const wta::TrialDataset ds = wta::normalize_scale(load_dataset(opts.ingest, &warnings));
  print_warnings(warnings);

  wta::PlotOptions plot;
  plot.glyph = opts.glyph == "tick" ? wta::CensorGlyph::kTick : wta::CensorGlyph::kWye;
  plot.title = opts.title;
  plot.x_label = "Time (" + ds.time_unit + ")";

  std::string svg;
  if (opts.type == "km")
    svg = wta::km_plot_svg(wta::km_estimate(ds, opts.threshold), ds.max_time(), plot);
  else if (opts.type == "wta")
    svg = wta::wta_plot_svg(wta::wta_curve(ds), plot);
  else
    throw wta::ValidationError("unknown plot type '" + opts.type +
                               "' (expected km or wta)");
  if (const auto parent = fs::path(opts.out_file).parent_path(); !parent.empty())
    fs::create_directories(parent);
  wta::write_text_file(opts.out_file, svg);

  wta::RunManifest manifest;
  manifest.subcommand = "plot";
  manifest.argv = argv;
  manifest.inputs = {opts.ingest.input};
  manifest.config = {{"type", opts.type},
                     {"threshold", opts.threshold},
                     {"censor_glyph", opts.glyph}};
  manifest.outputs = {opts.out_file};
  write_manifest(opts.out_file + ".manifest.json", manifest);
  std::cout << "wrote " << opts.out_file << '\n';
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args);

int cmd_rerun(const std::string& manifest_path) {
  const auto text = wta::read_text_file(manifest_path);
  const auto j = nlohmann::json::parse(text);
  if (!j.contains("argv") || !j["argv"].is_array() || j["argv"].empty())
    throw wta::ValidationError("manifest has no argv to replay");
  std::vector<std::string> argv;
  for (const auto& a : j["argv"]) argv.push_back(a.get<std::string>());
  return run_cli(argv);
}

void add_ingest_options(CLI::App* cmd, CommonIngestOptions& opts) {
  cmd->add_option("--in", opts.input, "input trial CSV")->required();
  cmd->add_option("--format", opts.format, "input layout: auto, long, or wide")
      ->check(CLI::IsMember({"auto", "long", "wide"}));
  cmd->add_option("--scale", opts.scale_text,
                  "declared ordinal scale MIN:MAX (default: observed range)");
  cmd->add_option("--polarity", opts.polarity,
                  "worse = higher score is worse (default), better = reflected "
                  "during normalization")
      ->check(CLI::IsMember({"worse", "better"}));
  cmd->add_option("--time-unit", opts.time_unit, "label for the time axis");
  cmd->add_option("--arms", opts.arms_text,
                  "two arm labels A,B (default: the two labels in sorted order)");
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{
      "Weighted trajectory analysis: ordinal trial curves, weighted and "
      "standard logrank tests, a simulation-based p-value, a GEE comparator, "
      "trial simulators, and a Monte Carlo power harness.\n"
      "Environment: WTA_SEED sets the default --seed, WTA_THREADS caps "
      "worker threads."};
  app.require_subcommand(1);

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand(
      "analyze", "run a test on a trial CSV and write results and plots");
  add_ingest_options(analyze, an.ingest);
  analyze->add_option("--method", an.method,
                      "km (logrank on thresholded endpoint), wta (weighted "
                      "logrank), wta-sim (simulation p-value), or gee")
      ->check(CLI::IsMember({"km", "wta", "wta-sim", "gee"}));
  analyze->add_option("--out", an.out_dir, "output directory")->required();
  analyze->add_option("--threshold", an.threshold,
                      "event threshold on the normalized scale (km)");
  analyze->add_option("--n-sims", an.n_sims, "null simulations (wta-sim)");
  analyze->add_option("--seed", an.seed, "root seed (wta-sim)");
  analyze->add_option("--censor-glyph", an.glyph, "censor mark: wye or tick")
      ->check(CLI::IsMember({"wye", "tick"}));
  analyze->add_option("--title", an.title, "plot title");
  analyze->add_flag("--json", an.json_stdout, "print the result JSON to stdout");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic trial CSV");
  simulate->add_option("--model", sim.model, "toxicity or schizophrenia")
      ->required();
  simulate->add_option("--n", sim.n, "number of patients (even)")->required();
  simulate->add_option("--hr", sim.hr, "hazard ratio applied to the control arm");
  simulate->add_option("--seed", sim.seed, "root seed");
  simulate->add_option("--out", sim.out_file, "output CSV path")->required();
  simulate->add_option("--format", sim.format, "wide (default) or long")
      ->check(CLI::IsMember({"wide", "long"}));
  simulate->add_flag("--json", sim.json_stdout, "print a summary JSON to stdout");

  PowerOptions pw;
  auto* power = app.add_subcommand(
      "power", "Monte Carlo rejection rates over a (n, hazard ratio) grid");
  power->add_option("--model", pw.model, "toxicity or schizophrenia")->required();
  power->add_option("--sizes", pw.sizes_text, "sample sizes, e.g. 100,200,300")
      ->required();
  power->add_option("--hrs", pw.hrs_text, "hazard ratios, e.g. 1.0,1.2,1.4")
      ->required();
  power->add_option("--methods", pw.methods_text,
                    "comma list of km, wta-analytic, wta-computational, gee");
  power->add_option("--replicates", pw.replicates, "trials per cell");
  power->add_option("--alpha", pw.alpha, "rejection level");
  power->add_option("--inner-sims", pw.inner_sims,
                    "null simulations per computational p-value");
  power->add_option("--threshold", pw.threshold, "event threshold for km");
  power->add_option("--seed", pw.seed, "root seed");
  power->add_option("--threads", pw.threads, "worker threads (0 = hardware)");
  power->add_flag("--keep-pvalues", pw.keep_pvalues,
                  "also write per-replicate p-values");
  power->add_option("--out", pw.out_dir, "output directory")->required();
  power->add_flag("--json", pw.json_stdout, "print the cell table to stdout");
  power->set_config("--config", "", "read options from an INI/TOML file");

  PlotOptions2 pl;
  auto* plot = app.add_subcommand("plot", "render a curve SVG from a trial CSV");
  add_ingest_options(plot, pl.ingest);
  plot->add_option("--type", pl.type, "wta or km")
      ->check(CLI::IsMember({"wta", "km"}));
  plot->add_option("--out", pl.out_file, "output SVG path")->required();
  plot->add_option("--threshold", pl.threshold, "event threshold (km)");
  plot->add_option("--censor-glyph", pl.glyph, "censor mark: wye or tick")
      ->check(CLI::IsMember({"wye", "tick"}));
  plot->add_option("--title", pl.title, "plot title");

  std::string rerun_manifest;
  auto* rerun = app.add_subcommand(
      "rerun", "replay a previous invocation from its manifest.json");
  rerun->add_option("manifest", rerun_manifest, "path to manifest.json")
      ->required();

  // CLI11 parses argv-style reversed vectors.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  reversed.pop_back();  // drop program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (analyze->parsed()) return cmd_analyze(an, args);
  if (simulate->parsed()) return cmd_simulate(sim, args);
  if (power->parsed()) return cmd_power(pw, args);
  if (plot->parsed()) return cmd_plot(pl, args);
  if (rerun->parsed()) return cmd_rerun(rerun_manifest);
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return run_cli(args);
  } catch (const wta::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}
