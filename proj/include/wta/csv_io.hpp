// CSV ingestion and export.
//
// Two layouts are supported:
//   long:  patient_id,arm,time,score      one row per observation
//   wide:  patient_id,arm,duration,0,1,.. one row per patient, one column per
//          time index, blank once observation has stopped
//
// Ingestion validates per-patient contiguity (times 0..T with no holes),
// score range against the declared scale, and arm consistency. Messages
// carry 1-based line numbers. Non-fatal oddities (ignored status column,
// duration column disagreeing with the observed row length) are appended to
// the caller's warning list.
#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wta/trial_data.hpp"

namespace wta {

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  while (!out.empty() && trim(out.back()).empty()) out.pop_back();
  return out;
}

inline int parse_int(std::string_view field, std::size_t line_no,
                     const char* what) {
  int value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ValidationError("line " + std::to_string(line_no) + ": bad " + what +
                          " '" + std::string(field) + "'");
  return value;
}

inline OrdinalScale infer_or_declared(const std::optional<OrdinalScale>& declared,
                                      int observed_min, int observed_max) {
  if (declared) {
    declared->validate();
    return *declared;
  }
  OrdinalScale s{observed_min, std::max(observed_max, observed_min + 1),
                 Polarity::kHigherIsWorse};
  return s;
}

inline void check_score_range(int score, const std::optional<OrdinalScale>& scale,
                              std::size_t line_no) {
  if (scale && (score < scale->min_score || score > scale->max_score))
    throw ValidationError("line " + std::to_string(line_no) + ": score " +
                          std::to_string(score) + " outside declared scale [" +
                          std::to_string(scale->min_score) + "," +
                          std::to_string(scale->max_score) + "]");
}

}  // namespace detail

inline TrialDataset ingest_long_csv(std::string_view text,
                                    std::optional<OrdinalScale> scale = {},
                                    std::vector<std::string>* warnings = nullptr) {
  using namespace detail;
  const auto lines = split_lines(text);
  if (lines.empty()) throw ValidationError("empty input");
  auto header = split_fields(lines[0]);
  bool has_status = false;
  if (header.size() == 5 && header[4] == "status") {
    has_status = true;
    if (warnings) warnings->push_back("status column ignored");
    header.pop_back();
  }
  if (header.size() != 4 || header[0] != "patient_id" || header[1] != "arm" ||
      header[2] != "time" || header[3] != "score")
    throw ValidationError("line 1: expected header patient_id,arm,time,score");

  struct Row { int time; int score; std::size_t line_no; };
  std::vector<std::string> order;                       // first-appearance order
  std::map<std::string, std::string> arm_of;
  std::map<std::string, std::vector<Row>> rows_of;
  int observed_min = 0, observed_max = 0;
  bool any = false;

  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto f = split_fields(lines[i]);
    if (f.size() != header.size() + (has_status ? 1 : 0))
      throw ValidationError("line " + std::to_string(line_no) +
                            ": expected " + std::to_string(header.size() + (has_status ? 1 : 0)) +
                            " fields, found " + std::to_string(f.size()));
    std::string id(f[0]);
    std::string arm(f[1]);
    if (id.empty())
      throw ValidationError("line " + std::to_string(line_no) + ": empty patient_id");
    const int time = parse_int(f[2], line_no, "time");
    const int score = parse_int(f[3], line_no, "score");
    if (time < 0)
      throw ValidationError("line " + std::to_string(line_no) + ": negative time");
    check_score_range(score, scale, line_no);
    auto [it, inserted] = arm_of.try_emplace(id, arm);
    if (inserted) order.push_back(id);
    else if (it->second != arm)
      throw ValidationError("line " + std::to_string(line_no) + ": patient " + id +
                            " appears in arms '" + it->second + "' and '" + arm + "'");
    rows_of[id].push_back({time, score, line_no});
    observed_min = any ? std::min(observed_min, score) : score;
    observed_max = any ? std::max(observed_max, score) : score;
    any = true;
  }
  if (!any) throw ValidationError("no data rows");

  TrialDataset ds;
  ds.scale = infer_or_declared(scale, observed_min, observed_max);
  for (const auto& id : order) {
    auto& rows = rows_of[id];
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.time < b.time; });
    Trajectory tr;
    tr.patient_id = id;
    tr.arm = arm_of[id];
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (k > 0 && rows[k].time == rows[k - 1].time)
        throw ValidationError("line " + std::to_string(rows[k].line_no) +
                              ": duplicate time " + std::to_string(rows[k].time) +
                              " for patient " + id);
      if (rows[k].time != static_cast<int>(k))
        throw ValidationError("patient " + id +
                              ": observation times are not contiguous from 0 (missing time " +
                              std::to_string(k) + ")");
      tr.scores.push_back(rows[k].score);
    }
    ds.trajectories.push_back(std::move(tr));
  }
  ds.validate();
  return ds;
}

inline TrialDataset ingest_wide_csv(std::string_view text,
                                    std::optional<OrdinalScale> scale = {},
                                    std::vector<std::string>* warnings = nullptr) {
  using namespace detail;
  const auto lines = split_lines(text);
  if (lines.empty()) throw ValidationError("empty input");
  const auto header = split_fields(lines[0]);
  if (header.size() < 4 || header[0] != "patient_id" || header[1] != "arm" ||
      header[2] != "duration")
    throw ValidationError("line 1: expected header patient_id,arm,duration,0,1,...");
  for (std::size_t c = 3; c < header.size(); ++c) {
    const int t = parse_int(header[c], 1, "time column");
    if (t != static_cast<int>(c) - 3)
      throw ValidationError("line 1: time columns must run 0,1,2,...");
  }

  TrialDataset ds;
  int observed_min = 0, observed_max = 0;
  bool any = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty()) continue;
    const auto f = split_fields(lines[i]);
    if (f.size() > header.size() || f.size() < 4)
      throw ValidationError("line " + std::to_string(line_no) + ": expected at most " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(f.size()));
    Trajectory tr;
    tr.patient_id = std::string(f[0]);
    tr.arm = std::string(f[1]);
    if (tr.patient_id.empty())
      throw ValidationError("line " + std::to_string(line_no) + ": empty patient_id");
    const int duration = parse_int(f[2], line_no, "duration");
    bool ended = false;
    for (std::size_t c = 3; c < f.size(); ++c) {
      if (f[c].empty()) {
        ended = true;
        continue;
      }
      if (ended)
        throw ValidationError("line " + std::to_string(line_no) + ": hole at time " +
                              std::to_string(tr.scores.size()) + " for patient " +
                              tr.patient_id);
      const int score = parse_int(f[c], line_no, "score");
      check_score_range(score, scale, line_no);
      tr.scores.push_back(score);
      observed_min = any ? std::min(observed_min, score) : score;
      observed_max = any ? std::max(observed_max, score) : score;
      any = true;
    }
    if (tr.scores.empty())
      throw ValidationError("line " + std::to_string(line_no) + ": patient " +
                            tr.patient_id + " has no observations");
    if (duration != static_cast<int>(tr.scores.size()) && warnings)
      warnings->push_back("line " + std::to_string(line_no) + ": duration " +
                          std::to_string(duration) + " does not match " +
                          std::to_string(tr.scores.size()) +
                          " observed values for patient " + tr.patient_id);
    ds.trajectories.push_back(std::move(tr));
  }
  if (!any) throw ValidationError("no data rows");
  ds.scale = infer_or_declared(scale, observed_min, observed_max);
  ds.validate();
  // A patient can only hold one row here, so cross-arm duplicates surface as
  // duplicate ids in validate(); nothing further to check.
  return ds;
}

inline std::string export_long_csv(const TrialDataset& ds) {
  std::ostringstream out;
  out << "patient_id,arm,time,score\n";
  for (const auto& tr : ds.trajectories)
    for (std::size_t t = 0; t < tr.scores.size(); ++t)
      out << tr.patient_id << ',' << tr.arm << ',' << t << ',' << tr.scores[t] << '\n';
  return out.str();
}

inline std::string export_wide_csv(const TrialDataset& ds) {
  std::ostringstream out;
  out << "patient_id,arm,duration";
  const int max_t = ds.max_time();
  for (int t = 0; t <= max_t; ++t) out << ',' << t;
  out << '\n';
  for (const auto& tr : ds.trajectories) {
    out << tr.patient_id << ',' << tr.arm << ',' << tr.scores.size();
    for (int t = 0; t <= max_t; ++t) {
      out << ',';
      if (tr.observed_at(t)) out << tr.scores[t];
    }
    out << '\n';
  }
  return out.str();
}

// Header-based format detection for files coming through the command line.
enum class CsvLayout { kLong, kWide };

inline CsvLayout detect_csv_layout(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw ValidationError("empty input");
  const auto header = detail::split_fields(lines[0]);
  if (header.size() >= 3 && header[0] == "patient_id" && header[1] == "arm") {
    if (header[2] == "time") return CsvLayout::kLong;
    if (header[2] == "duration") return CsvLayout::kWide;
  }
  throw ValidationError("unrecognized CSV header; expected long or wide trial layout");
}

inline TrialDataset ingest_csv(std::string_view text,
                               std::optional<OrdinalScale> scale = {},
                               std::vector<std::string>* warnings = nullptr) {
  return detect_csv_layout(text) == CsvLayout::kLong
             ? ingest_long_csv(text, scale, warnings)
             : ingest_wide_csv(text, scale, warnings);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << content;
}

}  // namespace wta
