#include <gtest/gtest.h>

#include "wta/csv_io.hpp"
#include "wta/trial_data.hpp"

using namespace wta;

namespace {

// Snapshot of a simulated 0-4 toxicity trial, wide layout, days 0..10.
// Patients 5, 7, 9 were censored after day 10, so their duration exceeds the
// visible cells.
const char* kSnapshotWide =
    "patient_id,arm,duration,0,1,2,3,4,5,6,7,8,9,10\n"
    "1,1,10,0,0,0,0,0,0,1,1,1,0,\n"
    "2,1,10,0,0,0,0,0,1,1,1,1,1,\n"
    "3,0,11,0,0,0,0,0,0,0,0,0,0,0\n"
    "4,1,6,0,0,0,0,0,0,,,,,\n"
    "5,0,13,0,0,0,0,0,0,0,0,0,1,1\n"
    "6,1,9,0,0,0,0,0,0,0,0,0,,\n"
    "7,0,18,0,0,0,0,0,0,1,1,1,2,2\n"
    "8,1,6,0,0,0,0,0,0,,,,,\n"
    "9,1,29,0,0,0,0,0,0,0,0,0,1,0\n"
    "10,0,4,0,0,0,0,,,,,,,\n";

const OrdinalScale kGradeScale{0, 4, Polarity::kHigherIsWorse};

void expect_same_data(const TrialDataset& a, const TrialDataset& b) {
  ASSERT_EQ(a.trajectories.size(), b.trajectories.size());
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    EXPECT_EQ(a.trajectories[i].patient_id, b.trajectories[i].patient_id);
    EXPECT_EQ(a.trajectories[i].arm, b.trajectories[i].arm);
    EXPECT_EQ(a.trajectories[i].scores, b.trajectories[i].scores);
  }
}

TEST(IngestLong, ParsesUnorderedRowsIntoTrajectories) {
  const char* text =
      "patient_id,arm,time,score\n"
      "p1,0,1,1\n"
      "p1,0,0,0\n"
      "p2,1,0,2\n";
  const auto ds = ingest_long_csv(text, kGradeScale);
  ASSERT_EQ(ds.trajectories.size(), 2u);
  EXPECT_EQ(ds.trajectories[0].patient_id, "p1");
  EXPECT_EQ(ds.trajectories[0].scores, (std::vector<int>{0, 1}));
  EXPECT_EQ(ds.trajectories[0].censor_time(), 1);
  EXPECT_EQ(ds.trajectories[1].scores, (std::vector<int>{2}));
  EXPECT_EQ(ds.trajectories[1].censor_time(), 0);
}

TEST(IngestLong, RejectsDuplicateTime) {
  const char* text =
      "patient_id,arm,time,score\n"
      "p1,0,0,0\n"
      "p1,0,0,1\n";
  EXPECT_THROW(ingest_long_csv(text, kGradeScale), ValidationError);
}

TEST(IngestLong, RejectsNegativeTime) {
  const char* text = "patient_id,arm,time,score\np1,0,-1,0\n";
  EXPECT_THROW(ingest_long_csv(text, kGradeScale), ValidationError);
}

TEST(IngestLong, RejectsNonContiguousTimes) {
  const char* text =
      "patient_id,arm,time,score\n"
      "p1,0,0,0\n"
      "p1,0,2,1\n";
  try {
    ingest_long_csv(text, kGradeScale);
    FAIL() << "expected a contiguity error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("contiguous"), std::string::npos);
  }
}

TEST(IngestLong, RejectsPatientInBothArms) {
  const char* text =
      "patient_id,arm,time,score\n"
      "p1,0,0,0\n"
      "p1,1,1,0\n";
  EXPECT_THROW(ingest_long_csv(text, kGradeScale), ValidationError);
}

TEST(IngestLong, RejectsScoreOutsideDeclaredScale) {
  const char* text = "patient_id,arm,time,score\np1,0,0,7\n";
  EXPECT_THROW(ingest_long_csv(text, kGradeScale), ValidationError);
}

TEST(IngestLong, WarnsOnIgnoredStatusColumn) {
  const char* text =
      "patient_id,arm,time,score,status\n"
      "p1,0,0,0,1\n";
  std::vector<std::string> warnings;
  const auto ds = ingest_long_csv(text, kGradeScale, &warnings);
  EXPECT_EQ(ds.trajectories.size(), 1u);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("status"), std::string::npos);
}

TEST(IngestLong, RejectsHeaderOnly) {
  EXPECT_THROW(ingest_long_csv("patient_id,arm,time,score\n", kGradeScale),
               ValidationError);
}

TEST(IngestLong, ErrorsCarryLineNumbers) {
  const char* text =
      "patient_id,arm,time,score\n"
      "p1,0,0,0\n"
      "p1,0,1,banana\n";
  try {
    ingest_long_csv(text, kGradeScale);
    FAIL() << "expected a parse error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(IngestWide, ParsesSnapshot) {
  std::vector<std::string> warnings;
  const auto ds = ingest_wide_csv(kSnapshotWide, kGradeScale, &warnings);
  ASSERT_EQ(ds.trajectories.size(), 10u);
  // Patient 3 stayed at zero for all eleven visible days.
  EXPECT_EQ(ds.trajectories[2].patient_id, "3");
  EXPECT_EQ(ds.trajectories[2].scores, std::vector<int>(11, 0));
  EXPECT_EQ(ds.trajectories[2].censor_time(), 10);
  // Patient 4 has six observations, days 0..5.
  EXPECT_EQ(ds.trajectories[3].patient_id, "4");
  EXPECT_EQ(ds.trajectories[3].censor_time(), 5);
  // Patients 5, 7, 9 extend past the snapshot: duration column disagrees.
  EXPECT_EQ(warnings.size(), 3u);
  EXPECT_EQ(ds.arm_size("0"), 4);
  EXPECT_EQ(ds.arm_size("1"), 6);
}

TEST(IngestWide, RejectsHoles) {
  const char* text =
      "patient_id,arm,duration,0,1,2\n"
      "p1,0,3,0,,1\n";
  try {
    ingest_wide_csv(text, kGradeScale);
    FAIL() << "expected a hole error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("hole"), std::string::npos);
  }
}

TEST(IngestWide, DurationMismatchIsOnlyAWarning) {
  const char* text =
      "patient_id,arm,duration,0,1\n"
      "p1,0,5,0,1\n";
  std::vector<std::string> warnings;
  const auto ds = ingest_wide_csv(text, kGradeScale, &warnings);
  EXPECT_EQ(ds.trajectories[0].scores, (std::vector<int>{0, 1}));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("duration"), std::string::npos);
}

TEST(IngestWide, RejectsMisnumberedTimeColumns) {
  const char* text = "patient_id,arm,duration,0,2\np1,0,2,0,1\n";
  EXPECT_THROW(ingest_wide_csv(text, kGradeScale), ValidationError);
}

TEST(CsvLayouts, WideAndLongAgreeOnTheSameTrial) {
  const auto wide = ingest_wide_csv(kSnapshotWide, kGradeScale);
  const auto via_long = ingest_long_csv(export_long_csv(wide), kGradeScale);
  expect_same_data(wide, via_long);
}

TEST(CsvLayouts, WideExportRoundTrips) {
  const auto ds = ingest_wide_csv(kSnapshotWide, kGradeScale);
  const auto again = ingest_wide_csv(export_wide_csv(ds), kGradeScale);
  expect_same_data(ds, again);
  // Re-exporting our own output is byte-stable.
  EXPECT_EQ(export_wide_csv(ds), export_wide_csv(again));
}

TEST(CsvLayouts, AutodetectsHeader) {
  EXPECT_EQ(detect_csv_layout(kSnapshotWide), CsvLayout::kWide);
  EXPECT_EQ(detect_csv_layout("patient_id,arm,time,score\np,0,0,0\n"),
            CsvLayout::kLong);
  EXPECT_THROW(detect_csv_layout("a,b,c\n1,2,3\n"), ValidationError);
}

TEST(Normalize, ShiftsOneBasedGradesToZero) {
  TrialDataset ds;
  ds.scale = {1, 5, Polarity::kHigherIsWorse};
  ds.trajectories = {{"p1", "0", {1, 2, 5}}};
  const auto out = normalize_scale(ds);
  EXPECT_EQ(out.scale.min_score, 0);
  EXPECT_EQ(out.scale.max_score, 4);
  EXPECT_EQ(out.trajectories[0].scores, (std::vector<int>{0, 1, 4}));
}

TEST(Normalize, ReflectsHigherIsBetterScales) {
  TrialDataset ds;
  ds.scale = {0, 10, Polarity::kHigherIsBetter};
  ds.trajectories = {{"p1", "0", {10, 3, 0}}};
  const auto out = normalize_scale(ds);
  EXPECT_EQ(out.scale.polarity, Polarity::kHigherIsWorse);
  EXPECT_EQ(out.trajectories[0].scores, (std::vector<int>{0, 7, 10}));
}

TEST(Normalize, Idempotent) {
  TrialDataset ds;
  ds.scale = {1, 5, Polarity::kHigherIsWorse};
  ds.trajectories = {{"p1", "0", {1, 3}}, {"p2", "1", {2, 2}}};
  const auto once = normalize_scale(ds);
  const auto twice = normalize_scale(once);
  expect_same_data(once, twice);
  EXPECT_EQ(once.scale.min_score, twice.scale.min_score);
  EXPECT_EQ(once.scale.max_score, twice.scale.max_score);
}

TEST(Validation, CatchesStructuralProblems) {
  TrialDataset empty;
  empty.scale = kGradeScale;
  EXPECT_THROW(empty.validate(), ValidationError);

  TrialDataset dup;
  dup.scale = kGradeScale;
  dup.trajectories = {{"p1", "0", {0}}, {"p1", "1", {0}}};
  EXPECT_THROW(dup.validate(), ValidationError);

  TrialDataset bad_scale;
  bad_scale.scale = {3, 3, Polarity::kHigherIsWorse};
  bad_scale.trajectories = {{"p1", "0", {3}}};
  EXPECT_THROW(bad_scale.validate(), ValidationError);

  TrialDataset no_obs;
  no_obs.scale = kGradeScale;
  no_obs.trajectories = {{"p1", "0", {}}};
  EXPECT_THROW(no_obs.validate(), ValidationError);
}

TEST(ArmHandling, DefaultPairIsSortedAndRequiresTwoArms) {
  const auto ds = ingest_wide_csv(kSnapshotWide, kGradeScale);
  const auto arms = default_arm_pair(ds);
  EXPECT_EQ(arms.a, "0");
  EXPECT_EQ(arms.b, "1");

  TrialDataset one_arm;
  one_arm.scale = kGradeScale;
  one_arm.trajectories = {{"p1", "0", {0}}, {"p2", "0", {0}}};
  EXPECT_THROW(default_arm_pair(one_arm), ValidationError);

  TrialDataset three_arms = one_arm;
  three_arms.trajectories.push_back({"p3", "1", {0}});
  three_arms.trajectories.push_back({"p4", "2", {0}});
  EXPECT_THROW(default_arm_pair(three_arms), ValidationError);
  // Explicit pairs still work when extra arms are present.
  EXPECT_NO_THROW(require_arms(three_arms, {"0", "1"}));
  EXPECT_THROW(require_arms(three_arms, {"0", "9"}), ValidationError);
}

TEST(ResponseRateSummary, MatchesHandComputedRates) {
  ResponseCounts c;
  c.complete_response = 2;
  c.partial_response = 1;
  c.stable_disease = 1;
  c.progressive_disease = 1;
  const auto rates = response_rates(c);
  EXPECT_DOUBLE_EQ(rates.objective_response_rate, 0.6);
  EXPECT_DOUBLE_EQ(rates.disease_control_rate, 0.8);
  EXPECT_THROW(response_rates(ResponseCounts{}), ValidationError);
}

}  // namespace
