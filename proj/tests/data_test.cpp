#include "womac/data.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace womac {
namespace {

RawDataset parse(const std::string& predictions, const std::string& outcomes) {
  std::istringstream p(predictions), o(outcomes);
  return parse_csv(p, o);
}

std::string error_of(const std::string& predictions, const std::string& outcomes) {
  try {
    parse(predictions, outcomes);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

const std::string kToyPredictions =
    "task_id,expert_id,prediction\n"
    "t1,e1,0.9\n"
    "t1,e2,0.4\n"
    "t2,e1,0.2\n"
    "t2,e2,0.5\n";
const std::string kToyOutcomes = "task_id,outcome\nt1,1\nt2,0\n";

TEST(ParseCsv, Toy) {
  const auto raw = parse(kToyPredictions, kToyOutcomes);
  ASSERT_EQ(raw.predictions.size(), 4u);
  EXPECT_EQ(raw.predictions[1], (PredictionRecord{"t1", "e2", 0.4}));
  EXPECT_EQ(raw.outcomes[1], (OutcomeRecord{"t2", 0.0}));
  EXPECT_EQ(raw.kind, OutcomeKind::Binary);
}

TEST(ParseCsv, QuotingBomAndCrlf) {
  const auto raw = parse("\xEF\xBB\xBFtask_id,expert_id,prediction\r\n\"t,1\",\"e \"\"x\"\"\",0.5\r\n",
                         "task_id,outcome\r\n\"t,1\",1\r\n");
  ASSERT_EQ(raw.predictions.size(), 1u);
  EXPECT_EQ(raw.predictions[0].task_id, "t,1");
  EXPECT_EQ(raw.predictions[0].expert_id, "e \"x\"");
}

TEST(ParseCsv, ContinuousOutcomes) {
  const auto raw = parse("task_id,expert_id,prediction\nt1,e1,1.3\n", "task_id,outcome\nt1,2.5\n");
  EXPECT_EQ(raw.kind, OutcomeKind::Continuous);
}

TEST(ParseCsv, Errors) {
  EXPECT_NE(error_of(kToyPredictions + "t1,e1,0.3\n", kToyOutcomes).find("predictions:6"), std::string::npos);
  EXPECT_NE(error_of(kToyPredictions + "t1,e1,0.3\n", kToyOutcomes).find("duplicate"), std::string::npos);
  EXPECT_NE(error_of("task_id,expert_id,prediction\nt1,e1,1.3\n", kToyOutcomes), "");
  EXPECT_NE(error_of("task_id,expert_id,prediction\nt9,e1,0.3\n", kToyOutcomes), "");
  EXPECT_NE(error_of("task_id,expert_id,prediction\nt1,e1,abc\n", kToyOutcomes), "");
  EXPECT_NE(error_of("task_id,expert,prediction\n", kToyOutcomes), "");
  EXPECT_NE(error_of(kToyPredictions, "task_id,outcome\nt1,1\nt1,0\n"), "");
  EXPECT_NE(error_of("task_id,expert_id,prediction\nt1,e1\n", kToyOutcomes), "");
}

TEST(ParseCsv, ErrorCarriesLine) {
  const auto message = error_of("task_id,expert_id,prediction\nt1,e1,0.1\nt1,e1,0.2\n", kToyOutcomes);
  EXPECT_NE(message.find("predictions:3"), std::string::npos) << message;
}

TEST(LoadCsv, MissingFileIsIoError) {
  EXPECT_THROW(load_csv("/nonexistent/p.csv", "/nonexistent/o.csv"), IoError);
}

TEST(FilterComplete, IdentityOnCompleteInput) {
  const auto ds = filter_complete(parse(kToyPredictions, kToyOutcomes));
  Matrix expected(2, 2);
  expected << 0.9, 0.4, 0.2, 0.5;
  EXPECT_EQ(ds.reports.values(), expected);
  EXPECT_EQ(ds.reports.expert_ids(), (std::vector<std::string>{"e1", "e2"}));
  EXPECT_FALSE(ds.imputed.any());
}

TEST(FilterComplete, DropsIncompleteExpert) {
  const auto ds = filter_complete(parse(kToyPredictions + "t1,e0,0.3\nt2,e3,0.1\nt1,e3,0.7\n", kToyOutcomes));
  EXPECT_EQ(ds.reports.expert_ids(), (std::vector<std::string>{"e1", "e2", "e3"}));
  EXPECT_EQ(ds.reports.values()(0, 2), 0.7);
}

TEST(FilterComplete, TooFewExperts) {
  EXPECT_THROW(filter_complete(parse("task_id,expert_id,prediction\nt1,e1,0.1\nt2,e1,0.1\nt1,e2,0.3\n",
                                     kToyOutcomes)),
               ValidationError);
}

TEST(FilterHfc, IdentityAboveThresholds) {
  const auto ds = filter_hfc(parse(kToyPredictions, kToyOutcomes), 2, 0.5);
  EXPECT_EQ(ds.reports.values(), filter_complete(parse(kToyPredictions, kToyOutcomes)).reports.values());
  EXPECT_FALSE(ds.imputed.any());
}

// a: t0 t1 t2, b: t0 t3, c: t1. Task counts 2, 2, 1, 1.
const std::string kOrderPredictions =
    "task_id,expert_id,prediction\n"
    "t0,a,0.8\nt1,a,0.3\nt2,a,0.6\n"
    "t0,b,0.7\nt3,b,0.9\n"
    "t1,c,0.2\n";
const std::string kOrderOutcomes = "task_id,outcome\nt0,1\nt1,0\nt2,1\nt3,1\n";

TEST(FilterHfc, TasksThenExperts) {
  const auto ds = filter_hfc(parse(kOrderPredictions, kOrderOutcomes), 2, 0.5);
  EXPECT_EQ(ds.reports.task_ids(), (std::vector<std::string>{"t0", "t1"}));
  EXPECT_EQ(ds.reports.expert_ids(), (std::vector<std::string>{"a", "b", "c"}));
  // Gaps are filled with the mean outcome over t0, t1.
  Matrix expected(2, 3);
  expected << 0.8, 0.7, 0.5, 0.3, 0.5, 0.2;
  EXPECT_EQ(ds.reports.values(), expected);
  ImputedMask mask(2, 3);
  mask << false, false, true, false, true, false;
  EXPECT_EQ(ds.imputed, mask);
  EXPECT_EQ(ds.outcomes.values(), (Vector(2) << 1, 0).finished());
}

TEST(FilterHfc, OrderMatters) {
  // Filtering experts on all four tasks first keeps a (3/4) and b (2/4), after
  // which only t0 has two responses.
  auto experts_first = parse(kOrderPredictions, kOrderOutcomes);
  std::erase_if(experts_first.predictions, [](const PredictionRecord& r) { return r.expert_id == "c"; });
  const auto swapped = filter_hfc(experts_first, 2, 0.0);
  EXPECT_EQ(swapped.reports.task_ids(), (std::vector<std::string>{"t0"}));
  EXPECT_EQ(swapped.reports.expert_ids(), (std::vector<std::string>{"a", "b"}));

  const auto fixed = filter_hfc(parse(kOrderPredictions, kOrderOutcomes), 2, 0.5);
  EXPECT_EQ(fixed.reports.tasks(), 2u);
  EXPECT_EQ(fixed.reports.experts(), 3u);
}

TEST(FilterHfc, ThresholdDropsTask) {
  // t2 has a single response and goes; every expert answers both survivors.
  const std::string predictions =
      "task_id,expert_id,prediction\n"
      "t0,a,0.1\nt0,b,0.2\nt0,c,0.3\n"
      "t1,a,0.4\nt1,b,0.5\nt1,c,0.6\n"
      "t2,a,0.7\n";
  const auto ds = filter_hfc(parse(predictions, "task_id,outcome\nt0,0\nt1,1\nt2,1\n"), 2, 0.5);
  EXPECT_EQ(ds.reports.task_ids(), (std::vector<std::string>{"t0", "t1"}));
  EXPECT_EQ(ds.reports.experts(), 3u);
  EXPECT_FALSE(ds.imputed.any());
}

TEST(FilterHfc, EmptyResult) {
  EXPECT_THROW(filter_hfc(parse(kToyPredictions, kToyOutcomes), 3, 0.5), ValidationError);
  EXPECT_THROW(filter_hfc(parse(kToyPredictions, kToyOutcomes), 2, 1.5), ValidationError);
}

TEST(WriteCsv, RoundTrip) {
  const auto raw = parse("task_id,expert_id,prediction\nt2,zed,0.25\nt1,amy,0.1\nt2,amy,0.3\n",
                         "task_id,outcome\nt2,1\nt1,0\n");
  std::ostringstream p, o;
  write_csv(raw, p, o);
  EXPECT_EQ(p.str(), "task_id,expert_id,prediction\nt2,amy,0.3\nt2,zed,0.25\nt1,amy,0.1\n");
  EXPECT_EQ(o.str(), "task_id,outcome\nt2,1\nt1,0\n");
  const auto again = parse(p.str(), o.str());
  EXPECT_EQ(again.outcomes, raw.outcomes);
  std::ostringstream p2, o2;
  write_csv(again, p2, o2);
  EXPECT_EQ(p2.str(), p.str());
}

TEST(WriteCsv, FilesAndToRaw) {
  Matrix w(2, 2);
  w << 0.1, 0.2, 0.3, 0.4;
  const PredictionMatrix reports(w, {"x", "y"}, {"b", "a"});
  const auto raw = to_raw(reports, OutcomeVector((Vector(2) << 1, 0).finished(), OutcomeKind::Binary));
  const auto dir = std::filesystem::temp_directory_path() / "womac_data_test";
  std::filesystem::create_directories(dir);
  write_csv(raw, dir / "p.csv", dir / "o.csv");
  const auto loaded = filter_complete(load_csv(dir / "p.csv", dir / "o.csv"));
  EXPECT_EQ(loaded.reports.expert_ids(), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(loaded.reports.values().col(0), w.col(1));
  EXPECT_EQ(loaded.reports.values().col(1), w.col(0));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace womac
