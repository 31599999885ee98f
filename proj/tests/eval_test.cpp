#include <gtest/gtest.h>

#include <random>

#include "json.hpp"
#include "oracles.hpp"
#include "towe/eval.hpp"

namespace towe {
namespace {

using Spans = std::vector<Span>;

std::vector<Tag> random_tags(std::mt19937_64& rng, int n) {
  std::vector<Tag> tags;
  for (int k = 0; k < n; ++k) tags.push_back(static_cast<Tag>(std::uniform_int_distribution<int>(0, 2)(rng)));
  return tags;
}

TEST(Decode, Rules) {
  EXPECT_EQ(decode_spans(std::vector<Tag>{Tag::O, Tag::B, Tag::I, Tag::O}), (Spans{{1, 2}}));
  EXPECT_EQ(decode_spans(std::vector<Tag>{Tag::B, Tag::B, Tag::O}), (Spans{{0, 0}, {1, 1}}));
  EXPECT_EQ(decode_spans(std::vector<Tag>{Tag::O, Tag::I, Tag::I}), (Spans{{1, 2}}));
  EXPECT_EQ(decode_spans(std::vector<Tag>{Tag::I}), (Spans{{0, 0}}));
  EXPECT_TRUE(decode_spans(std::vector<Tag>{}).empty());
}

TEST(Decode, MatchesReferenceDecoder) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto tags = random_tags(rng, std::uniform_int_distribution<int>(0, 12)(rng));
    EXPECT_EQ(decode_spans(tags), testing::reference_decode(tags));
  }
}

TEST(MicroF1, HandCounts) {
  const std::vector<ExampleSpans> pred = {{"a", {{2, 2}}}, {"b", {{0, 1}, {3, 3}}}};
  const std::vector<ExampleSpans> gold = {{"a", {{2, 2}}}, {"b", {{0, 1}}}};
  const auto r = micro_f1(pred, gold);
  EXPECT_EQ(r.true_positives, 2);
  EXPECT_EQ(r.predicted, 3);
  EXPECT_EQ(r.gold, 2);
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_NEAR(r.f1, 0.8, 1e-15);

  const std::vector<ExampleSpans> partial = {{"a", {{1, 1}}}};
  const std::vector<ExampleSpans> wide = {{"a", {{1, 2}}}};
  EXPECT_EQ(micro_f1(partial, wide).true_positives, 0);
  EXPECT_EQ(micro_f1(partial, wide).f1, 0.0);

  const auto same = micro_f1(gold, gold);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.f1, 1.0);
}

TEST(MicroF1, Misalignment) {
  const std::vector<ExampleSpans> a = {{"x", {}}};
  const std::vector<ExampleSpans> b = {{"y", {}}};
  const std::vector<ExampleSpans> two = {{"x", {}}, {"y", {}}};
  EXPECT_THROW(micro_f1(a, b), EvalError);
  EXPECT_THROW(micro_f1(a, two), EvalError);
  EXPECT_EQ(micro_f1(a, a).f1, 0.0);
}

TEST(MicroF1, MatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ExampleSpans> pred;
    std::vector<ExampleSpans> gold;
    std::vector<Spans> p_raw;
    std::vector<Spans> g_raw;
    const int examples = std::uniform_int_distribution<int>(1, 6)(rng);
    for (int e = 0; e < examples; ++e) {
      const int n = std::uniform_int_distribution<int>(1, 10)(rng);
      p_raw.push_back(decode_spans(random_tags(rng, n)));
      g_raw.push_back(decode_spans(random_tags(rng, n)));
      pred.push_back({std::to_string(e), p_raw.back()});
      gold.push_back({std::to_string(e), g_raw.back()});
    }
    const auto r = micro_f1(pred, gold);
    const auto c = testing::brute_force_counts(p_raw, g_raw);
    EXPECT_EQ(r.true_positives, c.tp);
    EXPECT_EQ(r.predicted, c.predicted);
    EXPECT_EQ(r.gold, c.gold);
    EXPECT_EQ(r.f1, c.f1);
  }
}

TEST(Report, TableTwoRowMean) {
  const std::vector<double> row = {0.8259, 0.8860, 0.8237, 0.9125};
  const double mean = average_runs(row);
  EXPECT_NEAR(mean, 0.862025, 1e-12);
  EXPECT_EQ(format_percent(mean), "86.20");
  EXPECT_EQ(format_percent(1.0), "100.00");
  EXPECT_EQ(format_percent(0.0), "0.00");
  EXPECT_THROW(average_runs(std::vector<double>{}), EvalError);
}

TEST(Report, JsonAndTable) {
  const auto summary = summarize_runs("SA", {report_from_counts(2, 3, 2), report_from_counts(1, 2, 2)});
  EXPECT_DOUBLE_EQ(summary.mean_f1, (0.8 + 0.5) / 2);
  const auto doc = nlohmann::json::parse(report_to_json(summary));
  EXPECT_EQ(doc.at("runs").size(), 2u);
  EXPECT_EQ(doc.at("runs")[0].at("true_positives"), 2);
  const auto table = format_report_table(summary);
  EXPECT_NE(table.find("80.00"), std::string::npos);
  EXPECT_NE(table.find("65.00"), std::string::npos);
}

TEST(Report, Ablation) {
  const auto s = summarize_runs("S", {report_from_counts(8, 10, 10)});
  const auto sa = summarize_runs("SA", {report_from_counts(9, 10, 10)});
  const auto masked = summarize_runs("S masked", {report_from_counts(7, 10, 10)});
  const auto report = ablation_report(s, sa, masked);
  ASSERT_EQ(report.deltas.size(), 3u);
  EXPECT_NEAR(report.deltas[0].delta, 0.1, 1e-12);
  EXPECT_NEAR(report.deltas[1].delta, -0.1, 1e-12);
  EXPECT_NEAR(report.deltas[2].delta, 0.2, 1e-12);
  const auto doc = nlohmann::json::parse(ablation_to_json(report));
  EXPECT_EQ(doc.at("variants").size(), 3u);
  EXPECT_NE(format_ablation_table(report).find("-10.00"), std::string::npos);
}

}  // namespace
}  // namespace towe
