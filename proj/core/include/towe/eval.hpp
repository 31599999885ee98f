#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "towe/corpus.hpp"

namespace towe {

// Lenient IOB decode: B opens a span, I extends the open span or opens a
// new one when none is open, O closes.
std::vector<Span> decode_spans(std::span<const Tag> tags);

struct ExampleSpans {
  std::string id;
  std::vector<Span> spans;
};

struct EvalReport {
  std::int64_t true_positives = 0;
  std::int64_t predicted = 0;
  std::int64_t gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Builds P/R/F1 from pooled counts; F1 is 0 when P + R is 0.
EvalReport report_from_counts(std::int64_t true_positives, std::int64_t predicted,
                              std::int64_t gold);

// Exact-span micro P/R/F1. Examples are paired by position and must carry
// the same id; throws EvalError otherwise.
EvalReport micro_f1(std::span<const ExampleSpans> predictions, std::span<const ExampleSpans> gold);

double average_runs(std::span<const double> f1s);

// Two-decimal percentage, e.g. 0.862025 -> "86.20".
std::string format_percent(double fraction);

struct RunSummary {
  std::string name;
  std::vector<EvalReport> runs;
  double mean_f1 = 0.0;
};

RunSummary summarize_runs(std::string name, std::vector<EvalReport> runs);

std::string report_to_json(const RunSummary& summary);
// Fixed-width table: one row per run plus the mean.
std::string format_report_table(const RunSummary& summary);

struct AblationDelta {
  std::string from;
  std::string to;
  double delta = 0.0;  // mean F1 of `to` minus mean F1 of `from`
};

struct AblationReport {
  std::vector<RunSummary> variants;  // S, SA, S masked
  std::vector<AblationDelta> deltas;
};

AblationReport ablation_report(RunSummary s, RunSummary sa, RunSummary s_masked);
std::string ablation_to_json(const AblationReport& report);
std::string format_ablation_table(const AblationReport& report);

}  // namespace towe
