#include "towe/eval.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace towe {
namespace {

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json doc = nlohmann::json::object();
  doc["true_positives"] = r.true_positives;
  doc["predicted"] = r.predicted;
  doc["gold"] = r.gold;
  doc["precision"] = r.precision;
  doc["recall"] = r.recall;
  doc["f1"] = r.f1;
  return doc;
}

nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json doc = nlohmann::json::object();
  doc["name"] = s.name;
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : s.runs) runs.push_back(report_json(r));
  doc["runs"] = std::move(runs);
  doc["mean_f1"] = s.mean_f1;
  return doc;
}

std::string pad(std::string text, std::size_t width) {
  if (text.size() < width) text.append(width - text.size(), ' ');
  return text;
}

std::string rpad(const std::string& text, std::size_t width) {
  return text.size() < width ? std::string(width - text.size(), ' ') + text : text;
}

}  // namespace

std::vector<Span> decode_spans(std::span<const Tag> tags) {
  std::vector<Span> spans;
  bool open = false;
  for (std::size_t k = 0; k < tags.size(); ++k) {
    const int i = static_cast<int>(k);
    switch (tags[k]) {
      case Tag::B:
        spans.push_back({i, i});
        open = true;
        break;
      case Tag::I:
        if (open) {
          spans.back().end = i;
        } else {
          spans.push_back({i, i});
          open = true;
        }
        break;
      case Tag::O:
        open = false;
        break;
    }
  }
  return spans;
}

EvalReport report_from_counts(std::int64_t true_positives, std::int64_t predicted, std::int64_t gold) {
  EvalReport r{true_positives, predicted, gold, 0.0, 0.0, 0.0};
  if (predicted > 0) r.precision = static_cast<double>(true_positives) / static_cast<double>(predicted);
  if (gold > 0) r.recall = static_cast<double>(true_positives) / static_cast<double>(gold);
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  return r;
}

EvalReport micro_f1(std::span<const ExampleSpans> predictions, std::span<const ExampleSpans> gold) {
  if (predictions.size() != gold.size()) {
    throw EvalError("prediction count " + std::to_string(predictions.size()) +
                    " differs from gold count " + std::to_string(gold.size()));
  }
  std::int64_t tp = 0;
  std::int64_t predicted = 0;
  std::int64_t gold_total = 0;
  for (std::size_t k = 0; k < gold.size(); ++k) {
    if (predictions[k].id != gold[k].id) {
      throw EvalError("example " + std::to_string(k) + ": prediction id `" + predictions[k].id +
                      "` does not match gold id `" + gold[k].id + "`");
    }
    const std::set<Span> gold_set(gold[k].spans.begin(), gold[k].spans.end());
    const std::set<Span> pred_set(predictions[k].spans.begin(), predictions[k].spans.end());
    for (const auto& span : pred_set) tp += gold_set.count(span);
    predicted += static_cast<std::int64_t>(pred_set.size());
    gold_total += static_cast<std::int64_t>(gold_set.size());
  }
  return report_from_counts(tp, predicted, gold_total);
}

double average_runs(std::span<const double> f1s) {
  if (f1s.empty()) throw EvalError("cannot average zero runs");
  return std::accumulate(f1s.begin(), f1s.end(), 0.0) / static_cast<double>(f1s.size());
}

std::string format_percent(double fraction) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.2f", 100.0 * fraction);
  return buffer;
}

RunSummary summarize_runs(std::string name, std::vector<EvalReport> runs) {
  std::vector<double> f1s;
  for (const auto& r : runs) f1s.push_back(r.f1);
  const double mean = average_runs(f1s);
  return RunSummary{std::move(name), std::move(runs), mean};
}

std::string report_to_json(const RunSummary& summary) { return summary_json(summary).dump(2) + "\n"; }

std::string format_report_table(const RunSummary& summary) {
  std::ostringstream out;
  out << pad("run", 8) << rpad("tp", 8) << rpad("pred", 8) << rpad("gold", 8) << rpad("P", 8)
      << rpad("R", 8) << rpad("F1", 8) << '\n';
  for (std::size_t k = 0; k < summary.runs.size(); ++k) {
    const auto& r = summary.runs[k];
    out << pad(std::to_string(k + 1), 8) << rpad(std::to_string(r.true_positives), 8)
        << rpad(std::to_string(r.predicted), 8) << rpad(std::to_string(r.gold), 8)
        << rpad(format_percent(r.precision), 8) << rpad(format_percent(r.recall), 8)
        << rpad(format_percent(r.f1), 8) << '\n';
  }
  out << pad("mean", 8) << std::string(40, ' ') << rpad(format_percent(summary.mean_f1), 8) << '\n';
  return out.str();
}

AblationReport ablation_report(RunSummary s, RunSummary sa, RunSummary s_masked) {
  AblationReport report;
  report.deltas = {
      {s.name, sa.name, sa.mean_f1 - s.mean_f1},
      {s.name, s_masked.name, s_masked.mean_f1 - s.mean_f1},
      {s_masked.name, sa.name, sa.mean_f1 - s_masked.mean_f1},
  };
  report.variants = {std::move(s), std::move(sa), std::move(s_masked)};
  return report;
}

std::string ablation_to_json(const AblationReport& report) {
  nlohmann::json doc = nlohmann::json::object();
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& v : report.variants) variants.push_back(summary_json(v));
  nlohmann::json deltas = nlohmann::json::array();
  for (const auto& d : report.deltas) deltas.push_back({{"from", d.from}, {"to", d.to}, {"delta", d.delta}});
  doc["variants"] = std::move(variants);
  doc["deltas"] = std::move(deltas);
  return doc.dump(2) + "\n";
}

std::string format_ablation_table(const AblationReport& report) {
  std::ostringstream out;
  out << pad("model", 14) << rpad("runs", 6) << rpad("mean F1", 10) << '\n';
  for (const auto& v : report.variants) {
    out << pad(v.name, 14) << rpad(std::to_string(v.runs.size()), 6)
        << rpad(format_percent(v.mean_f1), 10) << '\n';
  }
  for (const auto& d : report.deltas) {
    char sign = d.delta < 0 ? '-' : '+';
    out << pad(d.to + " vs " + d.from, 20) << rpad(std::string(1, sign) + format_percent(std::abs(d.delta)), 10)
        << '\n';
  }
  return out.str();
}

}  // namespace towe
