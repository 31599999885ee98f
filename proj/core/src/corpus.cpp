#include "towe/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "towe/eval.hpp"

namespace towe {
namespace {

using nlohmann::json;

std::string describe(const Span& span) {
  return "[" + std::to_string(span.start) + "," + std::to_string(span.end) + "]";
}

Span parse_span(const json& value, std::string_view key) {
  if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
      !value[1].is_number_integer()) {
    throw DataError("`" + std::string(key) + "` must be a two-element integer array");
  }
  return Span{value[0].get<int>(), value[1].get<int>()};
}

SentenceExample parse_record(const json& record, const LoadOptions& options) {
  if (!record.is_object()) throw DataError("record is not a JSON object");
  SentenceExample example;

  const auto id = record.find("id");
  if (id == record.end() || !id->is_string()) throw DataError("missing string `id`");
  example.id = id->get<std::string>();

  const auto words = record.find("words");
  if (words == record.end() || !words->is_array()) throw DataError("missing array `words`");
  for (const auto& word : *words) {
    if (!word.is_string()) throw DataError("`words` must contain strings");
    example.words.push_back(word.get<std::string>());
  }

  const auto aspect = record.find("aspect");
  if (aspect == record.end()) throw DataError("missing `aspect`");
  example.aspect = parse_span(*aspect, "aspect");

  const auto opinions = record.find("opinions");
  if (opinions == record.end()) {
    if (options.require_opinions) throw DataError("missing `opinions`");
  } else {
    if (!opinions->is_array()) throw DataError("`opinions` must be an array");
    for (const auto& span : *opinions) example.opinions.push_back(parse_span(span, "opinions"));
  }
  return example;
}

std::vector<std::string> split_on(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t begin = 0;
  while (true) {
    const auto pos = text.find(sep, begin);
    out.emplace_back(text.substr(begin, pos == std::string_view::npos ? pos : pos - begin));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return out;
}

std::vector<std::string> split_whitespace(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string token; in >> token;) out.push_back(token);
  return out;
}

// "surfboard\B" -> ("surfboard", B)
std::pair<std::string, Tag> parse_tagged(const std::string& token, std::size_t line_no) {
  const auto pos = token.rfind('\\');
  if (pos == std::string::npos || pos + 2 != token.size()) {
    throw DataError("line " + std::to_string(line_no) + ": malformed tagged token `" + token + "`");
  }
  switch (token[pos + 1]) {
    case 'B': return {token.substr(0, pos), Tag::B};
    case 'I': return {token.substr(0, pos), Tag::I};
    case 'O': return {token.substr(0, pos), Tag::O};
    default:
      throw DataError("line " + std::to_string(line_no) + ": unknown tag in `" + token + "`");
  }
}

}  // namespace

char tag_char(Tag tag) {
  switch (tag) {
    case Tag::B: return 'B';
    case Tag::I: return 'I';
    case Tag::O: return 'O';
  }
  return '?';
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "unknown";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split `" + std::string(name) + "`");
}

void validate_example(const SentenceExample& example) {
  const int n = static_cast<int>(example.words.size());
  const auto in_range = [n](const Span& s) { return 0 <= s.start && s.start <= s.end && s.end < n; };
  const auto fail = [&example](const std::string& what) {
    throw DataError("example `" + example.id + "`: " + what);
  };

  if (n == 0) fail("no words");
  for (const auto& word : example.words) {
    if (word.empty()) fail("empty word");
  }
  if (!in_range(example.aspect)) fail("aspect span " + describe(example.aspect) + " out of range");
  for (std::size_t k = 0; k < example.opinions.size(); ++k) {
    const Span& span = example.opinions[k];
    if (!in_range(span)) fail("opinion span " + describe(span) + " out of range");
    if (span.overlaps(example.aspect)) fail("opinion span " + describe(span) + " overlaps the aspect");
    if (k > 0 && example.opinions[k - 1].end >= span.start) {
      fail("opinion spans must be sorted and non-overlapping");
    }
  }
}

Dataset parse_dataset(std::istream& in, Split split, const LoadOptions& options) {
  Dataset dataset{split, {}};
  std::set<std::string> seen;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    SentenceExample example;
    try {
      example = parse_record(json::parse(line), options);
    } catch (const json::exception& e) {
      throw DataError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line_no) + ": " + e.what());
    }
    validate_example(example);
    if (!seen.insert(example.id).second) {
      throw DataError("example `" + example.id + "`: duplicate id in " +
                      std::string(split_name(split)) + " split");
    }
    dataset.examples.push_back(std::move(example));
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path, Split split, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return parse_dataset(in, split, options);
}

std::string to_json_line(const SentenceExample& example) {
  json opinions = json::array();
  for (const auto& span : example.opinions) opinions.push_back({span.start, span.end});
  json record = json::object();
  record["id"] = example.id;
  record["words"] = example.words;
  record["aspect"] = {example.aspect.start, example.aspect.end};
  record["opinions"] = std::move(opinions);
  return record.dump();
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write dataset " + path.string());
  for (const auto& example : dataset.examples) out << to_json_line(example) << '\n';
}

std::vector<Tag> derive_word_labels(const SentenceExample& example) {
  std::vector<Tag> labels(example.words.size(), Tag::O);
  for (const auto& span : example.opinions) {
    labels[static_cast<std::size_t>(span.start)] = Tag::B;
    for (int j = span.start + 1; j <= span.end; ++j) labels[static_cast<std::size_t>(j)] = Tag::I;
  }
  return labels;
}

Dataset convert_legacy_tsv(const std::filesystem::path& path, Split split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());

  Dataset dataset{split, {}};
  std::set<std::string> seen;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto columns = split_on(line, '\t');
    if (columns.size() != 3 && columns.size() != 4) {
      throw DataError("line " + std::to_string(line_no) + ": expected 3 columns, found " +
                      std::to_string(columns.size()));
    }
    std::string id = std::to_string(dataset.examples.size());
    if (columns.size() == 4) {
      id = columns[0];
      columns.erase(columns.begin());
    }
    if (columns[0] == "sentence") continue;  // header

    const auto words = split_whitespace(columns[0]);
    const auto targets = split_whitespace(columns[1]);
    const auto opinions = split_whitespace(columns[2]);
    if (targets.size() != words.size() || opinions.size() != words.size()) {
      throw DataError("line " + std::to_string(line_no) + ": tag columns do not match the sentence");
    }

    SentenceExample example;
    example.id = id;
    example.words = words;
    std::vector<Tag> target_tags;
    std::vector<Tag> opinion_tags;
    for (std::size_t k = 0; k < words.size(); ++k) {
      target_tags.push_back(parse_tagged(targets[k], line_no).second);
      opinion_tags.push_back(parse_tagged(opinions[k], line_no).second);
    }
    const auto aspects = decode_spans(target_tags);
    if (aspects.empty()) throw DataError("line " + std::to_string(line_no) + ": no target span");
    example.aspect = aspects.front();
    example.opinions = decode_spans(opinion_tags);
    validate_example(example);
    if (!seen.insert(example.id).second) {
      throw DataError("example `" + example.id + "`: duplicate id");
    }
    dataset.examples.push_back(std::move(example));
  }
  return dataset;
}

}  // namespace towe
