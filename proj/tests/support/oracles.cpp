#include "oracles.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace towe::testing {
namespace {

// Byte length of the UTF-8 sequence introduced by `lead`; 1 for stray bytes.
std::size_t sequence_length(unsigned char lead) {
  if (lead >= 0xF0 && lead < 0xF8) return 4;
  if (lead >= 0xE0) return lead < 0xF0 ? 3 : 1;
  if (lead >= 0xC0) return 2;
  return 1;
}

std::vector<std::string> code_points(const std::string& word) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < word.size();) {
    std::size_t len = std::min(sequence_length(static_cast<unsigned char>(word[i])), word.size() - i);
    out.push_back(word.substr(i, len));
    i += len;
  }
  return out;
}

bool in_vocab(const std::vector<std::string>& vocab, const std::string& piece) {
  return std::find(vocab.begin(), vocab.end(), piece) != vocab.end();
}

}  // namespace

std::vector<std::string> exhaustive_wordpiece(const std::string& word,
                                              const std::vector<std::string>& vocab) {
  const std::vector<std::string> unk{"[UNK]"};
  const auto cps = code_points(word);
  const std::size_t n = cps.size();
  if (n == 0 || n > 100) return unk;
  if (n > 20) throw std::invalid_argument("exhaustive_wordpiece: word too long to enumerate");

  const auto joined = [&](std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t k = from; k < to; ++k) s += cps[k];
    return s;
  };
  const auto as_piece = [&](std::size_t from, std::size_t to) {
    return (from == 0 ? "" : "##") + joined(from, to);
  };

  std::vector<std::vector<std::string>> accepted;
  // Bit k set means a cut between code points k and k+1.
  for (std::uint32_t cuts = 0; cuts < (1u << (n - 1)); ++cuts) {
    std::vector<std::string> pieces;
    bool ok = true;
    std::size_t start = 0;
    for (std::size_t end = 1; end <= n && ok; ++end) {
      if (end < n && !(cuts & (1u << (end - 1)))) continue;
      const std::string piece = as_piece(start, end);
      if (!in_vocab(vocab, piece)) ok = false;
      for (std::size_t longer = end + 1; longer <= n && ok; ++longer) {
        if (in_vocab(vocab, as_piece(start, longer))) ok = false;
      }
      pieces.push_back(piece);
      start = end;
    }
    if (ok) accepted.push_back(std::move(pieces));
  }
  if (accepted.size() > 1) throw std::logic_error("exhaustive_wordpiece: split not unique");
  return accepted.empty() ? unk : accepted.front();
}

std::vector<std::pair<std::string, std::string>> brute_force_bpe_merges(
    const std::vector<std::pair<std::string, std::int64_t>>& corpus, int num_merges) {
  std::vector<std::pair<std::vector<std::string>, std::int64_t>> words;
  for (const auto& [word, count] : corpus) {
    std::vector<std::string> symbols;
    const auto cps = code_points(word);
    for (std::size_t k = 0; k < cps.size(); ++k) symbols.push_back(k == 0 ? cps[k] : "##" + cps[k]);
    words.emplace_back(std::move(symbols), count);
  }

  std::vector<std::pair<std::string, std::string>> merges;
  for (int step = 0; step < num_merges; ++step) {
    std::map<std::pair<std::string, std::string>, std::int64_t> counts;
    for (const auto& [symbols, count] : words) {
      for (std::size_t k = 0; k + 1 < symbols.size(); ++k) counts[{symbols[k], symbols[k + 1]}] += count;
    }
    if (counts.empty()) break;
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;  // map order keeps the smallest pair on ties
    }
    const auto [left, right] = best->first;
    merges.push_back(best->first);
    const std::string merged = left + right.substr(right.rfind("##", 0) == 0 ? 2 : 0);
    for (auto& [symbols, count] : words) {
      std::vector<std::string> next;
      for (std::size_t k = 0; k < symbols.size(); ++k) {
        if (k + 1 < symbols.size() && symbols[k] == left && symbols[k + 1] == right) {
          next.push_back(merged);
          ++k;
        } else {
          next.push_back(symbols[k]);
        }
      }
      symbols = std::move(next);
    }
  }
  return merges;
}

std::vector<Span> reference_decode(const std::vector<Tag>& tags) {
  const int n = static_cast<int>(tags.size());
  std::vector<Span> spans;
  for (int i = 0; i < n; ++i) {
    const bool starts = tags[i] == Tag::B || (tags[i] == Tag::I && (i == 0 || tags[i - 1] == Tag::O));
    if (!starts) continue;
    for (int j = i; j < n; ++j) {
      bool inner_ok = true;
      for (int k = i + 1; k <= j; ++k) inner_ok = inner_ok && tags[k] == Tag::I;
      const bool closed = j + 1 == n || tags[j + 1] != Tag::I;
      if (inner_ok && closed) spans.push_back({i, j});
    }
  }
  return spans;
}

Counts brute_force_counts(const std::vector<std::vector<Span>>& predicted,
                          const std::vector<std::vector<Span>>& gold) {
  Counts c;
  for (std::size_t e = 0; e < gold.size(); ++e) {
    for (const auto& p : predicted[e]) {
      for (const auto& g : gold[e]) c.tp += (p.start == g.start && p.end == g.end) ? 1 : 0;
    }
    c.predicted += static_cast<std::int64_t>(predicted[e].size());
    c.gold += static_cast<std::int64_t>(gold[e].size());
  }
  const double p = c.predicted ? static_cast<double>(c.tp) / static_cast<double>(c.predicted) : 0.0;
  const double r = c.gold ? static_cast<double>(c.tp) / static_cast<double>(c.gold) : 0.0;
  c.f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  return c;
}

std::string sa_structure_violation(const EncodedInput& s, const EncodedInput& sa,
                                   std::size_t aspect_pieces, const Vocabulary& vocab) {
  if (sa.size() != s.size() + aspect_pieces + 1) return "length relation";
  const auto seps = std::count(sa.token_ids.begin(), sa.token_ids.end(), vocab.sep_id());
  if (seps != 2) return "expected two [SEP], found " + std::to_string(seps);
  if (sa.token_ids.back() != vocab.sep_id()) return "SA must end in [SEP]";
  for (std::size_t k = 0; k < sa.size(); ++k) {
    const bool tail = k >= s.size();
    if (!tail && (sa.token_ids[k] != s.token_ids[k] || sa.segment_ids[k] != 0 ||
                  sa.label_ids[k] != s.label_ids[k] || sa.loss_mask[k] != s.loss_mask[k])) {
      return "prefix differs from S at " + std::to_string(k);
    }
    if (tail && sa.segment_ids[k] != 1) return "tail segment id at " + std::to_string(k);
    if (tail && sa.loss_mask[k] != 0) return "tail loss mask at " + std::to_string(k);
  }
  for (std::size_t k = 0; k < aspect_pieces; ++k) {
    const auto from = static_cast<std::size_t>(s.aspect_piece_span.start) + k;
    if (sa.token_ids[s.size() + k] != s.token_ids[from]) return "tail does not repeat the aspect";
  }
  return {};
}

Vocabulary table1_vocab() {
  std::vector<std::string> pieces = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  for (const char* p : {"such", "an", "awesome", "surf", "snow", "##board", "great", "a", "which", "holds",
                        "edges", "well", "when", "riding", "on"}) {
    pieces.push_back(p);
  }
  return Vocabulary(std::move(pieces));
}

std::pair<Dataset, Vocabulary> random_dataset(std::size_t n, std::mt19937_64& rng) {
  static const std::vector<std::string> kWords = {"such",      "an",    "awesome", "surfboard", "snowboard",
                                                  "surfboards", "great", "a",       "the",       "boards",
                                                  "snow",      "is",    "zzz"};
  std::vector<std::string> pieces = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  for (const char* p : {"such", "an", "awesome", "surf", "snow", "##board", "##s", "great", "a", "the",
                        "board", "is"}) {
    pieces.push_back(p);
  }
  Dataset dataset{Split::kTrain, {}};
  std::uniform_int_distribution<std::size_t> word_dist(0, kWords.size() - 1);
  for (std::size_t e = 0; e < n; ++e) {
    SentenceExample ex;
    ex.id = "r" + std::to_string(e);
    const int len = std::uniform_int_distribution<int>(1, 14)(rng);
    for (int k = 0; k < len; ++k) ex.words.push_back(kWords[word_dist(rng)]);
    const int a0 = std::uniform_int_distribution<int>(0, len - 1)(rng);
    const int a1 = std::min(len - 1, a0 + std::uniform_int_distribution<int>(0, 2)(rng));
    ex.aspect = {a0, a1};
    for (int k = 0; k < len; ++k) {
      if (ex.aspect.contains(k) || std::bernoulli_distribution(0.7)(rng)) continue;
      int end = k;
      while (end + 1 < len && !ex.aspect.contains(end + 1) && std::bernoulli_distribution(0.3)(rng)) ++end;
      ex.opinions.push_back({k, end});
      k = end + 1;  // leave a gap so spans stay separate
    }
    dataset.examples.push_back(std::move(ex));
  }
  return {std::move(dataset), Vocabulary(std::move(pieces))};
}

Instance random_instance(std::mt19937_64& rng, int length, int dim, bool allow_external) {
  Instance inst;
  auto& hp = inst.hp;
  hp.vocab_size = 12;
  hp.embed_dim = dim;
  hp.hidden_dim = dim;
  hp.window = 3;
  hp.use_position = std::bernoulli_distribution(0.5)(rng);
  hp.use_segment = std::bernoulli_distribution(0.5)(rng);
  hp.seed = rng();
  if (allow_external && std::bernoulli_distribution(0.25)(rng)) hp.feature_mode = FeatureMode::kExternalFeatures;

  auto& enc = inst.enc;
  const int n = std::max(length, 3);
  std::uniform_int_distribution<int> token(5, hp.vocab_size - 1);
  const int a = std::uniform_int_distribution<int>(1, n - 2)(rng);
  for (int k = 0; k < n; ++k) {
    const bool inner = k > 0 && k < n - 1;
    enc.token_ids.push_back(k == 0 ? 2 : (k == n - 1 ? 3 : token(rng)));
    enc.segment_ids.push_back(std::bernoulli_distribution(0.3)(rng) ? 1 : 0);
    enc.position_ids.push_back(std::clamp(k - a, -hp.window, hp.window));
    const bool labeled = inner && std::bernoulli_distribution(0.7)(rng);
    enc.label_ids.push_back(labeled ? std::uniform_int_distribution<int>(0, 2)(rng) : -1);
    enc.loss_mask.push_back(labeled ? 1 : 0);
  }
  enc.sentence_region = {1, n - 2};
  enc.aspect_piece_span = {a, a};

  inst.params = init_parameters(hp);
  // Push every tensor off its initial values so zero biases and the forget
  // bias do not hide gradient errors.
  std::normal_distribution<double> noise(0.0, 0.3);
  inst.params.for_each([&](const char*, Matrix& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] += noise(rng);
  });
  if (hp.feature_mode == FeatureMode::kExternalFeatures) {
    inst.features = Matrix(n, dim);
    for (Eigen::Index k = 0; k < inst.features.size(); ++k) inst.features.data()[k] = noise(rng);
  }
  return inst;
}

TempDir::TempDir() {
  static std::mt19937_64 rng{std::random_device{}()};
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    path_ = base / ("towe-test-" + std::to_string(rng()));
    if (std::filesystem::create_directory(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace towe::testing
