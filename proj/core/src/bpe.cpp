#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "towe/subword.hpp"

namespace towe {
namespace {

std::string pair_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key += left;
  key += ' ';
  key += right;
  return key;
}

std::vector<std::string> initial_symbols(std::string_view word) {
  auto symbols = split_code_points(word);
  for (std::size_t k = 1; k < symbols.size(); ++k) {
    symbols[k] = std::string(kContinuationPrefix) + symbols[k];
  }
  return symbols;
}

// Merges every non-overlapping occurrence of (left, right), left to right.
bool apply_merge(std::vector<std::string>& symbols, const Merge& merge) {
  bool changed = false;
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    if (k + 1 < symbols.size() && symbols[k] == merge.left && symbols[k + 1] == merge.right) {
      out.push_back(merge.merged());
      ++k;
      changed = true;
    } else {
      out.push_back(std::move(symbols[k]));
    }
  }
  symbols = std::move(out);
  return changed;
}

class PairCounter {
 public:
  void add(const std::vector<std::string>& symbols, std::int64_t count, std::size_t word) {
    for (std::size_t k = 0; k + 1 < symbols.size(); ++k) {
      Merge pair{symbols[k], symbols[k + 1]};
      counts_[pair] += count;
      words_[pair].insert(word);
    }
  }

  void remove(const std::vector<std::string>& symbols, std::int64_t count) {
    for (std::size_t k = 0; k + 1 < symbols.size(); ++k) {
      auto it = counts_.find(Merge{symbols[k], symbols[k + 1]});
      it->second -= count;
    }
  }

  // Most frequent pair; std::map order makes the first maximum the
  // lexicographically smallest pair.
  std::optional<Merge> best() const {
    const Merge* best = nullptr;
    std::int64_t best_count = 0;
    for (const auto& [pair, count] : counts_) {
      if (count > best_count) {
        best = &pair;
        best_count = count;
      }
    }
    if (best == nullptr) return std::nullopt;
    return *best;
  }

  std::set<std::size_t> take_words(const Merge& pair) {
    auto node = words_.extract(pair);
    return node.empty() ? std::set<std::size_t>{} : std::move(node.mapped());
  }

 private:
  std::map<Merge, std::int64_t> counts_;
  std::map<Merge, std::set<std::size_t>> words_;
};

}  // namespace

std::string Merge::merged() const { return left + std::string(strip_continuation(right)); }

MergeTable::MergeTable(std::vector<Merge> merges) : merges_(std::move(merges)) {
  for (std::size_t rank = 0; rank < merges_.size(); ++rank) {
    if (!ranks_.emplace(pair_key(merges_[rank].left, merges_[rank].right), rank).second) {
      throw VocabError("duplicate merge `" + merges_[rank].left + " " + merges_[rank].right +
                       "` at rank " + std::to_string(rank));
    }
  }
}

std::optional<std::size_t> MergeTable::rank(std::string_view left, std::string_view right) const {
  const auto it = ranks_.find(pair_key(left, right));
  if (it == ranks_.end()) return std::nullopt;
  return it->second;
}

MergeTable load_merges(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VocabError("cannot open merges " + path.string());
  std::vector<Merge> merges;
  std::set<Merge> seen;
  std::string line;
  for (std::size_t line_no = 0; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 == line.size() ||
        line.find(' ', space + 1) != std::string::npos) {
      throw VocabError("merges line " + std::to_string(line_no) + ": expected two symbols");
    }
    Merge merge{line.substr(0, space), line.substr(space + 1)};
    if (!seen.insert(merge).second) {
      throw VocabError("merges line " + std::to_string(line_no) + ": duplicate merge");
    }
    merges.push_back(std::move(merge));
  }
  return MergeTable(std::move(merges));
}

void save_merges(const MergeTable& merges, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw VocabError("cannot write merges " + path.string());
  for (const auto& merge : merges.merges()) out << merge.left << ' ' << merge.right << '\n';
}

BpeModel train_bpe(std::span<const WordCount> corpus, int num_merges) {
  if (corpus.empty()) throw std::invalid_argument("train_bpe: empty corpus");
  if (num_merges < 0) throw std::invalid_argument("train_bpe: negative merge count");

  std::vector<std::vector<std::string>> words;
  std::vector<std::int64_t> counts;
  std::set<std::string> alphabet;
  PairCounter pairs;
  for (const auto& entry : corpus) {
    if (entry.word.empty()) throw std::invalid_argument("train_bpe: empty word in corpus");
    if (entry.count <= 0) continue;
    words.push_back(initial_symbols(entry.word));
    counts.push_back(entry.count);
    alphabet.insert(words.back().begin(), words.back().end());
    pairs.add(words.back(), entry.count, words.size() - 1);
  }

  std::vector<Merge> merges;
  while (static_cast<int>(merges.size()) < num_merges) {
    const auto best = pairs.best();
    if (!best) break;
    for (const std::size_t w : pairs.take_words(*best)) {
      pairs.remove(words[w], counts[w]);
      apply_merge(words[w], *best);
      pairs.add(words[w], counts[w], w);
    }
    merges.push_back(*best);
  }

  std::vector<std::string> pieces = special_tokens();
  std::set<std::string> present(pieces.begin(), pieces.end());
  for (const auto& symbol : alphabet) {
    if (present.insert(symbol).second) pieces.push_back(symbol);
  }
  for (const auto& merge : merges) {
    auto symbol = merge.merged();
    if (present.insert(symbol).second) pieces.push_back(std::move(symbol));
  }
  return BpeModel{MergeTable(std::move(merges)), Vocabulary(std::move(pieces))};
}

std::vector<std::string> bpe_tokenize(std::string_view word, const MergeTable& merges,
                                      const Vocabulary& vocab) {
  auto symbols = initial_symbols(word);
  if (symbols.empty()) return {std::string(kUnkToken)};
  while (symbols.size() > 1) {
    std::optional<std::size_t> best_rank;
    for (std::size_t k = 0; k + 1 < symbols.size(); ++k) {
      const auto rank = merges.rank(symbols[k], symbols[k + 1]);
      if (rank && (!best_rank || *rank < *best_rank)) best_rank = rank;
    }
    if (!best_rank) break;
    apply_merge(symbols, merges.merges()[*best_rank]);
  }
  for (const auto& symbol : symbols) {
    if (!vocab.contains(symbol)) return {std::string(kUnkToken)};
  }
  return symbols;
}

}  // namespace towe
