#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "towe/corpus.hpp"

namespace towe {

inline constexpr std::string_view kContinuationPrefix = "##";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";
inline constexpr std::string_view kMaskToken = "[MASK]";

// Words longer than this (in code points) tokenize to [UNK].
inline constexpr std::size_t kMaxWordChars = 100;

class VocabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_continuation(std::string_view piece);
// "##board" -> "board"; first pieces are returned unchanged.
std::string_view strip_continuation(std::string_view piece);
// Concatenates pieces after stripping continuation prefixes.
std::string detokenize(std::span<const std::string> pieces);

// Dense piece <-> id map. Immutable after construction.
class Vocabulary {
 public:
  // Throws VocabError on a duplicate piece or a missing special token.
  explicit Vocabulary(std::vector<std::string> pieces);

  std::size_t size() const { return pieces_.size(); }
  const std::vector<std::string>& pieces() const { return pieces_; }
  const std::string& piece(int id) const { return pieces_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(std::string_view piece) const;
  bool contains(std::string_view piece) const { return find(piece).has_value(); }
  // Unknown pieces map to the [UNK] id.
  int id_or_unk(std::string_view piece) const;

  int cls_id() const { return cls_id_; }
  int sep_id() const { return sep_id_; }
  int pad_id() const { return pad_id_; }
  int unk_id() const { return unk_id_; }
  int mask_id() const { return mask_id_; }

  bool operator==(const Vocabulary& other) const { return pieces_ == other.pieces_; }

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, int> index_;
  int cls_id_ = -1;
  int sep_id_ = -1;
  int pad_id_ = -1;
  int unk_id_ = -1;
  int mask_id_ = -1;
};

// The five special tokens in their canonical file order.
std::vector<std::string> special_tokens();

Vocabulary load_vocab(const std::filesystem::path& path);
void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path);
// Hex SHA-256 of the serialized vocabulary file bytes.
std::string vocab_checksum(const Vocabulary& vocab);

// Greedy longest-match-first decomposition. Returns exactly {"[UNK]"} when
// the word cannot be fully covered by vocabulary pieces.
std::vector<std::string> wordpiece_tokenize(std::string_view word, const Vocabulary& vocab);

struct Merge {
  std::string left;
  std::string right;

  // ("a", "##b") -> "ab"; ("##a", "##b") -> "##ab".
  std::string merged() const;
  auto operator<=>(const Merge&) const = default;
};

// Ordered BPE merges; rank is the list position.
class MergeTable {
 public:
  MergeTable() = default;
  // Throws VocabError on a duplicate pair.
  explicit MergeTable(std::vector<Merge> merges);

  std::size_t size() const { return merges_.size(); }
  const std::vector<Merge>& merges() const { return merges_; }
  std::optional<std::size_t> rank(std::string_view left, std::string_view right) const;

  bool operator==(const MergeTable& other) const { return merges_ == other.merges_; }

 private:
  std::vector<Merge> merges_;
  std::unordered_map<std::string, std::size_t> ranks_;
};

MergeTable load_merges(const std::filesystem::path& path);
void save_merges(const MergeTable& merges, const std::filesystem::path& path);

struct WordCount {
  std::string word;
  std::int64_t count = 0;
};

struct BpeModel {
  MergeTable merges;
  Vocabulary vocab;
};

// Learns `num_merges` merges by repeatedly merging the most frequent
// adjacent symbol pair; ties go to the lexicographically smallest pair.
// Stops early when no pair remains. Throws std::invalid_argument on an
// empty corpus or a negative merge count.
BpeModel train_bpe(std::span<const WordCount> corpus, int num_merges);

// Applies the lowest-rank applicable merge until none applies. A word whose
// final symbols are not all in `vocab` becomes {"[UNK]"}.
std::vector<std::string> bpe_tokenize(std::string_view word, const MergeTable& merges,
                                      const Vocabulary& vocab);

// Subword pieces aligned to the source words.
struct Tokenization {
  std::vector<std::string> pieces;
  std::vector<int> word_index;
  std::vector<bool> is_first;
  Span aspect_piece_span;

  std::size_t num_pieces() const { return pieces.size(); }
  std::size_t num_words() const;
  // Piece index of each word's first piece.
  std::vector<int> first_piece_indices() const;
};

// Word-to-pieces strategy plus the vocabulary used for ids.
class Tokenizer {
 public:
  enum class Kind { kWordPiece, kBpe };

  static Tokenizer wordpiece(Vocabulary vocab);
  static Tokenizer bpe(MergeTable merges, Vocabulary vocab);

  Kind kind() const { return kind_; }
  const Vocabulary& vocab() const { return vocab_; }
  const MergeTable& merges() const { return merges_; }
  std::vector<std::string> tokenize_word(std::string_view word) const;

 private:
  Tokenizer(Kind kind, MergeTable merges, Vocabulary vocab)
      : kind_(kind), merges_(std::move(merges)), vocab_(std::move(vocab)) {}

  Kind kind_;
  MergeTable merges_;
  Vocabulary vocab_;
};

Tokenization tokenize_sentence(std::span<const std::string> words, const Tokenizer& tokenizer,
                               Span aspect_span);

// Splits a UTF-8 string into code points (each returned as its byte string).
// Invalid sequences are passed through one byte at a time.
std::vector<std::string> split_code_points(std::string_view text);

}  // namespace towe
