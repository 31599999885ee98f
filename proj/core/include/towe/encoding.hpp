#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "towe/corpus.hpp"
#include "towe/subword.hpp"

namespace towe {

// S:  [CLS] T [SEP]
// SA: [CLS] T [SEP] t_a [SEP]
enum class Variant { kS, kSA };

std::string_view variant_name(Variant variant);
Variant parse_variant(std::string_view name);

// Label id for positions that are not classified. Never a softmax class.
inline constexpr int kSkipLabel = -1;

struct EncodeOptions {
  int window = 50;
  std::size_t max_length = 256;
};

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EncodedInput {
  std::vector<int> token_ids;
  std::vector<int> segment_ids;
  std::vector<int> position_ids;
  std::vector<int> label_ids;
  std::vector<std::uint8_t> loss_mask;
  // Encoded positions of the sentence pieces, i.e. T inside T^(S).
  Span sentence_region;
  // Encoded positions of the aspect pieces inside the sentence region.
  Span aspect_piece_span;
  Variant variant = Variant::kS;

  std::size_t size() const { return token_ids.size(); }
  std::size_t num_labeled() const;
  bool operator==(const EncodedInput&) const = default;
};

// Checks every structural invariant; throws EncodingError on violation.
void validate_encoded(const EncodedInput& enc, const Vocabulary& vocab);

// First pieces carry the word label; all other pieces carry kSkipLabel
// with a false mask. Output is indexed by piece.
std::pair<std::vector<int>, std::vector<std::uint8_t>> project_labels_to_pieces(
    std::span<const Tag> word_labels, const Tokenization& tok);

// Offset of each piece to the nearest aspect piece, clipped to [-window, window].
std::vector<int> relative_position_ids(const Tokenization& tok, int window);

EncodedInput format_sentence_input(const Tokenization& tok, const Vocabulary& vocab,
                                   std::span<const Tag> word_labels,
                                   const EncodeOptions& options = {});

EncodedInput format_sentence_aspect_input(const Tokenization& tok, const Vocabulary& vocab,
                                          std::span<const Tag> word_labels,
                                          const EncodeOptions& options = {});

EncodedInput encode(const Tokenization& tok, const Vocabulary& vocab,
                    std::span<const Tag> word_labels, Variant variant,
                    const EncodeOptions& options = {});

// Replaces the aspect ids inside the sentence region with [MASK].
EncodedInput mask_aspect(EncodedInput enc, const Vocabulary& vocab);

// Encoded position of every word's first piece, in word order.
std::vector<int> word_positions(const Tokenization& tok);

// One JSON object (no trailing newline) mirroring the EncodedInput fields,
// plus the token strings for alignment checks.
std::string encoded_to_json(std::string_view id, const EncodedInput& enc,
                            const Vocabulary& vocab);

}  // namespace towe
