#include "towe/encoding.hpp"

#include <algorithm>
#include <cstdlib>

#include "json.hpp"

namespace towe {
namespace {

void check_labels(std::span<const Tag> word_labels, const Tokenization& tok) {
  if (word_labels.size() != tok.num_words()) {
    throw EncodingError("label count " + std::to_string(word_labels.size()) +
                        " does not match word count " + std::to_string(tok.num_words()));
  }
}

// [CLS] T [SEP], with labels and positions for T.
EncodedInput build_sentence_part(const Tokenization& tok, const Vocabulary& vocab,
                                 std::span<const Tag> word_labels, const EncodeOptions& options) {
  check_labels(word_labels, tok);
  const auto [piece_labels, piece_mask] = project_labels_to_pieces(word_labels, tok);
  const auto piece_positions = relative_position_ids(tok, options.window);
  const int n = static_cast<int>(tok.num_pieces());

  EncodedInput enc;
  const auto push = [&enc](int token, int segment, int position, int label, bool mask) {
    enc.token_ids.push_back(token);
    enc.segment_ids.push_back(segment);
    enc.position_ids.push_back(position);
    enc.label_ids.push_back(label);
    enc.loss_mask.push_back(mask ? 1 : 0);
  };

  push(vocab.cls_id(), 0, 0, kSkipLabel, false);
  for (int k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    push(vocab.id_or_unk(tok.pieces[i]), 0, piece_positions[i], piece_labels[i], piece_mask[i] != 0);
  }
  push(vocab.sep_id(), 0, 0, kSkipLabel, false);
  enc.sentence_region = Span{1, n};
  enc.aspect_piece_span =
      Span{tok.aspect_piece_span.start + 1, tok.aspect_piece_span.end + 1};
  enc.variant = Variant::kS;
  return enc;
}

void check_length(const EncodedInput& enc, const EncodeOptions& options) {
  if (enc.size() > options.max_length) {
    throw EncodingError("encoded length " + std::to_string(enc.size()) + " exceeds the cap of " +
                        std::to_string(options.max_length));
  }
}

}  // namespace

std::string_view variant_name(Variant variant) {
  return variant == Variant::kS ? "S" : "SA";
}

Variant parse_variant(std::string_view name) {
  if (name == "S" || name == "s") return Variant::kS;
  if (name == "SA" || name == "sa" || name == "S,A") return Variant::kSA;
  throw std::invalid_argument("unknown variant `" + std::string(name) + "` (expected S or SA)");
}

std::size_t EncodedInput::num_labeled() const {
  return static_cast<std::size_t>(std::count(loss_mask.begin(), loss_mask.end(), 1));
}

void validate_encoded(const EncodedInput& enc, const Vocabulary& vocab) {
  const auto fail = [](const std::string& what) { throw EncodingError("invalid encoding: " + what); };
  const std::size_t n = enc.size();
  if (enc.segment_ids.size() != n || enc.position_ids.size() != n || enc.label_ids.size() != n ||
      enc.loss_mask.size() != n) {
    fail("per-position lists differ in length");
  }
  if (n < 3 || enc.token_ids[0] != vocab.cls_id()) fail("position 0 must hold [CLS]");
  const auto region = enc.sentence_region;
  if (region.start != 1 || region.end < region.start || static_cast<std::size_t>(region.end + 1) >= n) {
    fail("bad sentence region");
  }
  if (enc.token_ids[static_cast<std::size_t>(region.end + 1)] != vocab.sep_id()) {
    fail("sentence region must be followed by [SEP]");
  }
  const auto seps = std::count(enc.token_ids.begin(), enc.token_ids.end(), vocab.sep_id());
  if (enc.variant == Variant::kS) {
    if (seps != 1) fail("variant S needs exactly one [SEP]");
    if (static_cast<std::size_t>(region.end + 2) != n) fail("variant S has trailing positions");
    if (std::any_of(enc.segment_ids.begin(), enc.segment_ids.end(), [](int s) { return s != 0; })) {
      fail("variant S segment ids must all be 0");
    }
  } else {
    if (seps != 2) fail("variant SA needs exactly two [SEP]");
    if (enc.token_ids.back() != vocab.sep_id()) fail("variant SA must end with [SEP]");
    const auto tail_begin = static_cast<std::size_t>(region.end + 2);
    const auto aspect_len = static_cast<std::size_t>(enc.aspect_piece_span.length());
    if (n - 1 - tail_begin != aspect_len) fail("tail length differs from the aspect");
    for (std::size_t k = 0; k < aspect_len; ++k) {
      const auto src = static_cast<std::size_t>(enc.aspect_piece_span.start) + k;
      // Masking only touches the sentence region, so the tail may differ
      // from a masked aspect.
      if (enc.token_ids[tail_begin + k] != enc.token_ids[src] &&
          enc.token_ids[src] != vocab.mask_id()) {
        fail("tail does not repeat the aspect pieces");
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const int expected = k < tail_begin ? 0 : 1;
      if (enc.segment_ids[k] != expected) fail("segment ids do not match the pair layout");
    }
  }
  if (enc.aspect_piece_span.start < region.start || enc.aspect_piece_span.end > region.end ||
      enc.aspect_piece_span.start > enc.aspect_piece_span.end) {
    fail("aspect span outside the sentence region");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (enc.loss_mask[k] == 0) continue;
    if (!region.contains(static_cast<int>(k)) || enc.label_ids[k] == kSkipLabel) {
      fail("loss mask set outside a labeled sentence position");
    }
  }
}

std::pair<std::vector<int>, std::vector<std::uint8_t>> project_labels_to_pieces(
    std::span<const Tag> word_labels, const Tokenization& tok) {
  check_labels(word_labels, tok);
  std::vector<int> labels(tok.num_pieces(), kSkipLabel);
  std::vector<std::uint8_t> mask(tok.num_pieces(), 0);
  for (std::size_t k = 0; k < tok.num_pieces(); ++k) {
    if (!tok.is_first[k]) continue;
    labels[k] = static_cast<int>(word_labels[static_cast<std::size_t>(tok.word_index[k])]);
    mask[k] = 1;
  }
  return {std::move(labels), std::move(mask)};
}

std::vector<int> relative_position_ids(const Tokenization& tok, int window) {
  const Span aspect = tok.aspect_piece_span;
  std::vector<int> out(tok.num_pieces(), 0);
  for (std::size_t k = 0; k < tok.num_pieces(); ++k) {
    const int i = static_cast<int>(k);
    int offset = 0;
    if (i < aspect.start) offset = i - aspect.start;
    if (i > aspect.end) offset = i - aspect.end;
    out[k] = std::clamp(offset, -window, window);
  }
  return out;
}

EncodedInput format_sentence_input(const Tokenization& tok, const Vocabulary& vocab,
                                   std::span<const Tag> word_labels, const EncodeOptions& options) {
  EncodedInput enc = build_sentence_part(tok, vocab, word_labels, options);
  check_length(enc, options);
  return enc;
}

EncodedInput format_sentence_aspect_input(const Tokenization& tok, const Vocabulary& vocab,
                                          std::span<const Tag> word_labels,
                                          const EncodeOptions& options) {
  EncodedInput enc = build_sentence_part(tok, vocab, word_labels, options);
  const Span aspect = tok.aspect_piece_span;
  if (aspect.start < 0 || aspect.end < aspect.start) {
    throw EncodingError("sentence-aspect input needs a non-empty aspect");
  }
  const auto append = [&enc](int token) {
    enc.token_ids.push_back(token);
    enc.segment_ids.push_back(1);
    enc.position_ids.push_back(0);
    enc.label_ids.push_back(kSkipLabel);
    enc.loss_mask.push_back(0);
  };
  for (int k = aspect.start; k <= aspect.end; ++k) {
    append(vocab.id_or_unk(tok.pieces[static_cast<std::size_t>(k)]));
  }
  append(vocab.sep_id());
  enc.variant = Variant::kSA;
  check_length(enc, options);
  return enc;
}

EncodedInput encode(const Tokenization& tok, const Vocabulary& vocab,
                    std::span<const Tag> word_labels, Variant variant,
                    const EncodeOptions& options) {
  return variant == Variant::kS ? format_sentence_input(tok, vocab, word_labels, options)
                                : format_sentence_aspect_input(tok, vocab, word_labels, options);
}

EncodedInput mask_aspect(EncodedInput enc, const Vocabulary& vocab) {
  for (int k = enc.aspect_piece_span.start; k <= enc.aspect_piece_span.end; ++k) {
    if (enc.sentence_region.contains(k)) enc.token_ids[static_cast<std::size_t>(k)] = vocab.mask_id();
  }
  return enc;
}

std::vector<int> word_positions(const Tokenization& tok) {
  auto positions = tok.first_piece_indices();
  for (auto& p : positions) p += 1;  // skip [CLS]
  return positions;
}

std::string encoded_to_json(std::string_view id, const EncodedInput& enc,
                            const Vocabulary& vocab) {
  nlohmann::json record = nlohmann::json::object();
  record["id"] = std::string(id);
  record["variant"] = std::string(variant_name(enc.variant));
  std::vector<std::string> tokens;
  for (const int token : enc.token_ids) tokens.push_back(vocab.piece(token));
  record["tokens"] = std::move(tokens);
  record["token_ids"] = enc.token_ids;
  record["segment_ids"] = enc.segment_ids;
  record["position_ids"] = enc.position_ids;
  record["label_ids"] = enc.label_ids;
  std::vector<bool> mask(enc.loss_mask.begin(), enc.loss_mask.end());
  record["loss_mask"] = mask;
  record["sentence_region"] = {enc.sentence_region.start, enc.sentence_region.end};
  record["aspect_piece_span"] = {enc.aspect_piece_span.start, enc.aspect_piece_span.end};
  return record.dump();
}

}  // namespace towe
