#include <algorithm>

#include "towe/subword.hpp"

namespace towe {

std::size_t Tokenization::num_words() const {
  return word_index.empty() ? 0 : static_cast<std::size_t>(word_index.back()) + 1;
}

std::vector<int> Tokenization::first_piece_indices() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < is_first.size(); ++k) {
    if (is_first[k]) out.push_back(static_cast<int>(k));
  }
  return out;
}

Tokenizer Tokenizer::wordpiece(Vocabulary vocab) {
  return Tokenizer(Kind::kWordPiece, MergeTable{}, std::move(vocab));
}

Tokenizer Tokenizer::bpe(MergeTable merges, Vocabulary vocab) {
  return Tokenizer(Kind::kBpe, std::move(merges), std::move(vocab));
}

std::vector<std::string> Tokenizer::tokenize_word(std::string_view word) const {
  return kind_ == Kind::kWordPiece ? wordpiece_tokenize(word, vocab_)
                                   : bpe_tokenize(word, merges_, vocab_);
}

Tokenization tokenize_sentence(std::span<const std::string> words, const Tokenizer& tokenizer,
                               Span aspect_span) {
  if (aspect_span.start < 0 || aspect_span.start > aspect_span.end ||
      aspect_span.end >= static_cast<int>(words.size())) {
    throw std::invalid_argument("tokenize_sentence: aspect span out of range");
  }
  Tokenization tok;
  for (std::size_t w = 0; w < words.size(); ++w) {
    const int word = static_cast<int>(w);
    if (word == aspect_span.start) tok.aspect_piece_span.start = static_cast<int>(tok.pieces.size());
    auto pieces = tokenizer.tokenize_word(words[w]);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      tok.pieces.push_back(std::move(pieces[k]));
      tok.word_index.push_back(word);
      tok.is_first.push_back(k == 0);
    }
    if (word == aspect_span.end) tok.aspect_piece_span.end = static_cast<int>(tok.pieces.size()) - 1;
  }
  return tok;
}

}  // namespace towe
