#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>

#include "towe/corpus.hpp"
#include "towe/subword.hpp"

namespace towe::synthetic {

// Generated corpora with a matching WordPiece vocabulary.
struct Corpus {
  Dataset train;
  Dataset dev;
  Dataset test;
  Vocabulary vocab;
};

struct Options {
  std::size_t num_sentences = 2000;
  double train_fraction = 0.7;
  double dev_fraction = 0.15;
  std::uint64_t seed = 7;
  int max_filler = 4;
};

// Two "the MOD NOUN" phrases per sentence; the aspect is one of the two
// nouns. A modifier is an opinion when it ends in the piece "##ly" and
// precedes the aspect; "##en" modifiers are neutral. Test sentences draw
// their modifier stems from a pool never seen in training, so only the
// shared suffix piece identifies opinions there.
Corpus make_suffix_corpus(const Options& options);

// "the N1 was A1 and the N2 was A2 , <filler>" followed by either
// "PRON was A3" or "so A3 was PRON". Nouns end in the piece "##o"
// (singular) or "##i" (plural); PRON is "it" or "they". A3 is an opinion iff PRON agrees in number with
// the aspect noun, so resolving it needs the aspect's form, not just its
// location. In the second order the pronoun follows A3, which only the
// appended aspect makes resolvable for a single-layer BiLSTM.
Corpus make_coreference_corpus(const Options& options);

enum class Kind { kSuffix, kCoreference };

Kind parse_kind(std::string_view name);
Corpus make_corpus(Kind kind, const Options& options);

// Writes train.jsonl, dev.jsonl, test.jsonl and vocab.txt into `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace towe::synthetic
