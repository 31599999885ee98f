#include "towe/synthetic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "towe/random.hpp"

namespace towe::synthetic {
namespace {

const std::vector<std::string> kFillers = {
    "we", "saw", "today", "here", "then", "also", "really", "this", "that", "with",
    "for", "on", "at", "there", "honestly", "overall", "i", "think", "again", "though"};

const std::vector<std::string> kNouns = {"surfboard", "snowboard", "laptop", "screen",
                                         "battery",   "pizza",     "sushi",  "menu",
                                         "camera",    "keyboard",  "waiter", "service"};

// Noun stems. Every noun is two pieces, stem + "##o" (singular) or
// stem + "##i" (plural), so masking hides number without changing length.
const std::vector<std::string> kCorefNouns = {"pizz", "scren", "menn", "batter",
                                              "wait", "drink", "lapt", "kez"};

const std::vector<std::string> kAdjectives = {"great", "awful", "tasty", "slow",  "friendly", "rude",
                                              "cheap", "bright", "fresh", "noisy", "clean",   "cold",
                                              "warm",  "crisp",  "bland", "sharp"};

template <typename T>
const T& pick(const std::vector<T>& items, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, items.size() - 1);
  return items[dist(rng)];
}

int uniform_int(int lo, int hi, Rng& rng) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(double p, Rng& rng) { return std::bernoulli_distribution(p)(rng); }

void add_filler(std::vector<std::string>& words, int max_filler, Rng& rng) {
  const int count = uniform_int(0, std::max(0, max_filler), rng);
  for (int k = 0; k < count; ++k) words.push_back(pick(kFillers, rng));
}

// Two-syllable consonant-vowel stems, unique and disjoint from `taken`.
std::vector<std::string> make_stems(std::size_t count, std::set<std::string>& taken, Rng& rng) {
  static const std::string kConsonants = "bdfgkmnprstvz";
  static const std::string kVowels = "aeiou";
  std::vector<std::string> stems;
  while (stems.size() < count) {
    std::string stem;
    for (int s = 0; s < 2; ++s) {
      stem += kConsonants[std::uniform_int_distribution<std::size_t>(0, kConsonants.size() - 1)(rng)];
      stem += kVowels[std::uniform_int_distribution<std::size_t>(0, kVowels.size() - 1)(rng)];
    }
    if (taken.insert(stem).second) stems.push_back(stem);
  }
  return stems;
}

struct SplitSizes {
  std::size_t train = 0;
  std::size_t dev = 0;
};

SplitSizes split_sizes(const Options& options) {
  if (options.num_sentences < 3) throw std::invalid_argument("need at least 3 sentences");
  if (options.train_fraction <= 0.0 || options.dev_fraction <= 0.0 ||
      options.train_fraction + options.dev_fraction >= 1.0) {
    throw std::invalid_argument("split fractions must be positive and leave room for a test split");
  }
  const auto n = static_cast<double>(options.num_sentences);
  SplitSizes sizes{static_cast<std::size_t>(n * options.train_fraction),
                   static_cast<std::size_t>(n * options.dev_fraction)};
  sizes.train = std::max<std::size_t>(sizes.train, 1);
  sizes.dev = std::max<std::size_t>(sizes.dev, 1);
  return sizes;
}

Dataset& target_split(Corpus& corpus, std::size_t index, const SplitSizes& sizes) {
  if (index < sizes.train) return corpus.train;
  if (index < sizes.train + sizes.dev) return corpus.dev;
  return corpus.test;
}

Vocabulary build_vocab(const std::set<std::string>& words) {
  std::vector<std::string> pieces = special_tokens();
  pieces.insert(pieces.end(), words.begin(), words.end());
  return Vocabulary(std::move(pieces));
}

Corpus empty_corpus(Vocabulary vocab) {
  return Corpus{Dataset{Split::kTrain, {}}, Dataset{Split::kDev, {}}, Dataset{Split::kTest, {}},
                std::move(vocab)};
}

}  // namespace

Corpus make_suffix_corpus(const Options& options) {
  const SplitSizes sizes = split_sizes(options);
  Rng rng = make_rng(options.seed, kDataStream);

  std::set<std::string> taken(kFillers.begin(), kFillers.end());
  taken.insert(kNouns.begin(), kNouns.end());
  taken.insert({"the", "and", "ly", "en"});
  const auto seen_stems = make_stems(40, taken, rng);
  const auto held_out_stems = make_stems(20, taken, rng);

  std::set<std::string> vocab_words(taken.begin(), taken.end());
  vocab_words.erase("ly");
  vocab_words.erase("en");
  vocab_words.insert({"##ly", "##en"});
  Corpus corpus = empty_corpus(build_vocab(vocab_words));

  for (std::size_t index = 0; index < options.num_sentences; ++index) {
    const bool in_train = index < sizes.train;
    const auto& stems = in_train ? seen_stems : held_out_stems;

    SentenceExample example;
    example.id = "suffix-" + std::to_string(index);
    auto& words = example.words;
    std::string noun1 = pick(kNouns, rng);
    std::string noun2 = pick(kNouns, rng);
    while (noun2 == noun1) noun2 = pick(kNouns, rng);

    int opinion_slot[2] = {-1, -1};
    int noun_slot[2] = {-1, -1};
    for (int phrase = 0; phrase < 2; ++phrase) {
      add_filler(words, options.max_filler, rng);
      if (phrase == 1) words.push_back("and");
      words.push_back("the");
      const bool opinion = coin(0.8, rng);
      if (opinion) opinion_slot[phrase] = static_cast<int>(words.size());
      words.push_back(pick(stems, rng) + (opinion ? "ly" : "en"));
      noun_slot[phrase] = static_cast<int>(words.size());
      words.push_back(phrase == 0 ? noun1 : noun2);
    }
    add_filler(words, options.max_filler, rng);

    const int aspect = coin(0.5, rng) ? 0 : 1;
    example.aspect = Span{noun_slot[aspect], noun_slot[aspect]};
    if (opinion_slot[aspect] >= 0) example.opinions.push_back({opinion_slot[aspect], opinion_slot[aspect]});
    validate_example(example);
    target_split(corpus, index, sizes).examples.push_back(std::move(example));
  }
  return corpus;
}

Corpus make_coreference_corpus(const Options& options) {
  const SplitSizes sizes = split_sizes(options);
  Rng rng = make_rng(options.seed, kDataStream);

  std::set<std::string> vocab_words(kFillers.begin(), kFillers.end());
  vocab_words.insert(kAdjectives.begin(), kAdjectives.end());
  vocab_words.insert(kCorefNouns.begin(), kCorefNouns.end());
  vocab_words.insert({"the", "was", "and", "so", ",", "it", "they", "##o", "##i"});
  Corpus corpus = empty_corpus(build_vocab(vocab_words));

  for (std::size_t index = 0; index < options.num_sentences; ++index) {
    SentenceExample example;
    example.id = "coref-" + std::to_string(index);
    auto& words = example.words;

    // Number is independent per noun, so the other noun says nothing
    // about the aspect's number.
    const bool plural[2] = {coin(0.5, rng), coin(0.5, rng)};
    std::string noun1 = pick(kCorefNouns, rng);
    std::string noun2 = pick(kCorefNouns, rng);
    while (noun2 == noun1) noun2 = pick(kCorefNouns, rng);
    noun1 += plural[0] ? "i" : "o";
    noun2 += plural[1] ? "i" : "o";

    const int noun_slot[2] = {1, 6};
    const int adjective_slot[2] = {3, 8};
    words = {"the", noun1, "was", pick(kAdjectives, rng), "and", "the", noun2, "was", pick(kAdjectives, rng),
             ","};
    add_filler(words, options.max_filler, rng);

    const bool pronoun_plural = coin(0.5, rng);
    const std::string pronoun = pronoun_plural ? "they" : "it";
    int last_slot = -1;
    if (coin(0.5, rng)) {
      words.insert(words.end(), {pronoun, "was"});
      last_slot = static_cast<int>(words.size());
      words.push_back(pick(kAdjectives, rng));
    } else {
      words.push_back("so");
      last_slot = static_cast<int>(words.size());
      words.push_back(pick(kAdjectives, rng));
      words.insert(words.end(), {"was", pronoun});
    }

    const int aspect = coin(0.5, rng) ? 0 : 1;
    example.aspect = Span{noun_slot[aspect], noun_slot[aspect]};
    example.opinions.push_back({adjective_slot[aspect], adjective_slot[aspect]});
    if (pronoun_plural == plural[aspect]) example.opinions.push_back({last_slot, last_slot});
    validate_example(example);
    target_split(corpus, index, sizes).examples.push_back(std::move(example));
  }
  return corpus;
}

Kind parse_kind(std::string_view name) {
  if (name == "suffix") return Kind::kSuffix;
  if (name == "coref" || name == "coreference") return Kind::kCoreference;
  throw std::invalid_argument("unknown corpus kind `" + std::string(name) + "` (expected suffix or coref)");
}

Corpus make_corpus(Kind kind, const Options& options) {
  return kind == Kind::kSuffix ? make_suffix_corpus(options) : make_coreference_corpus(options);
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_dataset(corpus.train, dir / "train.jsonl");
  save_dataset(corpus.dev, dir / "dev.jsonl");
  save_dataset(corpus.test, dir / "test.jsonl");
  save_vocab(corpus.vocab, dir / "vocab.txt");
}

}  // namespace towe::synthetic
