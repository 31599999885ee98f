#pragma once

// Reference implementations used to cross-check the library. They favour
// obviously-correct enumeration over speed and share no code with core.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "towe/corpus.hpp"
#include "towe/encoding.hpp"
#include "towe/eval.hpp"
#include "towe/model.hpp"
#include "towe/subword.hpp"

namespace towe::testing {

// Tries every split of the word into contiguous code-point runs and keeps
// the one where every piece is in the vocabulary and no longer vocabulary
// piece starts at the same offset. At most one split qualifies; none means
// {"[UNK]"}.
std::vector<std::string> exhaustive_wordpiece(const std::string& word,
                                              const std::vector<std::string>& vocab);

// Merge sequence from recounting every adjacent pair from scratch after
// each merge. Ties go to the smallest (left, right) pair.
std::vector<std::pair<std::string, std::string>> brute_force_bpe_merges(
    const std::vector<std::pair<std::string, std::int64_t>>& corpus, int num_merges);

// A span [i, j] is decoded iff it starts at a B, or at an I with no open
// span before it, covers only I after the start, and is not followed by I.
std::vector<Span> reference_decode(const std::vector<Tag>& tags);

struct Counts {
  std::int64_t tp = 0;
  std::int64_t predicted = 0;
  std::int64_t gold = 0;
  double f1 = 0.0;
};

// Nested-loop span intersection count; inputs hold no duplicate spans.
Counts brute_force_counts(const std::vector<std::vector<Span>>& predicted,
                          const std::vector<std::vector<Span>>& gold);

// Fixture vocabulary: specials plus the printed pieces of both
// sentences, lowercased.
Vocabulary table1_vocab();

// Empty when `sa` is `s` plus the aspect tail: one extra [SEP], length
// len(s) + aspect pieces + 1, tail segments all 1 and tail masks all false.
// Otherwise describes the first violation.
std::string sa_structure_violation(const EncodedInput& s, const EncodedInput& sa,
                                   std::size_t aspect_pieces, const Vocabulary& vocab);

// Random dataset with `n` examples over a tiny word list that forces
// multi-piece words, along with the vocabulary that tokenizes it.
std::pair<Dataset, Vocabulary> random_dataset(std::size_t n, std::mt19937_64& rng);

// A random model input with its parameters: `length` positions, a random
// aspect, labels on a random subset and random component toggles.
struct Instance {
  EncodedInput enc;
  Hyperparameters hp;
  Parameters params;
  Matrix features;  // filled in external-feature mode only

  const Matrix* feature_ptr() const { return features.size() ? &features : nullptr; }
};

Instance random_instance(std::mt19937_64& rng, int length, int dim, bool allow_external = true);

// Unique directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::string read_bytes(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace towe::testing
