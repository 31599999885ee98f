#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace towe {

// Inclusive index pair. Used for word spans and piece spans alike.
struct Span {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int i) const { return start <= i && i <= end; }
  bool overlaps(const Span& other) const {
    return start <= other.end && other.start <= end;
  }
  auto operator<=>(const Span&) const = default;
};

// Word-level IOB tag. The numeric value doubles as the classifier index.
enum class Tag : std::uint8_t { B = 0, I = 1, O = 2 };

inline constexpr int kNumTags = 3;

char tag_char(Tag tag);

enum class Split { kTrain, kDev, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);

// One (sentence, aspect) pair. Sentences with several aspects appear as
// several examples.
struct SentenceExample {
  std::string id;
  std::vector<std::string> words;
  Span aspect;
  std::vector<Span> opinions;

  bool operator==(const SentenceExample&) const = default;
};

struct Dataset {
  Split split = Split::kTrain;
  std::vector<SentenceExample> examples;

  bool operator==(const Dataset&) const = default;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws DataError naming the example id when any span invariant fails.
void validate_example(const SentenceExample& example);

struct LoadOptions {
  // Prediction inputs carry no gold opinions; the key is then optional.
  bool require_opinions = true;
};

Dataset parse_dataset(std::istream& in, Split split, const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path, Split split,
                     const LoadOptions& options = {});

std::string to_json_line(const SentenceExample& example);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

std::vector<Tag> derive_word_labels(const SentenceExample& example);

// Reads the tab-separated TOWE distribution layout:
//   sentence \t target tags \t opinion tags
// where each tag column is a space-separated list of `word\TAG` tokens.
// The published files prepend an `s_id` column; four-column rows are
// accepted and the id is taken from it. Header rows are skipped.
Dataset convert_legacy_tsv(const std::filesystem::path& path, Split split);

}  // namespace towe
