#include "towe/subword.hpp"

namespace towe {

std::vector<std::string> wordpiece_tokenize(std::string_view word, const Vocabulary& vocab) {
  const auto chars = split_code_points(word);
  const std::vector<std::string> unk{std::string(kUnkToken)};
  if (chars.empty() || chars.size() > kMaxWordChars) return unk;

  // Byte offset of every code-point boundary.
  std::vector<std::size_t> offsets{0};
  for (const auto& c : chars) offsets.push_back(offsets.back() + c.size());

  std::vector<std::string> pieces;
  std::size_t start = 0;
  std::string candidate;
  while (start < chars.size()) {
    bool matched = false;
    for (std::size_t end = chars.size(); end > start; --end) {
      candidate.clear();
      if (start > 0) candidate += kContinuationPrefix;
      candidate += word.substr(offsets[start], offsets[end] - offsets[start]);
      if (vocab.contains(candidate)) {
        pieces.push_back(candidate);
        start = end;
        matched = true;
        break;
      }
    }
    if (!matched) return unk;
  }
  return pieces;
}

}  // namespace towe
