#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "towe/subword.hpp"

namespace towe {

bool is_continuation(std::string_view piece) {
  return piece.size() > kContinuationPrefix.size() && piece.starts_with(kContinuationPrefix);
}

std::string_view strip_continuation(std::string_view piece) {
  return is_continuation(piece) ? piece.substr(kContinuationPrefix.size()) : piece;
}

std::string detokenize(std::span<const std::string> pieces) {
  std::string out;
  for (const auto& piece : pieces) out += strip_continuation(piece);
  return out;
}

std::vector<std::string> special_tokens() {
  return {std::string(kPadToken), std::string(kUnkToken), std::string(kClsToken),
          std::string(kSepToken), std::string(kMaskToken)};
}

Vocabulary::Vocabulary(std::vector<std::string> pieces) : pieces_(std::move(pieces)) {
  index_.reserve(pieces_.size());
  for (std::size_t id = 0; id < pieces_.size(); ++id) {
    if (pieces_[id].empty()) throw VocabError("empty piece at id " + std::to_string(id));
    if (!index_.emplace(pieces_[id], static_cast<int>(id)).second) {
      throw VocabError("duplicate piece `" + pieces_[id] + "` at id " + std::to_string(id));
    }
  }
  const auto require = [this](std::string_view token) {
    const auto id = find(token);
    if (!id) throw VocabError("vocabulary lacks special token " + std::string(token));
    return *id;
  };
  cls_id_ = require(kClsToken);
  sep_id_ = require(kSepToken);
  pad_id_ = require(kPadToken);
  unk_id_ = require(kUnkToken);
  mask_id_ = require(kMaskToken);
}

std::optional<int> Vocabulary::find(std::string_view piece) const {
  const auto it = index_.find(std::string(piece));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::id_or_unk(std::string_view piece) const { return find(piece).value_or(unk_id_); }

Vocabulary load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw VocabError("cannot open vocabulary " + path.string());
  std::vector<std::string> pieces;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw VocabError("vocabulary line " + std::to_string(line_no) + " is empty");
    const auto [it, inserted] = first_line.emplace(line, line_no);
    if (!inserted) {
      throw VocabError("vocabulary line " + std::to_string(line_no) + ": duplicate piece `" + line +
                       "` (first seen on line " + std::to_string(it->second) + ")");
    }
    pieces.push_back(line);
  }
  return Vocabulary(std::move(pieces));
}

void save_vocab(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw VocabError("cannot write vocabulary " + path.string());
  for (const auto& piece : vocab.pieces()) out << piece << '\n';
}

std::string vocab_checksum(const Vocabulary& vocab) {
  std::string bytes;
  for (const auto& piece : vocab.pieces()) {
    bytes += piece;
    bytes += '\n';
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    throw VocabError("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

}  // namespace towe
