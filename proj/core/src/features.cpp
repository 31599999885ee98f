#include <fstream>
#include <unordered_map>

#include "binary_io.hpp"
#include "json.hpp"
#include "towe/model.hpp"

namespace towe {

std::vector<FeatureEntry> read_feature_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open feature file " + path.string());
  if (!detail::read_magic(in, "TFEA")) throw ModelError(path.string() + ": bad magic, expected TFEA");
  std::uint32_t version = 0;
  std::uint32_t count = 0;
  if (!detail::read_le(in, version) || version != kFeatureFileVersion) {
    throw ModelError(path.string() + ": unsupported feature file version");
  }
  if (!detail::read_le(in, count)) throw ModelError(path.string() + ": truncated header");

  std::vector<FeatureEntry> entries;
  entries.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto truncated = [&]() {
      return ModelError(path.string() + ": truncated at example " + std::to_string(k));
    };
    std::uint16_t id_length = 0;
    if (!detail::read_le(in, id_length)) throw truncated();
    FeatureEntry entry;
    entry.id.resize(id_length);
    if (!in.read(entry.id.data(), id_length)) throw truncated();
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    if (!detail::read_le(in, rows) || !detail::read_le(in, cols)) throw truncated();
    entry.values.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) {
        float v = 0.0F;
        if (!detail::read_f32(in, v)) throw truncated();
        entry.values(r, c) = static_cast<double>(v);
      }
    }
    entries.push_back(std::move(entry));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ModelError(path.string() + ": trailing bytes");
  return entries;
}

void write_feature_file(const std::vector<FeatureEntry>& entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ModelError("cannot write feature file " + path.string());
  out.write("TFEA", 4);
  detail::write_le<std::uint32_t>(out, kFeatureFileVersion);
  detail::write_le(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& entry : entries) {
    if (entry.id.size() > 0xFFFF) throw ModelError("feature id too long: " + entry.id);
    detail::write_le(out, static_cast<std::uint16_t>(entry.id.size()));
    out.write(entry.id.data(), static_cast<std::streamsize>(entry.id.size()));
    detail::write_le(out, static_cast<std::uint32_t>(entry.values.rows()));
    detail::write_le(out, static_cast<std::uint32_t>(entry.values.cols()));
    for (Eigen::Index r = 0; r < entry.values.rows(); ++r) {
      for (Eigen::Index c = 0; c < entry.values.cols(); ++c) {
        detail::write_f32(out, static_cast<float>(entry.values(r, c)));
      }
    }
  }
  if (!out) throw ModelError("failed writing feature file " + path.string());
}

std::vector<Matrix> load_external_features(const std::filesystem::path& path,
                                           std::span<const FeatureRequest> requests,
                                           int embed_dim) {
  auto entries = read_feature_file(path);
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (!by_id.emplace(entries[k].id, k).second) {
      throw ModelError(path.string() + ": duplicate example id `" + entries[k].id + "`");
    }
  }
  std::vector<Matrix> out;
  out.reserve(requests.size());
  for (const auto& request : requests) {
    const auto it = by_id.find(request.id);
    if (it == by_id.end()) throw ModelError(path.string() + ": no features for example `" + request.id + "`");
    const Matrix& values = entries[it->second].values;
    if (static_cast<std::size_t>(values.rows()) != request.rows) {
      throw ModelError("example `" + request.id + "`: " + std::to_string(values.rows()) +
                       " feature rows for " + std::to_string(request.rows) + " encoded positions");
    }
    if (values.cols() != embed_dim) {
      throw ModelError("example `" + request.id + "`: feature dimension " + std::to_string(values.cols()) +
                       " does not match embed_dim " + std::to_string(embed_dim));
    }
    out.push_back(values);
  }
  return out;
}

FeatureManifest load_feature_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open feature manifest " + path.string());
  try {
    const auto doc = nlohmann::json::parse(in);
    FeatureManifest manifest;
    manifest.encoder = doc.at("encoder").get<std::string>();
    manifest.hidden_dim = doc.at("hidden_dim").get<int>();
    manifest.vocab_checksum = doc.at("vocab_checksum").get<std::string>();
    manifest.example_count = doc.at("example_count").get<std::size_t>();
    return manifest;
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(path.string() + ": malformed manifest (" + e.what() + ")");
  }
}

std::filesystem::path feature_manifest_path(const std::filesystem::path& features) {
  auto path = features;
  path += ".manifest.json";
  return path;
}

void check_feature_manifest(const FeatureManifest& manifest, std::string_view vocab_checksum,
                            int embed_dim, std::size_t example_count) {
  if (manifest.vocab_checksum != vocab_checksum) {
    throw ModelError("feature manifest vocabulary checksum " + manifest.vocab_checksum +
                     " does not match the vocabulary (" + std::string(vocab_checksum) + ")");
  }
  if (manifest.hidden_dim != embed_dim) {
    throw ModelError("feature manifest width " + std::to_string(manifest.hidden_dim) +
                     " differs from embed dim " + std::to_string(embed_dim));
  }
  if (manifest.example_count != example_count) {
    throw ModelError("feature manifest lists " + std::to_string(manifest.example_count) +
                     " examples, dataset has " + std::to_string(example_count));
  }
}

}  // namespace towe
