#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "towe/encoding.hpp"

namespace towe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FeatureMode { kLearnedEmbeddings, kExternalFeatures };

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Hyperparameters {
  int vocab_size = 0;
  int embed_dim = 64;
  int hidden_dim = 64;
  int window = 50;
  bool use_position = false;
  bool use_segment = false;
  FeatureMode feature_mode = FeatureMode::kLearnedEmbeddings;
  std::uint64_t seed = 1;

  // Throws ModelError on a non-positive dimension.
  void validate() const;
};

// Gate rows are stacked (input, forget, cell, output), h rows each.
struct LstmWeights {
  Matrix input;      // 4h x d
  Matrix recurrent;  // 4h x h
  Matrix bias;       // 4h x 1
};

// Disabled components are stored with zero rows: the position table when
// use_position is off, the segment table when use_segment is off, and the
// token table in external-feature mode.
struct Parameters {
  Matrix token_embedding;     // V x d
  Matrix position_embedding;  // (2W+1) x d
  Matrix segment_embedding;   // 2 x d
  LstmWeights forward;
  LstmWeights backward;
  Matrix classifier_weight;   // 3 x 2h
  Matrix classifier_bias;     // 3 x 1

  // Visits every tensor in checkpoint order.
  template <typename Self, typename Fn>
  static void visit(Self& self, Fn&& fn) {
    fn("token_embedding", self.token_embedding);
    fn("position_embedding", self.position_embedding);
    fn("segment_embedding", self.segment_embedding);
    fn("forward.input", self.forward.input);
    fn("forward.recurrent", self.forward.recurrent);
    fn("forward.bias", self.forward.bias);
    fn("backward.input", self.backward.input);
    fn("backward.recurrent", self.backward.recurrent);
    fn("backward.bias", self.backward.bias);
    fn("classifier.weight", self.classifier_weight);
    fn("classifier.bias", self.classifier_bias);
  }
  template <typename Fn>
  void for_each(Fn&& fn) { visit(*this, std::forward<Fn>(fn)); }
  template <typename Fn>
  void for_each(Fn&& fn) const { visit(*this, std::forward<Fn>(fn)); }

  // Same shapes, all zeros.
  Parameters zeros_like() const;
  std::size_t num_scalars() const;
  bool all_finite() const;
  bool operator==(const Parameters& other) const;
};

Parameters init_parameters(const Hyperparameters& hp);

// Recovers dimensions and enabled components from tensor shapes. The seed
// is not stored and is left at its default.
Hyperparameters infer_hyperparameters(const Parameters& params);

struct DirectionTrace {
  Matrix gates;   // 4h x n, post-activation (i, f, g, o)
  Matrix cells;   // h x n
  Matrix hidden;  // h x n
};

struct ForwardTrace {
  Matrix inputs;  // d x n
  DirectionTrace forward;
  DirectionTrace backward;
  Matrix logits;         // 3 x n
  Matrix probabilities;  // 3 x n

  std::size_t length() const { return static_cast<std::size_t>(logits.cols()); }
};

// `features` is required in external-feature mode: one row per encoded
// position, embed_dim columns.
ForwardTrace forward(const EncodedInput& enc, const Parameters& params, const Hyperparameters& hp,
                     const Matrix* features = nullptr);

// Gradient of the mean masked cross-entropy with respect to every tensor.
Parameters backward(const ForwardTrace& trace, const EncodedInput& enc, const Parameters& params,
                    const Hyperparameters& hp);

// Worst |g_a - g_n| / max(|g_a|, |g_n|, 1e-8) over every scalar parameter,
// with g_n the central difference at step `epsilon`.
double finite_difference_check(const EncodedInput& enc, const Parameters& params,
                               const Hyperparameters& hp, double epsilon,
                               const Matrix* features = nullptr);

// Argmax tag at every encoded position.
std::vector<Tag> predict_position_tags(const ForwardTrace& trace);

// Binary checkpoint: "TOWE", u32 version, then each tensor in
// Parameters::visit order as (u32 rows, u32 cols, row-major f64 LE).
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(const Parameters& params, const std::filesystem::path& path);
Parameters load_checkpoint(const std::filesystem::path& path);

// External feature file: "TFEA", u32 version, u32 example count, then per
// example (u16 id length, id bytes, u32 rows, u32 cols, row-major f32 LE).
inline constexpr std::uint32_t kFeatureFileVersion = 1;

struct FeatureEntry {
  std::string id;
  Matrix values;
};

std::vector<FeatureEntry> read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::vector<FeatureEntry>& entries,
                        const std::filesystem::path& path);

struct FeatureRequest {
  std::string id;
  std::size_t rows = 0;
};

// Returns one matrix per request, in request order. Throws ModelError when
// an id is missing, a row count disagrees with the encoded length, or the
// column count differs from `embed_dim`.
std::vector<Matrix> load_external_features(const std::filesystem::path& path,
                                           std::span<const FeatureRequest> requests,
                                           int embed_dim);

// Sidecar JSON written by the feature exporter next to the feature file.
struct FeatureManifest {
  std::string encoder;
  int hidden_dim = 0;
  std::string vocab_checksum;
  std::size_t example_count = 0;
};

FeatureManifest load_feature_manifest(const std::filesystem::path& path);

// "<features>.manifest.json", next to the feature file.
std::filesystem::path feature_manifest_path(const std::filesystem::path& features);

// Throws ModelError when the manifest was produced for another vocabulary,
// another feature width or another number of examples.
void check_feature_manifest(const FeatureManifest& manifest, std::string_view vocab_checksum,
                            int embed_dim, std::size_t example_count);

}  // namespace towe
