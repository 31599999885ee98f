#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "towe/corpus.hpp"
#include "towe/encoding.hpp"
#include "towe/eval.hpp"
#include "towe/loss.hpp"
#include "towe/model.hpp"
#include "towe/random.hpp"
#include "towe/subword.hpp"

namespace towe {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 50;
  int patience = 5;  // evaluations without dev improvement before stopping
  int eval_every = 1;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  Variant variant = Variant::kSA;
  bool mask_aspect = false;

  // Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamState {
  Parameters first_moment;
  Parameters second_moment;

  static AdamState zeros_like(const Parameters& params);
};

// Bias-corrected Adam update for step t >= 1. Throws NumericError when a
// gradient is not finite; `params` is left untouched in that case.
void adam_step(Parameters& params, const Parameters& grads, AdamState& state,
               const TrainConfig& config, std::int64_t t);

// An example tokenized, encoded and ready for the model.
struct PreparedExample {
  std::string id;
  std::vector<std::string> pieces;
  EncodedInput input;
  std::vector<int> word_positions;
  std::vector<Span> gold;
  Matrix features;  // empty unless external features are attached
};

std::vector<PreparedExample> prepare_examples(const Dataset& dataset, const Tokenizer& tokenizer,
                                              Variant variant, bool mask,
                                              const EncodeOptions& options = {});

// Reads a feature file and attaches one matrix to every example.
void attach_features(std::vector<PreparedExample>& examples, const std::filesystem::path& path,
                     int embed_dim);

std::vector<Tag> predict_word_tags(const PreparedExample& example, const Parameters& params,
                                   const Hyperparameters& hp);
std::vector<Span> predict_spans(const PreparedExample& example, const Parameters& params,
                                const Hyperparameters& hp);

EvalReport evaluate(std::span<const PreparedExample> examples, const Parameters& params,
                    const Hyperparameters& hp);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // mean per-example loss over the epoch
  std::optional<double> dev_f1;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
  std::string best_checkpoint;  // filled in by callers that persist it
};

struct TrainResult {
  Parameters params;  // best-dev parameters
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Visits examples in a seed-determined order each epoch.
std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng);

TrainResult train_one(std::span<const PreparedExample> train, std::span<const PreparedExample> dev,
                      Hyperparameters hp, const TrainConfig& config, std::uint64_t seed,
                      const EpochCallback& on_epoch = {});

struct SeedRun {
  std::uint64_t seed = 0;
  TrainResult result;
  EvalReport test;
};

struct MultiRunResult {
  std::vector<SeedRun> runs;
  double mean_f1 = 0.0;
};

using SeedEpochCallback = std::function<void(std::uint64_t seed, const EpochRecord&)>;

// One train_one per seed, in seed order; any failure aborts the protocol.
MultiRunResult train_multi(std::span<const PreparedExample> train,
                           std::span<const PreparedExample> dev,
                           std::span<const PreparedExample> test, const Hyperparameters& hp,
                           const TrainConfig& config, const SeedEpochCallback& on_epoch = {});

std::string epoch_to_json(const EpochRecord& record);
std::string history_to_json(const TrainHistory& history);

}  // namespace towe
