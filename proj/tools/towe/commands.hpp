#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "towe/encoding.hpp"
#include "towe/model.hpp"
#include "towe/train.hpp"

namespace towe::cli {

// Vocabulary plus optional BPE merges; merges select the BPE tokenizer.
struct TokenizerPaths {
  std::string vocab;
  std::string merges;
};

struct TrainVocabOptions {
  std::string corpus;
  int merges = 1000;
  std::string out_dir;
};

struct PrepareOptions {
  std::string data;
  TokenizerPaths tokenizer;
  std::string variant = "SA";
  bool mask_aspect = false;
  int window = 50;
  std::size_t max_length = 256;
  std::string out;
};

struct TrainOptions {
  std::string train;
  std::string dev;
  std::string test;
  TokenizerPaths tokenizer;
  std::string variant = "SA";
  std::string seeds = "1,2,3,4,5";
  std::string out_dir;
  bool mask_aspect = false;
  Hyperparameters hp;
  TrainConfig config;
  std::size_t max_length = 256;
  // External features, one file per split; all three or none.
  std::string features_train;
  std::string features_dev;
  std::string features_test;
};

struct EvaluateOptions {
  std::string test;
  std::vector<std::string> checkpoints;
  TokenizerPaths tokenizer;
  std::string variant = "SA";
  bool mask_aspect = false;
  std::size_t max_length = 256;
  std::string features;
  std::string out;
};

struct AblateOptions {
  std::string test;
  std::vector<std::string> s;
  std::vector<std::string> sa;
  std::vector<std::string> s_masked;
  TokenizerPaths tokenizer;
  std::size_t max_length = 256;
  std::string out;
};

struct PredictOptions {
  std::string input;
  std::string checkpoint;
  TokenizerPaths tokenizer;
  std::string variant = "SA";
  bool mask_aspect = false;
  std::size_t max_length = 256;
  std::string features;
  std::string out;
};

struct SynthOptions {
  std::string kind = "suffix";
  std::string out_dir;
  std::size_t sentences = 2000;
  std::uint64_t seed = 7;
  int max_filler = 4;
};

// Each command writes its primary outputs to files (or `out` when a path is
// not given) and throws on any failure.
void train_vocab(const TrainVocabOptions& options, std::ostream& out);
void prepare(const PrepareOptions& options, std::ostream& out);
void train(const TrainOptions& options, std::ostream& out);
void evaluate(const EvaluateOptions& options, std::ostream& out);
void ablate(const AblateOptions& options, std::ostream& out);
void predict(const PredictOptions& options, std::ostream& out);
void synth(const SynthOptions& options, std::ostream& out);

std::vector<std::uint64_t> parse_seeds(const std::string& text);
std::vector<std::string> split_list(const std::string& text, char sep = ',');

}  // namespace towe::cli
