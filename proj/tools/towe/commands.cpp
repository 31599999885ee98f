#include "towe/commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "towe/corpus.hpp"
#include "towe/eval.hpp"
#include "towe/subword.hpp"
#include "towe/synthetic.hpp"

namespace towe::cli {
namespace {

namespace fs = std::filesystem;

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw std::invalid_argument(flag + " is required");
  if (!fs::is_regular_file(path)) throw std::invalid_argument(flag + ": no such file `" + path + "`");
}

Tokenizer load_tokenizer(const TokenizerPaths& paths) {
  require_file(paths.vocab, "--vocab");
  Vocabulary vocab = load_vocab(paths.vocab);
  if (paths.merges.empty()) return Tokenizer::wordpiece(std::move(vocab));
  require_file(paths.merges, "--merges");
  return Tokenizer::bpe(load_merges(paths.merges), std::move(vocab));
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write `" + path.string() + "`");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
}

struct LoadedModel {
  Parameters params;
  Hyperparameters hp;
};

LoadedModel load_model(const std::string& path, const Vocabulary& vocab) {
  require_file(path, "--checkpoint");
  LoadedModel model;
  model.params = load_checkpoint(path);
  model.hp = infer_hyperparameters(model.params);
  if (model.hp.feature_mode == FeatureMode::kLearnedEmbeddings &&
      model.hp.vocab_size != static_cast<int>(vocab.size())) {
    throw std::invalid_argument("checkpoint `" + path + "` expects a vocabulary of " +
                                std::to_string(model.hp.vocab_size) + " pieces, got " +
                                std::to_string(vocab.size()));
  }
  return model;
}

std::vector<PreparedExample> prepare_for_model(const Dataset& data, const Tokenizer& tokenizer,
                                               Variant variant, bool mask, const Hyperparameters& hp,
                                               std::size_t max_length, const std::string& features) {
  EncodeOptions encode_options;
  encode_options.max_length = max_length;
  if (hp.use_position) encode_options.window = hp.window;
  auto examples = prepare_examples(data, tokenizer, variant, mask, encode_options);
  if (hp.feature_mode == FeatureMode::kExternalFeatures) {
    require_file(features, "--features");
    const auto manifest_path = feature_manifest_path(features);
    require_file(manifest_path.string(), "feature manifest");
    check_feature_manifest(load_feature_manifest(manifest_path), vocab_checksum(tokenizer.vocab()),
                           hp.embed_dim, examples.size());
    attach_features(examples, features, hp.embed_dim);
  }
  return examples;
}

EvalReport evaluate_checkpoint(const std::string& checkpoint, const Dataset& data,
                               const Tokenizer& tokenizer, Variant variant, bool mask,
                               std::size_t max_length, const std::string& features) {
  const LoadedModel model = load_model(checkpoint, tokenizer.vocab());
  const auto examples = prepare_for_model(data, tokenizer, variant, mask, model.hp, max_length, features);
  return evaluate(examples, model.params, model.hp);
}

std::string run_name(Variant variant, bool mask) {
  std::string name(variant_name(variant));
  if (mask) name += "+mask";
  return name;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin != std::string::npos) out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split_list(text)) {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || item[0] == '-') {
      throw std::invalid_argument("--seeds: `" + item + "` is not a non-negative integer");
    }
    seeds.push_back(value);
  }
  if (seeds.empty()) throw std::invalid_argument("--seeds must list at least one seed");
  return seeds;
}

void train_vocab(const TrainVocabOptions& options, std::ostream& out) {
  require_file(options.corpus, "--corpus");
  if (options.out_dir.empty()) throw std::invalid_argument("--out is required");

  std::map<std::string, std::int64_t> counts;
  if (fs::path(options.corpus).extension() == ".jsonl") {
    const auto data = load_dataset(options.corpus, Split::kTrain, LoadOptions{false});
    for (const auto& example : data.examples) {
      for (const auto& word : example.words) ++counts[word];
    }
  } else {
    std::ifstream in(options.corpus, std::ios::binary);
    for (std::string word; in >> word;) ++counts[word];
  }
  std::vector<WordCount> corpus;
  for (const auto& [word, count] : counts) corpus.push_back({word, count});

  const BpeModel model = train_bpe(corpus, options.merges);
  fs::create_directories(options.out_dir);
  save_merges(model.merges, fs::path(options.out_dir) / "merges.txt");
  save_vocab(model.vocab, fs::path(options.out_dir) / "vocab.txt");
  out << "learned " << model.merges.size() << " merges; vocabulary of " << model.vocab.size()
      << " pieces written to " << options.out_dir << '\n';
}

void prepare(const PrepareOptions& options, std::ostream& out) {
  require_file(options.data, "--data");
  const Tokenizer tokenizer = load_tokenizer(options.tokenizer);
  const auto data = load_dataset(options.data, Split::kTest, LoadOptions{false});
  EncodeOptions encode_options{options.window, options.max_length};
  const auto examples = prepare_examples(data, tokenizer, parse_variant(options.variant),
                                         options.mask_aspect, encode_options);
  std::ofstream file;
  if (!options.out.empty()) file = open_output(options.out);
  std::ostream& sink = options.out.empty() ? out : file;
  for (const auto& example : examples) {
    sink << encoded_to_json(example.id, example.input, tokenizer.vocab()) << '\n';
  }
}

void train(const TrainOptions& options, std::ostream& out) {
  require_file(options.train, "--train");
  require_file(options.dev, "--dev");
  if (!options.test.empty()) require_file(options.test, "--test");
  if (options.out_dir.empty()) throw std::invalid_argument("--out-dir is required");
  const Tokenizer tokenizer = load_tokenizer(options.tokenizer);

  TrainConfig config = options.config;
  config.seeds = parse_seeds(options.seeds);
  config.variant = parse_variant(options.variant);
  config.mask_aspect = options.mask_aspect;
  config.validate();

  Hyperparameters hp = options.hp;
  const bool external = !options.features_train.empty();
  if (external && (options.features_dev.empty() || (!options.test.empty() && options.features_test.empty()))) {
    throw std::invalid_argument("external features need --features-train, --features-dev and --features-test");
  }
  hp.feature_mode = external ? FeatureMode::kExternalFeatures : FeatureMode::kLearnedEmbeddings;
  hp.vocab_size = static_cast<int>(tokenizer.vocab().size());
  hp.validate();

  const auto train_data = load_dataset(options.train, Split::kTrain);
  const auto dev_data = load_dataset(options.dev, Split::kDev);
  const auto test_data = options.test.empty() ? dev_data : load_dataset(options.test, Split::kTest);

  const auto prepare_split = [&](const Dataset& data, const std::string& features) {
    return prepare_for_model(data, tokenizer, config.variant, config.mask_aspect, hp,
                             options.max_length, features);
  };
  const auto train_set = prepare_split(train_data, options.features_train);
  const auto dev_set = prepare_split(dev_data, options.features_dev);
  const auto test_set =
      prepare_split(test_data, options.test.empty() ? options.features_dev : options.features_test);

  auto result = train_multi(train_set, dev_set, test_set, hp, config,
                            [&out](std::uint64_t seed, const EpochRecord& record) {
                              auto line = nlohmann::json::parse(epoch_to_json(record));
                              line["seed"] = seed;
                              out << line.dump() << '\n';
                            });

  const fs::path dir(options.out_dir);
  fs::create_directories(dir);
  std::vector<EvalReport> reports;
  for (auto& run : result.runs) {
    const std::string stem = "seed-" + std::to_string(run.seed);
    save_checkpoint(run.result.params, dir / (stem + ".ckpt"));
    run.result.history.best_checkpoint = stem + ".ckpt";
    write_text(dir / (stem + ".history.json"), history_to_json(run.result.history) + "\n");
    reports.push_back(run.test);
  }
  const RunSummary summary = summarize_runs(run_name(config.variant, config.mask_aspect), reports);
  write_text(dir / "report.json", report_to_json(summary));
  out << "# " << (options.test.empty() ? "dev" : "test") << " micro-F1 (%)\n" << format_report_table(summary);
}

void evaluate(const EvaluateOptions& options, std::ostream& out) {
  require_file(options.test, "--test");
  if (options.checkpoints.empty()) throw std::invalid_argument("--checkpoint is required");
  const Tokenizer tokenizer = load_tokenizer(options.tokenizer);
  const auto data = load_dataset(options.test, Split::kTest);
  const Variant variant = parse_variant(options.variant);

  std::vector<EvalReport> reports;
  for (const auto& checkpoint : options.checkpoints) {
    reports.push_back(evaluate_checkpoint(checkpoint, data, tokenizer, variant, options.mask_aspect,
                                          options.max_length, options.features));
  }
  const RunSummary summary = summarize_runs(run_name(variant, options.mask_aspect), std::move(reports));
  if (!options.out.empty()) write_text(options.out, report_to_json(summary));
  out << format_report_table(summary);
}

void ablate(const AblateOptions& options, std::ostream& out) {
  require_file(options.test, "--test");
  if (options.s.empty() || options.sa.empty() || options.s_masked.empty()) {
    throw std::invalid_argument("ablation needs checkpoints for S, SA and S+mask");
  }
  const Tokenizer tokenizer = load_tokenizer(options.tokenizer);
  const auto data = load_dataset(options.test, Split::kTest);

  const auto run_group = [&](const std::vector<std::string>& checkpoints, Variant variant, bool mask) {
    std::vector<EvalReport> reports;
    for (const auto& checkpoint : checkpoints) {
      reports.push_back(
          evaluate_checkpoint(checkpoint, data, tokenizer, variant, mask, options.max_length, ""));
    }
    return summarize_runs(run_name(variant, mask), std::move(reports));
  };
  const AblationReport report = ablation_report(run_group(options.s, Variant::kS, false),
                                                run_group(options.sa, Variant::kSA, false),
                                                run_group(options.s_masked, Variant::kS, true));
  if (!options.out.empty()) write_text(options.out, ablation_to_json(report));
  out << format_ablation_table(report);
}

void predict(const PredictOptions& options, std::ostream& out) {
  require_file(options.input, "--input");
  const Tokenizer tokenizer = load_tokenizer(options.tokenizer);
  const LoadedModel model = load_model(options.checkpoint, tokenizer.vocab());
  auto data = load_dataset(options.input, Split::kTest, LoadOptions{false});
  const auto examples = prepare_for_model(data, tokenizer, parse_variant(options.variant),
                                          options.mask_aspect, model.hp, options.max_length,
                                          options.features);

  std::ofstream file;
  if (!options.out.empty()) file = open_output(options.out);
  std::ostream& sink = options.out.empty() ? out : file;
  for (std::size_t k = 0; k < examples.size(); ++k) {
    SentenceExample example = data.examples[k];
    example.opinions = predict_spans(examples[k], model.params, model.hp);
    sink << to_json_line(example) << '\n';
  }
}

void synth(const SynthOptions& options, std::ostream& out) {
  if (options.out_dir.empty()) throw std::invalid_argument("--out-dir is required");
  synthetic::Options generator;
  generator.num_sentences = options.sentences;
  generator.seed = options.seed;
  generator.max_filler = options.max_filler;
  const auto corpus = synthetic::make_corpus(synthetic::parse_kind(options.kind), generator);
  synthetic::write_corpus(corpus, options.out_dir);
  out << "wrote " << corpus.train.examples.size() << "/" << corpus.dev.examples.size() << "/"
      << corpus.test.examples.size() << " train/dev/test examples to " << options.out_dir << '\n';
}

}  // namespace towe::cli
