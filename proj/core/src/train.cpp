#include "towe/train.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "json.hpp"

namespace towe {
namespace {

const Matrix* features_of(const PreparedExample& example) {
  return example.features.size() > 0 ? &example.features : nullptr;
}

}  // namespace

std::vector<PreparedExample> prepare_examples(const Dataset& dataset, const Tokenizer& tokenizer,
                                              Variant variant, bool mask,
                                              const EncodeOptions& options) {
  std::vector<PreparedExample> out;
  out.reserve(dataset.examples.size());
  for (const auto& example : dataset.examples) {
    const Tokenization tok = tokenize_sentence(example.words, tokenizer, example.aspect);
    const auto labels = derive_word_labels(example);
    PreparedExample prepared;
    prepared.id = example.id;
    prepared.pieces = tok.pieces;
    try {
      prepared.input = encode(tok, tokenizer.vocab(), labels, variant, options);
    } catch (const EncodingError& e) {
      throw EncodingError("example `" + example.id + "`: " + e.what());
    }
    if (mask) prepared.input = mask_aspect(std::move(prepared.input), tokenizer.vocab());
    prepared.word_positions = word_positions(tok);
    prepared.gold = example.opinions;
    out.push_back(std::move(prepared));
  }
  return out;
}

void attach_features(std::vector<PreparedExample>& examples, const std::filesystem::path& path,
                     int embed_dim) {
  std::vector<FeatureRequest> requests;
  requests.reserve(examples.size());
  for (const auto& example : examples) requests.push_back({example.id, example.input.size()});
  auto matrices = load_external_features(path, requests, embed_dim);
  for (std::size_t k = 0; k < examples.size(); ++k) examples[k].features = std::move(matrices[k]);
}

std::vector<Tag> predict_word_tags(const PreparedExample& example, const Parameters& params,
                                   const Hyperparameters& hp) {
  const auto position_tags = predict_position_tags(forward(example.input, params, hp, features_of(example)));
  std::vector<Tag> tags;
  tags.reserve(example.word_positions.size());
  for (const int p : example.word_positions) tags.push_back(position_tags[static_cast<std::size_t>(p)]);
  return tags;
}

std::vector<Span> predict_spans(const PreparedExample& example, const Parameters& params,
                                const Hyperparameters& hp) {
  return decode_spans(predict_word_tags(example, params, hp));
}

EvalReport evaluate(std::span<const PreparedExample> examples, const Parameters& params,
                    const Hyperparameters& hp) {
  std::vector<ExampleSpans> predicted;
  std::vector<ExampleSpans> gold;
  predicted.reserve(examples.size());
  gold.reserve(examples.size());
  for (const auto& example : examples) {
    predicted.push_back({example.id, predict_spans(example, params, hp)});
    gold.push_back({example.id, example.gold});
  }
  return micro_f1(predicted, gold);
}

std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

TrainResult train_one(std::span<const PreparedExample> train, std::span<const PreparedExample> dev,
                      Hyperparameters hp, const TrainConfig& config, std::uint64_t seed,
                      const EpochCallback& on_epoch) {
  config.validate();
  if (train.empty() || dev.empty()) throw std::invalid_argument("train and dev sets must be non-empty");
  hp.seed = seed;
  hp.validate();

  Parameters params = init_parameters(hp);
  AdamState adam = AdamState::zeros_like(params);
  Rng rng = make_rng(seed, kShuffleStream);

  TrainResult result{params, {}};
  double best = -std::numeric_limits<double>::infinity();
  int stale = 0;
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    double total = 0.0;
    for (const std::size_t k : shuffled_order(train.size(), rng)) {
      const PreparedExample& example = train[k];
      const ForwardTrace trace = forward(example.input, params, hp, features_of(example));
      total += cross_entropy_loss(trace, example.input);
      const Parameters grads = backward(trace, example.input, params, hp);
      try {
        adam_step(params, grads, adam, config, ++step);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", example `" + example.id + "`: " + e.what());
      }
    }

    EpochRecord record{epoch, total / static_cast<double>(train.size()), std::nullopt};
    if (epoch % config.eval_every == 0 || epoch == config.max_epochs) {
      const double f1 = evaluate(dev, params, hp).f1;
      record.dev_f1 = f1;
      if (f1 > best) {
        best = f1;
        stale = 0;
        result.params = params;
        result.history.best_epoch = epoch;
        result.history.best_dev_f1 = f1;
      } else {
        ++stale;
      }
    }
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
    if (stale >= config.patience) break;
  }
  return result;
}

MultiRunResult train_multi(std::span<const PreparedExample> train,
                           std::span<const PreparedExample> dev,
                           std::span<const PreparedExample> test, const Hyperparameters& hp,
                           const TrainConfig& config, const SeedEpochCallback& on_epoch) {
  config.validate();
  MultiRunResult out;
  std::vector<double> f1s;
  for (const std::uint64_t seed : config.seeds) {
    SeedRun run;
    run.seed = seed;
    try {
      run.result = train_one(train, dev, hp, config, seed, [&](const EpochRecord& record) {
        if (on_epoch) on_epoch(seed, record);
      });
    } catch (const NumericError& e) {
      throw NumericError("seed " + std::to_string(seed) + ": " + e.what());
    }
    Hyperparameters run_hp = hp;
    run_hp.seed = seed;
    run.test = evaluate(test, run.result.params, run_hp);
    f1s.push_back(run.test.f1);
    out.runs.push_back(std::move(run));
  }
  out.mean_f1 = average_runs(f1s);
  return out;
}

std::string epoch_to_json(const EpochRecord& record) {
  nlohmann::json line = nlohmann::json::object();
  line["epoch"] = record.epoch;
  line["loss"] = record.loss;
  line["dev_f1"] = record.dev_f1 ? nlohmann::json(*record.dev_f1) : nlohmann::json(nullptr);
  return line.dump();
}

std::string history_to_json(const TrainHistory& history) {
  nlohmann::json doc = nlohmann::json::object();
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& record : history.epochs) epochs.push_back(nlohmann::json::parse(epoch_to_json(record)));
  doc["epochs"] = std::move(epochs);
  doc["best_epoch"] = history.best_epoch;
  doc["best_dev_f1"] = history.best_dev_f1;
  doc["best_checkpoint"] = history.best_checkpoint;
  return doc.dump(2);
}

}  // namespace towe
