#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "oracles.hpp"
#include "towe/synthetic.hpp"
#include "towe/train.hpp"

namespace towe {
namespace {

Hyperparameters tiny_hp(int vocab_size) {
  Hyperparameters hp;
  hp.vocab_size = vocab_size;
  hp.embed_dim = 6;
  hp.hidden_dim = 6;
  return hp;
}

Parameters filled_like(const Parameters& p, double value) {
  auto out = p.zeros_like();
  out.for_each([value](const char*, Matrix& m) { m.setConstant(value); });
  return out;
}

TEST(Adam, FirstStepClosedForm) {
  const auto params = init_parameters(tiny_hp(10));
  TrainConfig config;
  for (double g : {0.3, -2.0, 1e-3}) {
    auto p = params;
    auto state = AdamState::zeros_like(p);
    adam_step(p, filled_like(p, g), state, config, 1);
    const double expected = -config.learning_rate * g / (std::abs(g) + config.epsilon);
    for (Eigen::Index k = 0; k < p.token_embedding.size(); ++k) {
      EXPECT_NEAR(p.token_embedding.data()[k] - params.token_embedding.data()[k], expected, 1e-15);
    }
    EXPECT_NEAR(state.first_moment.classifier_bias(0), (1 - config.beta1) * g, 1e-15);
    EXPECT_NEAR(state.second_moment.classifier_bias(0), (1 - config.beta2) * g * g, 1e-15);
  }
}

TEST(Adam, ZeroGradientKeepsParametersAndDecaysMoments) {
  const auto params = init_parameters(tiny_hp(10));
  TrainConfig config;
  auto p = params;
  auto state = AdamState::zeros_like(p);
  adam_step(p, filled_like(p, 0.5), state, config, 1);
  const auto after_one = p;
  const double m1 = state.first_moment.classifier_bias(0);
  const double v1 = state.second_moment.classifier_bias(0);
  auto zero_state = AdamState::zeros_like(p);
  auto q = after_one;
  adam_step(q, p.zeros_like(), zero_state, config, 2);
  EXPECT_TRUE(q == after_one);
  adam_step(p, p.zeros_like(), state, config, 2);
  EXPECT_DOUBLE_EQ(state.first_moment.classifier_bias(0), config.beta1 * m1);
  EXPECT_DOUBLE_EQ(state.second_moment.classifier_bias(0), config.beta2 * v1);
}

TEST(Adam, RepeatableAndRejectsNonFinite) {
  const auto params = init_parameters(tiny_hp(10));
  TrainConfig config;
  const auto grads = filled_like(params, 0.1);
  auto a = params;
  auto b = params;
  auto sa = AdamState::zeros_like(a);
  auto sb = AdamState::zeros_like(b);
  adam_step(a, grads, sa, config, 1);
  adam_step(b, grads, sb, config, 1);
  EXPECT_TRUE(a == b);

  auto bad = grads;
  bad.forward.input(0, 0) = std::numeric_limits<double>::quiet_NaN();
  auto c = params;
  auto sc = AdamState::zeros_like(c);
  EXPECT_THROW(adam_step(c, bad, sc, config, 1), NumericError);
  EXPECT_TRUE(c == params);
}

TEST(Config, Validation) {
  TrainConfig config;
  EXPECT_NO_THROW(config.validate());
  config.learning_rate = 0.0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.patience = 0;
  EXPECT_THROW(config.validate(), std::invalid_argument);
  config = {};
  config.seeds.clear();
  EXPECT_THROW(config.validate(), std::invalid_argument);
}

struct SmallCorpus : ::testing::Test {
  void SetUp() override {
    synthetic::Options options;
    options.num_sentences = 120;
    const auto corpus = synthetic::make_suffix_corpus(options);
    vocab_size = static_cast<int>(corpus.vocab.size());
    tokenizer = std::make_unique<Tokenizer>(Tokenizer::wordpiece(corpus.vocab));
    train = prepare_examples(corpus.train, *tokenizer, Variant::kSA, false);
    dev = prepare_examples(corpus.dev, *tokenizer, Variant::kSA, false);
  }
  int vocab_size = 0;
  std::unique_ptr<Tokenizer> tokenizer;
  std::vector<PreparedExample> train;
  std::vector<PreparedExample> dev;
};

TEST_F(SmallCorpus, PatienceOneWithFrozenDevStopsAfterTwoEvaluations) {
  auto frozen = dev;
  for (auto& ex : frozen) ex.gold.clear();  // F1 stays 0 whatever the model predicts
  TrainConfig config;
  config.patience = 1;
  config.max_epochs = 10;
  const auto result = train_one(train, frozen, tiny_hp(vocab_size), config, 1);
  ASSERT_EQ(result.history.epochs.size(), 2u);
  EXPECT_EQ(result.history.best_epoch, 1);
  EXPECT_EQ(result.history.best_dev_f1, 0.0);
}

TEST_F(SmallCorpus, EvalEveryControlsEvaluations) {
  TrainConfig config;
  config.max_epochs = 5;
  config.eval_every = 2;
  config.patience = 10;
  const auto result = train_one(train, dev, tiny_hp(vocab_size), config, 1);
  ASSERT_EQ(result.history.epochs.size(), 5u);
  EXPECT_FALSE(result.history.epochs[0].dev_f1.has_value());
  EXPECT_TRUE(result.history.epochs[1].dev_f1.has_value());
  EXPECT_TRUE(result.history.epochs[4].dev_f1.has_value());  // last epoch always evaluated
}

TEST_F(SmallCorpus, SameSeedSameHistory) {
  TrainConfig config;
  config.max_epochs = 3;
  const auto hp = tiny_hp(vocab_size);
  const auto a = train_one(train, dev, hp, config, 4);
  const auto b = train_one(train, dev, hp, config, 4);
  EXPECT_EQ(history_to_json(a.history), history_to_json(b.history));
  EXPECT_TRUE(a.params == b.params);
  const auto c = train_one(train, dev, hp, config, 5);
  EXPECT_FALSE(a.params == c.params);
}

TEST_F(SmallCorpus, LossDecreasesAndPredictionsAlign) {
  TrainConfig config;
  config.max_epochs = 4;
  config.patience = 10;
  const auto hp = tiny_hp(vocab_size);
  const auto result = train_one(train, dev, hp, config, 1);
  EXPECT_LT(result.history.epochs.back().loss, result.history.epochs.front().loss);
  for (const auto& ex : dev) {
    EXPECT_EQ(predict_word_tags(ex, result.params, hp).size(), ex.word_positions.size());
  }
}

TEST(Shuffle, SeedDeterminesOrder) {
  auto r1 = make_rng(3, kShuffleStream);
  auto r2 = make_rng(3, kShuffleStream);
  auto r3 = make_rng(3, kInitStream);
  const auto a = shuffled_order(50, r1);
  EXPECT_EQ(a, shuffled_order(50, r2));
  EXPECT_NE(a, shuffled_order(50, r3));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) EXPECT_EQ(sorted[k], k);
}

}  // namespace
}  // namespace towe
