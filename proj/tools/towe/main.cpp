// towe: command-line front end for the opinion-word extraction toolkit.

#include <iostream>

#include "CLI11.hpp"
#include "towe/commands.hpp"

namespace {

using towe::cli::TokenizerPaths;

void add_tokenizer(CLI::App* cmd, TokenizerPaths& paths) {
  cmd->add_option("--vocab", paths.vocab, "Vocabulary file (one piece per line)")->required();
  cmd->add_option("--merges", paths.merges, "BPE merge file; selects the BPE tokenizer");
}

// Fills options left unset on the command line from a key=value file whose
// keys are long option names without the leading dashes.
void apply_config_defaults(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    CLI::Option* opt = cmd->get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw std::invalid_argument(path + ": unknown key `" + item.name + "`");
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void add_checkpoint_list(CLI::App* cmd, const std::string& name, std::vector<std::string>& out,
                         const std::string& help) {
  cmd->add_option(name, out, help)->delimiter(',');
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-oriented opinion word extraction: tokenize, train, evaluate"};
  app.require_subcommand(1);

  towe::cli::TrainVocabOptions vocab_opts;
  auto* train_vocab = app.add_subcommand("train-vocab", "Learn BPE merges and a vocabulary");
  train_vocab->add_option("--corpus", vocab_opts.corpus, "JSON-lines dataset or whitespace text")->required();
  train_vocab->add_option("--merges", vocab_opts.merges, "Number of merges")->check(CLI::NonNegativeNumber);
  train_vocab->add_option("--out", vocab_opts.out_dir, "Output directory for merges.txt and vocab.txt")
      ->required();

  towe::cli::PrepareOptions prep_opts;
  auto* prepare = app.add_subcommand("prepare", "Dump encoded model inputs as JSON lines");
  prepare->add_option("--data", prep_opts.data, "JSON-lines dataset")->required();
  add_tokenizer(prepare, prep_opts.tokenizer);
  prepare->add_option("--variant", prep_opts.variant, "S or SA")->capture_default_str();
  prepare->add_flag("--mask-aspect", prep_opts.mask_aspect, "Replace aspect pieces with [MASK]");
  prepare->add_option("--window", prep_opts.window, "Relative position window")->capture_default_str();
  prepare->add_option("--max-length", prep_opts.max_length, "Encoded length cap")->capture_default_str();
  prepare->add_option("--out", prep_opts.out, "Output file (default: stdout)");

  towe::cli::TrainOptions train_opts;
  train_opts.hp.embed_dim = 64;
  train_opts.hp.hidden_dim = 64;
  auto* train = app.add_subcommand("train", "Train one model per seed and report mean F1");
  std::string train_config;
  train->add_option("--config", train_config, "Plain key=value defaults; flags override");
  train->add_option("--train", train_opts.train, "Training set")->required();
  train->add_option("--dev", train_opts.dev, "Development set for early stopping")->required();
  train->add_option("--test", train_opts.test, "Test set for the final report");
  add_tokenizer(train, train_opts.tokenizer);
  train->add_option("--variant", train_opts.variant, "S or SA")->capture_default_str();
  train->add_option("--seeds", train_opts.seeds, "Comma-separated seeds")->capture_default_str();
  train->add_option("--out-dir", train_opts.out_dir, "Checkpoint and report directory")->required();
  train->add_flag("--mask-aspect", train_opts.mask_aspect, "Mask the aspect in the sentence region");
  train->add_option("--embed-dim", train_opts.hp.embed_dim)->capture_default_str();
  train->add_option("--hidden-dim", train_opts.hp.hidden_dim)->capture_default_str();
  train->add_option("--window", train_opts.hp.window)->capture_default_str();
  train->add_flag("--use-position", train_opts.hp.use_position, "Add relative position embeddings");
  train->add_flag("--use-segment", train_opts.hp.use_segment, "Add segment embeddings");
  train->add_option("--lr", train_opts.config.learning_rate)->capture_default_str();
  train->add_option("--beta1", train_opts.config.beta1)->capture_default_str();
  train->add_option("--beta2", train_opts.config.beta2)->capture_default_str();
  train->add_option("--adam-eps", train_opts.config.epsilon)->capture_default_str();
  train->add_option("--epochs", train_opts.config.max_epochs)->capture_default_str();
  train->add_option("--patience", train_opts.config.patience)->capture_default_str();
  train->add_option("--eval-every", train_opts.config.eval_every)->capture_default_str();
  train->add_option("--max-length", train_opts.max_length)->capture_default_str();
  train->add_option("--features-train", train_opts.features_train, "External feature file (TFEA)");
  train->add_option("--features-dev", train_opts.features_dev);
  train->add_option("--features-test", train_opts.features_test);

  towe::cli::EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Exact-span micro-F1 of one or more checkpoints");
  evaluate->add_option("--test", eval_opts.test, "Labeled JSON-lines dataset")->required();
  add_checkpoint_list(evaluate, "--checkpoint", eval_opts.checkpoints, "Checkpoint(s), comma-separated");
  add_tokenizer(evaluate, eval_opts.tokenizer);
  evaluate->add_option("--variant", eval_opts.variant, "S or SA")->capture_default_str();
  evaluate->add_flag("--mask-aspect", eval_opts.mask_aspect);
  evaluate->add_option("--max-length", eval_opts.max_length)->capture_default_str();
  evaluate->add_option("--features", eval_opts.features, "External feature file (TFEA)");
  evaluate->add_option("--out", eval_opts.out, "JSON report path");

  towe::cli::AblateOptions ablate_opts;
  std::vector<std::string> triple;
  auto* ablate = app.add_subcommand("ablate", "Compare S, SA and S with a masked aspect");
  ablate->add_option("--test", ablate_opts.test, "Labeled JSON-lines dataset")->required();
  add_checkpoint_list(ablate, "--checkpoints", triple, "Exactly three checkpoints: S,SA,S+mask");
  add_checkpoint_list(ablate, "--s", ablate_opts.s, "S checkpoints (one per seed)");
  add_checkpoint_list(ablate, "--sa", ablate_opts.sa, "SA checkpoints");
  add_checkpoint_list(ablate, "--s-masked", ablate_opts.s_masked, "S+mask checkpoints");
  add_tokenizer(ablate, ablate_opts.tokenizer);
  ablate->add_option("--max-length", ablate_opts.max_length)->capture_default_str();
  ablate->add_option("--out", ablate_opts.out, "JSON report path");

  towe::cli::PredictOptions pred_opts;
  auto* predict = app.add_subcommand("predict", "Predict opinion spans for JSON-lines input");
  predict->add_option("--input", pred_opts.input, "JSON-lines input; `opinions` may be absent")->required();
  predict->add_option("--checkpoint", pred_opts.checkpoint)->required();
  add_tokenizer(predict, pred_opts.tokenizer);
  predict->add_option("--variant", pred_opts.variant, "S or SA")->capture_default_str();
  predict->add_flag("--mask-aspect", pred_opts.mask_aspect);
  predict->add_option("--max-length", pred_opts.max_length)->capture_default_str();
  predict->add_option("--features", pred_opts.features, "External feature file (TFEA)");
  predict->add_option("--out", pred_opts.out, "Output file (default: stdout)");

  towe::cli::SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with a matching vocabulary");
  synth->add_option("--kind", synth_opts.kind, "suffix or coref")->capture_default_str();
  synth->add_option("--out-dir", synth_opts.out_dir)->required();
  synth->add_option("--sentences", synth_opts.sentences)->capture_default_str();
  synth->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth->add_option("--max-filler", synth_opts.max_filler)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_vocab) towe::cli::train_vocab(vocab_opts, std::cout);
    if (*prepare) towe::cli::prepare(prep_opts, std::cout);
    if (*train) {
      apply_config_defaults(train, train_config);
      towe::cli::train(train_opts, std::cout);
    }
    if (*evaluate) towe::cli::evaluate(eval_opts, std::cout);
    if (*ablate) {
      if (!triple.empty()) {
        if (triple.size() != 3) throw std::invalid_argument("--checkpoints takes exactly three paths");
        ablate_opts.s.push_back(triple[0]);
        ablate_opts.sa.push_back(triple[1]);
        ablate_opts.s_masked.push_back(triple[2]);
      }
      towe::cli::ablate(ablate_opts, std::cout);
    }
    if (*predict) towe::cli::predict(pred_opts, std::cout);
    if (*synth) towe::cli::synth(synth_opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "towe: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
