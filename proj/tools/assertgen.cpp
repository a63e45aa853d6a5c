// assertgen: mine, abstract, train, infer and eval subcommands.
//
// Exit codes: 0 success, 2 input error, 3 numerical failure, 4 integrity
// failure, 1 anything else.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "assertgen/errors.hpp"
#include "assertgen/jlex.hpp"
#include "assertgen/pipeline.hpp"
#include "assertgen/tapio.hpp"

namespace fs = std::filesystem;
using namespace assertgen;

namespace {

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> mode;
  std::vector<std::size_t> beam;
  std::optional<std::uint64_t> seed;
  bool require_junit4 = false;
  std::optional<std::size_t> vocab_capacity;
  std::optional<std::size_t> max_tokens;
  std::optional<std::string> corpus;
  std::optional<std::string> out;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> patience;
  std::optional<double> learning_rate;
  std::optional<std::size_t> embed_dim;
  std::optional<std::size_t> hidden;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its values");
  app->add_option("--mode", f.mode, "raw_copy or abstract");
  app->add_option("--beam", f.beam, "Beam sizes (comma separated)")->delimiter(',');
  app->add_option("--seed", f.seed, "Random seed");
  app->add_flag("--require-junit4", f.require_junit4, "Skip projects whose pom.xml lacks JUnit 4");
  app->add_option("--vocab-capacity", f.vocab_capacity, "Vocabulary size");
  app->add_option("--max-tokens", f.max_tokens, "Maximum context tokens per TAP");
  app->add_option("--corpus", f.corpus, "Corpus directory (mine)");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--epochs", f.epochs, "Maximum training epochs");
  app->add_option("--batch-size", f.batch_size, "Training batch size");
  app->add_option("--patience", f.patience, "Early-stopping patience");
  app->add_option("--lr", f.learning_rate, "Learning rate");
  app->add_option("--embed-dim", f.embed_dim, "Embedding size");
  app->add_option("--hidden", f.hidden, "Encoder hidden size per direction");
  app->add_option("--threads", f.threads, "Worker threads (overrides ASSERTGEN_THREADS)");
}

pipeline::PipelineConfig resolve(const CommonFlags& f) {
  pipeline::PipelineConfig c;
  if (f.config) c = pipeline::config_from_json(tapio::read_file(*f.config), c);
  if (f.mode) c.mode = pipeline::parse_mode(*f.mode);
  if (!f.beam.empty()) c.beam_sizes = f.beam;
  if (f.seed) c.seed = *f.seed;
  if (f.require_junit4) c.require_junit4 = true;
  if (f.vocab_capacity) c.vocab_capacity = *f.vocab_capacity;
  if (f.max_tokens) c.max_context_tokens = *f.max_tokens;
  if (f.corpus) c.corpus_dir = *f.corpus;
  if (f.out) c.output_dir = *f.out;
  if (f.epochs) c.epochs = *f.epochs;
  if (f.batch_size) c.batch_size = *f.batch_size;
  if (f.patience) c.patience = *f.patience;
  if (f.learning_rate) c.learning_rate = *f.learning_rate;
  if (f.embed_dim) c.embed_dim = *f.embed_dim;
  if (f.hidden) c.hidden = *f.hidden;
  if (f.threads) setenv("ASSERTGEN_THREADS", std::to_string(*f.threads).c_str(), 1);
  for (std::size_t k : c.beam_sizes) {
    if (k == 0) throw InputError("beam sizes must be positive");
  }
  return c;
}

std::optional<fs::path> as_path(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  return fs::path(*s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assert statement generation pipeline"};
  app.require_subcommand(1);

  CommonFlags mine_flags, abstract_flags, train_flags, infer_flags, eval_flags;

  auto* mine = app.add_subcommand("mine", "Mine test-assert pairs from a Java corpus");
  add_common(mine, mine_flags);

  auto* abstract = app.add_subcommand("abstract", "Abstract mined splits into typed-ID form");
  add_common(abstract, abstract_flags);
  std::optional<std::string> abstract_vocab;
  abstract->add_option("--vocab", abstract_vocab, "Idiom vocabulary TSV (default <out>/vocab.tsv)");

  auto* train = app.add_subcommand("train", "Train a model");
  add_common(train, train_flags);
  std::optional<std::string> train_file, val_file, train_ckpt, resume;
  train->add_option("--train-file", train_file, "Training TAPs");
  train->add_option("--val-file", val_file, "Validation TAPs");
  train->add_option("--checkpoint", train_ckpt, "Checkpoint to write");
  train->add_option("--resume", resume, "Checkpoint to continue from");

  auto* infer = app.add_subcommand("infer", "Generate asserts with beam search");
  add_common(infer, infer_flags);
  std::optional<std::string> infer_ckpt, infer_input, infer_output;
  bool infer_timing = false;
  infer->add_option("--checkpoint", infer_ckpt, "Trained checkpoint");
  infer->add_option("--input", infer_input, "TAP file to predict");
  infer->add_option("--output", infer_output, "Predictions JSONL");
  infer->add_flag("--timing", infer_timing, "Also time decoding per beam size");

  auto* eval = app.add_subcommand("eval", "Score predictions");
  add_common(eval, eval_flags);
  std::optional<std::string> eval_preds, eval_gold, eval_abstract, eval_train, eval_vocab, eval_timing;
  eval->add_option("--predictions", eval_preds, "Predictions JSONL");
  eval->add_option("--gold", eval_gold, "Gold TAP file");
  eval->add_option("--abstract-predictions", eval_abstract, "Abstract-model predictions, for the overlap report");
  eval->add_option("--train-file", eval_train, "Training TAPs for the frequency baseline");
  eval->add_option("--vocab", eval_vocab, "Vocabulary TSV for copy attribution");
  eval->add_option("--timing", eval_timing, "Timing JSON to merge into the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*mine) {
      auto cfg = resolve(mine_flags);
      if (cfg.corpus_dir.empty()) throw InputError("--corpus is required");
      auto s = pipeline::cmd_mine(cfg);
      std::printf("mined %zu TAPs (kept %zu: train %zu, val %zu, test %zu)\n", s.filter.input_count, s.filter.kept,
                  s.train, s.validation, s.test);
    } else if (*abstract) {
      auto cfg = resolve(abstract_flags);
      auto s = pipeline::cmd_abstract(cfg, as_path(abstract_vocab));
      std::printf("abstracted %zu TAPs (%zu over the ID cap, %zu duplicates)\n", s.kept, s.removed_id_overflow,
                  s.removed_duplicate);
    } else if (*train) {
      auto cfg = resolve(train_flags);
      pipeline::TrainOptions o{as_path(train_file), as_path(val_file), as_path(train_ckpt), as_path(resume)};
      auto s = pipeline::cmd_train(cfg, o);
      std::printf("trained %zu epochs (step %zu), best val loss %.6f at epoch %zu -> %s\n", s.epochs_done,
                  s.optimizer_step, s.result.best_val_loss, s.result.best_epoch, s.checkpoint.string().c_str());
    } else if (*infer) {
      auto cfg = resolve(infer_flags);
      pipeline::InferOptions o{as_path(infer_ckpt), as_path(infer_input), as_path(infer_output), infer_timing};
      auto n = pipeline::cmd_infer(cfg, o);
      std::printf("wrote %zu prediction records\n", n);
    } else if (*eval) {
      auto cfg = resolve(eval_flags);
      pipeline::EvalOptions o{as_path(eval_preds), as_path(eval_gold),  as_path(eval_abstract),
                              as_path(eval_train), as_path(eval_vocab), as_path(eval_timing)};
      auto r = pipeline::cmd_eval(cfg, o);
      for (const auto& s : r.per_beam) {
        std::printf("k=%zu perfect %zu/%zu (%.2f%%) mean BLEU-4 %.2f\n", s.k, s.perfect_count, s.evaluated,
                    100.0 * s.perfect_rate, s.mean_bleu4);
      }
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const jlex::LexError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
