#pragma once

// End-to-end commands behind the CLI: mine, abstract, train, infer, eval.
// Every command reads and writes files under PipelineConfig::output_dir
// unless an explicit path is given.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "assertgen/evalkit.hpp"
#include "assertgen/miner.hpp"
#include "assertgen/neural/model.hpp"
#include "assertgen/neural/train.hpp"

namespace assertgen::pipeline {

enum class Mode { RawCopy, Abstract };

std::string mode_name(Mode m);
/// Throws InputError for anything other than raw_copy / abstract.
Mode parse_mode(const std::string& s);

struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::filesystem::path output_dir = "out";
  std::size_t vocab_capacity = 1000;
  std::size_t max_context_tokens = 1000;
  miner::SplitRatios split_ratios;
  std::uint64_t seed = 1;
  bool require_junit4 = false;
  std::size_t abstraction_cap = 30;
  Mode mode = Mode::RawCopy;

  // model
  std::size_t embed_dim = 128;
  std::size_t hidden = 256;
  double dropout = 0.2;
  neural::AttentionKind attention = neural::AttentionKind::Additive;

  // training
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  std::size_t patience = 5;
  double learning_rate = 1e-4;
  double clip_norm = 5.0;

  // decoding / evaluation
  std::vector<std::size_t> beam_sizes = {1, 5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  std::size_t max_decode_len = 64;
  std::size_t bleu_sample_size = 25;
};

/// Reads a JSON document; unknown keys are rejected.
PipelineConfig config_from_json(const std::string& text, PipelineConfig base = {});
std::string config_to_json(const PipelineConfig& config);

struct MineSummary {
  miner::MiningStats stats;
  miner::FilterReport filter;
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

/// Writes taps.jsonl, train/val/test.jsonl, filter_report.json,
/// mining_stats.json, vocab.tsv and zipf.csv. Throws InputError when no TAP
/// survives.
MineSummary cmd_mine(const PipelineConfig& config);

struct AbstractSummary {
  std::size_t kept = 0;
  std::size_t removed_id_overflow = 0;
  std::size_t removed_duplicate = 0;
};

/// Abstracts the train/val/test splits with the idiom vocabulary at
/// `vocab_path` (default output_dir/vocab.tsv, truncated to vocab_capacity)
/// into abstract_*.jsonl, and writes abstract_report.json. Every TAP is
/// round-tripped before writing.
AbstractSummary cmd_abstract(const PipelineConfig& config, const std::optional<std::filesystem::path>& vocab_path);

struct TrainOptions {
  std::optional<std::filesystem::path> train_file;
  std::optional<std::filesystem::path> val_file;
  std::optional<std::filesystem::path> checkpoint;  // default output_dir/model-<mode>.ckpt
  std::optional<std::filesystem::path> resume;
};

struct TrainSummary {
  neural::TrainResult result;
  std::size_t optimizer_step = 0;
  std::size_t epochs_done = 0;
  std::filesystem::path checkpoint;
};

TrainSummary cmd_train(const PipelineConfig& config, const TrainOptions& options);

struct InferOptions {
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> input;   // default test split of the checkpoint's mode
  std::optional<std::filesystem::path> output;  // default output_dir/predictions-<mode>.jsonl
  bool timing = false;                          // also writes timing-<mode>.json
};

std::size_t cmd_infer(const PipelineConfig& config, const InferOptions& options);

struct EvalOptions {
  std::optional<std::filesystem::path> predictions;           // default predictions-<mode>.jsonl
  std::optional<std::filesystem::path> gold;                  // default test.jsonl
  std::optional<std::filesystem::path> abstract_predictions;  // enables the overlap report
  std::optional<std::filesystem::path> train;                 // frequency baseline, default train.jsonl
  std::optional<std::filesystem::path> vocab;                 // copy attribution, default vocab.tsv
  std::optional<std::filesystem::path> timing;                // merged into the report when present
};

/// Writes eval_report.json, edit_distance.csv, baseline.csv,
/// bleu_samples.jsonl and, when two prediction files are given,
/// overlap_report.json.
evalkit::EvalReport cmd_eval(const PipelineConfig& config, const EvalOptions& options);

/// Model examples from token sequences under a vocabulary.
std::vector<neural::Example> make_examples(const neural::ModelVocab& vocab,
                                           const std::vector<std::vector<std::string>>& contexts,
                                           const std::vector<std::vector<std::string>>& targets, bool copy);

}  // namespace assertgen::pipeline
