#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "assertgen/neural/model.hpp"

namespace assertgen::neural {

enum class OptimizerKind { Adam, Sgd };

struct OptimizerState {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t step = 0;
  std::vector<std::vector<double>> first_moment;   // one per parameter tensor
  std::vector<std::vector<double>> second_moment;

  /// Applies one update from the gradients currently stored in `params`.
  void apply(Seq2SeqParams& params);
};

struct TrainConfig {
  std::size_t max_epochs = 50;
  std::size_t batch_size = 32;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;            // <= 0 disables clipping
  std::optional<double> target_loss;  // stop once validation loss reaches it
  std::function<void(std::size_t epoch, double train_loss, double val_loss)> on_epoch;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  double best_val_loss = 0.0;
  std::size_t best_epoch = 0;
  std::size_t evaluations = 0;
};

/// Mini-batch training with early stopping on validation loss. Training stops
/// once `patience` consecutive evaluations fail to improve (patience 0: after
/// the first evaluation). The best-validation parameters are restored on
/// return. Epoch numbering continues from `first_epoch`, and per-epoch
/// shuffling/dropout seeds depend only on (seed, epoch), so a resumed run
/// replays exactly. Throws NumericalError on a non-finite loss.
TrainResult train(Seq2Seq& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& config,
                  OptimizerState& optimizer, std::size_t first_epoch = 0);

double mean_loss(Seq2Seq& model, const std::vector<Example>& examples);

/// `epoch,train_loss,val_loss,seconds` with a header row.
std::string history_csv(const std::vector<EpochRecord>& history);

}  // namespace assertgen::neural
