#include "assertgen/neural/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "assertgen/errors.hpp"

namespace assertgen::neural {

void OptimizerState::apply(Seq2SeqParams& params) {
  auto tensors = params.named();
  ++step;
  if (kind == OptimizerKind::Sgd) {
    for (auto& [name, t] : tensors) {
      for (std::size_t i = 0; i < t->size(); ++i) t->values[i] -= learning_rate * t->grad[i];
    }
    return;
  }
  if (first_moment.size() != tensors.size()) {
    first_moment.clear();
    second_moment.clear();
    for (auto& [name, t] : tensors) {
      first_moment.emplace_back(t->size(), 0.0);
      second_moment.emplace_back(t->size(), 0.0);
    }
  }
  const double step_d = static_cast<double>(step);
  const double c1 = 1.0 - std::pow(beta1, step_d);
  const double c2 = 1.0 - std::pow(beta2, step_d);
  for (std::size_t p = 0; p < tensors.size(); ++p) {
    Tensor& t = *tensors[p].second;
    auto& m = first_moment[p];
    auto& v = second_moment[p];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double g = t.grad[i];
      m[i] = beta1 * m[i] + (1.0 - beta1) * g;
      v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
      t.values[i] -= learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + epsilon);
    }
  }
}

double mean_loss(Seq2Seq& model, const std::vector<Example>& examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : examples) total += model.evaluate_loss(e);
  return total / static_cast<double>(examples.size());
}

namespace {

std::vector<std::vector<double>> snapshot(const Seq2SeqParams& params) {
  std::vector<std::vector<double>> out;
  for (const auto& [name, t] : params.named()) out.push_back(t->values);
  return out;
}

void restore(Seq2SeqParams& params, const std::vector<std::vector<double>>& values) {
  auto tensors = params.named();
  for (std::size_t i = 0; i < tensors.size(); ++i) tensors[i].second->values = values[i];
}

void clip_gradients(Seq2SeqParams& params, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  auto tensors = params.named();
  for (auto& [name, t] : tensors) {
    for (double g : t->grad) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const double scale = max_norm / norm;
  for (auto& [name, t] : tensors) {
    for (double& g : t->grad) g *= scale;
  }
}

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch, std::uint64_t stream) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(epoch) * 1000003ULL + stream;
}

}  // namespace

TrainResult train(Seq2Seq& model, const std::vector<Example>& train_set,
                  const std::vector<Example>& val_set, const TrainConfig& config,
                  OptimizerState& optimizer, std::size_t first_epoch) {
  if (train_set.empty()) throw InputError("training set is empty");
  const auto& val = val_set.empty() ? train_set : val_set;
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  auto& params = model.params();

  TrainResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  auto best = snapshot(params);
  std::size_t since_best = 0;

  for (std::size_t e = 0; e < config.max_epochs; ++e) {
    const std::size_t epoch = first_epoch + e + 1;
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(epoch_seed(config.seed, epoch, 1));
    shuffle_rng.shuffle(order);
    Rng dropout_rng(epoch_seed(config.seed, epoch, 2));

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double scale = 1.0 / static_cast<double>(end - start);
      params.zero_grad();
      for (std::size_t j = start; j < end; ++j) {
        Tape tape;
        Var l = model.loss(tape, train_set[order[j]], Mode::Train, &dropout_rng);
        const double v = tape.scalar(l);
        if (!std::isfinite(v)) {
          std::ostringstream msg;
          msg << "non-finite training loss " << v << " at epoch " << epoch << ", example "
              << order[j] << ", optimizer step " << optimizer.step;
          throw NumericalError(msg.str());
        }
        epoch_loss += v;
        tape.backward(l);
      }
      for (auto& [name, t] : params.named()) {
        for (double& g : t->grad) g *= scale;
      }
      clip_gradients(params, config.clip_norm);
      optimizer.apply(params);
    }
    const double train_loss = epoch_loss / static_cast<double>(train_set.size());
    const double val_loss = mean_loss(model, val);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.push_back(EpochRecord{epoch, train_loss, val_loss, seconds});
    ++result.evaluations;
    if (config.on_epoch) config.on_epoch(epoch, train_loss, val_loss);

    if (val_loss < result.best_val_loss) {
      result.best_val_loss = val_loss;
      result.best_epoch = epoch;
      best = snapshot(params);
      since_best = 0;
    } else {
      ++since_best;
    }
    if (config.target_loss && val_loss <= *config.target_loss) break;
    if (since_best >= config.patience) break;
  }
  restore(params, best);
  return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
  std::string out = "epoch,train_loss,val_loss,seconds\n";
  char buf[128];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.6f\n", r.epoch, r.train_loss, r.val_loss,
                  r.seconds);
    out += buf;
  }
  return out;
}

}  // namespace assertgen::neural
