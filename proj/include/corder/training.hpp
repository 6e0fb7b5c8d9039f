#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "corder/dataset.hpp"
#include "corder/embedding.hpp"
#include "corder/errors.hpp"
#include "corder/model.hpp"
#include "corder/rng.hpp"

namespace corder {

struct TrainConfig {
  double lr = 1e-3;
  /// Applied to frequency parameters on top of lr.
  double lr_freq_multiplier = 0.1;
  double momentum = 0.0;
  std::size_t batch = 32;
  std::size_t epochs = 10;
  /// Weight decay on amplitudes and layer weights. Frequencies, phases and
  /// biases are never decayed.
  double l2 = 0.0;
  std::uint64_t seed = 1;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  double loss = 0.0;
};

struct TrainMetrics {
  std::vector<double> epoch_losses;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  bool has_test = false;
  double wall_time_s = 0.0;
};

struct EvalResult {
  std::size_t correct = 0;
  std::size_t total = 0;
  double loss = 0.0;

  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

inline EvalResult evaluate(const ModelGraph& model, std::span<const Sample> samples) {
  EvalResult r;
  double total_loss = 0.0;
  for (const auto& s : samples) {
    ad::Tape t;
    const ad::Var logits = model.record_logits(t, s.tokens);
    const auto& z = t.value(logits);
    const auto pred = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    if (pred == s.label) ++r.correct;
    if (s.label < model.num_classes()) total_loss += t.scalar(t.cross_entropy(logits, s.label));
    ++r.total;
  }
  r.loss = r.total == 0 ? 0.0 : total_loss / static_cast<double>(r.total);
  return r;
}

/// SGD with optional momentum.
class Sgd {
 public:
  explicit Sgd(const TrainConfig& cfg) : cfg_(cfg) {}

  void step(ModelGraph& model, const Gradients& grads) {
    auto slots = model.mutable_registry();
    if (velocity_.empty()) {
      for (const auto& s : slots) velocity_.emplace_back(s.values->size(), 0.0);
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
      auto& values = *slots[i].values;
      auto& vel = velocity_[i];
      const auto& g = grads.values[i];
      const ParamRole role = slots[i].role;
      const double lr = role == ParamRole::frequency ? cfg_.lr * cfg_.lr_freq_multiplier : cfg_.lr;
      const bool decay = cfg_.l2 > 0.0 && (role == ParamRole::amplitude || role == ParamRole::weight);
      for (std::size_t k = 0; k < values.size(); ++k) {
        const double gk = decay ? g[k] + cfg_.l2 * values[k] : g[k];
        vel[k] = cfg_.momentum * vel[k] + gk;
        values[k] -= lr * vel[k];
      }
      if (role == ParamRole::phase) {
        for (auto& theta : values) theta = wrap_phase(theta);
      }
    }
  }

 private:
  TrainConfig cfg_;
  std::vector<std::vector<double>> velocity_;
};

using EpochCallback = std::function<void(const EpochMetrics&)>;

/// Shuffled mini-batch SGD. Deterministic given cfg.seed and the model's state.
inline TrainMetrics train(ModelGraph& model, const Dataset& train_set, const Dataset* test_set,
                          const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  if (train_set.samples.empty()) throw DegenerateInputError("train: empty training set");
  if (cfg.batch == 0) throw ConfigError("train: batch must be > 0");
  const auto start = std::chrono::steady_clock::now();
  TrainMetrics metrics;
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  Sgd opt(cfg);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Sample> batch;
  batch.reserve(cfg.batch);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch);
      batch.clear();
      for (std::size_t i = begin; i < end; ++i) batch.push_back(train_set.samples[order[i]]);
      Gradients grads = model.zero_gradients();
      double loss = 0.0;
      try {
        loss = model.loss_and_gradients(batch, grads);
      } catch (const DivergenceError& e) {
        throw DivergenceError(e.parameter(), "training diverged at epoch " + std::to_string(epoch) +
                                                 " (parameter " + e.parameter() + ")");
      }
      loss_sum += loss * static_cast<double>(end - begin);
      opt.step(model, grads);
    }
    const double epoch_loss = loss_sum / static_cast<double>(order.size());
    metrics.epoch_losses.push_back(epoch_loss);
    if (on_epoch) on_epoch({epoch, epoch_loss});
  }

  metrics.train_accuracy = evaluate(model, train_set.samples).accuracy();
  if (test_set) {
    metrics.has_test = true;
    metrics.test_accuracy = evaluate(model, test_set->samples).accuracy();
  }
  metrics.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return metrics;
}

inline nlohmann::json to_json(const EpochMetrics& m) { return {{"epoch", m.epoch}, {"loss", m.loss}}; }

/// Summary without wall time, so emitted files stay byte-reproducible.
inline nlohmann::json summary_json(const TrainMetrics& m) {
  nlohmann::json j{{"epochs", m.epoch_losses.size()}, {"train_accuracy", m.train_accuracy}};
  if (!m.epoch_losses.empty()) j["final_loss"] = m.epoch_losses.back();
  if (m.has_test) j["test_accuracy"] = m.test_accuracy;
  return j;
}

}  // namespace corder
