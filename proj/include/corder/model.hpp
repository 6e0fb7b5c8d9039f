#pragma once

// Trainable classifier: complex-order embedding, one encoder (fasttext, cnn,
// rnn or attention), a complex dense layer and a modulus readout feeding a
// softmax cross-entropy head. Every trainable complex quantity is registered
// as real arrays and differentiated through the tape in autodiff.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "corder/autodiff.hpp"
#include "corder/complex.hpp"
#include "corder/embedding.hpp"
#include "corder/errors.hpp"
#include "corder/layers.hpp"
#include "corder/report.hpp"
#include "corder/rng.hpp"
#include "corder/sample.hpp"

namespace corder {

enum class Encoder { fasttext, cnn, rnn, attention };

/// trainable: omega is learned. frozen: omega keeps its initial values.
/// zero: omega is fixed at 0, which reduces the embedding to r e^{i theta}.
enum class FrequencyMode { trainable, frozen, zero };

enum class ParamRole { amplitude, frequency, phase, weight, bias };

inline std::string to_string(Encoder e) {
  switch (e) {
    case Encoder::fasttext:
      return "fasttext";
    case Encoder::cnn:
      return "cnn";
    case Encoder::rnn:
      return "rnn";
    case Encoder::attention:
      return "attention";
  }
  return "fasttext";
}

inline Encoder parse_encoder(std::string_view s) {
  if (s == "fasttext") return Encoder::fasttext;
  if (s == "cnn") return Encoder::cnn;
  if (s == "rnn") return Encoder::rnn;
  if (s == "attention") return Encoder::attention;
  throw ConfigError("unknown encoder '" + std::string(s) + "'");
}

inline std::string to_string(FrequencyMode m) {
  switch (m) {
    case FrequencyMode::trainable:
      return "trainable";
    case FrequencyMode::frozen:
      return "frozen";
    case FrequencyMode::zero:
      return "zero";
  }
  return "trainable";
}

inline FrequencyMode parse_frequency_mode(std::string_view s) {
  if (s == "trainable") return FrequencyMode::trainable;
  if (s == "frozen") return FrequencyMode::frozen;
  if (s == "zero") return FrequencyMode::zero;
  throw ConfigError("unknown frequency mode '" + std::string(s) + "'");
}

struct ModelConfig {
  Encoder encoder = Encoder::fasttext;
  SharingScheme scheme = SharingScheme::full;
  PhaseMode phase_mode = PhaseMode::shared_constant;
  FrequencyMode frequency = FrequencyMode::trainable;
  std::size_t dim = 16;
  std::size_t hidden = 16;
  std::size_t filters = 16;
  std::size_t kernel_width = 3;
  /// Encoder default when unset: tanh for rnn, identity otherwise.
  std::optional<Activation> activation;
  PoolMode pool = PoolMode::sum;
  NormalizeMode attention_norm = NormalizeMode::softmax;
  bool share_real_imag = false;

  Activation resolved_activation() const {
    if (activation) return *activation;
    return encoder == Encoder::rnn ? Activation::tanh : Activation::identity;
  }
};

/// One named real array of the model.
struct Param {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  ParamRole role = ParamRole::weight;
  std::vector<double> values;
};

struct ParamView {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  ParamRole role;
  std::span<const double> values;
};

struct ParamSlot {
  std::string name;
  std::size_t rows;
  std::size_t cols;
  ParamRole role;
  std::vector<double>* values;
};

/// Gradient arrays aligned with ModelGraph::registry().
struct Gradients {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;

  std::vector<double>& operator[](const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return values[i];
    }
    throw IndexError("no gradient for parameter '" + name + "'");
  }
};

class ModelGraph;

/// Tapes recorded by forward_loss, consumed by backward.
struct ForwardCache {
  const ModelGraph* owner = nullptr;
  std::uint64_t version = 0;
  std::vector<ad::Tape> tapes;
  std::vector<ad::Var> losses;
  double loss = 0.0;
};

class ModelGraph {
 public:
  ModelGraph(const ModelConfig& config, std::size_t vocab_size, std::size_t num_classes,
             std::uint64_t seed)
      : config_(config), num_classes_(num_classes) {
    if (num_classes < 2) throw ConfigError("ModelGraph: need at least two classes");
    if (config.dim == 0 || config.hidden == 0) throw ConfigError("ModelGraph: dim and hidden must be > 0");
    if (config.encoder == Encoder::cnn && (config.kernel_width == 0 || config.filters == 0)) {
      throw ConfigError("ModelGraph: cnn needs kernel_width and filters > 0");
    }
    Rng rng(seed);
    embedding_ = ComplexEmbeddingTable::random(vocab_size, config.dim, config.scheme, config.phase_mode, rng);
    if (config.frequency == FrequencyMode::zero) {
      std::fill(embedding_.frequency_data().begin(), embedding_.frequency_data().end(), 0.0);
    }
    build_layers(rng);
  }

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t vocab_size() const noexcept { return embedding_.vocab_size(); }
  const ComplexEmbeddingTable& embedding() const noexcept { return embedding_; }
  std::uint64_t version() const noexcept { return version_; }

  /// Mutable table access; invalidates outstanding caches.
  ComplexEmbeddingTable& mutable_embedding() {
    ++version_;
    return embedding_;
  }

  bool frequency_trainable() const noexcept { return config_.frequency == FrequencyMode::trainable; }
  bool phase_trainable() const noexcept { return config_.phase_mode == PhaseMode::per_element; }

  const Param& layer_param(const std::string& name) const {
    for (const auto& p : layers_) {
      if (p.name == name) return p;
    }
    throw IndexError("no layer parameter '" + name + "'");
  }
  const std::vector<Param>& layer_params() const noexcept { return layers_; }

  void set_layer_values(const std::string& name, std::vector<double> values) {
    Param& p = layers_[index_in_layers(name)];
    if (values.size() != p.values.size()) {
      throw DimensionError("set_layer_values: '" + name + "' expects " + std::to_string(p.values.size()) +
                           " values, got " + std::to_string(values.size()));
    }
    p.values = std::move(values);
    ++version_;
  }

  /// Swaps in a table of identical shape, scheme and phase mode.
  void replace_embedding(ComplexEmbeddingTable table) {
    if (table.vocab_size() != embedding_.vocab_size() || table.dim() != embedding_.dim() ||
        table.scheme() != embedding_.scheme() || table.phase_mode() != embedding_.phase_mode()) {
      throw DimensionError("replace_embedding: table layout differs from the model's");
    }
    embedding_ = std::move(table);
    ++version_;
  }

  std::vector<ParamView> registry() const {
    std::vector<ParamView> out;
    out.push_back({"embedding.amplitude", embedding_.vocab_size(), embedding_.dim(), ParamRole::amplitude,
                   embedding_.amplitude_data()});
    if (frequency_trainable()) {
      out.push_back({"embedding.frequency", embedding_.frequency_rows(), embedding_.frequency_cols(),
                     ParamRole::frequency, embedding_.frequency_data()});
    }
    if (phase_trainable()) {
      out.push_back({"embedding.phase", embedding_.vocab_size(), embedding_.dim(), ParamRole::phase,
                     embedding_.phase_data()});
    }
    for (const auto& p : layers_) out.push_back({p.name, p.rows, p.cols, p.role, p.values});
    return out;
  }

  /// Mutable registry; invalidates outstanding caches.
  std::vector<ParamSlot> mutable_registry() {
    ++version_;
    return slots();
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : registry()) n += p.values.size();
    return n;
  }

  /// Layer parameter count by enumerating the encoder shapes from the config.
  std::size_t layer_parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : layers_) n += p.rows * p.cols;
    return n;
  }

  /// Records the forward pass for one sequence and returns the 1 x C logits node.
  ad::Var record_logits(ad::Tape& t, std::span<const std::size_t> tokens) const {
    if (tokens.empty()) throw DegenerateInputError("ModelGraph: empty token sequence");
    std::vector<std::size_t> padded(tokens.begin(), tokens.end());
    // Narrow convolution needs at least kernel_width positions.
    if (config_.encoder == Encoder::cnn && padded.size() < config_.kernel_width) {
      padded.resize(config_.kernel_width, 0);
    }
    for (std::size_t i = 0; i < padded.size(); ++i) {
      if (padded[i] >= embedding_.vocab_size()) {
        throw IndexError("token " + std::to_string(padded[i]) + " at position " + std::to_string(i + 1) +
                         " outside vocabulary of size " + std::to_string(embedding_.vocab_size()));
      }
    }
    const ad::CVar x = record_embedding(t, padded);
    const ad::CVar features = record_encoder(t, x);
    const ad::Var mod = t.modulus(features.re, features.im);
    const ad::Var w_out = leaf(t, "readout.W");
    return t.matmul_nt(mod, w_out);
  }

  std::vector<double> logits(std::span<const std::size_t> tokens) const {
    ad::Tape t;
    return t.value(record_logits(t, tokens));
  }

  std::size_t predict(std::span<const std::size_t> tokens) const {
    const auto z = logits(tokens);
    return static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
  }

  /// Mean cross-entropy over the batch, keeping the tapes for backward.
  ForwardCache forward_loss(std::span<const Sample> batch) const {
    if (batch.empty()) throw DegenerateInputError("forward_loss: empty batch");
    ForwardCache cache;
    cache.owner = this;
    cache.version = version_;
    cache.tapes.resize(batch.size());
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      check_label(batch[i]);
      auto& tape = cache.tapes[i];
      const ad::Var loss = tape.cross_entropy(record_logits(tape, batch[i].tokens), batch[i].label);
      cache.losses.push_back(loss);
      total += tape.scalar(loss);
    }
    cache.loss = total / static_cast<double>(batch.size());
    if (!std::isfinite(cache.loss)) {
      throw DivergenceError(first_non_finite_param(), "forward_loss: non-finite loss");
    }
    return cache;
  }

  /// Loss only, no cache.
  double loss(std::span<const Sample> batch) const {
    if (batch.empty()) throw DegenerateInputError("loss: empty batch");
    double total = 0.0;
    for (const auto& s : batch) {
      check_label(s);
      ad::Tape tape;
      total += tape.scalar(tape.cross_entropy(record_logits(tape, s.tokens), s.label));
    }
    return total / static_cast<double>(batch.size());
  }

  Gradients zero_gradients() const {
    Gradients g;
    for (const auto& p : registry()) {
      g.names.push_back(p.name);
      g.values.emplace_back(p.values.size(), 0.0);
    }
    return g;
  }

  Gradients backward(ForwardCache& cache) const {
    if (cache.owner != this || cache.version != version_) {
      throw ContractError("backward: cache was recorded against different parameters");
    }
    Gradients grads = zero_gradients();
    const double scale = 1.0 / static_cast<double>(cache.tapes.size());
    for (std::size_t i = 0; i < cache.tapes.size(); ++i) {
      cache.tapes[i].backward(cache.losses[i]);
      scatter(cache.tapes[i], grads, scale);
    }
    return grads;
  }

  /// forward_loss + backward without keeping every tape alive.
  double loss_and_gradients(std::span<const Sample> batch, Gradients& grads) const {
    if (batch.empty()) throw DegenerateInputError("loss_and_gradients: empty batch");
    const double scale = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (const auto& s : batch) {
      check_label(s);
      ad::Tape tape;
      const ad::Var loss = tape.cross_entropy(record_logits(tape, s.tokens), s.label);
      total += tape.scalar(loss);
      tape.backward(loss);
      scatter(tape, grads, scale);
    }
    const double mean = total / static_cast<double>(batch.size());
    if (!std::isfinite(mean)) {
      throw DivergenceError(first_non_finite_param(), "non-finite loss");
    }
    return mean;
  }

  /// Name of the first registered parameter holding a non-finite value, or "loss".
  std::string first_non_finite_param() const {
    for (const auto& p : registry()) {
      for (double v : p.values) {
        if (!std::isfinite(v)) return p.name;
      }
    }
    return "loss";
  }

 private:
  void check_label(const Sample& s) const {
    if (s.label >= num_classes_) {
      throw IndexError("label " + std::to_string(s.label) + " outside [0, " + std::to_string(num_classes_) + ")");
    }
  }

  std::vector<ParamSlot> slots() {
    std::vector<ParamSlot> out;
    out.push_back({"embedding.amplitude", embedding_.vocab_size(), embedding_.dim(), ParamRole::amplitude,
                   &embedding_.amplitude_data()});
    if (frequency_trainable()) {
      out.push_back({"embedding.frequency", embedding_.frequency_rows(), embedding_.frequency_cols(),
                     ParamRole::frequency, &embedding_.frequency_data()});
    }
    if (phase_trainable()) {
      out.push_back({"embedding.phase", embedding_.vocab_size(), embedding_.dim(), ParamRole::phase,
                     &embedding_.phase_data()});
    }
    for (auto& p : layers_) out.push_back({p.name, p.rows, p.cols, p.role, &p.values});
    return out;
  }

  std::size_t layer_base() const noexcept {
    return 1 + (frequency_trainable() ? 1 : 0) + (phase_trainable() ? 1 : 0);
  }

  std::size_t index_in_layers(const std::string& name) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      if (layers_[i].name == name) return i;
    }
    throw IndexError("no layer parameter '" + name + "'");
  }

  ad::Var leaf(ad::Tape& t, const std::string& name) const {
    const std::size_t i = index_in_layers(name);
    const Param& p = layers_[i];
    return t.param(layer_base() + i, p.values, p.rows, p.cols);
  }

  /// Complex leaf from the ".A"/".B" (or shared) planes of a weight.
  ad::CVar complex_leaf(ad::Tape& t, const std::string& prefix, const char* re_suffix,
                        const char* im_suffix) const {
    const ad::Var re = leaf(t, prefix + re_suffix);
    if (has_layer(prefix + im_suffix)) return {re, leaf(t, prefix + im_suffix)};
    return {re, re};
  }

  bool has_layer(const std::string& name) const {
    return std::any_of(layers_.begin(), layers_.end(), [&](const Param& p) { return p.name == name; });
  }

  ad::CVar record_embedding(ad::Tape& t, std::span<const std::size_t> tokens) const {
    const std::size_t n = tokens.size();
    const std::size_t dim = embedding_.dim();
    std::size_t slot = 0;
    const ad::Var amp = t.param_rows(slot++, embedding_.amplitude_data(), dim, tokens);

    ad::Var omega;
    if (frequency_trainable()) {
      const std::size_t fslot = slot++;
      const auto& f = embedding_.frequency_data();
      switch (embedding_.scheme()) {
        case SharingScheme::full:
          omega = t.param_rows(fslot, f, dim, tokens);
          break;
        case SharingScheme::word_sharing:
          omega = t.broadcast_row(t.param(fslot, f, 1, dim), n);
          break;
        case SharingScheme::dimension_sharing:
          omega = t.broadcast_col(t.param_rows(fslot, f, 1, tokens), dim);
          break;
      }
    } else {
      std::vector<double> values(n * dim);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) values[i * dim + d] = embedding_.frequency(tokens[i], d);
      }
      omega = t.constant(n, dim, std::move(values));
    }

    std::vector<double> positions(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill_n(positions.begin() + static_cast<std::ptrdiff_t>(i * dim), dim, static_cast<double>(i + 1));
    }
    ad::Var angle = t.mul_const(omega, std::move(positions));
    if (phase_trainable()) {
      angle = t.add(angle, t.param_rows(slot++, embedding_.phase_data(), dim, tokens));
    } else if (embedding_.phase_data()[0] != 0.0) {
      angle = t.add(angle, t.constant(n, dim, std::vector<double>(n * dim, embedding_.phase_data()[0])));
    }
    return {t.mul(amp, t.cos(angle)), t.mul(amp, t.sin(angle))};
  }

  ad::CVar record_dense(ad::Tape& t, ad::CVar x, const std::string& prefix, Activation act) const {
    const ad::CVar w = complex_leaf(t, prefix, ".A", ".B");
    const ad::CVar b = complex_leaf(t, prefix, ".c", ".d");
    return ad::cdense(t, x, w, b, act);
  }

  ad::CVar pool(ad::Tape& t, ad::CVar x) const {
    ad::CVar out{t.sum_rows(x.re), t.sum_rows(x.im)};
    if (config_.pool == PoolMode::mean) {
      const double inv = 1.0 / static_cast<double>(t.rows(x.re));
      out = {t.scale(out.re, inv), t.scale(out.im, inv)};
    }
    return out;
  }

  ad::CVar record_encoder(ad::Tape& t, ad::CVar x) const {
    const Activation act = config_.resolved_activation();
    switch (config_.encoder) {
      case Encoder::fasttext:
        return record_dense(t, pool(t, x), "dense", act);
      case Encoder::cnn: {
        const ad::CVar windows{t.im2col(x.re, config_.kernel_width), t.im2col(x.im, config_.kernel_width)};
        const ad::CVar conv = record_dense(t, windows, "conv", act);
        const ad::Var key = t.modulus(conv.re, conv.im);
        const ad::CVar pooled{t.select_argmax(key, conv.re), t.select_argmax(key, conv.im)};
        return record_dense(t, pooled, "dense", act);
      }
      case Encoder::rnn: {
        const ad::CVar wh = complex_leaf(t, "rnn.Wh", ".A", ".B");
        const ad::CVar wz = complex_leaf(t, "rnn.Wz", ".A", ".B");
        const ad::CVar b = complex_leaf(t, "rnn.b", ".c", ".d");
        ad::CVar h{t.zeros(1, config_.hidden), t.zeros(1, config_.hidden)};
        for (std::size_t step = 0; step < t.rows(x.re); ++step) {
          const ad::CVar z{t.slice_row(x.re, step), t.slice_row(x.im, step)};
          const ad::CVar rec = ad::cmatmul_nt(t, h, wh);
          const ad::CVar inp = ad::cmatmul_nt(t, z, wz);
          h = {t.activation(t.add_row(t.add(rec.re, inp.re), b.re), act),
               t.activation(t.add_row(t.add(rec.im, inp.im), b.im), act)};
        }
        return h;
      }
      case Encoder::attention: {
        const ad::CVar wq = complex_leaf(t, "attention.WQ", ".A", ".B");
        const ad::CVar wk = complex_leaf(t, "attention.WK", ".A", ".B");
        const ad::CVar wv = complex_leaf(t, "attention.WV", ".A", ".B");
        const ad::CVar q = ad::cmatmul(t, x, wq);
        const ad::CVar k = ad::cmatmul(t, x, wk);
        const ad::CVar v = ad::cmatmul(t, x, wv);
        // z = q k^dagger: Re = Qr Kr^T + Qi Ki^T, Im = Qi Kr^T - Qr Ki^T
        const ad::Var zr = t.add(t.matmul_nt(q.re, k.re), t.matmul_nt(q.im, k.im));
        const ad::Var zi = t.sub(t.matmul_nt(q.im, k.re), t.matmul_nt(q.re, k.im));
        const double n = static_cast<double>(t.rows(x.re));
        const ad::Var energy = t.scale(t.modulus(zr, zi), 1.0 / std::sqrt(n));
        const ad::Var a = config_.attention_norm == NormalizeMode::softmax ? t.softmax_rows(energy)
                                                                          : t.normalize_rows(energy);
        const ad::CVar out{t.matmul(a, v.re), t.matmul(a, v.im)};
        return record_dense(t, pool(t, out), "dense", act);
      }
    }
    throw ConfigError("unknown encoder");
  }

  void add_layer(Rng& rng, std::string name, std::size_t rows, std::size_t cols, ParamRole role,
                 double limit) {
    Param p{std::move(name), rows, cols, role, std::vector<double>(rows * cols, 0.0)};
    if (limit > 0.0) {
      for (auto& v : p.values) v = rng.uniform(-limit, limit);
    }
    layers_.push_back(std::move(p));
  }

  void add_complex(Rng& rng, const std::string& prefix, std::size_t rows, std::size_t cols, bool shared = false) {
    const double limit = 1.0 / std::sqrt(static_cast<double>(cols));
    add_layer(rng, prefix + ".A", rows, cols, ParamRole::weight, limit);
    if (!shared) add_layer(rng, prefix + ".B", rows, cols, ParamRole::weight, limit);
  }

  void add_bias(Rng& rng, const std::string& prefix, std::size_t n) {
    add_layer(rng, prefix + ".c", 1, n, ParamRole::bias, 0.0);
    add_layer(rng, prefix + ".d", 1, n, ParamRole::bias, 0.0);
  }

  void build_layers(Rng& rng) {
    const std::size_t dim = config_.dim;
    const std::size_t hidden = config_.hidden;
    switch (config_.encoder) {
      case Encoder::fasttext:
        add_complex(rng, "dense", hidden, dim);
        add_bias(rng, "dense", hidden);
        break;
      case Encoder::cnn:
        add_complex(rng, "conv", config_.filters, config_.kernel_width * dim);
        add_bias(rng, "conv", config_.filters);
        add_complex(rng, "dense", hidden, config_.filters);
        add_bias(rng, "dense", hidden);
        break;
      case Encoder::rnn:
        add_complex(rng, "rnn.Wh", hidden, hidden);
        add_complex(rng, "rnn.Wz", hidden, dim);
        add_bias(rng, "rnn.b", hidden);
        break;
      case Encoder::attention: {
        // Row-vector convention: q = w WQ with WQ of shape dim x dim.
        for (const char* w : {"attention.WQ", "attention.WK", "attention.WV"}) {
          add_complex(rng, w, dim, dim, config_.share_real_imag);
        }
        add_complex(rng, "dense", hidden, dim);
        add_bias(rng, "dense", hidden);
        break;
      }
    }
    add_layer(rng, "readout.W", num_classes_, hidden, ParamRole::weight,
              1.0 / std::sqrt(static_cast<double>(hidden)));
  }

  void scatter(const ad::Tape& tape, Gradients& grads, double scale) const {
    for (const auto& use : tape.param_uses()) {
      const auto& g = tape.node(use.node).grad;
      auto& dst = grads.values[use.param];
      if (use.gathered) {
        const std::size_t cols = tape.node(use.node).cols;
        for (std::size_t i = 0; i < use.rows.size(); ++i) {
          for (std::size_t c = 0; c < cols; ++c) dst[use.rows[i] * cols + c] += scale * g[i * cols + c];
        }
      } else {
        for (std::size_t i = 0; i < g.size(); ++i) dst[i] += scale * g[i];
      }
    }
  }

  ModelConfig config_;
  std::size_t num_classes_;
  ComplexEmbeddingTable embedding_;
  std::vector<Param> layers_;
  std::uint64_t version_ = 0;
};

/// Per-parameter max |analytic - numeric| / max(|analytic|, |numeric|, floor)
/// against central differences (L(p + eps) - L(p - eps)) / 2 eps.
inline VerificationReport compare_gradients(ModelGraph& model, std::span<const Sample> batch,
                                            const Gradients& analytic, double eps, double tol,
                                            double floor = 1e-8) {
  if (!(eps >= 1e-6 && eps <= 1e-2)) throw PreconditionError("grad_check: eps must lie in [1e-6, 1e-2]");
  VerificationReport report;
  report.property = "gradient_check";
  report.grid = {{"eps", eps}, {"tol", tol}, {"batch", batch.size()}};
  auto slots = model.mutable_registry();
  for (std::size_t s = 0; s < slots.size(); ++s) {
    auto& values = *slots[s].values;
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = model.loss(batch);
      values[i] = saved - eps;
      const double down = model.loss(batch);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic.values[s][i];
      const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor});
      worst = (err > worst || std::isnan(err)) ? err : worst;
    }
    report.add(slots[s].name, worst, tol);
  }
  // Restores were exact; refresh the version so caches are invalidated anyway.
  model.mutable_registry();
  return report;
}

inline VerificationReport grad_check(ModelGraph& model, std::span<const Sample> batch, double eps,
                                     double tol) {
  auto cache = model.forward_loss(batch);
  const Gradients analytic = model.backward(cache);
  return compare_gradients(model, batch, analytic, eps, tol);
}

}  // namespace corder
