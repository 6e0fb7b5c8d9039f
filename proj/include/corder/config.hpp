#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string>

#include <json.hpp>

#include "corder/errors.hpp"
#include "corder/model.hpp"
#include "corder/training.hpp"

namespace corder {

/// Everything a train run needs. Parsed from a JSON object; unknown keys are rejected.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  /// Accept lr / batch / l2 outside the searched pools.
  bool override_pools = false;
  std::string train_path;
  std::string test_path;
  std::string model_out;
  std::string metrics_out;
};

inline constexpr double kLrPool[] = {1e-3, 1e-4, 1e-5};
inline constexpr std::size_t kBatchPool[] = {32, 64, 128};
inline constexpr double kL2Pool[] = {0.0, 1e-3, 1e-4};

namespace detail {
template <typename T, std::size_t N>
bool in_pool(T value, const T (&pool)[N]) {
  return std::any_of(std::begin(pool), std::end(pool), [&](T p) {
    if constexpr (std::is_floating_point_v<T>) {
      return std::abs(p - value) <= 1e-12 * std::max(1.0, std::abs(p));
    } else {
      return p == value;
    }
  });
}
}  // namespace detail

inline void validate(const RunConfig& c) {
  const auto& m = c.model;
  const auto& t = c.train;
  if (m.dim == 0 || m.hidden == 0) throw ConfigError("dim and hidden must be positive");
  if (m.encoder == Encoder::cnn && (m.filters == 0 || m.kernel_width == 0)) {
    throw ConfigError("filters and kernel_width must be positive for the cnn encoder");
  }
  if (!(t.lr >= 0.0) || !std::isfinite(t.lr)) throw ConfigError("lr must be a finite value >= 0");
  if (!(t.lr_freq_multiplier >= 0.0)) throw ConfigError("lr_freq_multiplier must be >= 0");
  if (!(t.momentum >= 0.0 && t.momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (!(t.l2 >= 0.0)) throw ConfigError("l2 must be >= 0");
  if (t.batch == 0) throw ConfigError("batch must be positive");
  if (!c.override_pools) {
    if (!detail::in_pool(t.lr, kLrPool)) {
      throw ConfigError("lr " + std::to_string(t.lr) + " outside {1e-3, 1e-4, 1e-5}; set override_pools to allow");
    }
    if (!detail::in_pool(t.batch, kBatchPool)) {
      throw ConfigError("batch " + std::to_string(t.batch) + " outside {32, 64, 128}; set override_pools to allow");
    }
    if (!detail::in_pool(t.l2, kL2Pool)) {
      throw ConfigError("l2 " + std::to_string(t.l2) + " outside {0, 1e-3, 1e-4}; set override_pools to allow");
    }
  }
}

inline RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "encoder",      "scheme",         "phase_mode",  "dim",         "lr",          "lr_freq_multiplier",
      "batch",        "epochs",         "l2",          "seed",        "hidden",      "filters",
      "kernel_width", "activation",     "pool",        "attention_norm", "share_real_imag", "frequency",
      "momentum",     "override_pools", "train_path",  "test_path",   "model_out",   "metrics_out"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  RunConfig c;
  try {
    auto& m = c.model;
    auto& t = c.train;
    if (j.contains("encoder")) m.encoder = parse_encoder(j["encoder"].get<std::string>());
    if (j.contains("scheme")) m.scheme = parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("phase_mode")) m.phase_mode = parse_phase_mode(j["phase_mode"].get<std::string>());
    if (j.contains("frequency")) m.frequency = parse_frequency_mode(j["frequency"].get<std::string>());
    if (j.contains("dim")) m.dim = j["dim"].get<std::size_t>();
    m.hidden = j.contains("hidden") ? j["hidden"].get<std::size_t>() : m.dim;
    if (j.contains("filters")) m.filters = j["filters"].get<std::size_t>();
    if (j.contains("kernel_width")) m.kernel_width = j["kernel_width"].get<std::size_t>();
    if (j.contains("activation")) m.activation = parse_activation(j["activation"].get<std::string>());
    if (j.contains("pool")) {
      const auto p = j["pool"].get<std::string>();
      if (p != "sum" && p != "mean") throw ConfigError("pool must be 'sum' or 'mean'");
      m.pool = p == "mean" ? PoolMode::mean : PoolMode::sum;
    }
    if (j.contains("attention_norm")) {
      const auto a = j["attention_norm"].get<std::string>();
      if (a != "softmax" && a != "ratio") throw ConfigError("attention_norm must be 'softmax' or 'ratio'");
      m.attention_norm = a == "ratio" ? NormalizeMode::ratio : NormalizeMode::softmax;
    }
    if (j.contains("share_real_imag")) m.share_real_imag = j["share_real_imag"].get<bool>();
    if (j.contains("lr")) t.lr = j["lr"].get<double>();
    if (j.contains("lr_freq_multiplier")) t.lr_freq_multiplier = j["lr_freq_multiplier"].get<double>();
    if (j.contains("momentum")) t.momentum = j["momentum"].get<double>();
    if (j.contains("batch")) t.batch = j["batch"].get<std::size_t>();
    if (j.contains("epochs")) t.epochs = j["epochs"].get<std::size_t>();
    if (j.contains("l2")) t.l2 = j["l2"].get<double>();
    if (j.contains("seed")) t.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("override_pools")) c.override_pools = j["override_pools"].get<bool>();
    if (j.contains("train_path")) c.train_path = j["train_path"].get<std::string>();
    if (j.contains("test_path")) c.test_path = j["test_path"].get<std::string>();
    if (j.contains("model_out")) c.model_out = j["model_out"].get<std::string>();
    if (j.contains("metrics_out")) c.metrics_out = j["metrics_out"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  validate(c);
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_run_config(j);
}

inline nlohmann::json model_config_json(const ModelConfig& m) {
  nlohmann::json j{{"encoder", to_string(m.encoder)},
                   {"scheme", to_string(m.scheme)},
                   {"phase_mode", to_string(m.phase_mode)},
                   {"frequency", to_string(m.frequency)},
                   {"dim", m.dim},
                   {"hidden", m.hidden},
                   {"filters", m.filters},
                   {"kernel_width", m.kernel_width},
                   {"pool", m.pool == PoolMode::mean ? "mean" : "sum"},
                   {"attention_norm", m.attention_norm == NormalizeMode::ratio ? "ratio" : "softmax"},
                   {"share_real_imag", m.share_real_imag}};
  if (m.activation) j["activation"] = to_string(*m.activation);
  return j;
}

}  // namespace corder
