#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "corder/config.hpp"
#include "corder/dataset.hpp"
#include "corder/embedding.hpp"
#include "corder/errors.hpp"
#include "corder/model.hpp"

namespace corder {

/// A trained model together with the vocabulary it was trained on.
struct SavedModel {
  ModelGraph model;
  Vocab vocab;
};

inline nlohmann::json model_to_json(const ModelGraph& model, const Vocab& vocab) {
  nlohmann::json layers = nlohmann::json::object();
  for (const auto& p : model.layer_params()) {
    layers[p.name] = {{"rows", p.rows}, {"cols", p.cols}, {"values", p.values}};
  }
  return {{"format", "corder-model"},
          {"version", 1},
          {"config", model_config_json(model.config())},
          {"num_classes", model.num_classes()},
          {"vocab", vocab.tokens()},
          {"embedding", to_json(model.embedding())},
          {"layers", layers}};
}

inline SavedModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "corder-model" || j.at("version").get<int>() != 1) {
      throw ParseError(0, "unsupported model file format");
    }
    const RunConfig rc = [&] {
      auto cfg = j.at("config");
      cfg["override_pools"] = true;
      return parse_run_config(cfg);
    }();
    Vocab vocab(j.at("vocab").get<std::vector<std::string>>());
    ModelGraph model(rc.model, vocab.size(), j.at("num_classes").get<std::size_t>(), 0);
    model.replace_embedding(table_from_json(j.at("embedding")));
    const auto& layers = j.at("layers");
    for (const auto& p : model.layer_params()) {
      if (!layers.contains(p.name)) throw ParseError(0, "model file lacks layer '" + p.name + "'");
    }
    for (const auto& [name, value] : layers.items()) {
      model.set_layer_values(name, value.at("values").get<std::vector<double>>());
    }
    return {std::move(model), std::move(vocab)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const ModelGraph& model, const Vocab& vocab, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write model '" + path + "'");
  out << model_to_json(model, vocab).dump(1) << '\n';
}

inline SavedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(0, "model '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace corder
