#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace corder {

/// Outcome of a numerical property check.
struct VerificationReport {
  struct Entry {
    std::string name;
    double residual = 0.0;
    bool pass = true;
  };

  std::string property;
  nlohmann::json grid = nlohmann::json::object();
  double worst_residual = 0.0;
  bool pass = true;
  std::vector<Entry> entries;

  void add(std::string name, double residual, double tol) {
    const bool ok = residual <= tol;
    entries.push_back({std::move(name), residual, ok});
    worst_residual = std::max(worst_residual, residual);
    pass = pass && ok;
  }

  const Entry* find(const std::string& name) const {
    for (const auto& e : entries) {
      if (e.name == name) return &e;
    }
    return nullptr;
  }
};

inline void to_json(nlohmann::json& j, const VerificationReport& r) {
  j = nlohmann::json{{"property", r.property},
                     {"grid", r.grid},
                     {"worst_residual", r.worst_residual},
                     {"pass", r.pass}};
  if (!r.entries.empty()) {
    auto& details = j["entries"] = nlohmann::json::array();
    for (const auto& e : r.entries) {
      details.push_back({{"name", e.name}, {"residual", e.residual}, {"pass", e.pass}});
    }
  }
}

}  // namespace corder
