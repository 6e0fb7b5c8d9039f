#pragma once

// Complex-order word embedding. Word j at position pos maps to
//   f(j, pos)[d] = r[j][d] * exp(i (omega[j][d] * pos + theta[j][d]))
// which factors into an amplitude (word) part and a unit-modulus positional part.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "corder/complex.hpp"
#include "corder/errors.hpp"
#include "corder/rng.hpp"

namespace corder {

enum class SharingScheme : std::uint32_t { full = 0, word_sharing = 1, dimension_sharing = 2 };
enum class PhaseMode : std::uint32_t { shared_constant = 0, per_element = 1 };

inline std::string to_string(SharingScheme s) {
  switch (s) {
    case SharingScheme::full:
      return "full";
    case SharingScheme::word_sharing:
      return "word_sharing";
    case SharingScheme::dimension_sharing:
      return "dimension_sharing";
  }
  return "full";
}

inline std::string to_string(PhaseMode m) {
  return m == PhaseMode::per_element ? "per_element" : "shared_constant";
}

inline SharingScheme parse_scheme(std::string_view s) {
  if (s == "full") return SharingScheme::full;
  if (s == "word_sharing") return SharingScheme::word_sharing;
  if (s == "dimension_sharing") return SharingScheme::dimension_sharing;
  throw ConfigError("unknown sharing scheme '" + std::string(s) + "'");
}

inline PhaseMode parse_phase_mode(std::string_view s) {
  if (s == "shared_constant" || s == "shared") return PhaseMode::shared_constant;
  if (s == "per_element") return PhaseMode::per_element;
  throw ConfigError("unknown phase mode '" + std::string(s) + "'");
}

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Maps theta into [0, 2pi).
inline double wrap_phase(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  // fmod of a tiny negative value plus 2pi can round up to 2pi itself.
  if (t >= kTwoPi) t = 0.0;
  return t;
}

struct SensitivityProfile {
  std::vector<double> delta;
  std::vector<std::size_t> ranking;
};

class ComplexEmbeddingTable {
 public:
  ComplexEmbeddingTable() = default;

  /// Zero-initialised table: all amplitudes, frequencies and phases are 0.
  ComplexEmbeddingTable(std::size_t vocab_size, std::size_t dim, SharingScheme scheme,
                        PhaseMode phase_mode)
      : vocab_size_(vocab_size), dim_(dim), scheme_(scheme), phase_mode_(phase_mode) {
    if (vocab_size == 0 || dim == 0) {
      throw ConfigError("ComplexEmbeddingTable: vocab_size and dim must be positive");
    }
    amplitudes_.assign(vocab_size * dim, 0.0);
    frequencies_.assign(frequency_rows() * frequency_cols(), 0.0);
    phases_.assign(phase_mode == PhaseMode::per_element ? vocab_size * dim : 1, 0.0);
  }

  /// Frequencies uniform in [-1/D, 1/D], amplitudes uniform in [-1/sqrt(D), 1/sqrt(D)],
  /// per-element phases uniform in [0, 2pi). Shared phase stays 0.
  static ComplexEmbeddingTable random(std::size_t vocab_size, std::size_t dim, SharingScheme scheme,
                                      PhaseMode phase_mode, Rng& rng) {
    ComplexEmbeddingTable t(vocab_size, dim, scheme, phase_mode);
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    const double freq = 1.0 / static_cast<double>(dim);
    for (auto& v : t.amplitudes_) v = rng.uniform(-amp, amp);
    for (auto& v : t.frequencies_) v = rng.uniform(-freq, freq);
    if (phase_mode == PhaseMode::per_element) {
      for (auto& v : t.phases_) v = rng.uniform(0.0, kTwoPi);
    }
    return t;
  }

  std::size_t vocab_size() const noexcept { return vocab_size_; }
  std::size_t dim() const noexcept { return dim_; }
  SharingScheme scheme() const noexcept { return scheme_; }
  PhaseMode phase_mode() const noexcept { return phase_mode_; }

  /// Shape of the frequency backing array: |W| x D, 1 x D, or |W| x 1.
  std::size_t frequency_rows() const noexcept {
    return scheme_ == SharingScheme::word_sharing ? 1 : vocab_size_;
  }
  std::size_t frequency_cols() const noexcept {
    return scheme_ == SharingScheme::dimension_sharing ? 1 : dim_;
  }

  double amplitude(std::size_t j, std::size_t d) const { return amplitudes_[j * dim_ + d]; }

  /// Effective frequency after resolving the sharing scheme.
  double frequency(std::size_t j, std::size_t d) const {
    switch (scheme_) {
      case SharingScheme::full:
        return frequencies_[j * dim_ + d];
      case SharingScheme::word_sharing:
        return frequencies_[d];
      case SharingScheme::dimension_sharing:
        return frequencies_[j];
    }
    return 0.0;
  }

  double phase(std::size_t j, std::size_t d) const {
    return phase_mode_ == PhaseMode::per_element ? phases_[j * dim_ + d] : phases_[0];
  }

  /// Positions per full turn, 2pi / omega.
  double period(std::size_t j, std::size_t d) const { return kTwoPi / frequency(j, d); }

  void set_amplitude(std::size_t j, std::size_t d, double v) { amplitudes_[j * dim_ + d] = v; }
  void set_phase(std::size_t j, std::size_t d, double v) {
    if (phase_mode_ == PhaseMode::per_element) {
      phases_[j * dim_ + d] = v;
    } else {
      phases_[0] = v;
    }
  }
  void set_shared_phase(double v) { phases_[0] = v; }

  /// Writes the frequency backing cell that (j, d) resolves to.
  void set_frequency(std::size_t j, std::size_t d, double v) {
    switch (scheme_) {
      case SharingScheme::full:
        frequencies_[j * dim_ + d] = v;
        break;
      case SharingScheme::word_sharing:
        frequencies_[d] = v;
        break;
      case SharingScheme::dimension_sharing:
        frequencies_[j] = v;
        break;
    }
  }

  std::vector<double>& amplitude_data() noexcept { return amplitudes_; }
  std::vector<double>& frequency_data() noexcept { return frequencies_; }
  std::vector<double>& phase_data() noexcept { return phases_; }
  const std::vector<double>& amplitude_data() const noexcept { return amplitudes_; }
  const std::vector<double>& frequency_data() const noexcept { return frequencies_; }
  const std::vector<double>& phase_data() const noexcept { return phases_; }

  bool operator==(const ComplexEmbeddingTable&) const = default;

 private:
  std::size_t vocab_size_ = 0;
  std::size_t dim_ = 0;
  SharingScheme scheme_ = SharingScheme::full;
  PhaseMode phase_mode_ = PhaseMode::shared_constant;
  std::vector<double> amplitudes_;
  std::vector<double> frequencies_;
  std::vector<double> phases_;
};

namespace detail {
inline void check_token(const ComplexEmbeddingTable& t, std::size_t j) {
  if (j >= t.vocab_size()) {
    throw IndexError("word index " + std::to_string(j) + " outside vocabulary of size " +
                     std::to_string(t.vocab_size()));
  }
}
}  // namespace detail

/// Unit-modulus part exp(i (omega_eff pos + theta)).
inline ComplexVec positional_part(const ComplexEmbeddingTable& t, std::size_t j,
                                  std::uint64_t pos) {
  detail::check_token(t, j);
  ComplexVec out(t.dim());
  const double p = static_cast<double>(pos);
  for (std::size_t d = 0; d < t.dim(); ++d) {
    const double phi = t.frequency(j, d) * p + t.phase(j, d);
    out.re()[d] = std::cos(phi);
    out.im()[d] = std::sin(phi);
  }
  return out;
}

inline ComplexVec embed_token(const ComplexEmbeddingTable& t, std::size_t j, std::uint64_t pos) {
  detail::check_token(t, j);
  ComplexVec out(t.dim());
  const double p = static_cast<double>(pos);
  for (std::size_t d = 0; d < t.dim(); ++d) {
    const double r = t.amplitude(j, d);
    const double phi = t.frequency(j, d) * p + t.phase(j, d);
    out.re()[d] = r * std::cos(phi);
    out.im()[d] = r * std::sin(phi);
  }
  return out;
}

/// Row t holds embed_token(tokens[t], t + 1); positions are 1-based.
inline ComplexMat embed_sequence(const ComplexEmbeddingTable& t, std::span<const std::size_t> tokens) {
  ComplexMat out(tokens.size(), t.dim());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= t.vocab_size()) {
      throw IndexError("embed_sequence: token " + std::to_string(tokens[i]) + " at position " +
                       std::to_string(i + 1) + " outside vocabulary of size " +
                       std::to_string(t.vocab_size()));
    }
    out.set_row(i, embed_token(t, tokens[i], i + 1));
  }
  return out;
}

/// Trainable scalars in the table. A shared-constant phase is not trainable.
inline std::size_t parameter_count(const ComplexEmbeddingTable& t) {
  const std::size_t phases = t.phase_mode() == PhaseMode::per_element ? t.phase_data().size() : 0;
  return t.amplitude_data().size() + t.frequency_data().size() + phases;
}

/// delta_j = mean_d |omega_eff(j, d)|, ranked descending (ties by index).
inline SensitivityProfile frequency_sensitivity(const ComplexEmbeddingTable& t) {
  SensitivityProfile profile;
  profile.delta.resize(t.vocab_size());
  for (std::size_t j = 0; j < t.vocab_size(); ++j) {
    double sum = 0.0;
    for (std::size_t d = 0; d < t.dim(); ++d) sum += std::abs(t.frequency(j, d));
    profile.delta[j] = sum / static_cast<double>(t.dim());
  }
  profile.ranking.resize(t.vocab_size());
  std::iota(profile.ranking.begin(), profile.ranking.end(), std::size_t{0});
  std::stable_sort(profile.ranking.begin(), profile.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return profile.delta[a] > profile.delta[b]; });
  return profile;
}

inline ComplexEmbeddingTable wrap_phases(ComplexEmbeddingTable t) {
  for (auto& theta : t.phase_data()) theta = wrap_phase(theta);
  return t;
}

// Binary container: magic, u64 vocab_size, u64 dim, u32 scheme, u32 phase_mode,
// then amplitudes, frequency backing array and phase backing array as
// little-endian IEEE-754 doubles in row-major order.
inline constexpr char kTableMagic[8] = {'C', 'O', 'R', 'D', 'E', 'M', 'B', '1'};

namespace detail {
template <typename T>
void write_le(std::ostream& os, T value) {
  static_assert(std::endian::native == std::endian::little, "big-endian hosts unsupported");
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  os.write(buf, sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw ParseError(0, "truncated embedding table");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}
}  // namespace detail

inline void save_binary(const ComplexEmbeddingTable& t, std::ostream& os) {
  os.write(kTableMagic, sizeof(kTableMagic));
  detail::write_le<std::uint64_t>(os, t.vocab_size());
  detail::write_le<std::uint64_t>(os, t.dim());
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.scheme()));
  detail::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(t.phase_mode()));
  for (const auto* arr : {&t.amplitude_data(), &t.frequency_data(), &t.phase_data()}) {
    for (double v : *arr) detail::write_le<double>(os, v);
  }
}

inline ComplexEmbeddingTable load_binary(std::istream& is) {
  char magic[sizeof(kTableMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kTableMagic, sizeof(magic)) != 0) {
    throw ParseError(0, "not an embedding table (bad magic)");
  }
  const auto vocab = detail::read_le<std::uint64_t>(is);
  const auto dim = detail::read_le<std::uint64_t>(is);
  const auto scheme = detail::read_le<std::uint32_t>(is);
  const auto phase = detail::read_le<std::uint32_t>(is);
  if (scheme > 2 || phase > 1) throw ParseError(0, "embedding table header has unknown enum value");
  ComplexEmbeddingTable t(vocab, dim, static_cast<SharingScheme>(scheme), static_cast<PhaseMode>(phase));
  for (auto* arr : {&t.amplitude_data(), &t.frequency_data(), &t.phase_data()}) {
    for (double& v : *arr) v = detail::read_le<double>(is);
  }
  return t;
}

inline nlohmann::json to_json(const ComplexEmbeddingTable& t) {
  return {{"vocab_size", t.vocab_size()},
          {"dim", t.dim()},
          {"scheme", to_string(t.scheme())},
          {"phase_mode", to_string(t.phase_mode())},
          {"amplitudes", t.amplitude_data()},
          {"frequencies", t.frequency_data()},
          {"phases", t.phase_data()}};
}

inline ComplexEmbeddingTable table_from_json(const nlohmann::json& j) {
  ComplexEmbeddingTable t(j.at("vocab_size").get<std::size_t>(), j.at("dim").get<std::size_t>(),
                          parse_scheme(j.at("scheme").get<std::string>()),
                          parse_phase_mode(j.at("phase_mode").get<std::string>()));
  auto fill = [](const nlohmann::json& src, std::vector<double>& dst, const char* name) {
    const auto values = src.get<std::vector<double>>();
    if (values.size() != dst.size()) {
      throw ParseError(0, std::string("embedding table array '") + name + "' has wrong length");
    }
    dst = values;
  };
  fill(j.at("amplitudes"), t.amplitude_data(), "amplitudes");
  fill(j.at("frequencies"), t.frequency_data(), "frequencies");
  fill(j.at("phases"), t.phase_data(), "phases");
  return t;
}

}  // namespace corder
