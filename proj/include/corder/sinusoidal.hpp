#pragma once

// Fixed sinusoidal position embedding and its correspondence with a
// unit-modulus complex exponential:
//   PE[2k](pos)   = sin(pos / 10000^{2k/d}) = Im exp(i pos omega_k)
//   PE[2k+1](pos) = cos(pos / 10000^{2k/d}) = Re exp(i pos omega_k)
// with omega_k = 10000^{-2k/d}.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "corder/complex.hpp"
#include "corder/embedding.hpp"
#include "corder/errors.hpp"
#include "corder/report.hpp"

namespace corder {

namespace detail {
inline void check_d_model(std::size_t d_model) {
  if (d_model < 2 || d_model % 2 != 0) {
    throw ConfigError("d_model must be even and >= 2 (got " + std::to_string(d_model) + ")");
  }
}
}  // namespace detail

inline std::vector<double> vaswani_pe(std::uint64_t pos, std::size_t d_model) {
  detail::check_d_model(d_model);
  std::vector<double> pe(d_model);
  const double p = static_cast<double>(pos);
  for (std::size_t i = 0; i < d_model; i += 2) {
    const double denom = std::pow(10000.0, static_cast<double>(i) / static_cast<double>(d_model));
    pe[i] = std::sin(p / denom);
    pe[i + 1] = std::cos(p / denom);
  }
  return pe;
}

/// omega_k = 10000^{-2k/d_model}
inline double pe_frequency(std::size_t k, std::size_t d_model) {
  return std::pow(10000.0, -2.0 * static_cast<double>(k) / static_cast<double>(d_model));
}

/// Positions per turn of dimension pair k: 2pi * 10000^{2k/d_model}.
inline double pe_period(std::size_t k, std::size_t d_model) {
  return 2.0 * std::numbers::pi *
         std::pow(10000.0, 2.0 * static_cast<double>(k) / static_cast<double>(d_model));
}

inline Complex complex_pe(std::uint64_t pos, std::size_t k, std::size_t d_model) {
  detail::check_d_model(d_model);
  if (2 * k >= d_model) {
    throw IndexError("complex_pe: pair index " + std::to_string(k) + " out of range for d_model " +
                     std::to_string(d_model));
  }
  return polar(1.0, static_cast<double>(pos) * pe_frequency(k, d_model));
}

/// Inverse direction: PE[2k+1] + i PE[2k].
inline Complex complex_from_pe(const std::vector<double>& pe, std::size_t k) {
  return {pe.at(2 * k + 1), pe.at(2 * k)};
}

struct PeComparisonRow {
  std::uint64_t pos;
  std::size_t k;
  double pe_sin;
  double pe_cos;
  double re;
  double im;
  double residual;
};

/// All (pos, k) rows over pos in [pos_begin, pos_end).
inline std::vector<PeComparisonRow> pe_comparison(std::uint64_t pos_begin, std::uint64_t pos_end,
                                                  std::size_t d_model) {
  detail::check_d_model(d_model);
  std::vector<PeComparisonRow> rows;
  rows.reserve((pos_end - pos_begin) * (d_model / 2));
  for (std::uint64_t pos = pos_begin; pos < pos_end; ++pos) {
    const auto pe = vaswani_pe(pos, d_model);
    for (std::size_t k = 0; k < d_model / 2; ++k) {
      const Complex z = complex_pe(pos, k, d_model);
      const double residual = std::max(std::abs(pe[2 * k] - z.im), std::abs(pe[2 * k + 1] - z.re));
      rows.push_back({pos, k, pe[2 * k], pe[2 * k + 1], z.re, z.im, residual});
    }
  }
  return rows;
}

inline VerificationReport bijection_check(std::uint64_t pos_begin, std::uint64_t pos_end,
                                          std::size_t d_model, double tol = 1e-12) {
  VerificationReport report;
  report.property = "sinusoidal_bijection";
  report.grid = {{"pos_begin", pos_begin}, {"pos_end", pos_end}, {"d_model", d_model}, {"tol", tol}};
  double forward = 0.0;
  double inverse = 0.0;
  for (std::uint64_t pos = pos_begin; pos < pos_end; ++pos) {
    const auto pe = vaswani_pe(pos, d_model);
    for (std::size_t k = 0; k < d_model / 2; ++k) {
      const Complex z = complex_pe(pos, k, d_model);
      forward = std::max({forward, std::abs(pe[2 * k] - z.im), std::abs(pe[2 * k + 1] - z.re)});
      inverse = std::max(inverse, modulus(complex_from_pe(pe, k) - z));
    }
  }
  report.add("pe_to_complex", forward, tol);
  report.add("complex_to_pe", inverse, tol);
  return report;
}

/// Word-sharing table whose positional part reproduces the sinusoidal embedding:
/// r = 1, theta = 0, omega[., k] = 10000^{-2k/d_model}, D = d_model / 2.
inline ComplexEmbeddingTable sinusoidal_table(std::size_t vocab_size, std::size_t d_model) {
  detail::check_d_model(d_model);
  ComplexEmbeddingTable t(vocab_size, d_model / 2, SharingScheme::word_sharing,
                          PhaseMode::shared_constant);
  for (auto& r : t.amplitude_data()) r = 1.0;
  for (std::size_t k = 0; k < d_model / 2; ++k) t.frequency_data()[k] = pe_frequency(k, d_model);
  return t;
}

}  // namespace corder
