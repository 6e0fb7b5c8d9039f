#pragma once

// Closed forms for position-free offset transformations g: N -> C and
// executable checks of the two required properties:
//   (1) g(pos + n) = w(n) g(pos) + b(n) for witnesses w, b independent of pos
//   (2) g is bounded over positions
// The general solution is
//   g(pos) = (z3 - z2 / (1 - z1)) z1^pos + z2 / (1 - z1),  |z1| <= 1
// with witnesses w(n) = z1^n and b(n) = (1 - z1^n) / (1 - z1) z2.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "corder/complex.hpp"
#include "corder/errors.hpp"
#include "corder/report.hpp"

namespace corder {

inline constexpr double kModulusSlack = 1e-12;
inline constexpr double kSingularGap = 1e-9;

template <typename G>
concept PositionFunction = std::invocable<const G&, std::uint64_t> &&
    std::convertible_to<std::invoke_result_t<const G&, std::uint64_t>, Complex>;

/// (z1, z2, z3): transformation base, constant-term seed b(1), initial value g(0).
class GeneralSolutionParams {
 public:
  GeneralSolutionParams(Complex z1, Complex z2, Complex z3) : z1_(z1), z2_(z2), z3_(z3) {
    if (modulus(z1) > 1.0 + kModulusSlack) {
      throw ConfigError("GeneralSolutionParams: |z1| = " + std::to_string(modulus(z1)) +
                        " exceeds 1; g would be unbounded");
    }
    if (modulus(Complex{1.0, 0.0} - z1) < kSingularGap && modulus(z2) > 0.0) {
      throw SingularityError("GeneralSolutionParams: z1 = 1 with z2 != 0 has no bounded solution");
    }
  }

  Complex z1() const noexcept { return z1_; }
  Complex z2() const noexcept { return z2_; }
  Complex z3() const noexcept { return z3_; }

  /// Fixed point z2 / (1 - z1); zero when z2 = 0.
  Complex fixed_point() const {
    if (z2_ == Complex{}) return {};
    return z2_ / (Complex{1.0, 0.0} - z1_);
  }

 private:
  Complex z1_;
  Complex z2_;
  Complex z3_;
};

/// g(pos) = r e^{i (omega pos + theta)}
struct SimplifiedSolutionParams {
  double r = 1.0;
  double omega = 0.0;
  double theta = 0.0;

  double period() const { return 2.0 * std::numbers::pi / omega; }
};

/// z1^n by repeated squaring.
inline Complex witness_w(std::uint64_t n, Complex z1) {
  Complex result{1.0, 0.0};
  Complex base = z1;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

inline Complex witness_b(std::uint64_t n, Complex z1, Complex z2) {
  const Complex gap = Complex{1.0, 0.0} - z1;
  if (modulus(gap) < kSingularGap) {
    throw SingularityError("witness_b: |1 - z1| < 1e-9, geometric sum denominator vanishes");
  }
  if (n == 0) return {};
  if (n == 1) return z2;
  return (Complex{1.0, 0.0} - witness_w(n, z1)) / gap * z2;
}

inline Complex general_g(std::uint64_t pos, const GeneralSolutionParams& p) {
  if (pos == 0) return p.z3();
  if (p.z2() == Complex{}) return p.z3() * witness_w(pos, p.z1());
  const Complex fixed = p.fixed_point();
  return (p.z3() - fixed) * witness_w(pos, p.z1()) + fixed;
}

inline Complex simplified_g(std::uint64_t pos, const SimplifiedSolutionParams& p) {
  return polar(p.r, p.omega * static_cast<double>(pos) + p.theta);
}

/// Recovers witnesses from g itself and reports, per offset n in [1, max_n],
/// the worst |g(pos+n) - (w(n) g(pos) + b(n))| over pos in [0, max_pos].
///   w(n) = (g(n+1) - g(n)) / (g(1) - g(0)),  b(n) = g(n) - w(n) g(0)
/// When g(1) == g(0) the function must be constant on the grid (w = 1, b = 0).
template <PositionFunction G>
VerificationReport check_position_free(const G& g, std::uint64_t max_pos, std::uint64_t max_n,
                                       double tol) {
  if (max_pos < 1 || max_n < 1) throw PreconditionError("check_position_free: grid must be >= 1");
  VerificationReport report;
  report.property = "position_free";
  report.grid = {{"max_pos", max_pos}, {"max_n", max_n}, {"tol", tol}};

  const Complex g0 = g(0);
  const Complex step = Complex(g(1)) - g0;
  std::vector<Complex> values(max_pos + max_n + 2);
  for (std::uint64_t p = 0; p < values.size(); ++p) values[p] = g(p);

  if (step == Complex{}) {
    double drift = 0.0;
    for (const auto& v : values) drift = std::max(drift, modulus(v - g0));
    if (drift > 0.0) {
      throw InconclusiveWitnessError(
          "check_position_free: g(1) = g(0) but g varies on the grid; no witness can be built");
    }
    report.grid["witness"] = "constant";
    for (std::uint64_t n = 1; n <= max_n; ++n) report.add("n=" + std::to_string(n), 0.0, tol);
    return report;
  }

  for (std::uint64_t n = 1; n <= max_n; ++n) {
    const Complex w = (values[n + 1] - values[n]) / step;
    const Complex b = values[n] - w * g0;
    double worst = 0.0;
    for (std::uint64_t p = 0; p <= max_pos; ++p) {
      const double residual = modulus(values[p + n] - (w * values[p] + b));
      // NaN must fail the check.
      worst = (residual > worst || std::isnan(residual)) ? residual : worst;
    }
    report.add("n=" + std::to_string(n), worst, tol);
  }
  return report;
}

struct BoundednessResult {
  bool bounded = true;
  double max_modulus = 0.0;
  std::uint64_t argmax = 0;
};

/// max |g(pos)| over pos in [0, horizon] against bound + 1e-9.
template <PositionFunction G>
BoundednessResult check_bounded(const G& g, std::uint64_t horizon, double bound) {
  if (horizon < 1) throw PreconditionError("check_bounded: horizon must be >= 1");
  BoundednessResult result;
  for (std::uint64_t p = 0; p <= horizon; ++p) {
    const double m = modulus(g(p));
    if (m > result.max_modulus || std::isnan(m)) {
      result.max_modulus = m;
      result.argmax = p;
    }
  }
  result.bounded = result.max_modulus <= bound + 1e-9;
  return result;
}

/// Upper bound |z3 - z2/(1-z1)| + |z2/(1-z1)| on |general_g|.
inline double general_bound(const GeneralSolutionParams& p) {
  const Complex fixed = p.fixed_point();
  return modulus(p.z3() - fixed) + modulus(fixed);
}

}  // namespace corder
