#pragma once

// Randomised verification of the closed forms in order_theory.hpp.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "corder/complex.hpp"
#include "corder/order_theory.hpp"
#include "corder/report.hpp"
#include "corder/rng.hpp"

namespace corder {

/// z1 uniform over the unit disk with |1 - z1| >= min_gap; z2, z3 with parts in [-1, 1].
inline GeneralSolutionParams random_general_params(Rng& rng, double min_gap = 1e-3) {
  Complex z1;
  do {
    const double radius = std::sqrt(rng.uniform01());
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    z1 = polar(radius, angle);
  } while (modulus(Complex{1.0, 0.0} - z1) < min_gap);
  const Complex z2{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  const Complex z3{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return {z1, z2, z3};
}

struct OrderSuiteOptions {
  std::uint64_t seed = 7;
  std::size_t trials = 100;
  std::uint64_t max_pos = 64;
  std::uint64_t max_n = 32;
  std::uint64_t witness_max = 32;
  std::uint64_t bound_horizon = 10000;
  double recurrence_tol = 1e-9;
  double witness_tol = 1e-10;
};

/// Every check the order-theory closed forms must satisfy, over `trials` random parameter sets.
///  - closed_form_recurrence: |g(pos+n) - (w(n) g(pos) + b(n))| / (1 + |g(pos+n)|)
///  - position_free: same with witnesses recovered from g alone (absolute)
///  - witness_w_multiplicative, witness_b_recurrence: witness algebra (absolute)
///  - bounded_general: excess of max |g| over |z3 - z2/(1-z1)| + |z2/(1-z1)|
///  - bounded_simplified: max | |r e^{i(omega pos + theta)}| - r |
///  - unbounded_detected: 0 when |z1| = 1.01 is flagged by check_bounded, else 1
inline VerificationReport run_order_suite(const OrderSuiteOptions& opt) {
  VerificationReport report;
  report.property = "order_theory";
  report.grid = {{"seed", opt.seed},       {"trials", opt.trials},
                 {"max_pos", opt.max_pos}, {"max_n", opt.max_n},
                 {"witness_max", opt.witness_max}, {"bound_horizon", opt.bound_horizon}};
  Rng rng(opt.seed);
  double recurrence = 0.0;
  double recovered = 0.0;
  double mult = 0.0;
  double brec = 0.0;
  double bound_excess = 0.0;
  double simplified = 0.0;

  for (std::size_t trial = 0; trial < opt.trials; ++trial) {
    const GeneralSolutionParams p = random_general_params(rng);
    const Complex z1 = p.z1();
    const Complex z2 = p.z2();

    std::vector<Complex> g(opt.max_pos + opt.max_n + 1);
    for (std::uint64_t k = 0; k < g.size(); ++k) g[k] = general_g(k, p);
    std::vector<Complex> w(opt.max_n + 1);
    std::vector<Complex> b(opt.max_n + 1);
    for (std::uint64_t n = 0; n <= opt.max_n; ++n) {
      w[n] = witness_w(n, z1);
      b[n] = witness_b(n, z1, z2);
    }
    for (std::uint64_t pos = 0; pos <= opt.max_pos; ++pos) {
      for (std::uint64_t n = 0; n <= opt.max_n; ++n) {
        const Complex lhs = g[pos + n];
        const double r = modulus(lhs - (w[n] * g[pos] + b[n])) / (1.0 + modulus(lhs));
        recurrence = std::max(recurrence, std::isnan(r) ? INFINITY : r);
      }
    }

    const auto pf = check_position_free([&](std::uint64_t pos) { return general_g(pos, p); }, opt.max_pos,
                                        opt.max_n, opt.recurrence_tol);
    recovered = std::max(recovered, pf.worst_residual);

    for (std::uint64_t n1 = 0; n1 <= opt.witness_max; ++n1) {
      for (std::uint64_t n2 = 0; n1 + n2 <= opt.witness_max; ++n2) {
        mult = std::max(mult, modulus(witness_w(n1 + n2, z1) - witness_w(n1, z1) * witness_w(n2, z1)));
        brec = std::max(brec, modulus(witness_b(n1 + n2, z1, z2) -
                                      (witness_w(n1, z1) * witness_b(n2, z1, z2) + witness_b(n1, z1, z2))));
      }
    }

    const double bound = general_bound(p);
    const auto bounded = check_bounded([&](std::uint64_t pos) { return general_g(pos, p); }, opt.bound_horizon, bound);
    bound_excess = std::max(bound_excess, std::max(0.0, bounded.max_modulus - bound));

    const SimplifiedSolutionParams sp{rng.uniform(0.0, 2.0), rng.uniform(-3.0, 3.0), rng.uniform(0.0, 6.0)};
    for (std::uint64_t pos = 0; pos <= opt.bound_horizon; pos += 97) {
      simplified = std::max(simplified, std::abs(modulus(simplified_g(pos, sp)) - sp.r));
    }
  }

  // |z1| = 1.01 cannot pass the constructor, so build g directly.
  const Complex z2{0.5, -0.25};
  const Complex grow = polar(1.01, 0.3);
  const auto unbounded = check_bounded([&](std::uint64_t pos) { return z2 * witness_w(pos, grow); },
                                       opt.bound_horizon, modulus(z2));

  report.add("closed_form_recurrence", recurrence, opt.recurrence_tol);
  report.add("position_free", recovered, opt.recurrence_tol);
  report.add("witness_w_multiplicative", mult, opt.witness_tol);
  report.add("witness_b_recurrence", brec, opt.witness_tol);
  report.add("bounded_general", bound_excess, 1e-9);
  report.add("bounded_simplified", simplified, 1e-12);
  report.add("unbounded_detected", unbounded.bounded ? 1.0 : 0.0, 0.0);
  return report;
}

}  // namespace corder
