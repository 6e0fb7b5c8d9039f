#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "corder/order_theory.hpp"
#include "corder/verify.hpp"
#include "oracles.hpp"

using namespace corder;
using oracle::cd;

namespace {

Complex from_std(cd z) { return {z.real(), z.imag()}; }

GeneralSolutionParams random_params(oracle::Uniform& u) {
  for (;;) {
    const cd z1 = std::polar(std::sqrt(u(0, 1)), u(0, 2 * std::numbers::pi));
    if (std::abs(1.0 - z1) >= 1e-3) return {from_std(z1), from_std(u.complex()), from_std(u.complex())};
  }
}

}  // namespace

TEST(GeneralSolutionParams, RejectsOutsideUnitDisk) {
  EXPECT_THROW(GeneralSolutionParams(polar(1.01, 0.2), {}, {1, 0}), ConfigError);
  EXPECT_NO_THROW(GeneralSolutionParams(polar(1.0, 0.2), {}, {1, 0}));
}

TEST(GeneralSolutionParams, RejectsSingularBase) {
  EXPECT_THROW(GeneralSolutionParams({1, 0}, {0.5, 0}, {1, 0}), SingularityError);
  // z2 = 0 keeps g = z3 constant, which is fine.
  EXPECT_NO_THROW(GeneralSolutionParams({1, 0}, {}, {1, 0}));
}

TEST(WitnessW, Examples) {
  EXPECT_EQ(witness_w(0, {0.3, -0.8}), (Complex{1, 0}));
  EXPECT_EQ(witness_w(2, {0, 1}), (Complex{-1, 0}));
}

TEST(WitnessW, MatchesRepeatedMultiplication) {
  oracle::Uniform u(1);
  for (int trial = 0; trial < 100; ++trial) {
    const cd z1 = std::polar(std::sqrt(u(0, 1)), u(0, 6.3));
    cd power = 1.0;
    for (std::uint64_t n = 0; n <= 64; ++n) {
      EXPECT_LE(oracle::close(witness_w(n, from_std(z1)), power), 1e-12);
      power *= z1;
    }
  }
}

TEST(WitnessW, Multiplicative) {
  oracle::Uniform u(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Complex z1 = random_params(u).z1();
    for (std::uint64_t a = 0; a <= 32; ++a) {
      for (std::uint64_t b = 0; b <= 32; ++b) {
        EXPECT_LE(modulus(witness_w(a + b, z1) - witness_w(a, z1) * witness_w(b, z1)), 1e-10);
      }
    }
  }
}

TEST(WitnessB, Examples) {
  const Complex z1{0.3, 0.4}, z2{-1.5, 2.5};
  EXPECT_EQ(witness_b(0, z1, z2), (Complex{}));
  EXPECT_EQ(witness_b(1, z1, z2), z2);
  EXPECT_NEAR(witness_b(2, {0.5, 0}, {1, 0}).re, 1.5, 1e-15);
  EXPECT_NEAR(witness_b(2, {0.5, 0}, {1, 0}).im, 0.0, 1e-15);
}

TEST(WitnessB, SingularBaseThrows) {
  EXPECT_THROW(witness_b(3, {1, 0}, {1, 0}), SingularityError);
  EXPECT_THROW(witness_b(3, {1.0 - 1e-10, 0}, {1, 0}), SingularityError);
}

TEST(WitnessB, MatchesTermByTermSum) {
  oracle::Uniform u(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_params(u);
    for (std::uint64_t n = 0; n <= 32; ++n) {
      const cd expect = oracle::geometric_b(n, oracle::to_std(p.z1()), oracle::to_std(p.z2()));
      EXPECT_LE(oracle::close(witness_b(n, p.z1(), p.z2()), expect), 1e-10 * (1.0 + std::abs(expect)));
    }
  }
}

TEST(WitnessB, Recurrence) {
  oracle::Uniform u(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(u);
    for (std::uint64_t a = 0; a <= 32; ++a) {
      for (std::uint64_t b = 0; a + b <= 32; ++b) {
        const Complex lhs = witness_b(a + b, p.z1(), p.z2());
        const Complex rhs = witness_w(a, p.z1()) * witness_b(b, p.z1(), p.z2()) + witness_b(a, p.z1(), p.z2());
        EXPECT_LE(modulus(lhs - rhs), 1e-10);
      }
    }
  }
}

TEST(GeneralG, InitialValue) {
  oracle::Uniform u(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_params(u);
    EXPECT_EQ(general_g(0, p), p.z3());
  }
}

TEST(GeneralG, ZeroSeedIsPurePower) {
  const GeneralSolutionParams p({0.6, 0.7}, {}, {0.25, -1.0});
  for (std::uint64_t pos = 0; pos < 40; ++pos) {
    EXPECT_EQ(general_g(pos, p), p.z3() * witness_w(pos, p.z1()));
  }
}

TEST(GeneralG, MatchesUnrolledRecurrence) {
  oracle::Uniform u(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_params(u);
    const auto g = oracle::unrolled_g(64, oracle::to_std(p.z1()), oracle::to_std(p.z2()), oracle::to_std(p.z3()));
    for (std::uint64_t pos = 0; pos <= 64; ++pos) {
      EXPECT_LE(oracle::close(general_g(pos, p), g[pos]), 1e-9 * (1.0 + std::abs(g[pos])));
    }
  }
}

TEST(GeneralG, OffsetRecurrence) {
  oracle::Uniform u(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = random_params(u);
    for (std::uint64_t pos = 0; pos <= 64; ++pos) {
      for (std::uint64_t n = 0; n <= 32; ++n) {
        const Complex lhs = general_g(pos + n, p);
        const Complex rhs = witness_w(n, p.z1()) * general_g(pos, p) + witness_b(n, p.z1(), p.z2());
        EXPECT_LE(modulus(lhs - rhs), 1e-9 * (1.0 + modulus(lhs)));
      }
    }
  }
}

TEST(SimplifiedG, Examples) {
  const SimplifiedSolutionParams still{2.0, 0.0, 0.4};
  for (std::uint64_t pos = 0; pos < 10; ++pos) EXPECT_EQ(simplified_g(pos, still), simplified_g(0, still));
  const Complex q = simplified_g(1, {1.0, std::numbers::pi / 2, 0.0});
  EXPECT_NEAR(q.re, 0.0, 1e-15);
  EXPECT_NEAR(q.im, 1.0, 1e-15);
  const Complex z0 = simplified_g(0, {1.5, 0.3, 0.7});
  EXPECT_LE(oracle::close(z0, std::polar(1.5, 0.7)), 1e-15);
}

TEST(SimplifiedG, IsUnitBaseSpecialisation) {
  oracle::Uniform u(8);
  for (int trial = 0; trial < 50; ++trial) {
    const SimplifiedSolutionParams sp{u(0, 3), u(-3, 3), u(0, 6.28)};
    const GeneralSolutionParams gp(polar(1.0, sp.omega), {}, polar(sp.r, sp.theta));
    for (std::uint64_t pos = 0; pos <= 64; ++pos) {
      EXPECT_LE(modulus(simplified_g(pos, sp) - general_g(pos, gp)), 1e-12);
    }
  }
}

TEST(SimplifiedG, Period) {
  EXPECT_DOUBLE_EQ((SimplifiedSolutionParams{1.0, 0.5, 0.0}.period()), 4 * std::numbers::pi);
}

TEST(CheckPositionFree, GeneralSolutionPasses) {
  oracle::Uniform u(9);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(u);
    const auto r = check_position_free([&](std::uint64_t pos) { return general_g(pos, p); }, 64, 32, 1e-9);
    EXPECT_TRUE(r.pass) << r.worst_residual;
    EXPECT_EQ(r.entries.size(), 32U);
  }
}

TEST(CheckPositionFree, QuadraticFails) {
  const auto g = [](std::uint64_t pos) { return Complex{static_cast<double>(pos * pos), 0.0}; };
  const auto r = check_position_free(g, 8, 4, 1e-9);
  EXPECT_FALSE(r.pass);
  // n=1 recovers w = 3, b = 1; at pos=2 the residual is |9 - (3*4 + 1)| = 4.
  const auto* e = r.find("n=1");
  ASSERT_NE(e, nullptr);
  EXPECT_GE(e->residual, 4.0);
  EXPECT_FALSE(e->pass);
}

TEST(CheckPositionFree, ConstantPasses) {
  const auto r = check_position_free([](std::uint64_t) { return Complex{0.5, -2.0}; }, 10, 5, 1e-12);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.worst_residual, 0.0);
  EXPECT_EQ(r.grid.at("witness"), "constant");
}

TEST(CheckPositionFree, FlatStartIsInconclusive) {
  const auto g = [](std::uint64_t pos) { return Complex{pos < 2 ? 1.0 : 2.0, 0.0}; };
  EXPECT_THROW(check_position_free(g, 5, 3, 1e-9), InconclusiveWitnessError);
}

TEST(CheckPositionFree, GridPreconditions) {
  EXPECT_THROW(check_position_free([](std::uint64_t) { return Complex{}; }, 0, 1, 1e-9), PreconditionError);
}

TEST(CheckBounded, ConstantModulus) {
  const auto r = check_bounded([](std::uint64_t pos) { return simplified_g(pos, {2.0, 0.7, 0.1}); }, 1000, 2.0);
  EXPECT_TRUE(r.bounded);
  EXPECT_NEAR(r.max_modulus, 2.0, 1e-12);
}

TEST(CheckBounded, GrowingBaseDetected) {
  const Complex z2{0.3, 0.4};
  const Complex z1 = polar(1.01, 0.5);
  const auto g = [&](std::uint64_t pos) {
    cd acc = oracle::to_std(z2);
    for (std::uint64_t k = 0; k < pos; ++k) acc *= oracle::to_std(z1);
    return from_std(acc);
  };
  const double bound = 2.0;
  // |g| first exceeds 2 once 1.01^pos > 2 / 0.5.
  const auto threshold = static_cast<std::uint64_t>(std::ceil(std::log(bound / modulus(z2)) / std::log(1.01)));
  EXPECT_FALSE(check_bounded(g, threshold + 1, bound).bounded);
  EXPECT_TRUE(check_bounded(g, threshold - 2, bound).bounded);
}

TEST(CheckBounded, ZeroFunction) {
  const auto r = check_bounded([](std::uint64_t) { return Complex{}; }, 5, 0.0);
  EXPECT_TRUE(r.bounded);
  EXPECT_EQ(r.max_modulus, 0.0);
}

TEST(CheckBounded, GeneralBoundHolds) {
  oracle::Uniform u(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(u);
    const cd fixed = oracle::to_std(p.z2()) / (1.0 - oracle::to_std(p.z1()));
    const double bound = std::abs(oracle::to_std(p.z3()) - fixed) + std::abs(fixed);
    EXPECT_NEAR(general_bound(p), bound, 1e-12 * (1.0 + bound));
    EXPECT_TRUE(check_bounded([&](std::uint64_t pos) { return general_g(pos, p); }, 10000, bound).bounded);
  }
}

TEST(OrderSuite, DefaultSeedPasses) {
  const auto r = run_order_suite({});
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.worst_residual, 1e-9);
  for (const char* name : {"position_free", "closed_form_recurrence", "witness_w_multiplicative",
                           "witness_b_recurrence", "bounded_general", "bounded_simplified", "unbounded_detected"}) {
    EXPECT_NE(r.find(name), nullptr) << name;
  }
}

TEST(OrderSuite, ReportSerialises) {
  OrderSuiteOptions opt;
  opt.trials = 3;
  const nlohmann::json j = run_order_suite(opt);
  for (const char* key : {"property", "grid", "worst_residual", "pass"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST(RandomParams, RespectsGap) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_general_params(rng);
    EXPECT_LE(modulus(p.z1()), 1.0);
    EXPECT_GE(modulus(Complex{1, 0} - p.z1()), 1e-3);
  }
}
