#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "corder/embedding.hpp"
#include "corder/order_theory.hpp"
#include "oracles.hpp"

using namespace corder;
using oracle::cd;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexEmbeddingTable random_table(std::size_t vocab, std::size_t dim, SharingScheme s, PhaseMode p,
                                   std::uint64_t seed = 5) {
  Rng rng(seed);
  return ComplexEmbeddingTable::random(vocab, dim, s, p, rng);
}

// Independent scalars, found by writing a distinct marker through every
// (j, d) setter and counting the distinct values read back.
std::size_t enumerate_parameters(ComplexEmbeddingTable t) {
  std::set<double> amp, freq, phase;
  double marker = 1.0;
  for (std::size_t j = 0; j < t.vocab_size(); ++j) {
    for (std::size_t d = 0; d < t.dim(); ++d) {
      t.set_amplitude(j, d, marker);
      t.set_frequency(j, d, marker);
      if (t.phase_mode() == PhaseMode::per_element) t.set_phase(j, d, marker);
      marker += 1.0;
    }
  }
  for (std::size_t j = 0; j < t.vocab_size(); ++j) {
    for (std::size_t d = 0; d < t.dim(); ++d) {
      amp.insert(t.amplitude(j, d));
      freq.insert(t.frequency(j, d));
      if (t.phase_mode() == PhaseMode::per_element) phase.insert(t.phase(j, d));
    }
  }
  return amp.size() + freq.size() + phase.size();
}

}  // namespace

TEST(EmbedToken, ZeroFrequencyIsRealAmplitude) {
  auto t = random_table(6, 5, SharingScheme::full, PhaseMode::shared_constant);
  for (auto& w : t.frequency_data()) w = 0.0;
  for (std::uint64_t pos : {0U, 1U, 7U, 1000U}) {
    const ComplexVec e = embed_token(t, 3, pos);
    for (std::size_t d = 0; d < 5; ++d) {
      EXPECT_EQ(e.re()[d], t.amplitude(3, d));
      EXPECT_EQ(e.im()[d], 0.0);
    }
  }
}

TEST(EmbedToken, PositionZeroIsInitialPhase) {
  const auto t = random_table(4, 3, SharingScheme::full, PhaseMode::per_element);
  const ComplexVec e = embed_token(t, 2, 0);
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_LE(oracle::close(e[d], std::polar(t.amplitude(2, d), t.phase(2, d))), 1e-15);
  }
}

TEST(EmbedToken, TwoQuarterTurns) {
  ComplexEmbeddingTable t(1, 1, SharingScheme::full, PhaseMode::shared_constant);
  t.set_amplitude(0, 0, 1.0);
  t.set_frequency(0, 0, kPi / 2);
  const Complex z = embed_token(t, 0, 2)[0];
  EXPECT_NEAR(z.re, -1.0, 1e-15);
  EXPECT_NEAR(z.im, 0.0, 1e-15);
}

TEST(EmbedToken, MatchesFormulaOracle) {
  for (auto scheme : {SharingScheme::full, SharingScheme::word_sharing, SharingScheme::dimension_sharing}) {
    const auto t = random_table(7, 4, scheme, PhaseMode::per_element, 9);
    for (std::size_t j = 0; j < 7; ++j) {
      for (std::uint64_t pos = 0; pos < 30; ++pos) {
        const ComplexVec e = embed_token(t, j, pos);
        for (std::size_t d = 0; d < 4; ++d) {
          const std::size_t fj = scheme == SharingScheme::word_sharing ? 0 : j;
          const std::size_t fd = scheme == SharingScheme::dimension_sharing ? 0 : d;
          const double w = t.frequency_data()[fj * t.frequency_cols() + fd];
          const cd expect = t.amplitude(j, d) * std::exp(cd(0.0, w * static_cast<double>(pos) + t.phase(j, d)));
          EXPECT_LE(oracle::close(e[d], expect), 1e-12);
        }
      }
    }
  }
}

TEST(EmbedToken, OutOfVocabulary) { EXPECT_THROW(embed_token(random_table(3, 2, SharingScheme::full, PhaseMode::shared_constant), 3, 0), IndexError); }

TEST(PositionalPart, UnitModulusAndFactorisation) {
  const auto t = random_table(5, 6, SharingScheme::full, PhaseMode::per_element);
  for (std::size_t j = 0; j < 5; ++j) {
    for (std::uint64_t pos = 0; pos < 50; pos += 7) {
      const ComplexVec u = positional_part(t, j, pos);
      const ComplexVec e = embed_token(t, j, pos);
      for (std::size_t d = 0; d < 6; ++d) {
        EXPECT_NEAR(modulus(u[d]), 1.0, 1e-12);
        EXPECT_LE(modulus(e[d] - t.amplitude(j, d) * u[d]), 1e-12);
      }
    }
  }
  EXPECT_THROW(positional_part(t, 5, 0), IndexError);
}

TEST(PositionalPart, OriginWithZeroPhaseIsOnes) {
  const auto t = random_table(3, 4, SharingScheme::word_sharing, PhaseMode::shared_constant);
  const ComplexVec u = positional_part(t, 1, 0);
  for (std::size_t d = 0; d < 4; ++d) EXPECT_EQ(u[d], (Complex{1, 0}));
}

TEST(EmbedSequence, Shapes) {
  const auto t = random_table(5, 3, SharingScheme::full, PhaseMode::shared_constant);
  const std::vector<std::size_t> none;
  const ComplexMat empty = embed_sequence(t, none);
  EXPECT_EQ(empty.rows(), 0U);
  EXPECT_EQ(empty.cols(), 3U);
  const std::vector<std::size_t> one{4};
  EXPECT_EQ(embed_sequence(t, one).row(0), embed_token(t, 4, 1));
}

TEST(EmbedSequence, RepeatedTokenRowsDiffer) {
  auto t = random_table(5, 3, SharingScheme::full, PhaseMode::shared_constant);
  const std::vector<std::size_t> seq{2, 0, 2};
  const ComplexMat m = embed_sequence(t, seq);
  EXPECT_NE(m.row(0), m.row(2));
  EXPECT_EQ(m.row(0), embed_token(t, 2, 1));
  EXPECT_EQ(m.row(2), embed_token(t, 2, 3));
  for (std::size_t d = 0; d < 3; ++d) t.set_frequency(2, d, 0.0);
  const ComplexMat still = embed_sequence(t, seq);
  EXPECT_EQ(still.row(0), still.row(2));
}

TEST(EmbedSequence, OutOfVocabularyNamesPosition) {
  const auto t = random_table(5, 3, SharingScheme::full, PhaseMode::shared_constant);
  const std::vector<std::size_t> seq{1, 2, 9};
  try {
    embed_sequence(t, seq);
    FAIL();
  } catch (const IndexError& e) {
    EXPECT_NE(std::string(e.what()).find("position 3"), std::string::npos) << e.what();
  }
}

TEST(SharingSchemes, BackingShapeEnforcesSharing) {
  const auto ws = random_table(6, 4, SharingScheme::word_sharing, PhaseMode::shared_constant);
  const auto ds = random_table(6, 4, SharingScheme::dimension_sharing, PhaseMode::shared_constant);
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t d = 0; d < 4; ++d) {
      EXPECT_EQ(ws.frequency(j, d), ws.frequency(0, d));
      EXPECT_EQ(ds.frequency(j, d), ds.frequency(j, 0));
    }
  }
  for (std::uint64_t pos = 0; pos < 20; ++pos) EXPECT_EQ(positional_part(ws, 1, pos), positional_part(ws, 5, pos));
}

struct CountCase {
  std::size_t vocab, dim;
  SharingScheme scheme;
  PhaseMode phase;
  std::size_t formula;
};

class ParameterCount : public ::testing::TestWithParam<CountCase> {};

TEST_P(ParameterCount, MatchesFormulaAndEnumeration) {
  const auto c = GetParam();
  const ComplexEmbeddingTable t(c.vocab, c.dim, c.scheme, c.phase);
  EXPECT_EQ(parameter_count(t), c.formula);
  EXPECT_EQ(parameter_count(t), enumerate_parameters(t));
}

constexpr auto kFull = SharingScheme::full;
constexpr auto kWord = SharingScheme::word_sharing;
constexpr auto kDim = SharingScheme::dimension_sharing;
constexpr auto kShared = PhaseMode::shared_constant;
constexpr auto kPer = PhaseMode::per_element;

INSTANTIATE_TEST_SUITE_P(Schemes, ParameterCount,
                         ::testing::Values(CountCase{10, 4, kFull, kPer, 120}, CountCase{10, 4, kWord, kShared, 44},
                                           CountCase{10, 4, kDim, kShared, 50}, CountCase{10, 4, kFull, kShared, 80},
                                           CountCase{10, 4, kWord, kPer, 84}, CountCase{10, 4, kDim, kPer, 90},
                                           CountCase{100, 64, kFull, kPer, 3 * 100 * 64},
                                           CountCase{100, 64, kWord, kShared, 100 * 64 + 64},
                                           CountCase{100, 64, kDim, kShared, 100 * 64 + 100}));

TEST(FrequencySensitivity, Examples) {
  ComplexEmbeddingTable zero(4, 3, kFull, kShared);
  for (double d : frequency_sensitivity(zero).delta) EXPECT_EQ(d, 0.0);

  ComplexEmbeddingTable one(2, 1, kFull, kShared);
  one.set_frequency(1, 0, 0.3);
  EXPECT_NEAR(frequency_sensitivity(one).delta[1], 0.3, 1e-15);

  ComplexEmbeddingTable three(1, 3, kFull, kShared);
  three.set_frequency(0, 0, 1);
  three.set_frequency(0, 1, -2);
  three.set_frequency(0, 2, 3);
  EXPECT_NEAR(frequency_sensitivity(three).delta[0], 2.0, 1e-15);
}

TEST(FrequencySensitivity, RankingDescendingTiesByIndex) {
  ComplexEmbeddingTable t(5, 2, kFull, kShared);
  const double w[5] = {0.1, 0.5, 0.1, 0.5, 0.3};
  for (std::size_t j = 0; j < 5; ++j) {
    t.set_frequency(j, 0, w[j]);
    t.set_frequency(j, 1, -w[j]);
  }
  const auto p = frequency_sensitivity(t);
  EXPECT_EQ(p.ranking, (std::vector<std::size_t>{1, 3, 4, 0, 2}));
}

TEST(FrequencySensitivity, MeanOfAbsolutes) {
  const auto t = random_table(20, 7, kDim, kShared);
  const auto p = frequency_sensitivity(t);
  for (std::size_t j = 0; j < 20; ++j) {
    double s = 0.0;
    for (std::size_t d = 0; d < 7; ++d) s += std::abs(t.frequency(j, d));
    EXPECT_NEAR(p.delta[j], s / 7.0, 1e-12);
  }
}

TEST(WrapPhases, Examples) {
  EXPECT_EQ(wrap_phase(2 * kPi), 0.0);
  EXPECT_NEAR(wrap_phase(-kPi / 2), 3 * kPi / 2, 1e-15);
  EXPECT_LT(wrap_phase(-1e-18), 2 * kPi);
}

TEST(WrapPhases, EmbeddingsUnchanged) {
  auto t = random_table(6, 4, kFull, kPer);
  oracle::Uniform u(3);
  for (auto& th : t.phase_data()) th = u(-40, 40);
  const auto w = wrap_phases(t);
  for (double th : w.phase_data()) {
    EXPECT_GE(th, 0.0);
    EXPECT_LT(th, 2 * kPi);
  }
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::uint64_t pos = 0; pos < 40; ++pos) {
      const ComplexVec a = embed_token(t, j, pos), b = embed_token(w, j, pos);
      for (std::size_t d = 0; d < 4; ++d) EXPECT_LE(modulus(a[d] - b[d]), 1e-12);
    }
  }
}

TEST(EmbeddingTheory, EachCoordinateIsPositionFree) {
  const auto t = random_table(4, 3, kFull, kPer, 21);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t d = 0; d < 3; ++d) {
      const auto g = [&](std::uint64_t pos) { return embed_token(t, j, pos)[d]; };
      EXPECT_TRUE(check_position_free(g, 64, 32, 1e-9).pass);
      // Witness is w(n) = e^{i omega n} with b = 0.
      const Complex w = polar(1.0, t.frequency(j, d) * 5.0);
      for (std::uint64_t pos = 0; pos < 20; ++pos) EXPECT_LE(modulus(g(pos + 5) - w * g(pos)), 1e-12);
    }
  }
}

TEST(EmbeddingTheory, ConstantModulus) {
  const auto t = random_table(4, 3, kWord, kPer, 22);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::uint64_t pos = 0; pos < 5000; pos += 37) {
      const ComplexVec e = embed_token(t, j, pos);
      for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(modulus(e[d]), std::abs(t.amplitude(j, d)), 1e-12);
    }
  }
}

TEST(EmbeddingTheory, MeanRealPartTracksAmplitude) {
  ComplexEmbeddingTable t(1, 1, kFull, kShared);
  t.set_amplitude(0, 0, 0.8);
  t.set_frequency(0, 0, 0.1234);
  const auto n = static_cast<std::uint64_t>(100 * t.period(0, 0));
  double sum = 0.0;
  for (std::uint64_t pos = 0; pos < n; ++pos) sum += std::abs(embed_token(t, 0, pos)[0].re);
  EXPECT_NEAR(sum / static_cast<double>(n), 2.0 / kPi * 0.8, 0.01 * 2.0 / kPi * 0.8);
}

TEST(Serialization, BinaryRoundTripIsExact) {
  for (auto scheme : {kFull, kWord, kDim}) {
    for (auto phase : {kShared, kPer}) {
      const auto t = random_table(9, 5, scheme, phase, 17);
      std::stringstream buf;
      save_binary(t, buf);
      EXPECT_EQ(load_binary(buf), t);
    }
  }
}

TEST(Serialization, BinaryRejectsGarbage) {
  std::stringstream buf("not a table");
  EXPECT_THROW(load_binary(buf), ParseError);
  const auto t = random_table(3, 2, kFull, kPer);
  std::stringstream full;
  save_binary(t, full);
  std::stringstream cut(full.str().substr(0, full.str().size() - 4));
  EXPECT_THROW(load_binary(cut), ParseError);
}

TEST(Serialization, JsonRoundTrip) {
  const auto t = random_table(4, 3, kDim, kPer, 4);
  EXPECT_EQ(table_from_json(nlohmann::json::parse(to_json(t).dump())), t);
}

TEST(RandomTable, InitialisationRanges) {
  const auto t = random_table(50, 8, kFull, kPer, 2);
  for (double w : t.frequency_data()) EXPECT_LE(std::abs(w), 1.0 / 8);
  for (double r : t.amplitude_data()) EXPECT_LE(std::abs(r), 1.0 / std::sqrt(8.0));
  for (double th : t.phase_data()) {
    EXPECT_GE(th, 0.0);
    EXPECT_LT(th, 2 * kPi);
  }
  EXPECT_EQ(random_table(50, 8, kFull, kShared).phase_data(), std::vector<double>{0.0});
}
