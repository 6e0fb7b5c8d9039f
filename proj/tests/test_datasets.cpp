#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "corder/dataset.hpp"
#include "corder/model.hpp"
#include "corder/model_io.hpp"
#include "corder/ngram.hpp"
#include "corder/training.hpp"
#include "oracles.hpp"

using namespace corder;

namespace {

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return read_tsv(in);
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("corder_test_" + name);
}

}  // namespace

TEST(LoadTsv, SingleLine) {
  const Dataset ds = parse("1\tgood movie\n");
  ASSERT_EQ(ds.size(), 1U);
  EXPECT_EQ(ds.vocab.tokens(), (std::vector<std::string>{"<unk>", "good", "movie"}));
  EXPECT_EQ(ds.samples[0].tokens, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(ds.samples[0].label, 1U);
  EXPECT_EQ(ds.num_classes, 2U);
}

TEST(LoadTsv, DuplicatesAndCase) {
  const Dataset ds = parse("0\tGood good GOOD\n1\tbad Good\n");
  EXPECT_EQ(ds.vocab.size(), 3U);
  EXPECT_EQ(ds.samples[0].tokens, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_EQ(ds.samples[1].tokens, (std::vector<std::size_t>{2, 1}));
}

TEST(LoadTsv, LineCount) {
  std::ostringstream text;
  for (int i = 0; i < 100; ++i) text << i % 2 << "\tword" << i % 7 << " other\n";
  const Dataset ds = parse(text.str());
  EXPECT_EQ(ds.size(), 100U);
  EXPECT_EQ(ds.num_classes, 2U);
}

TEST(LoadTsv, MalformedLinesNamed) {
  for (const char* bad : {"0\tok\nno tab here\n", "0\tok\nx\tword\n", "0\tok\n-1\tword\n", "0\tok\n1\t   \n"}) {
    try {
      parse(bad);
      FAIL() << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), 2U) << bad;
    }
  }
}

TEST(LoadTsv, EmptyFileIsDegenerate) {
  EXPECT_THROW(parse(""), DegenerateInputError);
  const auto path = temp_file("empty.tsv");
  std::ofstream(path).close();
  EXPECT_THROW(load_tsv(path.string()), DegenerateInputError);
  EXPECT_THROW(load_tsv((path.string() + ".missing")), ConfigError);
}

TEST(LoadTsv, TestSplitUsesTrainingVocabulary) {
  const Dataset train = parse("0\ta b\n1\tc\n");
  std::istringstream in("1\tb z\n");
  const Dataset test = read_tsv(in, &train.vocab);
  EXPECT_EQ(test.vocab, train.vocab);
  EXPECT_EQ(test.samples[0].tokens, (std::vector<std::size_t>{2, 0}));
}

TEST(GenOrderTask, MarkersAdjacentOnceAndLabelled) {
  const Dataset ds = gen_order_task(1, 500, 10, 50);
  ASSERT_EQ(ds.size(), 500U);
  std::size_t zeros = 0;
  for (const auto& s : ds.samples) {
    ASSERT_EQ(s.tokens.size(), 10U);
    EXPECT_EQ(std::count(s.tokens.begin(), s.tokens.end(), kMarkerFirst), 1);
    EXPECT_EQ(std::count(s.tokens.begin(), s.tokens.end(), kMarkerSecond), 1);
    const auto a = std::find(s.tokens.begin(), s.tokens.end(), kMarkerFirst) - s.tokens.begin();
    const auto b = std::find(s.tokens.begin(), s.tokens.end(), kMarkerSecond) - s.tokens.begin();
    EXPECT_EQ(std::abs(a - b), 1);
    EXPECT_EQ(s.label, a < b ? 0U : 1U);
    for (auto t : s.tokens) EXPECT_LT(t, 50U);
    zeros += s.label == 0;
  }
  EXPECT_EQ(zeros, 250U);
}

TEST(GenOrderTask, ClassHistogramsIdentical) {
  const Dataset ds = gen_order_task(2, 2000, 10, 50);
  std::map<std::size_t, std::size_t> h[2];
  for (const auto& s : ds.samples) {
    for (auto t : s.tokens) ++h[s.label][t];
  }
  EXPECT_EQ(h[0], h[1]);
}

TEST(GenOrderTask, BagOfWordsClassifierNearChance) {
  const Dataset ds = gen_order_task(3, 2000, 10, 50);
  const auto [train, test] = split_dataset(ds, 1600);
  oracle::BowLogistic lr(50);
  lr.fit(train.samples, 300, 0.5);
  EXPECT_LE(lr.accuracy(test.samples), 0.60);
}

TEST(GenOrderTask, InfeasibleSizes) {
  EXPECT_THROW(gen_order_task(1, 10, 3, 50), ConfigError);
  EXPECT_THROW(gen_order_task(1, 10, 10, 9), ConfigError);
  EXPECT_THROW(gen_order_task(1, 11, 10, 50), ConfigError);
}

TEST(GenOrderTask, SeedDeterminism) {
  EXPECT_EQ(gen_order_task(5, 100, 8, 20).samples, gen_order_task(5, 100, 8, 20).samples);
  EXPECT_NE(gen_order_task(5, 100, 8, 20).samples, gen_order_task(6, 100, 8, 20).samples);
}

TEST(GenBowTask, CueSeparatesClasses) {
  const Dataset ds = gen_bow_task(4, 300, 6, 20);
  for (const auto& s : ds.samples) {
    const bool zero_cue = std::count(s.tokens.begin(), s.tokens.end(), 1) + std::count(s.tokens.begin(), s.tokens.end(), 3);
    const bool one_cue = std::count(s.tokens.begin(), s.tokens.end(), 2) + std::count(s.tokens.begin(), s.tokens.end(), 4);
    EXPECT_EQ(zero_cue, s.label == 0);
    EXPECT_EQ(one_cue, s.label == 1);
  }
}

TEST(TsvRoundTrip, GeneratedDataReloadsExactly) {
  const Dataset ds = gen_order_task(9, 200, 7, 30);
  const auto path = temp_file("roundtrip.tsv");
  {
    std::ofstream out(path);
    write_tsv(ds, out);
  }
  const Dataset back = load_tsv(path.string());
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back.samples[i].label, ds.samples[i].label);
    EXPECT_EQ(sample_words(back, back.samples[i]), sample_words(ds, ds.samples[i]));
  }
  // Reloading against the generator's vocabulary reproduces the indices too.
  const Dataset same = load_tsv(path.string(), &ds.vocab);
  EXPECT_EQ(same.samples, ds.samples);
}

TEST(NgramSimilarity, IdenticalSentencesHaveUnitDiagonal) {
  Rng rng(1);
  const auto t = ComplexEmbeddingTable::random(20, 6, SharingScheme::full, PhaseMode::per_element, rng);
  const std::vector<std::size_t> s{3, 5, 7, 2, 9, 11};
  for (std::size_t n = 1; n <= 6; ++n) {
    const RealMat m = ngram_similarity(t, s, s, n);
    ASSERT_EQ(m.rows, 7 - n);
    for (std::size_t i = 0; i < m.rows; ++i) EXPECT_NEAR(m(i, i), 1.0, 1e-9);
  }
}

TEST(NgramSimilarity, ZeroFrequencyIsOrderBlind) {
  Rng rng(2);
  auto t = ComplexEmbeddingTable::random(20, 6, SharingScheme::full, PhaseMode::shared_constant, rng);
  for (auto& w : t.frequency_data()) w = 0.0;
  const std::vector<std::size_t> a{3, 5, 7, 2}, b{7, 2, 5, 3};
  EXPECT_NEAR(ngram_similarity(t, a, b, 4)(0, 0), 1.0, 1e-9);
}

TEST(NgramSimilarity, MatchesCosineOfPooledEmbeddings) {
  Rng rng(3);
  const auto t = ComplexEmbeddingTable::random(10, 4, SharingScheme::word_sharing, PhaseMode::per_element, rng);
  const std::vector<std::size_t> a{1, 2, 3, 4}, b{4, 3, 2};
  const RealMat m = ngram_similarity(t, a, b, 2);
  ASSERT_EQ(m.rows, 3U);
  ASSERT_EQ(m.cols, 2U);
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t u = 0; u < 2; ++u) {
      oracle::cd dot = 0.0;
      double na = 0.0, nb = 0.0;
      for (std::size_t d = 0; d < 4; ++d) {
        const oracle::cd x = oracle::to_std(embed_token(t, a[s], s + 1)[d]) + oracle::to_std(embed_token(t, a[s + 1], s + 2)[d]);
        const oracle::cd y = oracle::to_std(embed_token(t, b[u], u + 1)[d]) + oracle::to_std(embed_token(t, b[u + 1], u + 2)[d]);
        dot += x * std::conj(y);
        na += std::norm(x);
        nb += std::norm(y);
      }
      EXPECT_NEAR(m(s, u), dot.real() / std::sqrt(na * nb), 1e-12);
    }
  }
}

TEST(NgramSimilarity, ShortSentenceIsDegenerate) {
  Rng rng(4);
  const auto t = ComplexEmbeddingTable::random(10, 4, SharingScheme::full, PhaseMode::shared_constant, rng);
  const std::vector<std::size_t> a{1, 2}, b{1, 2, 3};
  EXPECT_THROW(ngram_similarity(t, a, b, 3), DegenerateInputError);
  EXPECT_THROW(ngram_similarity(t, a, b, 0), DegenerateInputError);
}

TEST(NgramSimilarity, TrainedModelSeparatesSwappedMarkers) {
  const auto all = gen_order_task(1, 1200, 8, 30);
  const auto [train_set, test_set] = split_dataset(all, 1000);
  ModelConfig c;
  c.dim = 16;
  c.hidden = 16;
  TrainConfig cfg;
  cfg.lr = 0.05;
  cfg.momentum = 0.9;
  cfg.epochs = 15;
  ModelGraph live(c, 30, 2, 1);
  train(live, train_set, nullptr, cfg);
  c.frequency = FrequencyMode::zero;
  ModelGraph frozen(c, 30, 2, 1);
  train(frozen, train_set, nullptr, cfg);
  const std::vector<std::size_t> ab{kMarkerFirst, kMarkerSecond}, ba{kMarkerSecond, kMarkerFirst};
  const double s_live = ngram_similarity(live.embedding(), ab, ba, 2)(0, 0);
  const double s_frozen = ngram_similarity(frozen.embedding(), ab, ba, 2)(0, 0);
  EXPECT_NEAR(s_frozen, 1.0, 1e-9);
  EXPECT_LT(s_live, s_frozen);
}

TEST(ModelIo, RoundTripPreservesPredictions) {
  for (auto e : {Encoder::fasttext, Encoder::cnn, Encoder::rnn, Encoder::attention}) {
    ModelConfig c;
    c.encoder = e;
    c.dim = 4;
    c.hidden = 5;
    c.phase_mode = PhaseMode::per_element;
    c.share_real_imag = e == Encoder::attention;
    const ModelGraph model(c, 12, 3, 8);
    const Vocab vocab = synthetic_vocab(12);
    const auto path = temp_file("model_" + to_string(e) + ".json");
    save_model(model, vocab, path.string());
    const SavedModel back = load_model(path.string());
    EXPECT_EQ(back.vocab, vocab);
    EXPECT_EQ(back.model.embedding(), model.embedding());
    const std::vector<std::size_t> s{1, 4, 7, 2, 11};
    EXPECT_EQ(back.model.logits(s), model.logits(s));
  }
}

TEST(ModelIo, RejectsBrokenFiles) {
  EXPECT_THROW(model_from_json(nlohmann::json{{"format", "other"}, {"version", 1}}), ParseError);
  EXPECT_THROW(model_from_json(nlohmann::json::object()), ParseError);
  const auto path = temp_file("broken.json");
  std::ofstream(path) << "{ nope";
  EXPECT_THROW(load_model(path.string()), ParseError);
}
