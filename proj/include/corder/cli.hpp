#pragma once

// Command-line front end. Exit codes: 0 ok, 1 verification failure or failed
// run, 2 usage or input error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "corder/config.hpp"
#include "corder/dataset.hpp"
#include "corder/errors.hpp"
#include "corder/model_io.hpp"
#include "corder/ngram.hpp"
#include "corder/sinusoidal.hpp"
#include "corder/training.hpp"
#include "corder/verify.hpp"

namespace corder {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

namespace cli_detail {

// Round-trippable and locale-independent.
inline std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
      out_ = &file_;
    }
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline std::vector<std::size_t> encode(const Vocab& vocab, const std::string& text) {
  std::vector<std::size_t> ids;
  for (const auto& w : tokenize(text)) ids.push_back(vocab.lookup(w));
  return ids;
}

struct TrainArgs {
  std::string config, train, test, out, metrics;
  std::optional<std::uint64_t> seed;
};

inline int run_train(const TrainArgs& a, std::ostream& out) {
  RunConfig rc = load_run_config(a.config);
  if (!a.train.empty()) rc.train_path = a.train;
  if (!a.test.empty()) rc.test_path = a.test;
  if (!a.out.empty()) rc.model_out = a.out;
  if (!a.metrics.empty()) rc.metrics_out = a.metrics;
  if (a.seed) rc.train.seed = *a.seed;
  if (rc.train_path.empty()) throw ConfigError("train: no training data (set train_path or --train)");

  Dataset train_set = load_tsv(rc.train_path);
  std::optional<Dataset> test_set;
  if (!rc.test_path.empty()) test_set = load_tsv(rc.test_path, &train_set.vocab);
  const std::size_t classes = std::max(train_set.num_classes, test_set ? test_set->num_classes : 0);
  train_set.num_classes = classes;

  ModelGraph model(rc.model, train_set.vocab.size(), classes, rc.train.seed);
  Sink metrics(rc.metrics_out, out);
  const TrainMetrics m = train(model, train_set, test_set ? &*test_set : nullptr, rc.train,
                               [&](const EpochMetrics& e) { *metrics << to_json(e).dump() << '\n'; });
  *metrics << nlohmann::json{{"summary", summary_json(m)}}.dump() << '\n';
  if (!rc.model_out.empty()) save_model(model, train_set.vocab, rc.model_out);
  if (!rc.metrics_out.empty()) {
    auto s = summary_json(m);
    s["wall_time_s"] = m.wall_time_s;
    out << s.dump() << '\n';
  }
  return kExitOk;
}

inline int run_eval(const std::string& model_path, const std::string& data_path, std::ostream& out) {
  const SavedModel saved = load_model(model_path);
  const Dataset data = load_tsv(data_path, &saved.vocab);
  const EvalResult r = evaluate(saved.model, data.samples);
  out << nlohmann::json{{"accuracy", r.accuracy()}, {"correct", r.correct}, {"total", r.total}, {"loss", r.loss}}.dump()
      << '\n';
  return kExitOk;
}

inline int run_verify(std::uint64_t seed, std::size_t trials, std::ostream& out) {
  OrderSuiteOptions opt;
  opt.seed = seed;
  opt.trials = trials;
  const VerificationReport report = run_order_suite(opt);
  out << nlohmann::json(report).dump(2) << '\n';
  return report.pass ? kExitOk : kExitFailed;
}

inline int run_pe_compare(std::size_t d_model, std::uint64_t max_pos, const std::string& path, std::ostream& out) {
  const VerificationReport report = bijection_check(0, max_pos, d_model);
  {
    Sink csv(path, out);
    *csv << "pos,k,PE_sin,PE_cos,re,im,residual\n";
    for (const auto& r : pe_comparison(0, max_pos, d_model)) {
      *csv << r.pos << ',' << r.k << ',' << fmt(r.pe_sin) << ',' << fmt(r.pe_cos) << ',' << fmt(r.re) << ','
           << fmt(r.im) << ',' << fmt(r.residual) << '\n';
    }
  }
  if (!path.empty()) out << nlohmann::json(report).dump(2) << '\n';
  return report.pass ? kExitOk : kExitFailed;
}

inline int run_freq_stats(const std::string& model_path, const std::string& path, std::ostream& out) {
  const SavedModel saved = load_model(model_path);
  const SensitivityProfile prof = frequency_sensitivity(saved.model.embedding());
  Sink csv(path, out);
  *csv << "rank,index,token,delta\n";
  for (std::size_t r = 0; r < prof.ranking.size(); ++r) {
    const std::size_t j = prof.ranking[r];
    *csv << r + 1 << ',' << j << ',' << saved.vocab.token(j) << ',' << fmt(prof.delta[j]) << '\n';
  }
  return kExitOk;
}

inline int run_ngram_sim(const std::string& model_path, const std::string& a, const std::string& b, std::size_t n,
                         const std::string& path, std::ostream& out) {
  const SavedModel saved = load_model(model_path);
  const auto ta = encode(saved.vocab, a);
  const auto tb = encode(saved.vocab, b);
  const RealMat sim = ngram_similarity(saved.model.embedding(), ta, tb, n);
  Sink csv(path, out);
  *csv << "s";
  for (std::size_t t = 0; t < sim.cols; ++t) *csv << ",t" << t;
  *csv << '\n';
  for (std::size_t s = 0; s < sim.rows; ++s) {
    *csv << s;
    for (std::size_t t = 0; t < sim.cols; ++t) *csv << ',' << fmt(sim(s, t));
    *csv << '\n';
  }
  return kExitOk;
}

inline int run_gen_data(std::uint64_t seed, std::size_t samples, std::size_t len, std::size_t vocab,
                        const std::string& task, const std::string& path, std::ostream& out) {
  const Dataset ds = task == "bow" ? gen_bow_task(seed, samples, len, vocab) : gen_order_task(seed, samples, len, vocab);
  Sink tsv(path, out);
  write_tsv(ds, *tsv);
  return kExitOk;
}

}  // namespace cli_detail

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"Order-aware complex word embeddings", "corder"};
  app.require_subcommand(1);

  TrainArgs ta;
  std::uint64_t seed_arg = 0;
  auto* train_cmd = app.add_subcommand("train", "train a classifier from a JSON config");
  train_cmd->add_option("--config", ta.config, "JSON run config")->required();
  train_cmd->add_option("--train", ta.train, "training TSV (overrides train_path)");
  train_cmd->add_option("--test", ta.test, "test TSV (overrides test_path)");
  train_cmd->add_option("--out", ta.out, "model output path (overrides model_out)");
  train_cmd->add_option("--metrics", ta.metrics, "metrics JSON lines path (overrides metrics_out)");
  auto* train_seed = train_cmd->add_option("--seed", seed_arg, "seed (overrides config)");

  std::string model_path, data_path, out_path;
  auto* eval_cmd = app.add_subcommand("eval", "accuracy of a saved model on a TSV file");
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--data", data_path)->required();

  std::uint64_t seed = 7;
  std::size_t trials = 100;
  auto* verify_cmd = app.add_subcommand("verify", "randomised check of the closed-form order properties");
  verify_cmd->add_option("--seed", seed)->capture_default_str();
  verify_cmd->add_option("--trials", trials)->capture_default_str()->check(CLI::PositiveNumber);

  std::size_t d_model = 512;
  std::uint64_t max_pos = 100;
  auto* pe_cmd = app.add_subcommand("pe-compare", "sinusoidal PE against unit complex exponentials, as CSV");
  pe_cmd->add_option("--d-model", d_model)->capture_default_str();
  pe_cmd->add_option("--max-pos", max_pos, "positions [0, max-pos)")->capture_default_str();
  pe_cmd->add_option("--out", out_path, "CSV path (default stdout)");

  auto* freq_cmd = app.add_subcommand("freq-stats", "per-word mean |frequency|, descending, as CSV");
  freq_cmd->add_option("--model", model_path)->required();
  freq_cmd->add_option("--out", out_path);

  std::string text_a, text_b;
  std::size_t ngram = 2;
  auto* ngram_cmd = app.add_subcommand("ngram-sim", "cosine similarity of sliding n-grams, as CSV");
  ngram_cmd->add_option("--model", model_path)->required();
  ngram_cmd->add_option("--a", text_a, "first sentence")->required();
  ngram_cmd->add_option("--b", text_b, "second sentence")->required();
  ngram_cmd->add_option("--n", ngram)->capture_default_str()->check(CLI::PositiveNumber);
  ngram_cmd->add_option("--out", out_path);

  std::size_t samples = 1000, len = 10, vocab = 50;
  std::string task = "order";
  std::uint64_t gen_seed = 1;
  auto* gen_cmd = app.add_subcommand("gen-data", "write a synthetic dataset as TSV");
  gen_cmd->add_option("--seed", gen_seed)->capture_default_str();
  gen_cmd->add_option("--samples", samples)->capture_default_str();
  gen_cmd->add_option("--len", len)->capture_default_str();
  gen_cmd->add_option("--vocab", vocab)->capture_default_str();
  gen_cmd->add_option("--task", task)->capture_default_str()->check(CLI::IsMember({"order", "bow"}));
  gen_cmd->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*train_cmd) {
      if (*train_seed) ta.seed = seed_arg;
      return run_train(ta, out);
    }
    if (*eval_cmd) return run_eval(model_path, data_path, out);
    if (*verify_cmd) return run_verify(seed, trials, out);
    if (*pe_cmd) return run_pe_compare(d_model, max_pos, out_path, out);
    if (*freq_cmd) return run_freq_stats(model_path, out_path, out);
    if (*ngram_cmd) return run_ngram_sim(model_path, text_a, text_b, ngram, out_path, out);
    if (*gen_cmd) return run_gen_data(gen_seed, samples, len, vocab, task, out_path, out);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace corder
