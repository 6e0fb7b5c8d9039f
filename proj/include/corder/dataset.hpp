#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "corder/errors.hpp"
#include "corder/rng.hpp"
#include "corder/sample.hpp"

namespace corder {

inline constexpr const char* kUnknownToken = "<unk>";

/// Token <-> index map. Index 0 is always the unknown token.
class Vocab {
 public:
  Vocab() { add(kUnknownToken); }

  explicit Vocab(const std::vector<std::string>& tokens) {
    if (tokens.empty() || tokens.front() != kUnknownToken) {
      throw ConfigError("Vocab: token list must start with " + std::string(kUnknownToken));
    }
    for (const auto& t : tokens) {
      if (index_.contains(t)) throw ConfigError("Vocab: duplicate token '" + t + "'");
      add(t);
    }
  }

  /// Index of token, inserting it when new.
  std::size_t add(const std::string& token) {
    auto [it, inserted] = index_.try_emplace(token, tokens_.size());
    if (inserted) tokens_.push_back(token);
    return it->second;
  }

  /// Index of token, or 0 when unknown.
  std::size_t lookup(const std::string& token) const {
    const auto it = index_.find(token);
    return it == index_.end() ? 0 : it->second;
  }

  bool contains(const std::string& token) const { return index_.contains(token); }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  std::size_t size() const noexcept { return tokens_.size(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Dataset {
  std::vector<Sample> samples;
  Vocab vocab;
  std::size_t num_classes = 0;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Whitespace split and ASCII lowercase.
inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::transform(tok.begin(), tok.end(), tok.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.push_back(std::move(tok));
  }
  return out;
}

/// Parses "label<TAB>text" lines. With a vocabulary, unseen tokens map to 0 and
/// the vocabulary is left as is; without one, a vocabulary is built by first
/// occurrence. num_classes is max label + 1.
inline Dataset read_tsv(std::istream& in, const Vocab* vocab_from = nullptr) {
  Dataset ds;
  if (vocab_from) ds.vocab = *vocab_from;
  std::string line;
  std::size_t line_no = 0;
  std::size_t max_label = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected 'label<TAB>text'");
    const std::string label_text = line.substr(0, tab);
    if (label_text.empty() ||
        !std::all_of(label_text.begin(), label_text.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw ParseError(line_no, "label '" + label_text + "' is not a non-negative integer");
    }
    std::size_t label = 0;
    try {
      label = std::stoull(label_text);
    } catch (const std::exception&) {
      throw ParseError(line_no, "label '" + label_text + "' out of range");
    }
    const auto words = tokenize(line.substr(tab + 1));
    if (words.empty()) throw ParseError(line_no, "no tokens after the label");
    Sample s;
    s.label = label;
    for (const auto& w : words) s.tokens.push_back(vocab_from ? ds.vocab.lookup(w) : ds.vocab.add(w));
    max_label = std::max(max_label, label);
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw DegenerateInputError("dataset contains no samples");
  ds.num_classes = max_label + 1;
  return ds;
}

inline Dataset load_tsv(const std::string& path, const Vocab* vocab_from = nullptr) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset '" + path + "'");
  return read_tsv(in, vocab_from);
}

inline void write_tsv(const Dataset& ds, std::ostream& out) {
  for (const auto& s : ds.samples) {
    out << s.label << '\t';
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out << ' ';
      out << ds.vocab.token(s.tokens[i]);
    }
    out << '\n';
  }
}

/// Token strings of a sample, for vocabulary-independent comparison.
inline std::vector<std::string> sample_words(const Dataset& ds, const Sample& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (auto t : s.tokens) out.push_back(ds.vocab.token(t));
  return out;
}

/// Vocabulary of the synthetic tasks: <unk>, m1, m2, then fillers w3, w4, ...
inline Vocab synthetic_vocab(std::size_t vocab_size) {
  std::vector<std::string> tokens{kUnknownToken, "m1", "m2"};
  for (std::size_t i = 3; i < vocab_size; ++i) tokens.push_back("w" + std::to_string(i));
  return Vocab(tokens);
}

inline constexpr std::size_t kMarkerFirst = 1;
inline constexpr std::size_t kMarkerSecond = 2;

/// Order-only classification task. Every sentence has m1 and m2 adjacent at a
/// random offset among fillers; label 0 when m1 comes first, 1 otherwise.
/// Samples are produced in mirrored pairs that share fillers and offset, so the
/// bag of words is identical across classes. n_samples must be even.
inline Dataset gen_order_task(std::uint64_t seed, std::size_t n_samples, std::size_t sentence_len,
                              std::size_t vocab_size) {
  if (sentence_len < 4) throw ConfigError("gen_order_task: sentence_len must be >= 4");
  if (vocab_size < 10) throw ConfigError("gen_order_task: vocab_size must be >= 10");
  if (n_samples == 0 || n_samples % 2 != 0) {
    throw ConfigError("gen_order_task: n_samples must be positive and even for exact balance");
  }
  Dataset ds;
  ds.vocab = synthetic_vocab(vocab_size);
  ds.num_classes = 2;
  Rng rng(seed);
  const std::size_t fillers = vocab_size - 3;
  for (std::size_t pair = 0; pair < n_samples / 2; ++pair) {
    std::vector<std::size_t> base(sentence_len);
    for (auto& tok : base) tok = 3 + rng.index(fillers);
    const std::size_t at = rng.index(sentence_len - 1);
    Sample first{base, 0};
    first.tokens[at] = kMarkerFirst;
    first.tokens[at + 1] = kMarkerSecond;
    Sample second{base, 1};
    second.tokens[at] = kMarkerSecond;
    second.tokens[at + 1] = kMarkerFirst;
    ds.samples.push_back(std::move(first));
    ds.samples.push_back(std::move(second));
  }
  rng.shuffle(std::span<Sample>(ds.samples));
  return ds;
}

/// Bag-of-words separable task: each sentence carries one cue token drawn from
/// a class-specific subset (m1 or w3 for label 0, m2 or w4 for label 1) at a
/// random position among fillers w5, w6, ...
inline Dataset gen_bow_task(std::uint64_t seed, std::size_t n_samples, std::size_t sentence_len,
                            std::size_t vocab_size) {
  if (sentence_len < 2) throw ConfigError("gen_bow_task: sentence_len must be >= 2");
  if (vocab_size < 10) throw ConfigError("gen_bow_task: vocab_size must be >= 10");
  if (n_samples == 0) throw ConfigError("gen_bow_task: n_samples must be positive");
  Dataset ds;
  ds.vocab = synthetic_vocab(vocab_size);
  ds.num_classes = 2;
  Rng rng(seed);
  const std::size_t cues[2][2] = {{1, 3}, {2, 4}};
  const std::size_t fillers = vocab_size - 5;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Sample s;
    s.label = i % 2;
    s.tokens.resize(sentence_len);
    for (auto& tok : s.tokens) tok = 5 + rng.index(fillers);
    s.tokens[rng.index(sentence_len)] = cues[s.label][rng.index(2)];
    ds.samples.push_back(std::move(s));
  }
  rng.shuffle(std::span<Sample>(ds.samples));
  return ds;
}

/// First `head` samples and the rest, sharing the vocabulary.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, std::size_t head) {
  if (head > ds.size()) throw ConfigError("split_dataset: split point beyond dataset size");
  Dataset a{{ds.samples.begin(), ds.samples.begin() + static_cast<std::ptrdiff_t>(head)}, ds.vocab, ds.num_classes};
  Dataset b{{ds.samples.begin() + static_cast<std::ptrdiff_t>(head), ds.samples.end()}, ds.vocab, ds.num_classes};
  return {std::move(a), std::move(b)};
}

}  // namespace corder
