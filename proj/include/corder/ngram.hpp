#pragma once

#include <span>
#include <string>

#include "corder/complex.hpp"
#include "corder/embedding.hpp"
#include "corder/errors.hpp"
#include "corder/layers.hpp"

namespace corder {

/// Sum of the embeddings of tokens[start, start + n) at their 1-based sentence positions.
inline ComplexVec pooled_ngram(const ComplexEmbeddingTable& table, std::span<const std::size_t> tokens,
                               std::size_t start, std::size_t n) {
  ComplexMat rows(n, table.dim());
  for (std::size_t k = 0; k < n; ++k) rows.set_row(k, embed_token(table, tokens[start + k], start + k + 1));
  return fasttext_pool(rows, PoolMode::sum);
}

/// Entry (s, t) is the complex cosine between a's s-th and b's t-th sliding n-gram.
inline RealMat ngram_similarity(const ComplexEmbeddingTable& table, std::span<const std::size_t> a,
                                std::span<const std::size_t> b, std::size_t n) {
  if (n == 0) throw DegenerateInputError("ngram_similarity: n must be >= 1");
  if (a.size() < n || b.size() < n) {
    throw DegenerateInputError("ngram_similarity: sentences need at least " + std::to_string(n) + " tokens");
  }
  const std::size_t rows = a.size() - n + 1;
  const std::size_t cols = b.size() - n + 1;
  std::vector<ComplexVec> pooled_b;
  pooled_b.reserve(cols);
  for (std::size_t t = 0; t < cols; ++t) pooled_b.push_back(pooled_ngram(table, b, t, n));
  RealMat out(rows, cols);
  for (std::size_t s = 0; s < rows; ++s) {
    const ComplexVec pa = pooled_ngram(table, a, s, n);
    for (std::size_t t = 0; t < cols; ++t) out(s, t) = complex_cosine(pa, pooled_b[t]);
  }
  return out;
}

}  // namespace corder
