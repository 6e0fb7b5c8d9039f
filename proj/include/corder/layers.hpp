#pragma once

// Forward-only complex layers. These are the reference semantics; the
// trainable model in model.hpp records the same computations on a tape.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "corder/complex.hpp"
#include "corder/errors.hpp"

namespace corder {

enum class PoolMode { sum, mean };

/// Column-wise sum (or mean) of the rows.
inline ComplexVec fasttext_pool(const ComplexMat& rows, PoolMode mode = PoolMode::sum) {
  if (rows.rows() == 0) throw DegenerateInputError("fasttext_pool: no rows to pool");
  ComplexVec out(rows.cols());
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      out.re()[c] += rows.re()[r * rows.cols() + c];
      out.im()[c] += rows.im()[r * rows.cols() + c];
    }
  }
  if (mode == PoolMode::mean) {
    const double inv = 1.0 / static_cast<double>(rows.rows());
    for (std::size_t c = 0; c < rows.cols(); ++c) {
      out.re()[c] *= inv;
      out.im()[c] *= inv;
    }
  }
  return out;
}

/// Flattened window t: [seq[t], seq[t+1], ..., seq[t+width-1]].
inline ComplexVec conv_window(const ComplexMat& seq, std::size_t t, std::size_t width) {
  ComplexVec window(width * seq.cols());
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t c = 0; c < seq.cols(); ++c) window.set(k * seq.cols() + c, seq(t + k, c));
  }
  return window;
}

/// Narrow (valid) 1-D convolution. kernels is filters x (width * channels) with
/// real plane A and imaginary plane B; each output channel is the complex dense
/// rule applied to the flattened window. Output is (len - width + 1) x filters.
inline ComplexMat complex_conv1d(const ComplexMat& seq, const ComplexMat& kernels, std::size_t width,
                                 const ComplexVec& bias, Activation act = Activation::identity) {
  if (width == 0 || width > seq.rows()) {
    throw DimensionError("complex_conv1d: window width " + std::to_string(width) +
                         " exceeds sequence length " + std::to_string(seq.rows()));
  }
  if (kernels.cols() != width * seq.cols()) {
    throw DimensionError("complex_conv1d: kernels have " + std::to_string(kernels.cols()) +
                         " columns, expected width * channels = " +
                         std::to_string(width * seq.cols()));
  }
  const std::size_t out_len = seq.rows() - width + 1;
  ComplexMat out(out_len, kernels.rows());
  for (std::size_t t = 0; t < out_len; ++t) {
    out.set_row(t, complex_dense(conv_window(seq, t, width), kernels, bias, act));
  }
  return out;
}

/// Per channel, the entry whose modulus is largest (first on ties).
inline ComplexVec max_pool_modulus(const ComplexMat& m) {
  if (m.rows() == 0) throw DegenerateInputError("max_pool_modulus: no rows");
  ComplexVec out(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    std::size_t best = 0;
    double best_mod = modulus(m(0, c));
    for (std::size_t r = 1; r < m.rows(); ++r) {
      const double mod = modulus(m(r, c));
      if (mod > best_mod) {
        best_mod = mod;
        best = r;
      }
    }
    out.set(c, m(best, c));
  }
  return out;
}

struct RnnCell {
  ComplexMat wh;  // hidden x hidden
  ComplexMat wz;  // hidden x input
  ComplexVec b;   // hidden

  RnnCell(ComplexMat hidden, ComplexMat input, ComplexVec bias)
      : wh(std::move(hidden)), wz(std::move(input)), b(std::move(bias)) {
    if (wh.rows() != wh.cols()) throw DimensionError("RnnCell: hidden transition must be square");
    if (wz.rows() != wh.rows() || b.size() != wh.rows()) {
      throw DimensionError("RnnCell: input transition and bias must match hidden size");
    }
  }

  std::size_t hidden_size() const noexcept { return wh.rows(); }
  std::size_t input_size() const noexcept { return wz.cols(); }
};

/// h_t = f(Wh h_{t-1} + Wz z_t + b)
inline ComplexVec rnn_step(const RnnCell& cell, const ComplexVec& h_prev, const ComplexVec& z_t,
                           Activation act = Activation::tanh) {
  if (h_prev.size() != cell.hidden_size()) {
    throw DimensionError("rnn_step: h_prev has length " + std::to_string(h_prev.size()) +
                         ", cell hidden size is " + std::to_string(cell.hidden_size()));
  }
  if (z_t.size() != cell.input_size()) {
    throw DimensionError("rnn_step: z_t has length " + std::to_string(z_t.size()) +
                         ", cell input size is " + std::to_string(cell.input_size()));
  }
  const ComplexVec recurrent = complex_dense(h_prev, cell.wh, ComplexVec(cell.hidden_size()));
  const ComplexVec input = complex_dense(z_t, cell.wz, cell.b);
  ComplexVec pre(cell.hidden_size());
  for (std::size_t i = 0; i < pre.size(); ++i) pre.set(i, recurrent[i] + input[i]);
  return split_activation(pre, act);
}

/// Complex projection whose imaginary plane may alias the real plane.
class ComplexProjection {
 public:
  ComplexProjection() = default;
  ComplexProjection(std::size_t rows, std::size_t cols, std::vector<double> re,
                    std::optional<std::vector<double>> im)
      : rows_(rows), cols_(cols), re_(std::move(re)), im_(std::move(im)) {
    if (re_.size() != rows * cols || (im_ && im_->size() != rows * cols)) {
      throw DimensionError("ComplexProjection: plane size does not match shape");
    }
  }

  static ComplexProjection shared(std::size_t rows, std::size_t cols, std::vector<double> plane) {
    return {rows, cols, std::move(plane), std::nullopt};
  }
  static ComplexProjection split(const ComplexMat& m) {
    return {m.rows(), m.cols(), std::vector<double>(m.re().begin(), m.re().end()),
            std::vector<double>(m.im().begin(), m.im().end())};
  }

  bool is_shared() const noexcept { return !im_.has_value(); }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const std::vector<double>& re() const noexcept { return re_; }
  const std::vector<double>& im() const noexcept { return im_ ? *im_ : re_; }

  std::size_t parameter_count() const noexcept { return re_.size() + (im_ ? im_->size() : 0); }

  ComplexMat as_matrix() const { return {rows_, cols_, re_, im()}; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> re_;
  std::optional<std::vector<double>> im_;
};

struct AttentionWeights {
  ComplexProjection wq;
  ComplexProjection wk;
  ComplexProjection wv;

  bool share_real_imag() const noexcept { return wq.is_shared(); }
  std::size_t parameter_count() const noexcept {
    return wq.parameter_count() + wk.parameter_count() + wv.parameter_count();
  }
};

/// Row vector times matrix: (w W)[c] = sum_r w[r] W[r][c].
inline ComplexVec row_times(const ComplexVec& w, const ComplexMat& m) {
  if (w.size() != m.rows()) {
    throw DimensionError("row_times: vector length " + std::to_string(w.size()) +
                         " does not match matrix rows " + std::to_string(m.rows()));
  }
  ComplexVec out(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    Complex acc;
    for (std::size_t r = 0; r < m.rows(); ++r) acc += w[r] * m(r, c);
    out.set(c, acc);
  }
  return out;
}

/// z = (wi WQ)(wj WK)^dagger, e = sqrt((Re z^2 + Im z^2) / n).
inline double attention_energy(const ComplexVec& wi, const ComplexVec& wj,
                               const AttentionWeights& weights, std::size_t n) {
  if (n < 1) throw PreconditionError("attention_energy: sequence length must be >= 1");
  const ComplexVec q = row_times(wi, weights.wq.as_matrix());
  const ComplexVec k = row_times(wj, weights.wk.as_matrix());
  if (q.size() != k.size()) throw DimensionError("attention_energy: query/key widths differ");
  Complex z;
  for (std::size_t d = 0; d < q.size(); ++d) z += q[d] * conj(k[d]);
  return std::sqrt((z.re * z.re + z.im * z.im) / static_cast<double>(n));
}

enum class NormalizeMode { softmax, ratio };

/// Softmax over a row; NormalizeMode::ratio gives e / sum e instead.
inline std::vector<double> attention_weights_row(const std::vector<double>& e,
                                                 NormalizeMode mode = NormalizeMode::softmax) {
  std::vector<double> out(e.size());
  if (e.empty()) return out;
  double sum = 0.0;
  if (mode == NormalizeMode::softmax) {
    const double mx = *std::max_element(e.begin(), e.end());
    for (std::size_t j = 0; j < e.size(); ++j) {
      out[j] = std::exp(e[j] - mx);
      sum += out[j];
    }
  } else {
    for (std::size_t j = 0; j < e.size(); ++j) {
      out[j] = e[j];
      sum += e[j];
    }
    if (sum == 0.0) throw DegenerateInputError("attention_weights_row: energies sum to zero");
  }
  for (auto& v : out) v /= sum;
  return out;
}

/// output_i = sum_j a[i][j] (seq[j] WV)
inline ComplexMat attention_output(const RealMat& a, const ComplexMat& seq, const ComplexMat& wv) {
  if (a.rows != seq.rows() || a.cols != seq.rows()) {
    throw DimensionError("attention_output: coefficient matrix must be len x len");
  }
  for (std::size_t i = 0; i < a.rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) sum += a(i, j);
    if (std::abs(sum - 1.0) > 1e-9) {
      throw PreconditionError("attention_output: row " + std::to_string(i) +
                              " of attention weights sums to " + std::to_string(sum));
    }
  }
  std::vector<ComplexVec> values;
  values.reserve(seq.rows());
  for (std::size_t j = 0; j < seq.rows(); ++j) values.push_back(row_times(seq.row(j), wv));
  ComplexMat out(seq.rows(), wv.cols());
  for (std::size_t i = 0; i < seq.rows(); ++i) {
    for (std::size_t c = 0; c < wv.cols(); ++c) {
      Complex acc;
      for (std::size_t j = 0; j < seq.rows(); ++j) acc += a(i, j) * values[j][c];
      out.set(i, c, acc);
    }
  }
  return out;
}

/// Full single-head self-attention over a sequence.
inline ComplexMat self_attention(const ComplexMat& seq, const AttentionWeights& weights,
                                 NormalizeMode mode = NormalizeMode::softmax) {
  const std::size_t n = seq.rows();
  RealMat a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = attention_energy(seq.row(i), seq.row(j), weights, n);
    const auto row = attention_weights_row(e, mode);
    for (std::size_t j = 0; j < n; ++j) a(i, j) = row[j];
  }
  return attention_output(a, seq, weights.wv.as_matrix());
}

/// logits = W_out |z|
inline std::vector<double> modulus_readout(const ComplexVec& z, std::size_t classes,
                                           const RealMat& w_out) {
  if (w_out.cols != z.size()) {
    throw DimensionError("modulus_readout: W_out has " + std::to_string(w_out.cols) +
                         " columns, z has length " + std::to_string(z.size()));
  }
  if (w_out.rows != classes) {
    throw DimensionError("modulus_readout: W_out has " + std::to_string(w_out.rows) +
                         " rows for " + std::to_string(classes) + " classes");
  }
  const auto mod = modulus_vec(z);
  std::vector<double> logits(classes, 0.0);
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t c = 0; c < mod.size(); ++c) logits[k] += w_out(k, c) * mod[c];
  }
  return logits;
}

}  // namespace corder
