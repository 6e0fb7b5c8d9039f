#pragma once

// Minimal reverse-mode tape over dense real matrices. Complex quantities are
// carried as two real nodes (real and imaginary plane), so every parameter is
// differentiated as a pair of independent reals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "corder/complex.hpp"
#include "corder/errors.hpp"

namespace corder::ad {

struct Var {
  std::size_t id = 0;
};

class Tape {
 public:
  struct Node {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> value;
    std::vector<double> grad;
    std::function<void(Tape&)> backward;
  };

  /// Where a parameter leaf came from: whole array, or a row gather of it.
  struct ParamUse {
    std::size_t node;
    std::size_t param;
    bool gathered;
    std::vector<std::size_t> rows;
  };

  std::size_t rows(Var v) const { return nodes_[v.id].rows; }
  std::size_t cols(Var v) const { return nodes_[v.id].cols; }
  const std::vector<double>& value(Var v) const { return nodes_[v.id].value; }
  const std::vector<double>& grad(Var v) const { return nodes_[v.id].grad; }
  double scalar(Var v) const { return nodes_[v.id].value.at(0); }
  const std::vector<ParamUse>& param_uses() const { return params_; }
  const Node& node(std::size_t id) const { return nodes_[id]; }

  Var constant(std::size_t rows, std::size_t cols, std::vector<double> values) {
    if (values.size() != rows * cols) throw DimensionError("Tape::constant: shape mismatch");
    return push(rows, cols, std::move(values), nullptr);
  }

  Var zeros(std::size_t rows, std::size_t cols) {
    return push(rows, cols, std::vector<double>(rows * cols, 0.0), nullptr);
  }

  /// Leaf over an entire parameter array.
  Var param(std::size_t param_index, std::span<const double> data, std::size_t rows, std::size_t cols) {
    if (data.size() != rows * cols) throw DimensionError("Tape::param: shape mismatch");
    Var v = push(rows, cols, std::vector<double>(data.begin(), data.end()), nullptr);
    params_.push_back({v.id, param_index, false, {}});
    return v;
  }

  /// Leaf holding rows idx[0], idx[1], ... of a parameter array with `cols` columns.
  Var param_rows(std::size_t param_index, std::span<const double> data, std::size_t cols,
                 std::span<const std::size_t> idx) {
    std::vector<double> out(idx.size() * cols);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if ((idx[i] + 1) * cols > data.size()) throw IndexError("Tape::param_rows: row out of range");
      std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(idx[i] * cols), cols,
                  out.begin() + static_cast<std::ptrdiff_t>(i * cols));
    }
    Var v = push(idx.size(), cols, std::move(out), nullptr);
    params_.push_back({v.id, param_index, true, std::vector<std::size_t>(idx.begin(), idx.end())});
    return v;
  }

  Var add(Var a, Var b) {
    same_shape(a, b, "add");
    auto out = value(a);
    const auto& bv = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return push(rows(a), cols(a), std::move(out), [a, b, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      t.accumulate(a, g);
      t.accumulate(b, g);
    });
  }

  Var sub(Var a, Var b) {
    same_shape(a, b, "sub");
    auto out = value(a);
    const auto& bv = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    return push(rows(a), cols(a), std::move(out), [a, b, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      t.accumulate(a, g);
      auto& gb = t.nodes_[b.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    });
  }

  Var mul(Var a, Var b) {
    same_shape(a, b, "mul");
    auto out = value(a);
    const auto& bv = value(b);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return push(rows(a), cols(a), std::move(out), [a, b, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& av = t.nodes_[a.id].value;
      const auto& bv2 = t.nodes_[b.id].value;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv2[i];
      auto& gb = t.nodes_[b.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    });
  }

  /// Element-wise product with a fixed array of the same shape.
  Var mul_const(Var a, std::vector<double> c) {
    if (c.size() != value(a).size()) throw DimensionError("Tape::mul_const: shape mismatch");
    auto out = value(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c[i];
    return push(rows(a), cols(a), std::move(out), [a, c = std::move(c), self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * c[i];
    });
  }

  Var scale(Var a, double s) {
    auto out = value(a);
    for (auto& v : out) v *= s;
    return push(rows(a), cols(a), std::move(out), [a, s, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * s;
    });
  }

  Var cos(Var a) {
    auto out = value(a);
    for (auto& v : out) v = std::cos(v);
    return push(rows(a), cols(a), std::move(out), [a, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& av = t.nodes_[a.id].value;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i] * std::sin(av[i]);
    });
  }

  Var sin(Var a) {
    auto out = value(a);
    for (auto& v : out) v = std::sin(v);
    return push(rows(a), cols(a), std::move(out), [a, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& av = t.nodes_[a.id].value;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * std::cos(av[i]);
    });
  }

  Var activation(Var a, Activation act) {
    if (act == Activation::identity) return a;
    auto out = value(a);
    for (auto& v : out) v = activate(act, v);
    return push(rows(a), cols(a), std::move(out), [a, act, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& y = t.nodes_[self].value;
      const auto& x = t.nodes_[a.id].value;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        double dy = 1.0;
        switch (act) {
          case Activation::sigmoid:
            dy = y[i] * (1.0 - y[i]);
            break;
          case Activation::tanh:
            dy = 1.0 - y[i] * y[i];
            break;
          case Activation::relu:
            dy = x[i] > 0.0 ? 1.0 : 0.0;
            break;
          case Activation::identity:
            break;
        }
        ga[i] += g[i] * dy;
      }
    });
  }

  /// Element-wise sqrt(re^2 + im^2); the derivative at 0 is taken as 0.
  Var modulus(Var re, Var im) {
    same_shape(re, im, "modulus");
    std::vector<double> out(value(re).size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::hypot(value(re)[i], value(im)[i]);
    return push(rows(re), cols(re), std::move(out), [re, im, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& m = t.nodes_[self].value;
      const auto& rv = t.nodes_[re.id].value;
      const auto& iv = t.nodes_[im.id].value;
      auto& gr = t.nodes_[re.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (m[i] > 0.0) gr[i] += g[i] * rv[i] / m[i];
      }
      auto& gi = t.nodes_[im.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (m[i] > 0.0) gi[i] += g[i] * iv[i] / m[i];
      }
    });
  }

  /// (m x k) . (k x n)
  Var matmul(Var a, Var b) {
    const std::size_t m = rows(a), k = cols(a), n = cols(b);
    if (rows(b) != k) throw DimensionError("Tape::matmul: inner dimensions differ");
    std::vector<double> out(m * n, 0.0);
    const auto& av = value(a);
    const auto& bv = value(b);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        const double x = av[i * k + p];
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] += x * bv[p * n + j];
      }
    }
    return push(m, n, std::move(out), [a, b, m, k, n, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& av2 = t.nodes_[a.id].value;
      const auto& bv2 = t.nodes_[b.id].value;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * bv2[p * n + j];
          ga[i * k + p] += acc;
        }
      }
      auto& gb = t.nodes_[b.id].grad;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t p = 0; p < k; ++p) {
          const double x = av2[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += x * g[i * n + j];
        }
      }
    });
  }

  /// (m x k) . (n x k)^T
  Var matmul_nt(Var a, Var b) {
    const std::size_t m = rows(a), k = cols(a), n = rows(b);
    if (cols(b) != k) throw DimensionError("Tape::matmul_nt: inner dimensions differ");
    std::vector<double> out(m * n, 0.0);
    const auto& av = value(a);
    const auto& bv = value(b);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t p = 0; p < k; ++p) acc += av[i * k + p] * bv[j * k + p];
        out[i * n + j] = acc;
      }
    }
    return push(m, n, std::move(out), [a, b, m, k, n, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& av2 = t.nodes_[a.id].value;
      const auto& bv2 = t.nodes_[b.id].value;
      auto& ga = t.nodes_[a.id].grad;
      auto& gb = t.nodes_[b.id].grad;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double gij = g[i * n + j];
          if (gij == 0.0) continue;
          for (std::size_t p = 0; p < k; ++p) {
            ga[i * k + p] += gij * bv2[j * k + p];
            gb[j * k + p] += gij * av2[i * k + p];
          }
        }
      }
    });
  }

  /// Adds a 1 x cols row to every row of a.
  Var add_row(Var a, Var row) {
    if (rows(row) != 1 || cols(row) != cols(a)) throw DimensionError("Tape::add_row: shape mismatch");
    auto out = value(a);
    const auto& rv = value(row);
    const std::size_t c = cols(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += rv[i % c];
    return push(rows(a), c, std::move(out), [a, row, c, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      t.accumulate(a, g);
      auto& gr = t.nodes_[row.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) gr[i % c] += g[i];
    });
  }

  /// 1 x c row repeated n times.
  Var broadcast_row(Var row, std::size_t n) {
    if (rows(row) != 1) throw DimensionError("Tape::broadcast_row: expected a single row");
    const std::size_t c = cols(row);
    std::vector<double> out(n * c);
    for (std::size_t i = 0; i < n; ++i) std::copy_n(value(row).begin(), c, out.begin() + static_cast<std::ptrdiff_t>(i * c));
    return push(n, c, std::move(out), [row, c, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& gr = t.nodes_[row.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) gr[i % c] += g[i];
    });
  }

  /// n x 1 column repeated c times.
  Var broadcast_col(Var col, std::size_t c) {
    if (cols(col) != 1) throw DimensionError("Tape::broadcast_col: expected a single column");
    const std::size_t n = rows(col);
    std::vector<double> out(n * c);
    for (std::size_t i = 0; i < n; ++i) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(i * c), c, value(col)[i]);
    return push(n, c, std::move(out), [col, c, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& gc = t.nodes_[col.id].grad;
      for (std::size_t i = 0; i < g.size(); ++i) gc[i / c] += g[i];
    });
  }

  /// Column sums as a 1 x cols row.
  Var sum_rows(Var a) {
    const std::size_t n = rows(a), c = cols(a);
    std::vector<double> out(c, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) out[j] += value(a)[i * c + j];
    }
    return push(1, c, std::move(out), [a, c, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i % c];
    });
  }

  Var slice_row(Var a, std::size_t r) {
    const std::size_t c = cols(a);
    if (r >= rows(a)) throw IndexError("Tape::slice_row: row out of range");
    std::vector<double> out(value(a).begin() + static_cast<std::ptrdiff_t>(r * c),
                            value(a).begin() + static_cast<std::ptrdiff_t>((r + 1) * c));
    return push(1, c, std::move(out), [a, r, c, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t j = 0; j < c; ++j) ga[r * c + j] += g[j];
    });
  }

  /// Sliding windows: row t is [a[t], ..., a[t+width-1]] flattened.
  Var im2col(Var a, std::size_t width) {
    const std::size_t n = rows(a), c = cols(a);
    if (width == 0 || width > n) throw DimensionError("Tape::im2col: window wider than sequence");
    const std::size_t out_rows = n - width + 1;
    std::vector<double> out(out_rows * width * c);
    for (std::size_t t = 0; t < out_rows; ++t) {
      std::copy_n(value(a).begin() + static_cast<std::ptrdiff_t>(t * c), width * c,
                  out.begin() + static_cast<std::ptrdiff_t>(t * width * c));
    }
    return push(out_rows, width * c, std::move(out), [a, width, c, out_rows, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t r = 0; r < out_rows; ++r) {
        for (std::size_t i = 0; i < width * c; ++i) ga[r * c + i] += g[r * width * c + i];
      }
    });
  }

  /// Per column, value[argmax_r key[r][c]][c] as a 1 x cols row (first max wins).
  /// The key receives no gradient.
  Var select_argmax(Var key, Var value_node) {
    same_shape(key, value_node, "select_argmax");
    const std::size_t n = rows(key), c = cols(key);
    if (n == 0) throw DegenerateInputError("Tape::select_argmax: no rows");
    std::vector<std::size_t> pick(c, 0);
    std::vector<double> out(c);
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t i = 1; i < n; ++i) {
        if (value(key)[i * c + j] > value(key)[pick[j] * c + j]) pick[j] = i;
      }
      out[j] = value(value_node)[pick[j] * c + j];
    }
    return push(1, c, std::move(out), [value_node, c, pick = std::move(pick), self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      auto& gv = t.nodes_[value_node.id].grad;
      for (std::size_t j = 0; j < c; ++j) gv[pick[j] * c + j] += g[j];
    });
  }

  Var softmax_rows(Var a) {
    const std::size_t n = rows(a), c = cols(a);
    std::vector<double> out(value(a));
    for (std::size_t i = 0; i < n; ++i) {
      double* row = out.data() + i * c;
      const double mx = *std::max_element(row, row + c);
      double sum = 0.0;
      for (std::size_t j = 0; j < c; ++j) {
        row[j] = std::exp(row[j] - mx);
        sum += row[j];
      }
      for (std::size_t j = 0; j < c; ++j) row[j] /= sum;
    }
    return push(n, c, std::move(out), [a, n, c, self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& y = t.nodes_[self].value;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
        for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += y[i * c + j] * (g[i * c + j] - dot);
      }
    });
  }

  /// Row-wise x / sum(x).
  Var normalize_rows(Var a) {
    const std::size_t n = rows(a), c = cols(a);
    std::vector<double> out(value(a));
    std::vector<double> sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < c; ++j) sums[i] += out[i * c + j];
      if (sums[i] == 0.0) throw DegenerateInputError("Tape::normalize_rows: row sums to zero");
      for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= sums[i];
    }
    return push(n, c, std::move(out), [a, n, c, sums = std::move(sums), self = next_id()](Tape& t) {
      const auto& g = t.nodes_[self].grad;
      const auto& y = t.nodes_[self].value;
      auto& ga = t.nodes_[a.id].grad;
      for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < c; ++j) dot += g[i * c + j] * y[i * c + j];
        for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += (g[i * c + j] - dot) / sums[i];
      }
    });
  }

  /// -log softmax(logits)[label] for a 1 x C row.
  Var cross_entropy(Var logits, std::size_t label) {
    const std::size_t c = cols(logits);
    if (rows(logits) != 1 || label >= c) throw IndexError("Tape::cross_entropy: label out of range");
    const auto& z = value(logits);
    const double mx = *std::max_element(z.begin(), z.end());
    std::vector<double> prob(c);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      prob[j] = std::exp(z[j] - mx);
      sum += prob[j];
    }
    for (auto& p : prob) p /= sum;
    const double loss = -(z[label] - mx - std::log(sum));
    return push(1, 1, {loss}, [logits, label, prob = std::move(prob), self = next_id()](Tape& t) {
      const double g = t.nodes_[self].grad[0];
      auto& gl = t.nodes_[logits.id].grad;
      for (std::size_t j = 0; j < prob.size(); ++j) {
        gl[j] += g * (prob[j] - (j == label ? 1.0 : 0.0));
      }
    });
  }

  /// Seeds d(out)/d(out) = 1 and propagates to every node created before it.
  void backward(Var out) {
    if (nodes_[out.id].value.size() != 1) throw DimensionError("Tape::backward: output must be scalar");
    for (auto& n : nodes_) n.grad.assign(n.value.size(), 0.0);
    nodes_[out.id].grad[0] = 1.0;
    for (std::size_t i = out.id + 1; i-- > 0;) {
      if (nodes_[i].backward) nodes_[i].backward(*this);
    }
  }

 private:
  std::size_t next_id() const { return nodes_.size(); }

  Var push(std::size_t rows, std::size_t cols, std::vector<double> value,
           std::function<void(Tape&)> backward) {
    nodes_.push_back({rows, cols, std::move(value), {}, std::move(backward)});
    return {nodes_.size() - 1};
  }

  void accumulate(Var target, const std::vector<double>& g) {
    auto& tg = nodes_[target.id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) tg[i] += g[i];
  }

  void same_shape(Var a, Var b, const char* op) const {
    if (rows(a) != rows(b) || cols(a) != cols(b)) {
      throw DimensionError(std::string("Tape::") + op + ": operand shapes differ (" +
                           std::to_string(rows(a)) + "x" + std::to_string(cols(a)) + " vs " +
                           std::to_string(rows(b)) + "x" + std::to_string(cols(b)) + ")");
    }
  }

  std::vector<Node> nodes_;
  std::vector<ParamUse> params_;
};

/// Real/imaginary node pair.
struct CVar {
  Var re;
  Var im;
};

/// x W^T for complex x (n x k) and W (m x k): (Xr Ar^T - Xi Ai^T, Xr Ai^T + Xi Ar^T).
inline CVar cmatmul_nt(Tape& t, CVar x, CVar w) {
  return {t.sub(t.matmul_nt(x.re, w.re), t.matmul_nt(x.im, w.im)),
          t.add(t.matmul_nt(x.re, w.im), t.matmul_nt(x.im, w.re))};
}

/// x W for complex x (n x k) and W (k x m).
inline CVar cmatmul(Tape& t, CVar x, CVar w) {
  return {t.sub(t.matmul(x.re, w.re), t.matmul(x.im, w.im)),
          t.add(t.matmul(x.re, w.im), t.matmul(x.im, w.re))};
}

/// Complex dense in row form: act(x W^T + b) per plane, b broadcast over rows.
inline CVar cdense(Tape& t, CVar x, CVar w, CVar b, Activation act) {
  const CVar lin = cmatmul_nt(t, x, w);
  return {t.activation(t.add_row(lin.re, b.re), act), t.activation(t.add_row(lin.im, b.im), act)};
}

}  // namespace corder::ad
