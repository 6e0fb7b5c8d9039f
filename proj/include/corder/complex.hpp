#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corder/errors.hpp"

namespace corder {

struct Complex {
  double re = 0.0;
  double im = 0.0;

  constexpr Complex() = default;
  constexpr Complex(double real, double imag = 0.0) : re(real), im(imag) {}

  friend constexpr bool operator==(const Complex&, const Complex&) = default;
};

/// (a.re b.re - a.im b.im, a.re b.im + a.im b.re). No Annex-G NaN recovery.
constexpr Complex complex_multiply(Complex a, Complex b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

constexpr Complex operator*(Complex a, Complex b) { return complex_multiply(a, b); }
constexpr Complex operator*(double s, Complex z) { return {s * z.re, s * z.im}; }
constexpr Complex operator*(Complex z, double s) { return {s * z.re, s * z.im}; }
constexpr Complex operator+(Complex a, Complex b) { return {a.re + b.re, a.im + b.im}; }
constexpr Complex operator-(Complex a, Complex b) { return {a.re - b.re, a.im - b.im}; }
constexpr Complex operator-(Complex z) { return {-z.re, -z.im}; }

constexpr Complex& operator+=(Complex& a, Complex b) {
  a.re += b.re;
  a.im += b.im;
  return a;
}

constexpr Complex conj(Complex z) { return {z.re, -z.im}; }

inline double modulus(Complex z) { return std::hypot(z.re, z.im); }

// Smith's algorithm; avoids overflow in |b|^2.
inline Complex operator/(Complex a, Complex b) {
  if (std::abs(b.re) >= std::abs(b.im)) {
    const double ratio = b.im / b.re;
    const double denom = b.re + b.im * ratio;
    return {(a.re + a.im * ratio) / denom, (a.im - a.re * ratio) / denom};
  }
  const double ratio = b.re / b.im;
  const double denom = b.re * ratio + b.im;
  return {(a.re * ratio + a.im) / denom, (a.im * ratio - a.re) / denom};
}

/// r e^{i phi}
inline Complex polar(double r, double phi) { return {r * std::cos(phi), r * std::sin(phi)}; }

/// Split-plane complex vector. Real and imaginary parts live in separate arrays.
class ComplexVec {
 public:
  ComplexVec() = default;
  explicit ComplexVec(std::size_t n) : re_(n, 0.0), im_(n, 0.0) {}
  ComplexVec(std::vector<double> re, std::vector<double> im) : re_(std::move(re)), im_(std::move(im)) {
    if (re_.size() != im_.size()) {
      throw DimensionError("ComplexVec: real plane has " + std::to_string(re_.size()) +
                           " entries, imaginary plane has " + std::to_string(im_.size()));
    }
  }

  static ComplexVec from_real(std::vector<double> re) {
    std::vector<double> im(re.size(), 0.0);
    return {std::move(re), std::move(im)};
  }

  std::size_t size() const noexcept { return re_.size(); }
  bool empty() const noexcept { return re_.empty(); }

  Complex operator[](std::size_t i) const { return {re_[i], im_[i]}; }
  void set(std::size_t i, Complex z) {
    re_[i] = z.re;
    im_[i] = z.im;
  }

  std::span<const double> re() const noexcept { return re_; }
  std::span<const double> im() const noexcept { return im_; }
  std::span<double> re() noexcept { return re_; }
  std::span<double> im() noexcept { return im_; }

  friend bool operator==(const ComplexVec&, const ComplexVec&) = default;

 private:
  std::vector<double> re_;
  std::vector<double> im_;
};

/// Row-major split-plane complex matrix.
class ComplexMat {
 public:
  ComplexMat() = default;
  ComplexMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), re_(rows * cols, 0.0), im_(rows * cols, 0.0) {}
  ComplexMat(std::size_t rows, std::size_t cols, std::vector<double> re, std::vector<double> im)
      : rows_(rows), cols_(cols), re_(std::move(re)), im_(std::move(im)) {
    if (re_.size() != rows * cols || im_.size() != rows * cols) {
      throw DimensionError("ComplexMat: planes must both hold " + std::to_string(rows * cols) +
                           " entries (got " + std::to_string(re_.size()) + " and " +
                           std::to_string(im_.size()) + ")");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Complex operator()(std::size_t r, std::size_t c) const {
    return {re_[r * cols_ + c], im_[r * cols_ + c]};
  }
  void set(std::size_t r, std::size_t c, Complex z) {
    re_[r * cols_ + c] = z.re;
    im_[r * cols_ + c] = z.im;
  }

  ComplexVec row(std::size_t r) const {
    const auto first = static_cast<std::ptrdiff_t>(r * cols_);
    const auto last = first + static_cast<std::ptrdiff_t>(cols_);
    return {std::vector<double>(re_.begin() + first, re_.begin() + last),
            std::vector<double>(im_.begin() + first, im_.begin() + last)};
  }
  void set_row(std::size_t r, const ComplexVec& v) {
    if (v.size() != cols_) throw DimensionError("ComplexMat::set_row: length mismatch");
    for (std::size_t c = 0; c < cols_; ++c) set(r, c, v[c]);
  }

  std::span<const double> re() const noexcept { return re_; }
  std::span<const double> im() const noexcept { return im_; }
  std::span<double> re() noexcept { return re_; }
  std::span<double> im() noexcept { return im_; }

  friend bool operator==(const ComplexMat&, const ComplexMat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> re_;
  std::vector<double> im_;
};

/// Dense row-major real matrix (readout weights, attention coefficients).
struct RealMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RealMat() = default;
  RealMat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  RealMat(std::size_t r, std::size_t c, std::vector<double> values)
      : rows(r), cols(c), data(std::move(values)) {
    if (data.size() != r * c) throw DimensionError("RealMat: value count does not match shape");
  }

  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
};

enum class Activation { identity, sigmoid, tanh, relu };

inline double activate(Activation act, double x) {
  switch (act) {
    case Activation::identity:
      return x;
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::tanh:
      return std::tanh(x);
    case Activation::relu:
      return x > 0.0 ? x : 0.0;
  }
  return x;
}

inline Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

inline std::string to_string(Activation act) {
  switch (act) {
    case Activation::identity:
      return "identity";
    case Activation::sigmoid:
      return "sigmoid";
    case Activation::tanh:
      return "tanh";
    case Activation::relu:
      return "relu";
  }
  return "identity";
}

/// f(z) = sigma(Re z) + i sigma(Im z)
inline ComplexVec split_activation(const ComplexVec& z, Activation act) {
  ComplexVec out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out.re()[i] = activate(act, z.re()[i]);
    out.im()[i] = activate(act, z.im()[i]);
  }
  return out;
}

/// Complex dense layer with W = A + iB and b = c + id:
///   Re z = act(A x - B y + c),  Im z = act(B x + A y + d)
/// where x, y are the real and imaginary planes of the input.
inline ComplexVec complex_dense(const ComplexVec& x, const ComplexMat& w, const ComplexVec& b,
                                Activation act = Activation::identity) {
  if (w.cols() != x.size()) {
    throw DimensionError("complex_dense: W has " + std::to_string(w.cols()) +
                         " columns but x has length " + std::to_string(x.size()));
  }
  if (b.size() != w.rows()) {
    throw DimensionError("complex_dense: b has length " + std::to_string(b.size()) +
                         " but W has " + std::to_string(w.rows()) + " rows");
  }
  const auto a_plane = w.re();
  const auto b_plane = w.im();
  ComplexVec out(w.rows());
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t c = 0; c < w.cols(); ++c) {
      const double a = a_plane[r * w.cols() + c];
      const double bb = b_plane[r * w.cols() + c];
      re += a * x.re()[c] - bb * x.im()[c];
      im += bb * x.re()[c] + a * x.im()[c];
    }
    out.re()[r] = activate(act, re + b.re()[r]);
    out.im()[r] = activate(act, im + b.im()[r]);
  }
  return out;
}

inline std::vector<double> modulus_vec(const ComplexVec& z) {
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::hypot(z.re()[i], z.im()[i]);
  return out;
}

/// Re(sum u_k conj(v_k)) / (|u| |v|)
inline double complex_cosine(const ComplexVec& u, const ComplexVec& v) {
  if (u.size() != v.size()) {
    throw DimensionError("complex_cosine: lengths " + std::to_string(u.size()) + " and " +
                         std::to_string(v.size()) + " differ");
  }
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u.re()[k] * v.re()[k] + u.im()[k] * v.im()[k];
    nu += u.re()[k] * u.re()[k] + u.im()[k] * u.im()[k];
    nv += v.re()[k] * v.re()[k] + v.im()[k] * v.im()[k];
  }
  if (nu == 0.0 || nv == 0.0) throw DegenerateInputError("complex_cosine: zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace corder
