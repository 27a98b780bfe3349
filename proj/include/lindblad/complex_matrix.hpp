#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lindblad {

using Complex = std::complex<double>;

// Rejected input: bad dimensions, non-finite entries, violated preconditions.
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation left its numeric contract: overflow, non-convergence,
// positivity loss beyond the abort floor, and similar.
class NumericFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense square complex matrix, row-major storage.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  explicit ComplexMatrix(std::size_t dim)
      : dim_(checked_dim(dim)), data_(dim * dim, Complex(0.0, 0.0)) {}

  ComplexMatrix(std::size_t dim, std::vector<Complex> entries)
      : dim_(checked_dim(dim)), data_(std::move(entries)) {
    if (data_.size() != dim_ * dim_)
      throw InvalidInputError("ComplexMatrix: entry count does not match dim^2");
    require_finite();
  }

  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<double>& d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    m.require_finite();
    return m;
  }

  static ComplexMatrix diagonal(const std::vector<Complex>& d) {
    ComplexMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    m.require_finite();
    return m;
  }

  std::size_t dim() const { return dim_; }
  bool empty() const { return dim_ == 0; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

  Complex* row(std::size_t i) { return data_.data() + i * dim_; }
  const Complex* row(std::size_t i) const { return data_.data() + i * dim_; }

  std::vector<Complex>& data() { return data_; }
  const std::vector<Complex>& data() const { return data_; }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }

  ComplexMatrix& operator*=(Complex c) {
    for (auto& v : data_) v *= c;
    return *this;
  }

  ComplexMatrix& operator*=(double c) {
    for (auto& v : data_) v *= c;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex c) { return a *= c; }
  friend ComplexMatrix operator*(Complex c, ComplexMatrix a) { return a *= c; }
  friend ComplexMatrix operator*(ComplexMatrix a, double c) { return a *= c; }
  friend ComplexMatrix operator*(double c, ComplexMatrix a) { return a *= c; }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  Complex trace() const {
    Complex t(0.0, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  // max_ij |A_ij - conj(A_ji)|
  double hermiticity_defect() const {
    double m = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j)
        m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
  }

  bool is_finite() const {
    for (const auto& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  void require_finite() const {
    if (!is_finite()) throw InvalidInputError("ComplexMatrix: non-finite entry");
  }

  // (A + A^+)/2 in place; returns the largest entrywise correction applied.
  double symmetrize() {
    double corr = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      for (std::size_t j = i; j < dim_; ++j) {
        Complex a = (*this)(i, j);
        Complex b = std::conj((*this)(j, i));
        Complex avg = 0.5 * (a + b);
        corr = std::max(corr, std::abs(a - avg));
        corr = std::max(corr, std::abs(b - avg));
        (*this)(i, j) = avg;
        (*this)(j, i) = std::conj(avg);
      }
    }
    return corr;
  }

 private:
  static std::size_t checked_dim(std::size_t dim) {
    if (dim == 0) throw InvalidInputError("ComplexMatrix: dim must be >= 1");
    return dim;
  }

  void require_same_dim(const ComplexMatrix& o) const {
    if (dim_ != o.dim_) throw InvalidInputError("ComplexMatrix: dimension mismatch");
  }

  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInputError("ComplexMatrix: dimension mismatch");
  const std::size_t n = a.dim();
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex* arow = a.row(i);
    Complex* rrow = r.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = arow[k];
      if (aik == Complex(0.0, 0.0)) continue;
      const Complex* brow = b.row(k);
      for (std::size_t j = 0; j < n; ++j) rrow[j] += aik * brow[j];
    }
  }
  return r;
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

inline ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b + b * a;
}

// tr(A B), evaluated without forming the product.
inline Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw InvalidInputError("trace_of_product: dimension mismatch");
  const std::size_t n = a.dim();
  Complex t(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const Complex* arow = a.row(i);
    for (std::size_t j = 0; j < n; ++j) t += arow[j] * b(j, i);
  }
  return t;
}

}  // namespace lindblad
