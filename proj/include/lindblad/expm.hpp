#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lindblad/complex_matrix.hpp"

// Matrix exponential by scaling-and-squaring with the degree-13 Pade
// approximant (Higham 2005), plus the complex LU solve it needs.

namespace lindblad {

// Solve A X = B in place by Gaussian elimination with partial pivoting.
inline ComplexMatrix solve_linear(ComplexMatrix a, ComplexMatrix b) {
  if (a.dim() != b.dim()) throw InvalidInputError("solve_linear: dimension mismatch");
  const std::size_t n = a.dim();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double cand = std::abs(a(r, col));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best == 0.0) throw NumericFailureError("solve_linear: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(b(col, j), b(piv, j));
      }
    }
    const Complex inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex factor = a(r, col) * inv;
      if (factor == Complex(0.0, 0.0)) continue;
      a(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) a(r, j) -= factor * a(col, j);
      for (std::size_t j = 0; j < n; ++j) b(r, j) -= factor * b(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    const Complex inv = 1.0 / a(col, col);
    for (std::size_t j = 0; j < n; ++j) b(col, j) *= inv;
    for (std::size_t r = 0; r < col; ++r) {
      const Complex factor = a(r, col);
      if (factor == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) b(r, j) -= factor * b(col, j);
    }
  }
  return b;
}

namespace detail {

inline double one_norm(const ComplexMatrix& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace detail

inline ComplexMatrix matrix_exp(const ComplexMatrix& a) {
  if (a.empty()) throw InvalidInputError("matrix_exp: empty matrix");
  a.require_finite();
  const std::size_t n = a.dim();

  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  constexpr double theta13 = 5.371920351148152;

  const double eta = detail::one_norm(a);
  int squarings = 0;
  ComplexMatrix as = a;
  if (eta > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(eta / theta13)));
    if (squarings > 64)
      throw NumericFailureError("matrix_exp: input norm " + std::to_string(eta) +
                                " out of range for scaling-and-squaring");
    as *= std::ldexp(1.0, -squarings);
  }

  const ComplexMatrix a2 = as * as;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a2 * a4;
  const ComplexMatrix eye = ComplexMatrix::identity(n);

  ComplexMatrix u_inner = a6 * b[13] + a4 * b[11] + a2 * b[9];
  ComplexMatrix u = as * (a6 * u_inner + a6 * b[7] + a4 * b[5] + a2 * b[3] + eye * b[1]);
  ComplexMatrix v_inner = a6 * b[12] + a4 * b[10] + a2 * b[8];
  ComplexMatrix v = a6 * v_inner + a6 * b[6] + a4 * b[4] + a2 * b[2] + eye * b[0];

  ComplexMatrix r = solve_linear(v - u, v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;

  if (!r.is_finite())
    throw NumericFailureError("matrix_exp: overflow in result (input norm " +
                              std::to_string(eta) + ")");
  return r;
}

}  // namespace lindblad
