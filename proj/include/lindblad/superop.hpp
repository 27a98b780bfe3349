#pragma once

#include <vector>

#include "lindblad/complex_matrix.hpp"

// Row-stacking vectorization: vec(rho)[i*n + j] = rho(i, j), under which
// the map rho -> L rho R turns into the matrix kron(L, R^T).

namespace lindblad {

inline std::vector<Complex> vec(const ComplexMatrix& rho) {
  return rho.data();
}

inline ComplexMatrix unvec(const std::vector<Complex>& v, std::size_t dim) {
  if (v.size() != dim * dim) throw InvalidInputError("unvec: length is not dim^2");
  return ComplexMatrix(dim, v);
}

// Matrix of rho -> L rho R acting on row-stacked vectors.
inline ComplexMatrix vectorize_superoperator(const ComplexMatrix& l, const ComplexMatrix& r) {
  if (l.dim() != r.dim()) throw InvalidInputError("vectorize_superoperator: dimension mismatch");
  const std::size_t n = l.dim();
  ComplexMatrix m(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex lik = l(i, k);
      if (lik == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        Complex* mrow = m.row(i * n + j);
        for (std::size_t ll = 0; ll < n; ++ll) mrow[k * n + ll] += lik * r(ll, j);
      }
    }
  return m;
}

inline std::vector<Complex> apply_matrix(const ComplexMatrix& m, const std::vector<Complex>& v) {
  if (v.size() != m.dim()) throw InvalidInputError("apply_matrix: length mismatch");
  std::vector<Complex> out(v.size(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < m.dim(); ++i) {
    const Complex* row = m.row(i);
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) acc += row[j] * v[j];
    out[i] = acc;
  }
  return out;
}

}  // namespace lindblad
