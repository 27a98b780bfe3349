#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>
#include <vector>

#include "lindblad/complex_matrix.hpp"
#include "lindblad/tolerances.hpp"

// Hermitian eigensolver: unitary reduction to real symmetric tridiagonal form
// by complex Householder reflections, then implicit-shift QL on the tridiagonal.
// Eigenvalues come back sorted ascending; eigenvectors are the matching columns.

namespace lindblad {

struct HermitianEigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;  // column i pairs with eigenvalues[i]
};

namespace detail {

// Reduce Hermitian W to tridiagonal (d, sub) with W = Q T Q^+.
// The complex subdiagonal is then rotated real by a diagonal phase similarity
// folded into Q, so QL can run on real arrays.
inline void tridiagonalize(ComplexMatrix& w, std::vector<double>& d, std::vector<double>& sub,
                           ComplexMatrix* q) {
  const std::size_t n = w.dim();
  std::vector<Complex> subc(n, Complex(0.0, 0.0));
  std::vector<Complex> v(n), p(n);
  if (q) *q = ComplexMatrix::identity(n);

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm2 += std::norm(w(i, k));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) {
      subc[k + 1] = Complex(0.0, 0.0);
      continue;
    }

    const Complex head = w(k + 1, k);
    const Complex phase = (head == Complex(0.0, 0.0)) ? Complex(1.0, 0.0) : head / std::abs(head);
    const Complex alpha = -phase * xnorm;

    double vv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) v[i] = w(i, k);
    v[k + 1] -= alpha;
    for (std::size_t i = k + 1; i < n; ++i) vv += std::norm(v[i]);
    if (vv <= DBL_MIN) {
      subc[k + 1] = alpha;
      continue;
    }
    const double beta = 2.0 / vv;

    // p = beta W v on the trailing block
    for (std::size_t i = k + 1; i < n; ++i) {
      Complex acc(0.0, 0.0);
      const Complex* wrow = w.row(i);
      for (std::size_t j = k + 1; j < n; ++j) acc += wrow[j] * v[j];
      p[i] = beta * acc;
    }
    Complex vp(0.0, 0.0);
    for (std::size_t i = k + 1; i < n; ++i) vp += std::conj(v[i]) * p[i];
    const Complex kappa = 0.5 * beta * vp;
    for (std::size_t i = k + 1; i < n; ++i) p[i] -= kappa * v[i];

    // W <- W - p v^+ - v p^+ on the trailing block
    for (std::size_t i = k + 1; i < n; ++i) {
      Complex* wrow = w.row(i);
      const Complex pi = p[i];
      const Complex vi = v[i];
      for (std::size_t j = k + 1; j < n; ++j)
        wrow[j] -= pi * std::conj(v[j]) + vi * std::conj(p[j]);
    }
    subc[k + 1] = alpha;

    if (q) {
      // Q <- Q (I - beta v v^+)
      for (std::size_t r = 0; r < n; ++r) {
        Complex* qrow = q->row(r);
        Complex t(0.0, 0.0);
        for (std::size_t j = k + 1; j < n; ++j) t += qrow[j] * v[j];
        t *= beta;
        for (std::size_t j = k + 1; j < n; ++j) qrow[j] -= t * std::conj(v[j]);
      }
    }
  }
  if (n >= 2) subc[n - 1] = w(n - 1, n - 2);

  d.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = w(i, i).real();

  // phase similarity making the subdiagonal real non-negative
  sub.assign(n, 0.0);
  Complex u(1.0, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double m = std::abs(subc[i]);
    sub[i] = m;
    if (m > 0.0) u *= subc[i] / m;
    if (q)
      for (std::size_t r = 0; r < n; ++r) (*q)(r, i) *= u;
  }
}

// Implicit-shift QL on (d, e); e[i] couples i and i+1, e[n-1] is scratch.
// Rotations are optionally accumulated into the columns of z.
inline void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e, ComplexMatrix* z) {
  const std::size_t n = d.size();
  if (n <= 1) return;
  const long cap = static_cast<long>(tol::ql_iteration_factor) * static_cast<long>(n);
  long iterations = 0;

  for (std::size_t l = 0; l < n; ++l) {
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) + dd == dd) break;
      }
      if (m != l) {
        if (++iterations > cap)
          throw NumericFailureError("hermitian_eigs: QL failed to converge within 64*dim sweeps");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (std::size_t k = 0; k < n; ++k) {
              const Complex fz = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * fz;
              (*z)(k, i) = c * (*z)(k, i) - s * fz;
            }
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

inline void require_hermitian(const ComplexMatrix& a, const char* who) {
  if (a.empty()) throw InvalidInputError(std::string(who) + ": empty matrix");
  double defect2 = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = i; j < a.dim(); ++j)
      defect2 += (i == j ? 1.0 : 2.0) * std::norm(a(i, j) - std::conj(a(j, i)));
  const double defect = std::sqrt(defect2);
  if (defect > tol::hermiticity_rel * std::max(1.0, a.frobenius_norm()))
    throw InvalidInputError(std::string(who) + ": matrix is not Hermitian within tolerance");
}

}  // namespace detail

inline HermitianEigenDecomposition hermitian_eigs(const ComplexMatrix& a) {
  detail::require_hermitian(a, "hermitian_eigs");
  const std::size_t n = a.dim();
  HermitianEigenDecomposition out;
  if (n == 1) {
    out.eigenvalues = {a(0, 0).real()};
    out.eigenvectors = ComplexMatrix::identity(1);
    return out;
  }

  ComplexMatrix w = a;
  ComplexMatrix q;
  std::vector<double> d, sub;
  detail::tridiagonalize(w, d, sub, &q);

  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = sub[i + 1];
  detail::ql_implicit_shift(d, e, &q);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });

  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n);
  for (std::size_t c = 0; c < n; ++c) {
    out.eigenvalues[c] = d[order[c]];
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, c) = q(r, order[c]);
  }
  return out;
}

// Eigenvalues only (ascending); skips all eigenvector work.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  detail::require_hermitian(a, "hermitian_eigenvalues");
  const std::size_t n = a.dim();
  if (n == 1) return {a(0, 0).real()};

  ComplexMatrix w = a;
  std::vector<double> d, sub;
  detail::tridiagonalize(w, d, sub, nullptr);
  std::vector<double> e(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = sub[i + 1];
  detail::ql_implicit_shift(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

// Spectral norm of a general square matrix: sqrt(lambda_max(A^+ A)).
inline double operator_norm(const ComplexMatrix& a) {
  if (a.empty()) throw InvalidInputError("operator_norm: empty matrix");
  a.require_finite();
  ComplexMatrix g = a.adjoint() * a;
  g.symmetrize();
  const std::vector<double> lam = hermitian_eigenvalues(g);
  return std::sqrt(std::max(0.0, lam.back()));
}

// Largest |eigenvalue| of a Hermitian matrix; cheaper than operator_norm
// when Hermiticity is already known.
inline double spectral_radius_hermitian(const ComplexMatrix& a) {
  const std::vector<double> lam = hermitian_eigenvalues(a);
  return std::max(std::abs(lam.front()), std::abs(lam.back()));
}

}  // namespace lindblad
