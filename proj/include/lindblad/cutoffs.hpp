#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lindblad/complex_matrix.hpp"
#include "lindblad/lattice.hpp"
#include "lindblad/tolerances.hpp"

// Smooth switching functions built from the bump kernel
// psi(u) = exp(-1/(u(1-u))) on (0,1). The cutoff f rises from 0 to 1 across
// the middle half of (0, c - c'), has unit-normalized derivative, and admits
// closed-form derivatives up to the maximum expansion order through the
// recurrence psi^(m) = P_m(u) / (u(1-u))^{2m} * psi.

namespace lindblad {

namespace detail {

inline const std::array<double, 8>& gl_nodes() {
  static const std::array<double, 8> x = {
      0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
      0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
  return x;
}

inline const std::array<double, 8>& gl_weights() {
  static const std::array<double, 8> w = {
      0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
      0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
  return w;
}

inline double bump(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double q = u * (1.0 - u);
  const double t = -1.0 / q;
  return (t < -745.0) ? 0.0 : std::exp(t);
}

// 16-point Gauss-Legendre on [a, b]
template <typename F>
double gauss_panel(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < gl_nodes().size(); ++i) {
    const double dx = half * gl_nodes()[i];
    acc += gl_weights()[i] * (f(mid - dx) + f(mid + dx));
  }
  return acc * half;
}

// composite quadrature of the bump over [0, u], u in [0, 1]
inline double bump_integral(double u) {
  if (u <= 0.0) return 0.0;
  u = std::min(u, 1.0);
  const int panels = std::max(1, static_cast<int>(std::ceil(u * 48.0)));
  double acc = 0.0;
  for (int p = 0; p < panels; ++p)
    acc += gauss_panel(bump, u * p / panels, u * (p + 1) / panels);
  return acc;
}

inline std::vector<double> poly_derivative(const std::vector<double>& p) {
  std::vector<double> d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<double>(i));
  if (d.empty()) d.push_back(0.0);
  return d;
}

inline std::vector<double> poly_multiply(const std::vector<double>& a,
                                         const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline void poly_accumulate(std::vector<double>& a, const std::vector<double>& b, double scale) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
}

inline double poly_eval(const std::vector<double>& p, double u) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
  return acc;
}

// P_0 = 1 and P_{m+1} = P_m' q^2 - 2m P_m q q' + P_m q', with q = u - u^2.
// All coefficients are integers, so the recurrence is exact in doubles.
inline std::vector<std::vector<double>> bump_derivative_polys(int max_order) {
  const std::vector<double> q = {0.0, 1.0, -1.0};
  const std::vector<double> qp = {1.0, -2.0};
  const std::vector<double> q2 = poly_multiply(q, q);
  const std::vector<double> qqp = poly_multiply(q, qp);
  std::vector<std::vector<double>> polys;
  polys.push_back({1.0});
  for (int m = 0; m < max_order; ++m) {
    const std::vector<double>& pm = polys.back();
    std::vector<double> next = poly_multiply(poly_derivative(pm), q2);
    poly_accumulate(next, poly_multiply(pm, qqp), -2.0 * m);
    poly_accumulate(next, poly_multiply(pm, qp), 1.0);
    polys.push_back(std::move(next));
  }
  return polys;
}

}  // namespace detail

// psi^(m)(u); exact zero outside (0,1).
inline double bump_derivative(const std::vector<std::vector<double>>& polys, int m, double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double q = u * (1.0 - u);
  const double pm = detail::poly_eval(polys[static_cast<std::size_t>(m)], u);
  if (pm == 0.0) return 0.0;
  const double logmag = -1.0 / q - 2.0 * m * std::log(q) + std::log(std::abs(pm));
  if (logmag < -745.0) return 0.0;
  return std::copysign(std::exp(logmag), pm);
}

struct SmoothCutoff {
  double speed_outer = 0.0;       // c
  double speed_inner = 0.0;       // c'
  double support_left = 0.0;      // l = (c - c')/4
  double support_right = 0.0;     // r = 3(c - c')/4
  double normalization = 0.0;     // Z with f'(mu) = psi(u_hat)/Z, integral of f' = 1
  std::vector<std::vector<double>> derivative_polys;

  double width() const { return support_right - support_left; }
};

inline SmoothCutoff make_cutoff(double speed_outer, double speed_inner) {
  if (!(speed_outer > speed_inner) || !(speed_inner > 0.0))
    throw InvalidInputError("make_cutoff: need c > c' > 0");
  SmoothCutoff f;
  f.speed_outer = speed_outer;
  f.speed_inner = speed_inner;
  const double gap = speed_outer - speed_inner;
  f.support_left = 0.25 * gap;
  f.support_right = 0.75 * gap;
  f.normalization = f.width() * detail::bump_integral(1.0);
  f.derivative_polys = detail::bump_derivative_polys(tol::max_expansion_order - 1);
  return f;
}

inline double cutoff_value(const SmoothCutoff& f, double mu) {
  if (mu <= f.support_left) return 0.0;
  if (mu >= f.support_right) return 1.0;
  const double u = (mu - f.support_left) / f.width();
  return detail::bump_integral(u) / detail::bump_integral(1.0);
}

// f^(k)(mu): k = 0 is the value itself; derivatives vanish identically
// outside the support window.
inline double cutoff_derivative(const SmoothCutoff& f, int k, double mu) {
  if (k < 0 || k > tol::max_expansion_order)
    throw InvalidInputError("cutoff_derivative: k must be in [0, " +
                            std::to_string(tol::max_expansion_order) + "]");
  if (k == 0) return cutoff_value(f, mu);
  const double u = (mu - f.support_left) / f.width();
  const double psi_km1 = bump_derivative(f.derivative_polys, k - 1, u);
  return psi_km1 / (f.normalization * std::pow(f.width(), static_cast<double>(k - 1)));
}

// sqrt(f'), smooth because sqrt(psi) = exp(-1/(2 u(1-u))).
inline double cutoff_sqrt_derivative(const SmoothCutoff& f, double mu) {
  const double u = (mu - f.support_left) / f.width();
  if (u <= 0.0 || u >= 1.0) return 0.0;
  const double t = -0.5 / (u * (1.0 - u));
  return (t < -745.0) ? 0.0 : std::exp(t) / std::sqrt(f.normalization);
}

// Moving frame of the cone estimate: reference radius a, initial cutoff
// radius b < a, spatial scale s, time t.
struct ConeFrame {
  double a = 0.0;
  double b = 0.0;
  double s = 1.0;
  double t = 0.0;
};

inline ConeFrame make_cone_frame(double a, double b, double s, double t) {
  if (!(a > b) || !(b > 0.0)) throw InvalidInputError("make_cone_frame: need a > b > 0");
  if (!(s > 0.0)) throw InvalidInputError("make_cone_frame: need s > 0");
  if (!(t >= 0.0)) throw InvalidInputError("make_cone_frame: need t >= 0");
  return ConeFrame{a, b, s, t};
}

// x_ts per site: (<x> - a - c' t)/s.
inline std::vector<double> cone_coordinate(const ConeFrame& frame, double speed_inner,
                                           const LatticeGeometry& geometry) {
  std::vector<double> mu = position_weights(geometry);
  for (double& v : mu) v = (v - frame.a - speed_inner * frame.t) / frame.s;
  return mu;
}

// diag f^(k)(x_ts); the caller supplies any s^{-k} prefactor.
inline ComplexMatrix diagonal_observable(const SmoothCutoff& f, const ConeFrame& frame,
                                         const LatticeGeometry& geometry, int k) {
  const std::vector<double> mu = cone_coordinate(frame, f.speed_inner, geometry);
  ComplexMatrix d(geometry.size());
  for (std::size_t i = 0; i < mu.size(); ++i) d(i, i) = cutoff_derivative(f, k, mu[i]);
  return d;
}

inline ComplexMatrix diagonal_sqrt_derivative(const SmoothCutoff& f, const ConeFrame& frame,
                                              const LatticeGeometry& geometry) {
  const std::vector<double> mu = cone_coordinate(frame, f.speed_inner, geometry);
  ComplexMatrix d(geometry.size());
  for (std::size_t i = 0; i < mu.size(); ++i) d(i, i) = cutoff_sqrt_derivative(f, mu[i]);
  return d;
}

// chi_eta: indicator of <x> >= eta.
inline ComplexMatrix sharp_projector(double eta, const LatticeGeometry& geometry) {
  if (!(eta >= 1.0)) throw InvalidInputError("sharp_projector: eta must be >= 1");
  ComplexMatrix p(geometry.size());
  for (std::size_t i = 0; i < geometry.size(); ++i)
    if (position_weight(geometry.site(i)) >= eta) p(i, i) = 1.0;
  return p;
}

// Smooth plateau v: exactly 1 on [l, r] (the support of f'), supported
// inside (0, c - c'). Used to localize second-order terms.
struct SmoothPlateau {
  double rise_start = 0.0;
  double rise_end = 0.0;    // = support_left of the parent cutoff
  double fall_start = 0.0;  // = support_right
  double fall_end = 0.0;
};

namespace detail {

inline double smoothstep(double w) {
  if (w <= 0.0) return 0.0;
  if (w >= 1.0) return 1.0;
  const double lo = std::exp(-1.0 / w);
  const double hi = std::exp(-1.0 / (1.0 - w));
  return lo / (lo + hi);
}

}  // namespace detail

inline SmoothPlateau make_plateau(const SmoothCutoff& f) {
  SmoothPlateau v;
  v.rise_start = 0.5 * f.support_left;
  v.rise_end = f.support_left;
  v.fall_start = f.support_right;
  v.fall_end = 0.5 * (f.support_right + (f.speed_outer - f.speed_inner));
  return v;
}

inline double plateau_value(const SmoothPlateau& v, double mu) {
  if (mu <= v.rise_start || mu >= v.fall_end) return 0.0;
  if (mu < v.rise_end) return detail::smoothstep((mu - v.rise_start) / (v.rise_end - v.rise_start));
  if (mu <= v.fall_start) return 1.0;
  return detail::smoothstep((v.fall_end - mu) / (v.fall_end - v.fall_start));
}

inline ComplexMatrix diagonal_plateau(const SmoothPlateau& v, const ConeFrame& frame,
                                      double speed_inner, const LatticeGeometry& geometry) {
  const std::vector<double> mu = cone_coordinate(frame, speed_inner, geometry);
  ComplexMatrix d(geometry.size());
  for (std::size_t i = 0; i < mu.size(); ++i) d(i, i) = plateau_value(v, mu[i]);
  return d;
}

}  // namespace lindblad
