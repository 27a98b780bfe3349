#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "lindblad/complex_matrix.hpp"

namespace lindblad {

// xorshift64* generator (shifts 12/25/27, multiplier 0x2545F4914F6CDD1D).
// Chosen over std::mt19937 so seeds reproduce bit-for-bit across languages
// and standard-library implementations.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed)
      : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next_u64() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  // uniform in [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; draws two uniforms per call so the stream stays stateless.
  double normal() {
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im);
  }

 private:
  std::uint64_t state_;
};

inline ComplexMatrix random_matrix(Xorshift64Star& rng, std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = rng.complex_normal();
  return m;
}

inline ComplexMatrix random_hermitian(Xorshift64Star& rng, std::size_t dim) {
  ComplexMatrix m = random_matrix(rng, dim);
  ComplexMatrix h = m + m.adjoint();
  h *= 0.5;
  return h;
}

// Random density matrix: G G^+ normalized to unit trace.
inline ComplexMatrix random_density(Xorshift64Star& rng, std::size_t dim) {
  const ComplexMatrix g = random_matrix(rng, dim);
  ComplexMatrix rho = g * g.adjoint();
  const double tr = rho.trace().real();
  rho *= 1.0 / tr;
  return rho;
}

}  // namespace lindblad
