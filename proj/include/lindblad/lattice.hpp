#pragma once

#include <cmath>
#include <vector>

#include "lindblad/complex_matrix.hpp"

namespace lindblad {

// Sites x = -M..M of a finite chain with hard-wall ends. Basis index
// i = x + M. The position weight <x> = sqrt(1 + x^2) is the operator
// all localization statements are measured against.
struct LatticeGeometry {
  int half_width = 1;  // M

  std::size_t size() const { return static_cast<std::size_t>(2 * half_width + 1); }
  int site(std::size_t index) const { return static_cast<int>(index) - half_width; }
  std::size_t index(int x) const { return static_cast<std::size_t>(x + half_width); }
};

inline LatticeGeometry make_geometry(int half_width) {
  if (half_width < 1) throw InvalidInputError("make_geometry: half_width must be >= 1");
  return LatticeGeometry{half_width};
}

inline double position_weight(int x) { return std::hypot(1.0, static_cast<double>(x)); }

inline std::vector<double> position_weights(const LatticeGeometry& g) {
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) w[i] = position_weight(g.site(i));
  return w;
}

inline ComplexMatrix weight_matrix(const LatticeGeometry& g) {
  return ComplexMatrix::diagonal(position_weights(g));
}

}  // namespace lindblad
