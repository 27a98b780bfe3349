#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "lindblad/complex_matrix.hpp"
#include "lindblad/eigen.hpp"
#include "lindblad/lattice.hpp"
#include "lindblad/tolerances.hpp"

namespace lindblad {

enum class KrausKind { dephasing, directed_jump, custom };

inline const char* to_string(KrausKind k) {
  switch (k) {
    case KrausKind::dephasing: return "dephasing";
    case KrausKind::directed_jump: return "directed_jump";
    case KrausKind::custom: return "custom";
  }
  return "?";
}

// Jump-operator family. The built-in kinds are applied through closed forms
// and keep `operators` empty; materialize_operators() produces the explicit
// matrices when a dense representation is needed (superoperators, audits).
struct KrausFamily {
  KrausKind kind = KrausKind::dephasing;
  double strength = 0.0;  // g
  std::vector<ComplexMatrix> operators;  // populated for kind == custom
};

inline KrausFamily make_kraus_family(KrausKind kind, double strength) {
  if (kind == KrausKind::custom)
    throw InvalidInputError("make_kraus_family: custom kind needs explicit operators");
  if (!(strength >= 0.0) || !std::isfinite(strength))
    throw InvalidInputError("make_kraus_family: strength must be finite and >= 0");
  return KrausFamily{kind, strength, {}};
}

inline KrausFamily make_custom_kraus(std::vector<ComplexMatrix> operators,
                                     const LatticeGeometry& geometry) {
  double scale = 0.0;
  for (const auto& w : operators) {
    if (w.dim() != geometry.size())
      throw InvalidInputError("make_custom_kraus: operator dimension does not match lattice");
    w.require_finite();
    scale = std::max(scale, w.max_abs());
  }
  return KrausFamily{KrausKind::custom, scale * scale, std::move(operators)};
}

// W_j = sqrt(g) |j><j| (one per site), or sqrt(g) |j><j+1| (one per bond,
// hopping the particle one site toward -M).
inline std::vector<ComplexMatrix> materialize_operators(const KrausFamily& family,
                                                        const LatticeGeometry& geometry) {
  if (family.kind == KrausKind::custom) return family.operators;
  const std::size_t n = geometry.size();
  const double amp = std::sqrt(family.strength);
  std::vector<ComplexMatrix> ops;
  if (family.strength == 0.0) return ops;
  if (family.kind == KrausKind::dephasing) {
    ops.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      ComplexMatrix w(n);
      w(j, j) = amp;
      ops.push_back(std::move(w));
    }
  } else {
    ops.reserve(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      ComplexMatrix w(n);
      w(j, j + 1) = amp;
      ops.push_back(std::move(w));
    }
  }
  return ops;
}

// Full model: finite-range hopping plus on-site potential for H, one jump
// family, and the expansion order n used by the localization machinery.
struct ModelSpec {
  LatticeGeometry geometry;
  double hopping = 1.0;      // J
  int hopping_range = 1;     // bonds up to this distance carry -J
  std::vector<double> potential;  // one entry per site
  KrausFamily kraus;
  int order = 3;             // n
};

inline ModelSpec make_model_spec(const LatticeGeometry& geometry, double hopping,
                                 int hopping_range, std::vector<double> potential,
                                 KrausFamily kraus, int order) {
  if (!std::isfinite(hopping)) throw InvalidInputError("make_model_spec: hopping must be finite");
  if (hopping_range < 1 || static_cast<std::size_t>(hopping_range) >= geometry.size())
    throw InvalidInputError("make_model_spec: hopping_range must be in [1, size)");
  if (potential.empty()) potential.assign(geometry.size(), 0.0);
  if (potential.size() != geometry.size())
    throw InvalidInputError("make_model_spec: potential length must equal lattice size");
  for (double v : potential)
    if (!std::isfinite(v)) throw InvalidInputError("make_model_spec: potential must be finite");
  if (order < 2 || order > tol::max_expansion_order)
    throw InvalidInputError("make_model_spec: order must be in [2, " +
                            std::to_string(tol::max_expansion_order) + "]");
  return ModelSpec{geometry, hopping, hopping_range, std::move(potential), std::move(kraus), order};
}

inline ComplexMatrix build_hamiltonian(const ModelSpec& spec) {
  const std::size_t n = spec.geometry.size();
  ComplexMatrix h(n);
  for (std::size_t i = 0; i < n; ++i) h(i, i) = spec.potential[i];
  for (int r = 1; r <= spec.hopping_range; ++r)
    for (std::size_t i = 0; i + r < n; ++i) {
      h(i, i + r) = -spec.hopping;
      h(i + r, i) = -spec.hopping;
    }
  return h;
}

// k-fold commutator ad_<x>^k(A), computed by the recursion
// B_0 = A, B_{m+1} = [B_m, <x>]. A commutator with a diagonal matrix
// is entrywise, so each level costs O(n^2).
inline ComplexMatrix iterated_adjoint(const ComplexMatrix& a, const LatticeGeometry& geometry,
                                      int k) {
  if (a.dim() != geometry.size())
    throw InvalidInputError("iterated_adjoint: dimension does not match lattice");
  if (k < 0) throw InvalidInputError("iterated_adjoint: k must be >= 0");
  const std::vector<double> w = position_weights(geometry);
  ComplexMatrix b = a;
  for (int m = 0; m < k; ++m)
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) b(i, j) *= (w[j] - w[i]);
  return b;
}

// Closed form of the same object: (ad^k A)_{xy} = A_{xy} (<y> - <x>)^k.
inline ComplexMatrix iterated_adjoint_entrywise(const ComplexMatrix& a,
                                                const LatticeGeometry& geometry, int k) {
  if (a.dim() != geometry.size())
    throw InvalidInputError("iterated_adjoint_entrywise: dimension does not match lattice");
  if (k < 0) throw InvalidInputError("iterated_adjoint_entrywise: k must be >= 0");
  const std::vector<double> w = position_weights(geometry);
  ComplexMatrix b = a;
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      b(i, j) *= std::pow(w[j] - w[i], static_cast<double>(k));
  return b;
}

// Norm bookkeeping behind the locality assumptions: ||ad^k(H)|| and
// sum_j ||ad^k(W_j)||^2 must stay under a ceiling for k = 1..order.
struct AssumptionAudit {
  std::vector<double> hamiltonian_adjoint_norms;  // k = 1..order
  std::vector<double> kraus_adjoint_sums;         // k = 1..order
  double ceiling = 0.0;
  bool passed = false;
  bool domain_condition_holds = true;  // automatic on a finite lattice
};

inline AssumptionAudit check_assumptions(const ModelSpec& spec) {
  AssumptionAudit audit;
  audit.ceiling = tol::assumption_ceiling_factor *
                  std::max({std::abs(spec.hopping), spec.kraus.strength, 1.0});

  const ComplexMatrix h = build_hamiltonian(spec);
  const std::vector<double> w = position_weights(spec.geometry);
  ComplexMatrix bk = h;
  for (int k = 1; k <= spec.order; ++k) {
    for (std::size_t i = 0; i < bk.dim(); ++i)
      for (std::size_t j = 0; j < bk.dim(); ++j) bk(i, j) *= (w[j] - w[i]);
    audit.hamiltonian_adjoint_norms.push_back(operator_norm(bk));
  }

  for (int k = 1; k <= spec.order; ++k) {
    double sum = 0.0;
    switch (spec.kraus.kind) {
      case KrausKind::dephasing:
        sum = 0.0;  // diagonal jumps commute with <x>
        break;
      case KrausKind::directed_jump:
        for (std::size_t j = 0; j + 1 < spec.geometry.size(); ++j) {
          const double delta = w[j + 1] - w[j];
          sum += spec.kraus.strength * std::pow(delta * delta, static_cast<double>(k));
        }
        break;
      case KrausKind::custom:
        for (const auto& op : spec.kraus.operators) {
          const double nk = operator_norm(iterated_adjoint(op, spec.geometry, k));
          sum += nk * nk;
        }
        break;
    }
    audit.kraus_adjoint_sums.push_back(sum);
  }

  audit.passed = true;
  for (double v : audit.hamiltonian_adjoint_norms)
    if (!(v <= audit.ceiling)) audit.passed = false;
  for (double v : audit.kraus_adjoint_sums)
    if (!(v <= audit.ceiling)) audit.passed = false;
  return audit;
}

}  // namespace lindblad
