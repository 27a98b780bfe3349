#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lindblad/lindblad.hpp"

using namespace lindblad;

namespace {

ModelSpec simple_model(int half_width, double hopping, int range, double strength,
                       KrausKind kind = KrausKind::dephasing) {
  const LatticeGeometry geom = make_geometry(half_width);
  return make_model_spec(geom, hopping, range, {}, make_kraus_family(kind, strength), 3);
}

ComplexMatrix kraus_square_sum(const std::vector<ComplexMatrix>& ops, std::size_t dim) {
  ComplexMatrix sum(dim);
  for (const auto& w : ops) sum += w.adjoint() * w;
  return sum;
}

}  // namespace

TEST_CASE("hamiltonian assembly on pinned inputs", "[model]") {
  const LatticeGeometry geom = make_geometry(2);
  std::vector<double> v{0.5, -1.0, 2.0, 0.0, 3.5};
  const ModelSpec diag_only =
      make_model_spec(geom, 0.0, 1, v, make_kraus_family(KrausKind::dephasing, 0.0), 3);
  REQUIRE((build_hamiltonian(diag_only) - ComplexMatrix::diagonal(v)).max_abs() == 0.0);

  const ModelSpec chain = simple_model(1, 1.0, 1, 0.0);
  const ComplexMatrix h = build_hamiltonian(chain);
  REQUIRE(h.dim() == 3);
  CHECK(h(0, 0) == Complex(0.0, 0.0));
  CHECK(h(0, 1) == Complex(-1.0, 0.0));
  CHECK(h(1, 0) == Complex(-1.0, 0.0));
  CHECK(h(1, 2) == Complex(-1.0, 0.0));
  CHECK(h(0, 2) == Complex(0.0, 0.0));
  CHECK(h.hermiticity_defect() == 0.0);

  REQUIRE_THROWS_AS(
      make_model_spec(geom, 1.0, 5, {}, make_kraus_family(KrausKind::dephasing, 0.0), 3),
      InvalidInputError);
}

TEST_CASE("hamiltonian norm obeys the Gershgorin bound", "[model]") {
  for (int range = 1; range <= 3; ++range) {
    const ModelSpec spec = simple_model(10, 1.0, range, 0.0);
    REQUIRE(operator_norm(build_hamiltonian(spec)) <= 2.0 * range + 1e-9);
  }
}

TEST_CASE("kraus families materialize as documented", "[model]") {
  const LatticeGeometry geom = make_geometry(1);

  const auto none = materialize_operators(make_kraus_family(KrausKind::dephasing, 0.0), geom);
  REQUIRE(none.empty());

  const auto dephasing = materialize_operators(make_kraus_family(KrausKind::dephasing, 1.0), geom);
  REQUIRE(dephasing.size() == 3);
  for (const auto& w : dephasing)
    REQUIRE(iterated_adjoint(w, geom, 1).max_abs() == 0.0);

  const auto jump = materialize_operators(make_kraus_family(KrausKind::directed_jump, 1.0), geom);
  REQUIRE(jump.size() == 2);
  CHECK(jump[0](0, 1) == Complex(1.0, 0.0));
  CHECK(jump[1](1, 2) == Complex(1.0, 0.0));
  const ComplexMatrix sum = kraus_square_sum(jump, 3);
  CHECK((sum - ComplexMatrix::diagonal(std::vector<double>{0.0, 1.0, 1.0})).max_abs() == 0.0);
}

TEST_CASE("iterated adjoint on pinned inputs", "[model]") {
  const LatticeGeometry geom = make_geometry(1);

  const ComplexMatrix d = ComplexMatrix::diagonal(std::vector<double>{1.0, -2.0, 0.5});
  REQUIRE(iterated_adjoint(d, geom, 1).max_abs() == 0.0);

  Xorshift64Star rng(31);
  const ComplexMatrix a = random_matrix(rng, 3);
  REQUIRE((iterated_adjoint(a, geom, 0) - a).max_abs() == 0.0);

  ComplexMatrix ket01(3);
  ket01(geom.index(0), geom.index(1)) = 1.0;
  const ComplexMatrix ad2 = iterated_adjoint(ket01, geom, 2);
  const double gap = std::sqrt(2.0) - 1.0;
  CHECK(std::abs(ad2(geom.index(0), geom.index(1)) - Complex(gap * gap, 0.0)) <= 1e-15);
  CHECK(ad2.max_abs() == Catch::Approx(gap * gap).margin(1e-15));
}

TEST_CASE("adjoint recursion, closed form, and matrix commutator agree", "[model]") {
  const LatticeGeometry geom = make_geometry(3);
  const ComplexMatrix x = weight_matrix(geom);
  Xorshift64Star rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix a = random_matrix(rng, geom.size());
    const int k = static_cast<int>(rng.uniform() * 7.0);

    ComplexMatrix by_commutator = a;
    for (int m = 0; m < k; ++m) by_commutator = commutator(by_commutator, x);

    const ComplexMatrix recursive = iterated_adjoint(a, geom, k);
    const ComplexMatrix closed = iterated_adjoint_entrywise(a, geom, k);
    REQUIRE((recursive - closed).max_abs() <= 1e-12);
    REQUIRE((recursive - by_commutator).max_abs() <= 1e-12);
  }
}

TEST_CASE("assumption audit on pinned models", "[model]") {
  const AssumptionAudit zero = check_assumptions(simple_model(4, 0.0, 1, 0.0));
  REQUIRE(zero.passed);
  REQUIRE(zero.domain_condition_holds);
  for (double v : zero.hamiltonian_adjoint_norms) CHECK(v == 0.0);
  for (double v : zero.kraus_adjoint_sums) CHECK(v == 0.0);

  const AssumptionAudit dephasing = check_assumptions(simple_model(8, 1.0, 1, 1.0));
  REQUIRE(dephasing.passed);
  for (double v : dephasing.kraus_adjoint_sums) CHECK(v == 0.0);

  const ModelSpec five = simple_model(2, 1.0, 1, 0.0);
  const AssumptionAudit audit = check_assumptions(five);
  const ComplexMatrix b1 = commutator(build_hamiltonian(five), weight_matrix(five.geometry));
  REQUIRE(std::abs(audit.hamiltonian_adjoint_norms[0] - operator_norm(b1)) <= 1e-12);
}

TEST_CASE("nearest-neighbor adjoint norms stay below twice the hopping", "[model]") {
  for (double j : {1.0, 0.7}) {
    const LatticeGeometry geom = make_geometry(8);
    const ModelSpec spec =
        make_model_spec(geom, j, 1, {}, make_kraus_family(KrausKind::dephasing, 0.0), 3);
    const ComplexMatrix h = build_hamiltonian(spec);
    for (int k = 1; k <= 6; ++k)
      REQUIRE(operator_norm(iterated_adjoint(h, geom, k)) <= 2.0 * j + 1e-12);
  }
}

TEST_CASE("unitary remixing preserves the kraus square sum", "[model]") {
  const LatticeGeometry geom = make_geometry(2);
  const auto ops = materialize_operators(make_kraus_family(KrausKind::directed_jump, 1.3), geom);
  REQUIRE(ops.size() == 4);

  Xorshift64Star rng(33);
  ComplexMatrix gen = random_hermitian(rng, ops.size());
  gen *= Complex(0.0, 1.0);
  const ComplexMatrix u = matrix_exp(gen);

  std::vector<ComplexMatrix> mixed;
  for (std::size_t j = 0; j < ops.size(); ++j) {
    ComplexMatrix wj(geom.size());
    for (std::size_t m = 0; m < ops.size(); ++m) wj += u(j, m) * ops[m];
    mixed.push_back(std::move(wj));
  }

  const ComplexMatrix before = kraus_square_sum(ops, geom.size());
  const ComplexMatrix after = kraus_square_sum(mixed, geom.size());
  REQUIRE((before - after).max_abs() <= 1e-12);
}
