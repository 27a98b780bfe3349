#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lindblad/lindblad.hpp"

using namespace lindblad;

namespace {

ComplexMatrix two_by_two(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

double diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("commutator identities and hand oracle", "[linalg]") {
  Xorshift64Star rng(11);
  const ComplexMatrix b = random_matrix(rng, 6);

  REQUIRE(commutator(ComplexMatrix::identity(6), b).max_abs() == 0.0);
  REQUIRE(commutator(b, b).max_abs() == 0.0);

  const ComplexMatrix a = ComplexMatrix::diagonal(std::vector<double>{1.0, 2.0});
  const ComplexMatrix hop = two_by_two(0.0, 1.0, 0.0, 0.0);
  const ComplexMatrix expected = two_by_two(0.0, -1.0, 0.0, 0.0);
  REQUIRE(diff(commutator(a, hop), expected) == 0.0);

  REQUIRE_THROWS_AS(commutator(a, ComplexMatrix::identity(3)), InvalidInputError);
}

TEST_CASE("hermitian eigenvalues on pinned inputs", "[linalg]") {
  const std::vector<double> d1 = hermitian_eigenvalues(
      ComplexMatrix::diagonal(std::vector<double>{3.0, 1.0, 2.0}));
  REQUIRE(d1.size() == 3);
  CHECK(d1[0] == Catch::Approx(1.0).margin(1e-12));
  CHECK(d1[1] == Catch::Approx(2.0).margin(1e-12));
  CHECK(d1[2] == Catch::Approx(3.0).margin(1e-12));

  const std::vector<double> d2 = hermitian_eigenvalues(two_by_two(0.0, 1.0, 1.0, 0.0));
  CHECK(d2[0] == Catch::Approx(-1.0).margin(1e-12));
  CHECK(d2[1] == Catch::Approx(1.0).margin(1e-12));

  for (double v : hermitian_eigenvalues(ComplexMatrix::zero(4)))
    CHECK(v == Catch::Approx(0.0).margin(1e-14));

  REQUIRE_THROWS_AS(hermitian_eigs(two_by_two(0.0, 2.0, 0.0, 0.0)), InvalidInputError);
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices", "[linalg]") {
  Xorshift64Star rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 1 + static_cast<std::size_t>(rng.uniform() * 32.0);
    const ComplexMatrix a = random_hermitian(rng, dim);
    const HermitianEigenDecomposition eig = hermitian_eigs(a);

    ComplexMatrix lambda(dim);
    for (std::size_t i = 0; i < dim; ++i) lambda(i, i) = eig.eigenvalues[i];
    const ComplexMatrix rebuilt = eig.eigenvectors * lambda * eig.eigenvectors.adjoint();
    const double scale = std::max(1.0, operator_norm(a));
    REQUIRE(operator_norm(a - rebuilt) <= 1e-10 * scale);

    const ComplexMatrix gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
    REQUIRE(operator_norm(gram - ComplexMatrix::identity(dim)) <= 1e-10);
  }
}

TEST_CASE("operator norm on pinned inputs and Hermitian agreement", "[linalg]") {
  CHECK(operator_norm(ComplexMatrix::identity(5)) == Catch::Approx(1.0).margin(1e-12));
  CHECK(operator_norm(ComplexMatrix::diagonal(std::vector<double>{-4.0, 2.0})) ==
        Catch::Approx(4.0).margin(1e-12));
  CHECK(operator_norm(two_by_two(0.0, 2.0, 0.0, 0.0)) == Catch::Approx(2.0).margin(1e-12));

  Xorshift64Star rng(303);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_hermitian(rng, 12);
    const double norm = operator_norm(a);
    const double radius = spectral_radius_hermitian(a);
    REQUIRE(std::abs(norm - radius) <= 1e-10 * std::max(1.0, norm));
  }
}

TEST_CASE("norm submultiplicativity and commutator Leibniz rule", "[linalg]") {
  Xorshift64Star rng(404);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix a = random_matrix(rng, 8);
    const ComplexMatrix b = random_matrix(rng, 8);
    const ComplexMatrix c = random_matrix(rng, 8);

    REQUIRE(operator_norm(a * b) <= operator_norm(a) * operator_norm(b) + 1e-10);

    const ComplexMatrix lhs = commutator(a, b * c);
    const ComplexMatrix rhs = commutator(a, b) * c + b * commutator(a, c);
    const double scale =
        std::max(1.0, a.frobenius_norm() * b.frobenius_norm() * c.frobenius_norm());
    REQUIRE(diff(lhs, rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("matrix exponential closed forms", "[linalg]") {
  CHECK(diff(matrix_exp(ComplexMatrix::zero(3)), ComplexMatrix::identity(3)) <= 1e-14);

  const ComplexMatrix d = matrix_exp(
      ComplexMatrix::diagonal(std::vector<double>{std::log(2.0), 0.0}));
  CHECK(diff(d, ComplexMatrix::diagonal(std::vector<double>{2.0, 1.0})) <= 1e-12);

  const double theta = 3.14159265358979323846 / 2.0;
  const ComplexMatrix rot = matrix_exp(two_by_two(0.0, theta, -theta, 0.0));
  CHECK(diff(rot, two_by_two(0.0, 1.0, -1.0, 0.0)) <= 1e-9);

  REQUIRE_THROWS_AS(matrix_exp(ComplexMatrix::diagonal(std::vector<double>{1000.0, 0.0})),
                    NumericFailureError);
}

TEST_CASE("matrix exponential matches the power series", "[linalg]") {
  Xorshift64Star rng(505);
  for (int trial = 0; trial < 5; ++trial) {
    ComplexMatrix a = random_matrix(rng, 4);
    a *= 1.5 / a.frobenius_norm();

    ComplexMatrix series = ComplexMatrix::identity(4);
    ComplexMatrix term = ComplexMatrix::identity(4);
    for (int k = 1; k <= 40; ++k) {
      term = term * a;
      term *= 1.0 / static_cast<double>(k);
      series += term;
    }
    REQUIRE(diff(matrix_exp(a), series) <= 1e-9);
  }
}

TEST_CASE("exponentials of commuting diagonals factorize", "[linalg]") {
  Xorshift64Star rng(606);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> d1(6), d2(6);
    for (std::size_t i = 0; i < 6; ++i) {
      d1[i] = rng.uniform(-2.0, 2.0);
      d2[i] = rng.uniform(-2.0, 2.0);
    }
    const ComplexMatrix a = ComplexMatrix::diagonal(d1);
    const ComplexMatrix b = ComplexMatrix::diagonal(d2);
    REQUIRE(diff(matrix_exp(a + b), matrix_exp(a) * matrix_exp(b)) <= 1e-10);
  }
}

TEST_CASE("vectorization follows the row-stacking convention", "[linalg]") {
  const ComplexMatrix rho = two_by_two({1.0, 0.0}, {2.0, 0.5}, {3.0, -0.5}, {4.0, 0.0});
  const std::vector<Complex> v = vec(rho);
  REQUIRE(v.size() == 4);
  CHECK(v[0] == rho(0, 0));
  CHECK(v[1] == rho(0, 1));
  CHECK(v[2] == rho(1, 0));
  CHECK(v[3] == rho(1, 1));
  CHECK(diff(unvec(v, 2), rho) == 0.0);
}

TEST_CASE("superoperator matrices on pinned factor pairs", "[linalg]") {
  const ComplexMatrix eye = ComplexMatrix::identity(2);
  CHECK(diff(vectorize_superoperator(eye, eye), ComplexMatrix::identity(4)) == 0.0);

  const double a = 2.5, b = -1.25;
  const ComplexMatrix d = ComplexMatrix::diagonal(std::vector<double>{a, b});
  CHECK(diff(vectorize_superoperator(d, eye),
             ComplexMatrix::diagonal(std::vector<double>{a, a, b, b})) == 0.0);
  CHECK(diff(vectorize_superoperator(eye, d),
             ComplexMatrix::diagonal(std::vector<double>{a, b, a, b})) == 0.0);

  REQUIRE_THROWS_AS(vectorize_superoperator(eye, ComplexMatrix::identity(3)),
                    InvalidInputError);
}

TEST_CASE("superoperator action matches direct products", "[linalg]") {
  Xorshift64Star rng(707);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix l = random_matrix(rng, 3);
    const ComplexMatrix r = random_matrix(rng, 3);
    const ComplexMatrix rho = random_matrix(rng, 3);

    const ComplexMatrix m = vectorize_superoperator(l, r);
    const ComplexMatrix via_vec = unvec(apply_matrix(m, vec(rho)), 3);
    REQUIRE(diff(via_vec, l * rho * r) <= 1e-12);
  }
}
