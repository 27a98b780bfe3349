#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "lindblad/lindblad.hpp"

using namespace lindblad;

namespace {

ModelSpec chain(std::size_t half_width, double hopping, KrausKind kind, double strength,
                std::vector<double> potential = {}) {
  const LatticeGeometry geom = make_geometry(half_width);
  return make_model_spec(geom, hopping, 1, std::move(potential),
                         make_kraus_family(kind, strength), 3);
}

ModelSpec random_mixed_model(Xorshift64Star& rng, int trial) {
  const std::size_t half_width = 2 + static_cast<std::size_t>(rng.uniform() * 13.0);
  const LatticeGeometry geom = make_geometry(half_width);
  std::vector<double> potential(geom.size());
  for (double& v : potential) v = rng.uniform(-1.0, 1.0);

  KrausFamily kraus;
  switch (trial % 3) {
    case 0: kraus = make_kraus_family(KrausKind::dephasing, rng.uniform(0.1, 2.0)); break;
    case 1: kraus = make_kraus_family(KrausKind::directed_jump, rng.uniform(0.1, 2.0)); break;
    default:
      kraus = make_custom_kraus({random_matrix(rng, geom.size()), random_matrix(rng, geom.size())},
                                geom);
  }
  return make_model_spec(geom, rng.uniform(-1.5, 1.5), 1, std::move(potential), kraus, 3);
}

ComplexMatrix unitary_conjugation(const ComplexMatrix& h, const ComplexMatrix& rho, double t) {
  const HermitianEigenDecomposition eig = hermitian_eigs(h);
  ComplexMatrix phases(h.dim());
  for (std::size_t i = 0; i < h.dim(); ++i)
    phases(i, i) = std::exp(Complex(0.0, -eig.eigenvalues[i] * t));
  const ComplexMatrix u = eig.eigenvectors * phases * eig.eigenvectors.adjoint();
  return u * rho * u.adjoint();
}

double trace_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (double lambda : hermitian_eigenvalues(a)) sum += std::abs(lambda);
  return sum;
}

}  // namespace

TEST_CASE("generator is zero for the empty model and traceless everywhere", "[dynamics]") {
  const ModelSpec empty = chain(2, 0.0, KrausKind::dephasing, 0.0);
  Xorshift64Star rng(808);
  CHECK(apply_generator(empty, random_density(rng, empty.geometry.size())).max_abs() == 0.0);

  for (int trial = 0; trial < 30; ++trial) {
    const ModelSpec spec = random_mixed_model(rng, trial);
    const ComplexMatrix rho = random_density(rng, spec.geometry.size());
    const Complex tr = apply_generator(spec, rho).trace();
    REQUIRE(std::abs(tr) <= 1e-12 * static_cast<double>(spec.geometry.size()));
  }
}

TEST_CASE("pure dephasing damps a single coherence at the bare rate", "[dynamics]") {
  const ModelSpec spec = chain(2, 0.0, KrausKind::dephasing, 1.0);
  const LatticeGeometry& geom = spec.geometry;
  ComplexMatrix coherence(geom.size());
  coherence(geom.index(0), geom.index(1)) = 1.0;

  const ComplexMatrix image = apply_generator(spec, coherence);
  REQUIRE((image + coherence).max_abs() == 0.0);
}

TEST_CASE("dual generator annihilates conserved observables", "[dynamics]") {
  Xorshift64Star rng(909);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelSpec spec = random_mixed_model(rng, trial);
    const ComplexMatrix eye = ComplexMatrix::identity(spec.geometry.size());
    REQUIRE(apply_dual(spec, eye).max_abs() <= 1e-13);
  }

  // diagonal observables commute with every dephasing operator
  const ModelSpec dephasing = chain(3, 0.0, KrausKind::dephasing, 0.8);
  std::vector<double> entries(dephasing.geometry.size());
  for (double& v : entries) v = rng.uniform(-2.0, 2.0);
  REQUIRE(apply_dual(dephasing, ComplexMatrix::diagonal(entries)).max_abs() <= 1e-13);
}

TEST_CASE("Schroedinger and Heisenberg pictures agree in trace pairing", "[dynamics]") {
  Xorshift64Star rng(1001);
  for (int trial = 0; trial < 100; ++trial) {
    const ModelSpec spec = random_mixed_model(rng, trial);
    const std::size_t n = spec.geometry.size();
    const ComplexMatrix a = random_matrix(rng, n);
    const ComplexMatrix rho = random_matrix(rng, n);

    const Complex forward = trace_of_product(a, apply_generator(spec, rho));
    const Complex dual = trace_of_product(apply_dual(spec, a), rho);
    REQUIRE(std::abs(forward - dual) <=
            1e-11 * std::max(1.0, a.frobenius_norm() * rho.frobenius_norm()));
  }
}

TEST_CASE("time derivative of a moving window matches finite differences", "[dynamics]") {
  const ModelSpec spec = chain(4, 1.0, KrausKind::dephasing, 1.0);
  const LatticeGeometry& geom = spec.geometry;
  const SmoothCutoff f = make_cutoff(2.4, 1.2);
  const double s = 4.0;

  const ComplexMatrix l = liouvillian_matrix(spec);
  const ComplexMatrix rho0 = gaussian_packet(geom, 0.0, 1.5, 2.0);

  const auto window = [&](double t, int k) {
    return diagonal_observable(f, make_cone_frame(3.0, 2.0, s, t), geom, k);
  };
  const auto expectation_at = [&](double t) {
    const ComplexMatrix propagator = matrix_exp(l * Complex(t, 0.0));
    const ComplexMatrix rho = unvec(apply_matrix(propagator, vec(rho0)), geom.size());
    return expectation(window(t, 0), rho);
  };

  const double t = 1.0;
  const ComplexMatrix rho_t =
      unvec(apply_matrix(matrix_exp(l * Complex(t, 0.0)), vec(rho0)), geom.size());
  const ComplexMatrix dphi_dt = window(t, 1) * (-f.speed_inner / s);
  const double exact = expectation(heisenberg_derivative(spec, window(t, 0), dphi_dt), rho_t);

  const double h = 1e-3;
  const double fd = (expectation_at(t + h) - expectation_at(t - h)) / (2.0 * h);
  const double fd_half = (expectation_at(t + h / 2.0) - expectation_at(t - h / 2.0)) / h;
  REQUIRE(std::abs(fd - exact) <= 1e-5);
  REQUIRE(std::abs(fd_half - exact) <= std::abs(fd - exact) + 1e-12);
}

TEST_CASE("zero-time evolution returns the initial state untouched", "[dynamics]") {
  const ModelSpec spec = chain(3, 1.0, KrausKind::dephasing, 1.0);
  const ComplexMatrix packet = gaussian_packet(spec.geometry, 0.0, 1.5, 2.0);
  const InitialState initial = make_initial_state(spec.geometry, std::nullopt, packet, 2.0);

  const EvolutionResult result = evolve(spec, initial, 0.0);
  REQUIRE(result.integrator == "none");
  REQUIRE(result.times.size() == 1);
  REQUIRE((result.states.front().matrix - packet).max_abs() == 0.0);
}

TEST_CASE("closed-system evolution reproduces the spectral propagator", "[dynamics]") {
  const LatticeGeometry geom = make_geometry(3);
  std::vector<double> potential{0.3, -0.2, 0.5, 0.0, -0.4, 0.1, 0.2};
  const ModelSpec spec = make_model_spec(geom, 1.0, 1, potential,
                                         make_kraus_family(KrausKind::dephasing, 0.0), 3);
  const ComplexMatrix h = build_hamiltonian(spec);
  const ComplexMatrix rho0 = gaussian_packet(geom, 0.0, 1.2, 2.5);
  const InitialState initial = make_initial_state(geom, std::nullopt, rho0, 2.5);

  const double t_final = 3.0;
  const EvolutionResult result = evolve(spec, initial, t_final);
  const ComplexMatrix expected = unitary_conjugation(h, rho0, t_final);
  REQUIRE((result.states.back().matrix - expected).max_abs() <= 1e-8);

  const double purity0 = trace_of_product(rho0, rho0).real();
  const ComplexMatrix& final_state = result.states.back().matrix;
  REQUIRE(trace_of_product(final_state, final_state).real() ==
          Catch::Approx(purity0).margin(1e-8));
}

TEST_CASE("pure dephasing evolution matches the exponential closed form", "[dynamics]") {
  const ModelSpec spec = chain(2, 0.0, KrausKind::dephasing, 0.7);
  const LatticeGeometry& geom = spec.geometry;
  Xorshift64Star rng(1203);
  const ComplexMatrix rho0 = random_density(rng, geom.size());
  const InitialState initial = make_initial_state(geom, std::nullopt, rho0, 100.0);

  const double t_final = 2.0;
  const EvolutionResult result = evolve(spec, initial, t_final);
  const double damping = std::exp(-0.7 * t_final);

  ComplexMatrix expected = rho0;
  for (std::size_t i = 0; i < geom.size(); ++i)
    for (std::size_t j = 0; j < geom.size(); ++j)
      if (i != j) expected(i, j) *= damping;
  REQUIRE((result.states.back().matrix - expected).max_abs() <= 1e-8);
}

TEST_CASE("integrator backends agree on a nine-site open chain", "[dynamics]") {
  const ModelSpec spec = chain(4, 1.0, KrausKind::dephasing, 1.0);
  const ComplexMatrix packet = gaussian_packet(spec.geometry, 0.0, 1.5, 2.0);
  const InitialState initial = make_initial_state(spec.geometry, std::nullopt, packet, 2.0);

  EvolveOptions rk4;
  rk4.backend = EvolveBackend::rk4;
  EvolveOptions exact;
  exact.backend = EvolveBackend::superop_exp;

  const EvolutionResult a = evolve(spec, initial, 5.0, rk4);
  const EvolutionResult b = evolve(spec, initial, 5.0, exact);
  REQUIRE(a.integrator == "rk4");
  REQUIRE(b.integrator == "superop_exp");
  for (std::size_t i = 0; i < a.states.size(); ++i)
    REQUIRE((a.states[i].matrix - b.states[i].matrix).max_abs() <= 1e-6);
}

TEST_CASE("propagation is a semigroup and respects the state simplex", "[dynamics]") {
  const ModelSpec spec = chain(3, 0.8, KrausKind::directed_jump, 0.6);
  const ComplexMatrix packet = gaussian_packet(spec.geometry, 0.0, 1.5, 2.0);
  const InitialState initial = make_initial_state(spec.geometry, std::nullopt, packet, 2.0);

  EvolveOptions opts;
  opts.backend = EvolveBackend::superop_exp;

  const EvolutionResult leg1 = evolve(spec, initial, 3.0, opts);
  const InitialState midpoint =
      make_initial_state(spec.geometry, std::nullopt, leg1.states.back().matrix, 100.0);
  const EvolutionResult leg2 = evolve(spec, midpoint, 2.0, opts);
  const EvolutionResult direct = evolve(spec, initial, 5.0, opts);
  REQUIRE((leg2.states.back().matrix - direct.states.back().matrix).max_abs() <= 1e-9);

  REQUIRE(direct.trace_drift <= 1e-10);
  REQUIRE(direct.min_eigenvalue >= -1e-8);
  for (const DensityMatrix& state : direct.states)
    REQUIRE(trace_norm(state.matrix) <= trace_norm(packet) + 1e-8);
}

TEST_CASE("stationary solver flags degeneracy and finds absorbing states", "[dynamics]") {
  // every diagonal state is fixed by pure dephasing
  const StationaryResult degenerate = stationary_state(chain(1, 0.0, KrausKind::dephasing, 1.0));
  CHECK(degenerate.degenerate);

  // hopping-free directed jumps drain everything into the terminal site
  const ModelSpec drain = chain(2, 0.0, KrausKind::directed_jump, 1.0);
  const LatticeGeometry& geom = drain.geometry;
  const StationaryResult fixed = stationary_state(drain);
  REQUIRE(fixed.state.has_value());
  REQUIRE_FALSE(fixed.degenerate);
  REQUIRE(fixed.residual <= 1e-9);

  ComplexMatrix absorbing(geom.size());
  absorbing(geom.index(-2), geom.index(-2)) = 1.0;
  REQUIRE((fixed.state->matrix - absorbing).max_abs() <= 1e-9);

  const ComplexMatrix packet = gaussian_packet(geom, 0.0, 1.5, 2.0);
  const InitialState initial = make_initial_state(geom, std::nullopt, packet, 2.0);
  const EvolutionResult result = evolve(drain, initial, 40.0);
  REQUIRE((result.states.back().matrix - absorbing).max_abs() <= 1e-6);
}

TEST_CASE("initial states must vanish outside the seeding radius", "[dynamics]") {
  const LatticeGeometry geom = make_geometry(4);
  ComplexMatrix outside(geom.size());
  outside(geom.index(3), geom.index(3)) = 1.0;
  REQUIRE_THROWS_AS(make_initial_state(geom, std::nullopt, outside, 2.0), InvalidInputError);

  // the same matrix is fine once the radius covers it
  const InitialState wide = make_initial_state(geom, std::nullopt, outside, 100.0);
  REQUIRE((state_matrix(wide) - outside).max_abs() == 0.0);
}
