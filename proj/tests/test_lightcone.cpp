#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <optional>
#include <vector>

#include "lindblad/lindblad.hpp"

using namespace lindblad;

namespace {

ModelSpec chain(std::size_t half_width, double hopping, KrausKind kind, double strength) {
  const LatticeGeometry geom = make_geometry(half_width);
  return make_model_spec(geom, hopping, 1, {}, make_kraus_family(kind, strength), 3);
}

}  // namespace

TEST_CASE("velocity operator degenerate regimes", "[lightcone]") {
  const VelocityReport frozen = velocity_operator(chain(6, 0.0, KrausKind::dephasing, 1.0));
  CHECK(frozen.gamma.max_abs() == 0.0);
  CHECK(frozen.kappa == 0.0);
  CHECK(frozen.hamiltonian_speed == 0.0);

  const VelocityReport closed = velocity_operator(chain(6, 1.0, KrausKind::dephasing, 0.0));
  CHECK(closed.environment_shift == 0.0);
  CHECK(closed.kappa == closed.hamiltonian_speed);

  // dephasing never shifts the speed, at any coupling
  const VelocityReport dephased = velocity_operator(chain(6, 1.0, KrausKind::dephasing, 3.7));
  CHECK(dephased.environment_shift == 0.0);
}

TEST_CASE("velocity operator matches the frozen reference speeds", "[lightcone]") {
  const VelocityReport m60 = velocity_operator(chain(60, 1.0, KrausKind::dephasing, 1.0));
  CHECK(m60.kappa == Catch::Approx(1.9957314477395398).margin(1e-9));
  CHECK(m60.dual_deviation <= 1e-12);

  const VelocityReport m120 = velocity_operator(chain(120, 1.0, KrausKind::dephasing, 1.0));
  CHECK(m120.kappa == Catch::Approx(1.9989132958354305).margin(1e-9));

  const VelocityReport jump = velocity_operator(chain(60, 1.0, KrausKind::directed_jump, 1.0));
  CHECK(jump.kappa == Catch::Approx(2.995098735002962).margin(1e-9));
  CHECK(jump.environment_shift > 0.99);
}

TEST_CASE("velocity operator agrees across construction paths", "[lightcone]") {
  // the specialized directed-jump branch against the generic Kraus formula
  const LatticeGeometry geom = make_geometry(5);
  const ModelSpec direct = make_model_spec(geom, 0.8, 1, {},
                                           make_kraus_family(KrausKind::directed_jump, 0.6), 3);
  const ModelSpec generic = make_model_spec(
      geom, 0.8, 1, {}, make_custom_kraus(materialize_operators(direct.kraus, geom), geom), 3);

  const VelocityReport a = velocity_operator(direct);
  const VelocityReport b = velocity_operator(generic);
  REQUIRE((a.gamma - b.gamma).max_abs() <= 1e-12);
  REQUIRE(a.kappa == Catch::Approx(b.kappa).margin(1e-12));
  REQUIRE(a.kappa == Catch::Approx(operator_norm(a.gamma)).margin(1e-10));

  Xorshift64Star rng(515);
  for (int trial = 0; trial < 20; ++trial) {
    const ModelSpec spec = make_model_spec(
        geom, rng.uniform(-1.0, 1.0), 1, {},
        make_custom_kraus({random_matrix(rng, geom.size())}, geom), 3);
    REQUIRE(velocity_operator(spec).dual_deviation <= 1e-12);
  }
}

TEST_CASE("constant potentials leave the maximal speed unchanged", "[lightcone]") {
  const LatticeGeometry geom = make_geometry(8);
  const KrausFamily kraus = make_kraus_family(KrausKind::directed_jump, 0.9);
  const ModelSpec flat = make_model_spec(geom, 1.0, 1, {}, kraus, 3);
  std::vector<double> lifted(geom.size(), 1.7);
  const ModelSpec shifted = make_model_spec(geom, 1.0, 1, lifted, kraus, 3);

  const VelocityReport a = velocity_operator(flat);
  const VelocityReport b = velocity_operator(shifted);
  REQUIRE((a.gamma - b.gamma).max_abs() <= 1e-15);
  REQUIRE(a.kappa == Catch::Approx(b.kappa).margin(1e-12));
}

TEST_CASE("leakage measures exactly the mass beyond the radius", "[lightcone]") {
  const LatticeGeometry geom = make_geometry(6);
  Xorshift64Star rng(616);
  const ComplexMatrix rho = random_density(rng, geom.size());
  REQUIRE(leakage(rho, 1.0, geom) == Catch::Approx(rho.trace().real()).margin(1e-12));

  const ComplexMatrix packet = gaussian_packet(geom, 0.0, 1.5, 2.0);
  CHECK(leakage(packet, 2.0, geom) == 0.0);

  ComplexMatrix point(geom.size());
  point(geom.index(3), geom.index(3)) = 1.0;
  CHECK(leakage(point, 3.0, geom) == 1.0);   // <3> = sqrt(10) lies beyond 3
  CHECK(leakage(point, 3.2, geom) == 0.0);   // ... but not beyond 3.2

  double previous = leakage(rho, 1.0, geom);
  for (double eta = 1.5; eta <= 6.5; eta += 0.5) {
    const double value = leakage(rho, eta, geom);
    REQUIRE(value <= previous + 1e-15);
    previous = value;
  }

  REQUIRE_THROWS_AS(leakage(rho, 0.5, geom), InvalidInputError);
  ComplexMatrix bad(geom.size());
  bad(geom.index(4), geom.index(4)) = -1e-6;
  REQUIRE_THROWS_AS(leakage(bad, 2.0, geom), NumericFailureError);
}

TEST_CASE("front tracker keeps the earliest crossing and a clean baseline", "[lightcone]") {
  const LatticeGeometry geom = make_geometry(2);
  ComplexMatrix out(geom.size());
  out(geom.index(2), geom.index(2)) = 1.0;

  FrontTracker late({2.0}, geom);
  late.observe(0.0, ComplexMatrix(geom.size()));
  late.observe(1.0, out);
  FrontTracker early({2.0}, geom);
  early.observe(0.5, out);
  late.merge(early);
  REQUIRE(late.crossings().size() == 1);
  REQUIRE(late.crossings().front().time == 0.5);

  // a stationary background is invisible to the tracker
  std::vector<double> baseline(geom.size(), 0.2);
  ComplexMatrix background(geom.size());
  for (std::size_t i = 0; i < geom.size(); ++i) background(i, i) = 0.2;
  FrontTracker tracked({2.0}, geom, baseline);
  tracked.observe(1.0, background);
  CHECK(tracked.crossings().empty());
  tracked.observe(2.0, background + out);
  CHECK(tracked.crossings().size() == 1);

  ComplexMatrix depleted = background;
  depleted(0, 0) = 0.1;
  REQUIRE_THROWS_AS(tracked.observe(3.0, depleted), NumericFailureError);
}

TEST_CASE("measured front speeds stay below the operator-norm bound", "[lightcone]") {
  // the threshold front needs room to settle: radii all the way out to the
  // wall, and enough time for the middle radii to carry the fit
  for (KrausKind kind : {KrausKind::dephasing, KrausKind::directed_jump}) {
    const ModelSpec spec = chain(60, 1.0, kind, 1.0);
    std::vector<double> grid;
    const double lo = 4.0, hi = position_weight(spec.geometry.half_width) - 1.0;
    for (int k = 0; k < 24; ++k) grid.push_back(lo + (hi - lo) * k / 23.0);

    const double kappa = velocity_operator(spec).kappa;
    const ComplexMatrix packet = gaussian_packet(spec.geometry, 0.0, 1.5, 2.0);
    const InitialState initial = make_initial_state(spec.geometry, std::nullopt, packet, 2.0);

    const FrontReport front = measure_front_speed(spec, initial, 20.0, grid);
    REQUIRE(front.fit_ok);
    REQUIRE(front.speed > 0.0);
    REQUIRE(front.speed <= 1.2 * kappa);
  }
}

TEST_CASE("cone experiment certifies the superpolynomial edge decay", "[lightcone]") {
  const ModelSpec spec = chain(60, 1.0, KrausKind::dephasing, 1.0);
  const double kappa = velocity_operator(spec).kappa;
  const SmoothCutoff f = make_cutoff(1.5 * kappa, 1.2 * kappa);
  const ComplexMatrix packet = gaussian_packet(spec.geometry, 0.0, 1.5, 2.0);
  const InitialState initial = make_initial_state(spec.geometry, std::nullopt, packet, 2.0);
  const std::vector<double> scales{4.0, 5.656854249492381, 8.0, 11.313708498984761, 16.0};

  LightconeOptions opts;
  opts.frame_a = 3.0;
  const LightconeReport report = run_lightcone_experiment(spec, f, initial, scales, opts);

  REQUIRE(report.transport.front.run_valid);
  REQUIRE(report.cone_fit.slope <= -1.5);
  REQUIRE(report.cone_fit.r_squared >= 0.9);
  REQUIRE(report.edge_fit.slope <= -1.5);
  REQUIRE(report.edge_fit.r_squared >= 0.9);
  if (report.transport.front.fit_ok)
    REQUIRE(report.transport.front.speed <= 1.2 * kappa);

  REQUIRE(report.transport.eta_values.size() == 24);
  REQUIRE(report.transport.rows.size() == scales.size() * 24);
  for (std::size_t si = 0; si < scales.size(); ++si)
    for (std::size_t k = 0; k < 24; ++k)
      REQUIRE(report.transport.rows[si * 24 + k].f_expectation ==
              report.cone_expectations[si]);

  for (std::size_t si = 1; si < scales.size(); ++si)
    REQUIRE(report.cone_expectations[si] <= report.cone_expectations[si - 1]);
}

TEST_CASE("cone experiment rejects unusable inputs", "[lightcone]") {
  const ModelSpec spec = chain(30, 1.0, KrausKind::dephasing, 1.0);
  const ComplexMatrix packet = gaussian_packet(spec.geometry, 0.0, 1.5, 2.0);
  const InitialState initial = make_initial_state(spec.geometry, std::nullopt, packet, 2.0);

  // inner speed below kappa ~= 2
  REQUIRE_THROWS_AS(
      run_lightcone_experiment(spec, make_cutoff(3.0, 1.0), initial, {2.0, 4.0}),
      InvalidInputError);
  const SmoothCutoff f = make_cutoff(4.0, 2.5);
  REQUIRE_THROWS_AS(run_lightcone_experiment(spec, f, initial, {2.0}), InvalidInputError);
  REQUIRE_THROWS_AS(run_lightcone_experiment(spec, f, initial, {4.0, 2.0}), InvalidInputError);
  // cone edge would cross the wall-clearance band
  REQUIRE_THROWS_AS(run_lightcone_experiment(spec, f, initial, {2.0, 20.0}), InvalidInputError);
}

TEST_CASE("window balance holds along the evolution", "[lightcone]") {
  const ModelSpec spec = chain(24, 1.0, KrausKind::dephasing, 1.0);
  const ComplexMatrix packet = gaussian_packet(spec.geometry, 0.0, 1.5, 2.0);
  const InitialState initial = make_initial_state(spec.geometry, std::nullopt, packet, 2.0);
  const SmoothCutoff f = make_cutoff(2.5, 0.5);

  const BasicEqualityReport coarse = verify_basic_equality(spec, f, initial, 3.0, 4.0, 6.0, 121);
  REQUIRE(coarse.residual <= 1e-6);

  EvolveOptions fine_opts;
  fine_opts.dt = coarse.dt_used / 2.0;
  const BasicEqualityReport fine =
      verify_basic_equality(spec, f, initial, 3.0, 4.0, 6.0, 241, fine_opts);
  REQUIRE(fine.residual <= coarse.residual / 2.0);

  REQUIRE_THROWS_AS(verify_basic_equality(spec, f, initial, 3.0, 4.0, 6.0, 120),
                    InvalidInputError);
  REQUIRE_THROWS_AS(verify_basic_equality(spec, f, initial, 3.0, 4.0, 6.0, 1),
                    InvalidInputError);
}

TEST_CASE("monotonicity residual vanishes when the window commutes", "[lightcone]") {
  const SmoothCutoff f = make_cutoff(2.0, 1.0);

  const RmeReport trivial = verify_rme(chain(10, 0.0, KrausKind::dephasing, 0.0), f, 3.0, 2.0,
                                       {2.0, 4.0});
  CHECK(trivial.all_zero);
  CHECK(trivial.pass);
  for (double eig : trivial.residual_max_eigs) CHECK(std::abs(eig) <= 1e-14);

  const RmeReport dephased = verify_rme(chain(10, 0.0, KrausKind::dephasing, 1.0), f, 3.0, 2.0,
                                        {2.0, 4.0});
  CHECK(dephased.all_zero);
  CHECK(dephased.pass);
}

TEST_CASE("monotonicity residual decays at second order in the scale", "[lightcone]") {
  const ModelSpec spec = chain(60, 1.0, KrausKind::dephasing, 1.0);
  const double kappa = velocity_operator(spec).kappa;
  const SmoothCutoff f = make_cutoff(1.5 * kappa, 1.2 * kappa);

  const RmeReport report = verify_rme(spec, f, 3.0, 2.0, {8.0, 16.0, 32.0});
  REQUIRE(report.pass);
  REQUIRE_FALSE(report.all_zero);
  REQUIRE(report.fit.has_value());
  REQUIRE(report.fit->slope <= -1.5);
  REQUIRE(report.c2_estimate > 0.0);
  for (std::size_t i = 1; i < report.residual_pos.size(); ++i)
    REQUIRE(report.residual_pos[i] < report.residual_pos[i - 1]);

  // inner speed below kappa is rejected, as is a window leaving the lattice
  REQUIRE_THROWS_AS(verify_rme(spec, make_cutoff(3.0, 1.0), 3.0, 2.0, {8.0}), InvalidInputError);
  REQUIRE_THROWS_AS(verify_rme(spec, f, 3.0, 2.0, {8.0, 64.0}), InvalidInputError);
}

TEST_CASE("translating the window away from the packet flattens the residual", "[lightcone]") {
  const ModelSpec spec = chain(120, 1.0, KrausKind::dephasing, 1.0);
  const double kappa = velocity_operator(spec).kappa;

  // fixed window width, increasing inner speed: the support sits on ever
  // flatter parts of the profile, so the worst eigenvalue shrinks
  std::vector<double> residuals;
  for (double factor : {1.2, 1.8, 2.4}) {
    const SmoothCutoff f = make_cutoff(factor * kappa + kappa, factor * kappa);
    const RmeReport report = verify_rme(spec, f, 3.0, 2.0, {16.0});
    REQUIRE(report.pass);
    residuals.push_back(report.residual_max_eigs.front());
  }
  REQUIRE(residuals[0] > 0.0);
  REQUIRE(residuals[1] < residuals[0]);
  REQUIRE(residuals[2] < residuals[1]);
}

TEST_CASE("commutator expansion remainder is exactly zero in trivial cases", "[lightcone]") {
  const LatticeGeometry geom = make_geometry(6);
  const SmoothCutoff f = make_cutoff(3.0, 1.0);
  Xorshift64Star rng(717);

  std::vector<double> entries(geom.size());
  for (double& v : entries) v = rng.uniform(-2.0, 2.0);
  const ExpansionReport diag =
      verify_commutator_expansion(ComplexMatrix::diagonal(entries), f, geom, 1.5, {2.0, 4.0}, 3);
  CHECK(diag.pass);
  CHECK(diag.bn_norm == 0.0);
  for (double e : diag.errors) CHECK(e == 0.0);

  // window placed so the cutoff is saturated on every site
  const ModelSpec spec = make_model_spec(geom, 1.0, 1, {},
                                         make_kraus_family(KrausKind::dephasing, 0.0), 3);
  const ExpansionReport saturated = verify_commutator_expansion(
      build_hamiltonian(spec), f, geom, -10.0, {1.0, 2.0}, 2);
  CHECK(saturated.pass);
  for (double e : saturated.errors) CHECK(e == 0.0);
}

TEST_CASE("commutator expansion remainder decays at the truncation order", "[lightcone]") {
  const LatticeGeometry geom = make_geometry(60);
  const ModelSpec spec = make_model_spec(geom, 1.0, 1, {},
                                         make_kraus_family(KrausKind::dephasing, 0.0), 3);
  const ComplexMatrix h = build_hamiltonian(spec);
  const SmoothCutoff f = make_cutoff(3.0, 1.0);
  const std::vector<double> scales{4.0, 8.0, 16.0, 32.0};

  for (int order : {2, 3}) {
    const ExpansionReport report =
        verify_commutator_expansion(h, f, geom, 1.5, scales, order);
    REQUIRE(report.pass);
    REQUIRE(report.fit.slope <= -(static_cast<double>(order) - 0.5));
    REQUIRE(report.fit.r_squared >= 0.98);
    REQUIRE(report.bn_norm > 0.0);
    REQUIRE(report.order_constant > 0.0);
    for (std::size_t i = 1; i < report.errors.size(); ++i)
      REQUIRE(report.errors[i] < report.errors[i - 1]);
  }

  const ExpansionSweep sweep = verify_expansion_offsets(h, f, geom, {1.5, 4.5}, scales, 2);
  REQUIRE(sweep.pass);
  REQUIRE(sweep.slope_spread <= 0.3);

  REQUIRE_THROWS_AS(verify_commutator_expansion(h, f, geom, 1.5, scales, 1), InvalidInputError);
  REQUIRE_THROWS_AS(verify_commutator_expansion(h, f, geom, 1.5, scales, 9), InvalidInputError);
  REQUIRE_THROWS_AS(verify_commutator_expansion(h, f, geom, 1.5, {4.0}, 2), InvalidInputError);
  REQUIRE_THROWS_AS(
      verify_commutator_expansion(ComplexMatrix::identity(3), f, geom, 1.5, scales, 2),
      InvalidInputError);
}

TEST_CASE("random-environment scan never sees a speed below the closed system", "[lightcone]") {
  ScanConfig config;
  config.geometry = make_geometry(4);
  config.seed = 99;

  const ConjectureReport report = conjecture_scan(config, 10);
  REQUIRE(report.rows.size() == 10);
  REQUIRE(report.violations == 0);
  REQUIRE(report.min_shift >= -1e-9);
  for (const ScanRow& row : report.rows)
    REQUIRE(row.kappa >= row.hamiltonian_speed - 1e-9);

  const ConjectureReport replay = conjecture_scan(config, 10);
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    REQUIRE(replay.rows[i].kappa == report.rows[i].kappa);
    REQUIRE(replay.rows[i].environment_shift == report.rows[i].environment_shift);
  }

  config.strength = 0.0;
  REQUIRE_THROWS_AS(conjecture_scan(config, 10), InvalidInputError);
  config.strength = 1.0;
  REQUIRE_THROWS_AS(conjecture_scan(config, 0), InvalidInputError);
}
