#pragma once

#include <cmath>
#include <functional>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "lindblad/cutoffs.hpp"
#include "lindblad/dynamics.hpp"
#include "lindblad/fit.hpp"
#include "lindblad/model.hpp"
#include "lindblad/rng.hpp"
#include "lindblad/tolerances.hpp"

// The maximal-speed machinery: the velocity operator
//   gamma = i[H,<x>] + (1/2) sum_j (W_j^+ [<x>, W_j] + [W_j^+, <x>] W_j),
// its norm kappa, beyond-cone leakage, and the verification experiments for
// the propagation estimates built on top of them.

namespace lindblad {

struct VelocityReport {
  ComplexMatrix gamma;
  double kappa = 0.0;             // ||gamma||
  double hamiltonian_speed = 0.0; // ||i[H, <x>]||
  double environment_shift = 0.0; // kappa - hamiltonian_speed
  double dual_deviation = 0.0;    // max |gamma - L'<x>|, cross-check of two builds
};

inline VelocityReport velocity_operator(const ModelSpec& spec) {
  const std::size_t n = spec.geometry.size();
  const ComplexMatrix x = weight_matrix(spec.geometry);
  const ComplexMatrix h = build_hamiltonian(spec);
  ComplexMatrix gamma_h = commutator(h, x);
  gamma_h *= Complex(0.0, 1.0);

  ComplexMatrix gamma = gamma_h;
  const std::vector<double> w = position_weights(spec.geometry);
  switch (spec.kraus.kind) {
    case KrausKind::dephasing:
      break;  // diagonal jumps commute with <x>
    case KrausKind::directed_jump:
      for (std::size_t i = 0; i + 1 < n; ++i)
        gamma(i + 1, i + 1) += spec.kraus.strength * (w[i] - w[i + 1]);
      break;
    case KrausKind::custom:
      for (const auto& wj : spec.kraus.operators) {
        const ComplexMatrix wd = wj.adjoint();
        ComplexMatrix term = wd * commutator(x, wj) + commutator(wd, x) * wj;
        term *= 0.5;
        gamma += term;
      }
      break;
  }
  gamma.symmetrize();

  VelocityReport report;
  report.dual_deviation = (gamma - apply_dual(spec, x)).max_abs();
  report.kappa = spectral_radius_hermitian(gamma);
  gamma_h.symmetrize();
  report.hamiltonian_speed = spectral_radius_hermitian(gamma_h);
  report.environment_shift = report.kappa - report.hamiltonian_speed;
  report.gamma = std::move(gamma);
  return report;
}

// Tr(chi_eta rho): probability mass at <x> >= eta. Small negative values
// from roundoff are clamped; anything below the clamp is an error.
inline double leakage(const ComplexMatrix& rho, double eta, const LatticeGeometry& geometry) {
  if (rho.dim() != geometry.size()) throw InvalidInputError("leakage: dimension mismatch");
  if (!(eta >= 1.0)) throw InvalidInputError("leakage: eta must be >= 1");
  double mass = 0.0;
  for (std::size_t i = 0; i < geometry.size(); ++i)
    if (position_weight(geometry.site(i)) >= eta) mass += rho(i, i).real();
  if (mass < tol::leakage_clamp)
    throw NumericFailureError("leakage: negative mass " + std::to_string(mass));
  return std::max(mass, 0.0);
}

struct FrontCrossing {
  double eta = 0.0;
  double time = 0.0;
};

// Watches sampled states for the first time the leakage at each radius
// reaches the front threshold, and for mass near the hard walls. When the
// initial state carries a stationary background, that background's diagonal
// is passed as the baseline so the tracker follows the moving part only.
class FrontTracker {
 public:
  FrontTracker(std::vector<double> grid, const LatticeGeometry& geometry,
               std::vector<double> baseline_diag = {})
      : grid_(std::move(grid)), geometry_(geometry), baseline_(std::move(baseline_diag)),
        crossing_times_(grid_.size(), -1.0) {
    if (!baseline_.empty() && baseline_.size() != geometry_.size())
      throw InvalidInputError("FrontTracker: baseline dimension mismatch");
  }

  void observe(double time, const ComplexMatrix& rho) {
    const std::size_t n = geometry_.size();
    std::vector<double> moving(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = rho(i, i).real() - (baseline_.empty() ? 0.0 : baseline_[i]);
      if (d < tol::leakage_clamp)
        throw NumericFailureError("FrontTracker: negative moving mass " + std::to_string(d));
      moving[i] = std::max(d, 0.0);
    }
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      if (crossing_times_[k] >= 0.0) continue;
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (position_weight(geometry_.site(i)) >= grid_[k]) mass += moving[i];
      if (mass >= tol::front_threshold) crossing_times_[k] = time;
    }
    double wall = 0.0;
    const std::size_t guard = std::min<std::size_t>(tol::front_boundary_clearance, n);
    for (std::size_t i = 0; i < guard; ++i) wall += moving[i] + moving[n - 1 - i];
    boundary_mass_max_ = std::max(boundary_mass_max_, wall);
  }

  // earliest-crossing merge with another tracker over the same grid
  void merge(const FrontTracker& other) {
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      const double t = other.crossing_times_[k];
      if (t < 0.0) continue;
      if (crossing_times_[k] < 0.0 || t < crossing_times_[k]) crossing_times_[k] = t;
    }
    boundary_mass_max_ = std::max(boundary_mass_max_, other.boundary_mass_max_);
  }

  std::vector<FrontCrossing> crossings() const {
    std::vector<FrontCrossing> out;
    for (std::size_t k = 0; k < grid_.size(); ++k)
      if (crossing_times_[k] >= 0.0) out.push_back({grid_[k], crossing_times_[k]});
    return out;
  }

  double boundary_mass_max() const { return boundary_mass_max_; }

 private:
  std::vector<double> grid_;
  LatticeGeometry geometry_;
  std::vector<double> baseline_;
  std::vector<double> crossing_times_;
  double boundary_mass_max_ = 0.0;
};

// Diagonal of the stationary background, or empty when there is none.
inline std::vector<double> baseline_diagonal(const InitialState& initial) {
  if (!initial.stationary_part) return {};
  const ComplexMatrix& m = initial.stationary_part->matrix;
  std::vector<double> diag(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) diag[i] = m(i, i).real();
  return diag;
}

struct FrontReport {
  std::vector<FrontCrossing> crossings;
  double speed = 0.0;
  bool fit_ok = false;
  LinearFit fit;
  double boundary_mass_max = 0.0;
  bool run_valid = false;  // front never reached the wall-clearance band
};

// Least-squares radius-vs-time slope over the middle 60% of crossed radii.
inline FrontReport fit_front(const FrontTracker& tracker) {
  FrontReport report;
  report.crossings = tracker.crossings();
  report.boundary_mass_max = tracker.boundary_mass_max();
  report.run_valid = tracker.boundary_mass_max() < tol::front_threshold;
  std::vector<FrontCrossing> moved;
  for (const auto& c : report.crossings)
    if (c.time > 0.0) moved.push_back(c);  // radii already past threshold at t=0 carry no signal
  const std::size_t k = moved.size();
  if (k < 4) return report;
  const auto lo = static_cast<std::size_t>(std::floor(0.2 * static_cast<double>(k)));
  const auto hi = static_cast<std::size_t>(std::ceil(0.8 * static_cast<double>(k)));
  std::vector<double> ts, etas;
  for (std::size_t i = lo; i < hi; ++i) {
    ts.push_back(moved[i].time);
    etas.push_back(moved[i].eta);
  }
  if (ts.size() < 2) return report;
  report.fit = fit_linear(ts, etas);
  report.speed = report.fit.slope;
  report.fit_ok = true;
  return report;
}

inline FrontReport measure_front_speed(const ModelSpec& spec, const InitialState& initial,
                                       double t_final, const std::vector<double>& eta_grid,
                                       EvolveOptions opts = {}) {
  FrontTracker tracker(eta_grid, spec.geometry, baseline_diagonal(initial));
  opts.keep_states = false;
  opts.observer = [&](std::size_t, double t, const ComplexMatrix& rho) {
    tracker.observe(t, rho);
  };
  evolve(spec, initial, t_final, opts);
  return fit_front(tracker);
}

struct LeakageRow {
  double s = 0.0;
  double t = 0.0;
  double eta = 0.0;
  double value = 0.0;
  double f_expectation = 0.0;  // <f_ts>_t for this run's s, repeated across eta rows
};

struct TransportReport {
  std::vector<double> eta_values;
  std::vector<LeakageRow> rows;  // one row per (s, eta)
  double fitted_exponent = 0.0;  // cone-edge leakage decay in s
  FrontReport front;
};

struct LightconeReport {
  VelocityReport velocity;
  TransportReport transport;
  std::vector<double> s_values;
  std::vector<double> cone_expectations;  // <f_ts>_{t=s}
  std::vector<double> edge_leakages;      // chi_{a+cs} at t=s, stationary-subtracted
  ScalingFit cone_fit;
  ScalingFit edge_fit;
  double constant_estimate = 0.0;  // C with leakage ~ C s^slope
};

struct LightconeOptions {
  double frame_a = 0.0;            // <= 0 picks radius_b + 1
  std::vector<double> eta_grid;    // empty picks an automatic grid
  std::size_t samples_per_run = 65;
  int threads = 1;
  EvolveOptions evolve;
};

namespace detail {

struct ConeRun {
  ComplexMatrix final_state;
  FrontTracker tracker;
};

inline ConeRun run_cone_leg(const ModelSpec& spec, const InitialState& initial, double s,
                            const std::vector<double>& grid, const LightconeOptions& opts) {
  ConeRun leg{ComplexMatrix(), FrontTracker(grid, spec.geometry, baseline_diagonal(initial))};
  EvolveOptions eopts = opts.evolve;
  eopts.sample_count = opts.samples_per_run;
  eopts.keep_states = false;
  const std::size_t last = opts.samples_per_run - 1;
  eopts.observer = [&](std::size_t index, double t, const ComplexMatrix& rho) {
    leg.tracker.observe(t, rho);
    if (index == last) leg.final_state = rho;
  };
  evolve(spec, initial, s, eopts);
  return leg;
}

}  // namespace detail

// Cone experiment: evolve to t = s for each s, measure the smooth cutoff
// expectation and the sharp leakage at the cone edge eta(s) = a + c s, and
// fit both against s on log-log axes.
inline LightconeReport run_lightcone_experiment(const ModelSpec& spec, const SmoothCutoff& f,
                                                const InitialState& initial,
                                                const std::vector<double>& s_values,
                                                LightconeOptions opts = {}) {
  if (s_values.size() < 2)
    throw InvalidInputError("run_lightcone_experiment: need at least two scales");
  for (std::size_t i = 1; i < s_values.size(); ++i)
    if (!(s_values[i] > s_values[i - 1]))
      throw InvalidInputError("run_lightcone_experiment: scales must be strictly increasing");

  LightconeReport report;
  report.velocity = velocity_operator(spec);
  if (!(f.speed_inner > report.velocity.kappa))
    throw InvalidInputError("run_lightcone_experiment: need c' > kappa = " +
                            std::to_string(report.velocity.kappa));

  const double a = opts.frame_a > 0.0 ? opts.frame_a : initial.radius_b + 1.0;
  if (!(a > initial.radius_b))
    throw InvalidInputError("run_lightcone_experiment: frame radius must exceed radius_b");
  const double w_max = position_weight(spec.geometry.half_width);
  const double w_guard =
      position_weight(spec.geometry.half_width - tol::front_boundary_clearance);
  const double s_max = s_values.back();
  if (a + f.speed_outer * s_max > w_guard)
    throw InvalidInputError(
        "run_lightcone_experiment: cone edge leaves the lattice; enlarge half_width");

  std::vector<double> grid = opts.eta_grid;
  if (grid.empty()) {
    const double lo = a + 1.0, hi = w_max - 1.0;
    for (int k = 0; k < 24; ++k) grid.push_back(lo + (hi - lo) * k / 23.0);
  }

  std::vector<detail::ConeRun> legs;
  legs.reserve(s_values.size());
  if (opts.threads > 1) {
    std::vector<std::future<detail::ConeRun>> futures;
    for (double s : s_values)
      futures.push_back(std::async(std::launch::async, [&, s] {
        return detail::run_cone_leg(spec, initial, s, grid, opts);
      }));
    for (auto& fu : futures) legs.push_back(fu.get());
  } else {
    for (double s : s_values) legs.push_back(detail::run_cone_leg(spec, initial, s, grid, opts));
  }

  FrontTracker merged(grid, spec.geometry, baseline_diagonal(initial));
  for (const auto& leg : legs) merged.merge(leg.tracker);
  report.transport.front = fit_front(merged);
  report.transport.eta_values = grid;

  const std::optional<DensityMatrix>& stat = initial.stationary_part;
  report.s_values = s_values;
  for (std::size_t si = 0; si < s_values.size(); ++si) {
    const double s = s_values[si];
    const ComplexMatrix& rho = legs[si].final_state;
    const ConeFrame frame = make_cone_frame(a, initial.radius_b, s, s);
    const std::vector<double> mu = cone_coordinate(frame, f.speed_inner, spec.geometry);
    double fexp = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const double fv = cutoff_value(f, mu[i]);
      fexp += fv * rho(i, i).real();
      if (stat) fexp -= fv * stat->matrix(i, i).real();
    }
    report.cone_expectations.push_back(std::max(fexp, 0.0));

    const double eta_s = a + f.speed_outer * s;
    double edge = leakage(rho, eta_s, spec.geometry);
    if (stat) edge -= leakage(stat->matrix, eta_s, spec.geometry);
    report.edge_leakages.push_back(std::max(edge, 0.0));

    for (double eta : grid) {
      double value = leakage(rho, eta, spec.geometry);
      report.transport.rows.push_back({s, s, eta, value, report.cone_expectations.back()});
    }
  }

  report.cone_fit = fit_power_law(s_values, report.cone_expectations);
  report.edge_fit = fit_power_law(s_values, report.edge_leakages);
  report.transport.fitted_exponent = report.edge_fit.slope;
  report.constant_estimate = std::exp(report.edge_fit.intercept);
  return report;
}

struct BasicEqualityReport {
  double initial_value = 0.0;  // <Phi_0>_0
  double final_value = 0.0;    // <Phi_t>_t
  double integral = 0.0;       // Simpson quadrature of <D Phi_r>_r
  double residual = 0.0;
  std::size_t nodes = 0;
  double dt_used = 0.0;
};

// Checks <Phi_t>_t - int_0^t <D Phi_r>_r dr = <Phi_0>_0 for the moving
// cutoff observable Phi_r = f((<x> - a - c' r)/s).
inline BasicEqualityReport verify_basic_equality(const ModelSpec& spec, const SmoothCutoff& f,
                                                 const InitialState& initial, double frame_a,
                                                 double s, double t_final,
                                                 std::size_t nodes = 121,
                                                 EvolveOptions opts = {}) {
  if (nodes < 3 || nodes % 2 == 0)
    throw InvalidInputError("verify_basic_equality: Simpson rule needs an odd node count >= 3");
  Generator gen(spec);
  std::vector<double> values(nodes, 0.0);
  BasicEqualityReport report;
  report.nodes = nodes;

  opts.sample_count = nodes;
  opts.keep_states = false;
  opts.observer = [&](std::size_t index, double t, const ComplexMatrix& rho) {
    const ConeFrame frame = make_cone_frame(frame_a, initial.radius_b, s, t);
    const std::vector<double> mu = cone_coordinate(frame, f.speed_inner, spec.geometry);
    ComplexMatrix phi(spec.geometry.size());
    for (std::size_t i = 0; i < mu.size(); ++i) phi(i, i) = cutoff_value(f, mu[i]);
    ComplexMatrix dphi(spec.geometry.size());
    gen.apply_dual(phi, dphi);
    double node = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const Complex d = dphi(i, i) - (f.speed_inner / s) * cutoff_derivative(f, 1, mu[i]);
      node += (d * rho(i, i)).real();
    }
    // off-diagonal contribution of L'Phi against rho
    for (std::size_t i = 0; i < mu.size(); ++i)
      for (std::size_t j = 0; j < mu.size(); ++j)
        if (i != j) node += (dphi(i, j) * rho(j, i)).real();
    values[index] = node;
    double inst = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
      inst += cutoff_value(f, mu[i]) * rho(i, i).real();
    if (index == 0) report.initial_value = inst;
    if (index == nodes - 1) report.final_value = inst;
  };
  const EvolutionResult run = evolve(spec, initial, t_final, opts);
  report.dt_used = run.dt_used;

  const double h = t_final / static_cast<double>(nodes - 1);
  double integral = 0.0;
  for (std::size_t i = 0; i + 2 < nodes; i += 2)
    integral += (h / 3.0) * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
  report.integral = integral;
  report.residual = std::abs(report.final_value - integral - report.initial_value);
  return report;
}

struct RmeReport {
  std::vector<double> s_values;
  std::vector<double> residual_max_eigs;  // lambda_max of R(s)
  std::vector<double> residual_pos;       // max(0, lambda_max)
  bool all_zero = false;                  // residual identically zero (dephasing/trivial)
  std::optional<ScalingFit> fit;          // on the positive residuals
  double c2_estimate = 0.0;               // least-squares C in mu ~ C s^-2
  std::vector<double> subtracted;         // mu - C s^-2
  double kappa = 0.0;
  bool pass = false;
};

// Monotonicity-estimate residual R(s) = D f_ts - (kappa - c') s^-1 f'_ts at
// t = s/2. A positive part decaying at least like s^-1.5 certifies the
// second-order remainder; models whose generator commutes with the cutoff
// must give an identically zero residual.
inline RmeReport verify_rme(const ModelSpec& spec, const SmoothCutoff& f, double frame_a,
                            double radius_b, const std::vector<double>& s_values) {
  if (s_values.empty()) throw InvalidInputError("verify_rme: need at least one scale");
  RmeReport report;
  report.s_values = s_values;
  report.kappa = velocity_operator(spec).kappa;
  if (!(f.speed_inner > report.kappa))
    throw InvalidInputError("verify_rme: need c' > kappa = " + std::to_string(report.kappa));

  double s_max = 0.0;
  for (double s : s_values) s_max = std::max(s_max, s);
  const double reach = frame_a + 0.5 * s_max * f.speed_inner + s_max * f.support_right +
                       static_cast<double>(spec.hopping_range + 1);
  if (reach > position_weight(spec.geometry.half_width))
    throw InvalidInputError("verify_rme: cutoff window leaves the lattice; enlarge half_width");

  Generator gen(spec);
  const std::size_t n = spec.geometry.size();
  double max_abs_eig = 0.0;
  for (double s : s_values) {
    const ConeFrame frame = make_cone_frame(frame_a, radius_b, s, 0.5 * s);
    const std::vector<double> mu = cone_coordinate(frame, f.speed_inner, spec.geometry);
    ComplexMatrix phi(n);
    for (std::size_t i = 0; i < n; ++i) phi(i, i) = cutoff_value(f, mu[i]);
    ComplexMatrix r(n);
    gen.apply_dual(phi, r);
    for (std::size_t i = 0; i < n; ++i)
      r(i, i) -= (report.kappa / s) * cutoff_derivative(f, 1, mu[i]);
    r.symmetrize();
    const std::vector<double> eigs = hermitian_eigenvalues(r);
    report.residual_max_eigs.push_back(eigs.back());
    report.residual_pos.push_back(std::max(0.0, eigs.back()));
    max_abs_eig = std::max(max_abs_eig, std::max(std::abs(eigs.front()), std::abs(eigs.back())));
  }
  report.all_zero = max_abs_eig <= tol::rme_exact_zero;

  double num = 0.0, den = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < s_values.size(); ++i) {
    const double w = 1.0 / (s_values[i] * s_values[i]);
    num += report.residual_pos[i] * w;
    den += w * w;
    if (report.residual_pos[i] > 0.0) ++positives;
  }
  report.c2_estimate = den > 0.0 ? num / den : 0.0;
  for (std::size_t i = 0; i < s_values.size(); ++i)
    report.subtracted.push_back(report.residual_pos[i] -
                                report.c2_estimate / (s_values[i] * s_values[i]));

  if (report.all_zero) {
    report.pass = true;
  } else if (positives >= 2) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < s_values.size(); ++i)
      if (report.residual_pos[i] > 0.0) {
        xs.push_back(s_values[i]);
        ys.push_back(report.residual_pos[i]);
      }
    report.fit = fit_power_law(xs, ys);
    report.pass = report.fit->slope <= tol::rme_slope_max;
  } else {
    // at most one scale kept a positive residual: decay is super-polynomial
    report.pass = true;
  }
  return report;
}

struct ExpansionReport {
  std::vector<double> s_values;
  std::vector<double> errors;  // remainder norms E(s)
  ScalingFit fit;
  double order_constant = 0.0;  // max E(s) s^n / ||B_n||
  double bn_norm = 0.0;
  int order = 0;
  double offset = 0.0;
  bool pass = false;
};

// Remainder of the k-fold commutator expansion
//   [A, f(x_s)] = sum_{k=1}^{n-1} (-1)^{k-1} s^-k / k!  B_k f^(k)(x_s) + E(s)
// with x_s = (<x> - a)/s and B_k = ad^k(A); E must shrink like s^-n.
inline ExpansionReport verify_commutator_expansion(const ComplexMatrix& a,
                                                   const SmoothCutoff& f,
                                                   const LatticeGeometry& geometry,
                                                   double offset,
                                                   const std::vector<double>& s_values,
                                                   int order) {
  if (order < 2 || order > tol::max_expansion_order)
    throw InvalidInputError("verify_commutator_expansion: order must be in [2, 8]");
  if (s_values.size() < 2)
    throw InvalidInputError("verify_commutator_expansion: need at least two scales");
  if (a.dim() != geometry.size())
    throw InvalidInputError("verify_commutator_expansion: dimension mismatch");

  ExpansionReport report;
  report.s_values = s_values;
  report.order = order;
  report.offset = offset;

  std::vector<ComplexMatrix> adjoints;
  for (int k = 1; k <= order; ++k) adjoints.push_back(iterated_adjoint(a, geometry, k));
  report.bn_norm = operator_norm(adjoints.back());

  const std::vector<double> w = position_weights(geometry);
  for (double s : s_values) {
    std::vector<double> mu(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) mu[i] = (w[i] - offset) / s;

    ComplexMatrix fdiag(geometry.size());
    for (std::size_t i = 0; i < mu.size(); ++i) fdiag(i, i) = cutoff_value(f, mu[i]);
    ComplexMatrix remainder = commutator(a, fdiag);

    double sign = 1.0, factorial = 1.0, spow = s;
    for (int k = 1; k < order; ++k) {
      const ComplexMatrix& bk = adjoints[static_cast<std::size_t>(k - 1)];
      const double coeff = sign / (factorial * spow);
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const double fk = cutoff_derivative(f, k, mu[i]);
        if (fk == 0.0) continue;
        for (std::size_t r = 0; r < mu.size(); ++r)
          remainder(r, i) -= coeff * fk * bk(r, i);
      }
      sign = -sign;
      factorial *= static_cast<double>(k + 1);
      spow *= s;
    }
    report.errors.push_back(operator_norm(remainder));
  }

  std::size_t positives = 0;
  for (double e : report.errors)
    if (e > tol::expansion_exact_zero) ++positives;
  if (positives < 2) {
    // remainder vanishes (diagonal A, constant f) or survives at a single
    // scale: decay is super-polynomial either way, nothing to fit
    report.pass = true;
    return report;
  }

  report.fit = fit_power_law(s_values, report.errors);
  if (report.bn_norm > 0.0)
    for (std::size_t i = 0; i < s_values.size(); ++i)
      report.order_constant =
          std::max(report.order_constant,
                   report.errors[i] * std::pow(s_values[i], order) / report.bn_norm);
  report.pass = report.fit.slope <= -(static_cast<double>(order) - tol::expansion_slope_margin) &&
                report.fit.r_squared >= tol::expansion_r2_min;
  return report;
}

struct ExpansionSweep {
  std::vector<ExpansionReport> reports;
  double slope_spread = 0.0;
  bool pass = false;
};

inline ExpansionSweep verify_expansion_offsets(const ComplexMatrix& a, const SmoothCutoff& f,
                                               const LatticeGeometry& geometry,
                                               const std::vector<double>& offsets,
                                               const std::vector<double>& s_values, int order) {
  if (offsets.empty()) throw InvalidInputError("verify_expansion_offsets: need offsets");
  ExpansionSweep sweep;
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    sweep.reports.push_back(
        verify_commutator_expansion(a, f, geometry, offsets[i], s_values, order));
    const double slope = sweep.reports.back().fit.slope;
    lo = (i == 0) ? slope : std::min(lo, slope);
    hi = (i == 0) ? slope : std::max(hi, slope);
  }
  sweep.slope_spread = hi - lo;
  sweep.pass = sweep.slope_spread <= tol::expansion_offset_stability;
  for (const auto& r : sweep.reports) sweep.pass = sweep.pass && r.pass;
  return sweep;
}

struct ScanRow {
  std::uint64_t trial = 0;
  double kappa = 0.0;
  double hamiltonian_speed = 0.0;
  double environment_shift = 0.0;
};

struct ConjectureReport {
  std::vector<ScanRow> rows;
  std::size_t violations = 0;  // trials with kappa < hamiltonian_speed - 1e-9
  double min_shift = 0.0;
};

struct ScanConfig {
  LatticeGeometry geometry{4};
  double hopping = 1.0;
  int hopping_range = 1;
  double strength = 1.0;           // each random W is scaled to ||W|| = sqrt(strength)
  double potential_amplitude = 1.0;
  int operators_per_trial = 2;
  int support_width = 3;
  std::uint64_t seed = 1;
};

// Random-model scan for the conjecture that the environment never lowers
// the maximal speed below the Hamiltonian-only value.
inline ConjectureReport conjecture_scan(const ScanConfig& config, std::size_t trials) {
  if (trials == 0) throw InvalidInputError("conjecture_scan: need at least one trial");
  if (!(config.strength > 0.0))
    throw InvalidInputError(
        "conjecture_scan: Kraus strength must be positive (W = 0 lies outside the scanned "
        "model class)");
  ConjectureReport report;
  Xorshift64Star rng(config.seed);
  const std::size_t n = config.geometry.size();
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::vector<double> potential(n);
    for (double& v : potential)
      v = rng.uniform(-config.potential_amplitude, config.potential_amplitude);

    std::vector<ComplexMatrix> ops;
    for (int o = 0; o < config.operators_per_trial; ++o) {
      const std::size_t width =
          std::min<std::size_t>(static_cast<std::size_t>(config.support_width), n);
      const std::size_t start =
          static_cast<std::size_t>(rng.uniform() * static_cast<double>(n - width + 1));
      ComplexMatrix w(n);
      for (std::size_t i = start; i < start + width; ++i)
        for (std::size_t j = start; j < start + width; ++j) w(i, j) = rng.complex_normal();
      const double norm = operator_norm(w);
      if (norm > 0.0) w *= std::sqrt(config.strength) / norm;
      ops.push_back(std::move(w));
    }

    const ModelSpec spec = make_model_spec(
        config.geometry, config.hopping, config.hopping_range, potential,
        make_custom_kraus(std::move(ops), config.geometry), 3);
    const VelocityReport v = velocity_operator(spec);
    report.rows.push_back({trial, v.kappa, v.hamiltonian_speed, v.environment_shift});
    if (v.kappa < v.hamiltonian_speed - 1e-9) ++report.violations;
    report.min_shift = trial == 0 ? v.environment_shift
                                  : std::min(report.min_shift, v.environment_shift);
  }
  return report;
}

}  // namespace lindblad
