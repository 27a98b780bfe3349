#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindblad/complex_matrix.hpp"
#include "lindblad/eigen.hpp"
#include "lindblad/expm.hpp"
#include "lindblad/model.hpp"
#include "lindblad/superop.hpp"
#include "lindblad/tolerances.hpp"

// State types and the two integrator backends for
//   d rho / dt = -i[H, rho] + (1/2) sum_j ([W_j, rho W_j^+] + [W_j rho, W_j^+])
// together with the dual generator, stationary states, and the Heisenberg
// derivative D Phi = L' Phi + dPhi/dt.

namespace lindblad {

struct DensityMatrix {
  ComplexMatrix matrix;
  double trace_target = 1.0;
};

inline DensityMatrix make_density_matrix(ComplexMatrix m, double trace_target = 1.0,
                                         double min_eig_floor = tol::density_min_eig_floor) {
  if (m.empty()) throw InvalidInputError("make_density_matrix: empty matrix");
  m.require_finite();
  const double scale = std::max(1.0, m.frobenius_norm());
  if (m.hermiticity_defect() > tol::density_hermiticity_rel * scale)
    throw InvalidInputError("make_density_matrix: matrix is not Hermitian within tolerance");
  if (std::abs(m.trace().real() - trace_target) > tol::density_trace_abs ||
      std::abs(m.trace().imag()) > tol::density_trace_abs)
    throw InvalidInputError("make_density_matrix: trace is off target");
  const std::vector<double> eigs = hermitian_eigenvalues(m);
  if (eigs.front() < min_eig_floor)
    throw InvalidInputError("make_density_matrix: negative eigenvalue " +
                            std::to_string(eigs.front()));
  return DensityMatrix{std::move(m), trace_target};
}

// rho_0 = rho_st + lambda with the perturbation supported strictly inside
// radius b: every row and column at a site with <x> >= b is exactly zero.
struct InitialState {
  std::optional<DensityMatrix> stationary_part;
  ComplexMatrix perturbation;
  double radius_b = 0.0;
};

inline InitialState make_initial_state(const LatticeGeometry& geometry,
                                       std::optional<DensityMatrix> stationary_part,
                                       ComplexMatrix perturbation, double radius_b) {
  if (perturbation.dim() != geometry.size())
    throw InvalidInputError("make_initial_state: perturbation dimension mismatch");
  if (stationary_part && stationary_part->matrix.dim() != geometry.size())
    throw InvalidInputError("make_initial_state: stationary part dimension mismatch");
  if (!(radius_b > 0.0)) throw InvalidInputError("make_initial_state: radius_b must be > 0");
  perturbation.require_finite();
  const double scale = std::max(1.0, perturbation.frobenius_norm());
  if (perturbation.hermiticity_defect() > tol::density_hermiticity_rel * scale)
    throw InvalidInputError("make_initial_state: perturbation is not Hermitian");
  const std::vector<double> eigs = hermitian_eigenvalues(perturbation);
  if (eigs.front() < tol::density_min_eig_floor)
    throw InvalidInputError("make_initial_state: perturbation is not positive semidefinite");
  for (std::size_t i = 0; i < geometry.size(); ++i) {
    if (position_weight(geometry.site(i)) < radius_b) continue;
    for (std::size_t j = 0; j < geometry.size(); ++j)
      if (perturbation(i, j) != Complex(0.0, 0.0) || perturbation(j, i) != Complex(0.0, 0.0))
        throw InvalidInputError(
            "make_initial_state: perturbation must vanish exactly at radius b");
  }
  return InitialState{std::move(stationary_part), std::move(perturbation), radius_b};
}

inline ComplexMatrix state_matrix(const InitialState& s) {
  if (s.stationary_part) return s.stationary_part->matrix + s.perturbation;
  return s.perturbation;
}

// Normalized Gaussian wave packet truncated (exactly) to <x> < b.
inline ComplexMatrix gaussian_packet(const LatticeGeometry& geometry, double center, double width,
                                     double radius_b, double trace = 1.0) {
  if (!(width > 0.0)) throw InvalidInputError("gaussian_packet: width must be > 0");
  const std::size_t n = geometry.size();
  std::vector<double> amp(n, 0.0);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (position_weight(geometry.site(i)) >= radius_b) continue;
    const double dx = (geometry.site(i) - center) / width;
    amp[i] = std::exp(-0.5 * dx * dx);
    norm2 += amp[i] * amp[i];
  }
  if (norm2 == 0.0)
    throw InvalidInputError("gaussian_packet: no lattice site lies inside radius_b");
  ComplexMatrix rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (amp[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (amp[j] == 0.0) continue;
      rho(i, j) = trace * amp[i] * amp[j] / norm2;
    }
  }
  return rho;
}

// Applies L and L' through closed forms for the built-in jump families and
// banded Hamiltonian structure; dense fallbacks cover custom families.
class Generator {
 public:
  explicit Generator(const ModelSpec& spec)
      : n_(spec.geometry.size()), hopping_(spec.hopping), range_(spec.hopping_range),
        potential_(spec.potential), kind_(spec.kraus.kind), strength_(spec.kraus.strength),
        custom_ops_(spec.kraus.kind == KrausKind::custom ? spec.kraus.operators
                                                         : std::vector<ComplexMatrix>{}) {
    if (kind_ == KrausKind::custom && !custom_ops_.empty()) {
      custom_k_ = ComplexMatrix(n_);
      for (const auto& w : custom_ops_) custom_k_ += w.adjoint() * w;
    }
  }

  std::size_t dim() const { return n_; }

  // out = L rho (Schroedinger picture)
  void apply(const ComplexMatrix& rho, ComplexMatrix& out) const {
    apply_unitary(rho, out, /*dual=*/false);
    apply_dissipator(rho, out);
  }

  // out = L' a (Heisenberg picture)
  void apply_dual(const ComplexMatrix& a, ComplexMatrix& out) const {
    apply_unitary(a, out, /*dual=*/true);
    apply_dual_dissipator(a, out);
  }

 private:
  void apply_unitary(const ComplexMatrix& rho, ComplexMatrix& out, bool dual) const {
    if (rho.dim() != n_) throw InvalidInputError("Generator: dimension mismatch");
    if (out.dim() != n_) out = ComplexMatrix(n_);
    const Complex pref = dual ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
    const int n = static_cast<int>(n_);
    for (int i = 0; i < n; ++i) {
      const std::size_t ii = static_cast<std::size_t>(i);
      Complex* orow = out.row(ii);
      const Complex* rrow = rho.row(ii);
      for (int j = 0; j < n; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j);
        Complex acc = (potential_[ii] - potential_[jj]) * rrow[jj];
        for (int r = 1; r <= range_; ++r) {
          Complex hop(0.0, 0.0);
          if (i - r >= 0) hop += rho(static_cast<std::size_t>(i - r), jj);
          if (i + r < n) hop += rho(static_cast<std::size_t>(i + r), jj);
          if (j - r >= 0) hop -= rrow[static_cast<std::size_t>(j - r)];
          if (j + r < n) hop -= rrow[static_cast<std::size_t>(j + r)];
          acc -= hopping_ * hop;
        }
        orow[jj] = pref * acc;
      }
    }
  }

  void apply_dissipator(const ComplexMatrix& rho, ComplexMatrix& out) const {
    switch (kind_) {
      case KrausKind::dephasing: {
        const double g = strength_;
        for (std::size_t i = 0; i < n_; ++i)
          for (std::size_t j = 0; j < n_; ++j)
            if (i != j) out(i, j) -= g * rho(i, j);
        break;
      }
      case KrausKind::directed_jump: {
        const double g = strength_;
        for (std::size_t i = 0; i + 1 < n_; ++i) out(i, i) += g * rho(i + 1, i + 1);
        for (std::size_t i = 0; i < n_; ++i)
          for (std::size_t j = 0; j < n_; ++j) {
            const double k = 0.5 * g * ((i >= 1 ? 1.0 : 0.0) + (j >= 1 ? 1.0 : 0.0));
            out(i, j) -= k * rho(i, j);
          }
        break;
      }
      case KrausKind::custom: {
        if (custom_ops_.empty()) break;
        for (const auto& w : custom_ops_) out += (w * rho) * w.adjoint();
        const ComplexMatrix anti = custom_k_ * rho + rho * custom_k_;
        for (std::size_t t = 0; t < out.data().size(); ++t)
          out.data()[t] -= 0.5 * anti.data()[t];
        break;
      }
    }
  }

  void apply_dual_dissipator(const ComplexMatrix& a, ComplexMatrix& out) const {
    switch (kind_) {
      case KrausKind::dephasing: {
        const double g = strength_;
        for (std::size_t i = 0; i < n_; ++i)
          for (std::size_t j = 0; j < n_; ++j)
            if (i != j) out(i, j) -= g * a(i, j);
        break;
      }
      case KrausKind::directed_jump: {
        const double g = strength_;
        for (std::size_t i = 0; i + 1 < n_; ++i) out(i + 1, i + 1) += g * a(i, i);
        for (std::size_t i = 0; i < n_; ++i)
          for (std::size_t j = 0; j < n_; ++j) {
            const double k = 0.5 * g * ((i >= 1 ? 1.0 : 0.0) + (j >= 1 ? 1.0 : 0.0));
            out(i, j) -= k * a(i, j);
          }
        break;
      }
      case KrausKind::custom: {
        if (custom_ops_.empty()) break;
        for (const auto& w : custom_ops_) out += (w.adjoint() * a) * w;
        const ComplexMatrix anti = custom_k_ * a + a * custom_k_;
        for (std::size_t t = 0; t < out.data().size(); ++t)
          out.data()[t] -= 0.5 * anti.data()[t];
        break;
      }
    }
  }

  std::size_t n_;
  double hopping_;
  int range_;
  std::vector<double> potential_;
  KrausKind kind_;
  double strength_;
  std::vector<ComplexMatrix> custom_ops_;
  ComplexMatrix custom_k_;
};

inline ComplexMatrix apply_generator(const ModelSpec& spec, const ComplexMatrix& rho) {
  rho.require_finite();
  Generator gen(spec);
  ComplexMatrix out(rho.dim());
  gen.apply(rho, out);
  return out;
}

inline ComplexMatrix apply_dual(const ModelSpec& spec, const ComplexMatrix& a) {
  a.require_finite();
  Generator gen(spec);
  ComplexMatrix out(a.dim());
  gen.apply_dual(a, out);
  return out;
}

// D Phi = L' Phi + dPhi/dt for explicitly time-dependent observables.
inline ComplexMatrix heisenberg_derivative(const ModelSpec& spec, const ComplexMatrix& phi,
                                           const ComplexMatrix& dphi_dt) {
  if (phi.dim() != dphi_dt.dim())
    throw InvalidInputError("heisenberg_derivative: dimension mismatch");
  return apply_dual(spec, phi) + dphi_dt;
}

// Dense matrix of L on row-stacked vectors.
inline ComplexMatrix liouvillian_matrix(const ModelSpec& spec) {
  const std::size_t n = spec.geometry.size();
  if (n > tol::superop_max_dim)
    throw InvalidInputError("liouvillian_matrix: lattice too large for a dense superoperator");
  const ComplexMatrix h = build_hamiltonian(spec);
  const ComplexMatrix eye = ComplexMatrix::identity(n);
  ComplexMatrix l = vectorize_superoperator(h, eye) - vectorize_superoperator(eye, h);
  l *= Complex(0.0, -1.0);
  const std::vector<ComplexMatrix> ops = materialize_operators(spec.kraus, spec.geometry);
  if (!ops.empty()) {
    ComplexMatrix k(n);
    for (const auto& w : ops) {
      l += vectorize_superoperator(w, w.adjoint());
      k += w.adjoint() * w;
    }
    ComplexMatrix anti = vectorize_superoperator(k, eye) + vectorize_superoperator(eye, k);
    anti *= 0.5;
    l -= anti;
  }
  return l;
}

enum class EvolveBackend { rk4, superop_exp };

inline const char* to_string(EvolveBackend b) {
  return b == EvolveBackend::rk4 ? "rk4" : "superop_exp";
}

struct EvolveOptions {
  EvolveBackend backend = EvolveBackend::rk4;
  double dt = 0.0;                    // <= 0 picks dt = 0.01 / max(||H||, g, 1)
  std::size_t sample_count = 41;      // includes t = 0
  std::size_t positivity_checks = 16; // sampled states that get a full spectrum check
  double min_eig_floor = tol::evolved_min_eig_floor;
  bool keep_states = true;
  // called on every sample, after symmetrization
  std::function<void(std::size_t, double, const ComplexMatrix&)> observer;
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;   // empty when keep_states is false
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  double hermiticity_correction = 0.0; // largest per-step symmetrization
  std::string integrator;
  double dt_used = 0.0;
  int halvings = 0;
  std::vector<std::size_t> positivity_checked;
};

namespace detail {

inline std::vector<std::size_t> spread_indices(std::size_t count, std::size_t total) {
  std::vector<std::size_t> idx;
  if (total == 0) return idx;
  count = std::min(count, total);
  if (count == 0) return idx;
  for (std::size_t k = 0; k < count; ++k)
    idx.push_back((k * (total - 1)) / (count == 1 ? 1 : count - 1));
  idx.back() = total - 1;
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

struct SampleMonitor {
  const EvolveOptions* opts;
  std::vector<std::size_t> check_at;
  double trace0 = 0.0;
  EvolutionResult* result;

  void observe(std::size_t index, double time, ComplexMatrix& rho) {
    const double corr = rho.symmetrize();
    result->hermiticity_correction = std::max(result->hermiticity_correction, corr);
    const double drift = std::abs(rho.trace().real() - trace0) + std::abs(rho.trace().imag());
    result->trace_drift = std::max(result->trace_drift, drift);
    if (std::binary_search(check_at.begin(), check_at.end(), index)) {
      const std::vector<double> eigs = hermitian_eigenvalues(rho);
      result->min_eigenvalue = std::min(result->min_eigenvalue, eigs.front());
      if (eigs.front() < tol::evolve_abort_eig)
        throw NumericFailureError("evolve: positivity lost (eigenvalue " +
                                  std::to_string(eigs.front()) + " at t = " +
                                  std::to_string(time) + "); reduce dt or check the model");
      result->positivity_checked.push_back(index);
    }
    if (opts->keep_states)
      result->states.push_back(DensityMatrix{rho, rho.trace().real()});
    if (opts->observer) opts->observer(index, time, rho);
  }
};

}  // namespace detail

inline EvolutionResult evolve(const ModelSpec& spec, const InitialState& initial, double t_final,
                              const EvolveOptions& opts = {}) {
  if (t_final < 0.0) throw InvalidInputError("evolve: t_final must be >= 0");
  if (opts.sample_count < 2) throw InvalidInputError("evolve: need at least two samples");
  const std::size_t n = spec.geometry.size();
  ComplexMatrix rho0 = state_matrix(initial);
  if (rho0.dim() != n) throw InvalidInputError("evolve: state dimension mismatch");

  if (t_final == 0.0) {
    EvolutionResult result;
    result.integrator = "none";
    result.times = {0.0};
    result.min_eigenvalue = hermitian_eigenvalues(rho0).front();
    if (opts.keep_states) result.states.push_back(DensityMatrix{rho0, rho0.trace().real()});
    if (opts.observer) opts.observer(0, 0.0, rho0);
    return result;
  }

  std::vector<double> times(opts.sample_count);
  for (std::size_t i = 0; i < opts.sample_count; ++i)
    times[i] = t_final * static_cast<double>(i) / static_cast<double>(opts.sample_count - 1);

  Generator gen(spec);

  if (opts.backend == EvolveBackend::superop_exp) {
    if (n > tol::superop_max_dim)
      throw InvalidInputError("evolve: superop_exp backend is limited to " +
                              std::to_string(tol::superop_max_dim) + " sites");
    EvolutionResult result;
    result.integrator = "superop_exp";
    result.times = times;
    result.min_eigenvalue = hermitian_eigenvalues(rho0).front();
    detail::SampleMonitor monitor{&opts,
                                  detail::spread_indices(opts.positivity_checks, times.size()),
                                  rho0.trace().real(), &result};
    const ComplexMatrix lmat = liouvillian_matrix(spec);
    const double h = times[1] - times[0];
    const ComplexMatrix prop = matrix_exp(lmat * Complex(h, 0.0));
    std::vector<Complex> v = vec(rho0);
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (i > 0) v = apply_matrix(prop, v);
      ComplexMatrix rho = unvec(v, n);
      monitor.observe(i, times[i], rho);
      if (result.trace_drift > tol::trace_drift_superop)
        throw NumericFailureError("evolve: superop_exp trace drift " +
                                  std::to_string(result.trace_drift) + " exceeds tolerance");
    }
    result.dt_used = h;
    return result;
  }

  const double hnorm = operator_norm(build_hamiltonian(spec));
  const double dt_base =
      opts.dt > 0.0 ? opts.dt
                    : tol::rk4_dt_scale / std::max({hnorm, spec.kraus.strength, 1.0});

  ComplexMatrix k1(n), k2(n), k3(n), k4(n), work(n);
  std::string last_error;
  for (int halvings = 0; halvings <= tol::rk4_max_halvings; ++halvings) {
    const double dt = dt_base / static_cast<double>(1 << halvings);
    EvolutionResult result;
    result.integrator = "rk4";
    result.dt_used = dt;
    result.halvings = halvings;
    result.times = times;
    result.min_eigenvalue = hermitian_eigenvalues(rho0).front();
    detail::SampleMonitor monitor{&opts,
                                  detail::spread_indices(opts.positivity_checks, times.size()),
                                  rho0.trace().real(), &result};
    ComplexMatrix rho = rho0;
    monitor.observe(0, times[0], rho);
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double span = times[i] - times[i - 1];
      const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-12));
      const double h = span / static_cast<double>(steps);
      for (std::size_t s = 0; s < steps; ++s) {
        gen.apply(rho, k1);
        work = rho;
        for (std::size_t t = 0; t < work.data().size(); ++t)
          work.data()[t] += 0.5 * h * k1.data()[t];
        gen.apply(work, k2);
        work = rho;
        for (std::size_t t = 0; t < work.data().size(); ++t)
          work.data()[t] += 0.5 * h * k2.data()[t];
        gen.apply(work, k3);
        work = rho;
        for (std::size_t t = 0; t < work.data().size(); ++t)
          work.data()[t] += h * k3.data()[t];
        gen.apply(work, k4);
        for (std::size_t t = 0; t < rho.data().size(); ++t)
          rho.data()[t] += (h / 6.0) * (k1.data()[t] + 2.0 * k2.data()[t] +
                                        2.0 * k3.data()[t] + k4.data()[t]);
        const double corr = rho.symmetrize();
        result.hermiticity_correction = std::max(result.hermiticity_correction, corr);
      }
      monitor.observe(i, times[i], rho);
    }
    if (result.trace_drift <= tol::trace_drift_rk4) return result;
    last_error = "trace drift " + std::to_string(result.trace_drift) + " at dt = " +
                 std::to_string(dt);
  }
  throw NumericFailureError("evolve: rk4 trace drift persisted after " +
                            std::to_string(tol::rk4_max_halvings) + " halvings (" + last_error +
                            ")");
}

struct StationaryResult {
  std::optional<DensityMatrix> state;
  double residual = 0.0;                        // ||L rho_st||_F
  bool degenerate = false;
  std::vector<double> smallest_singular_values; // ascending, first few
  std::vector<ComplexMatrix> kernel_basis;      // unvectorized null vectors
};

inline StationaryResult stationary_state(const ModelSpec& spec) {
  const std::size_t n = spec.geometry.size();
  if (n > tol::superop_max_dim)
    throw InvalidInputError("stationary_state: lattice too large for the dense solver");
  const ComplexMatrix l = liouvillian_matrix(spec);
  ComplexMatrix g = l.adjoint() * l;
  g.symmetrize();
  const HermitianEigenDecomposition eig = hermitian_eigs(g);

  StationaryResult result;
  const std::size_t keep = std::min<std::size_t>(4, eig.eigenvalues.size());
  for (std::size_t i = 0; i < keep; ++i)
    result.smallest_singular_values.push_back(std::sqrt(std::max(0.0, eig.eigenvalues[i])));

  const double sigma0 = result.smallest_singular_values.front();
  if (sigma0 > tol::stationary_max_sv)
    throw NumericFailureError("stationary_state: no stationary state (smallest singular value " +
                              std::to_string(sigma0) + ")");

  std::size_t kernel_count = 0;
  for (double s : result.smallest_singular_values)
    if (s < tol::stationary_degenerate_sv) ++kernel_count;
  kernel_count = std::max<std::size_t>(kernel_count, 1);
  result.degenerate = kernel_count > 1;

  const std::size_t nn = n * n;
  for (std::size_t k = 0; k < kernel_count; ++k) {
    std::vector<Complex> v(nn);
    for (std::size_t r = 0; r < nn; ++r) v[r] = eig.eigenvectors(r, k);
    result.kernel_basis.push_back(unvec(v, n));
  }

  ComplexMatrix rho = result.kernel_basis.front();
  rho.symmetrize();
  const Complex tr = rho.trace();
  if (std::abs(tr) > 1e-8) {
    rho *= 1.0 / tr;
    const std::vector<double> eigs = hermitian_eigenvalues(rho);
    if (eigs.front() >= tol::evolved_min_eig_floor) {
      result.state = DensityMatrix{rho, 1.0};
      result.residual = apply_generator(spec, rho).frobenius_norm();
    }
  }
  if (!result.state && !result.degenerate)
    throw NumericFailureError(
        "stationary_state: kernel vector could not be normalized to a density matrix");
  return result;
}

// Re tr(Phi rho) for Hermitian Phi.
inline double expectation(const ComplexMatrix& observable, const ComplexMatrix& rho) {
  return trace_of_product(observable, rho).real();
}

}  // namespace lindblad
