#pragma once

// Central numeric policy. Every tolerance, floor, cap, and budget used by the
// library and its verification battery lives here so a threshold is never
// re-derived (or silently changed) at a call site.

namespace lindblad::tol {

// -- matrix / eigensolver core ------------------------------------------------
inline constexpr double hermiticity_rel = 1e-12;       // ||A - A^+|| <= rel * max(1, ||A||)
inline constexpr int ql_iteration_factor = 64;          // QL sweeps capped at factor * dim
inline constexpr double expm_element_guard = 1e300;     // finite-entry guard on exp results

// -- density matrices ----------------------------------------------------------
inline constexpr double density_hermiticity_rel = 1e-12;
inline constexpr double density_trace_abs = 1e-10;
inline constexpr double density_min_eig_floor = -1e-10; // construction-time floor
inline constexpr double evolved_min_eig_floor = -1e-8;  // sampled states during evolution
inline constexpr double evolve_abort_eig = -1e-6;       // below this the integrator aborts

// -- integrators ----------------------------------------------------------------
inline constexpr double trace_drift_rk4 = 1e-8;
inline constexpr double trace_drift_superop = 1e-10;
inline constexpr double rk4_dt_scale = 0.01;            // dt = scale / max(||H||, g, 1)
inline constexpr int rk4_max_halvings = 4;
inline constexpr double step_hermiticity_cap = 1e-9;    // per-step symmetrization correction
inline constexpr int superop_max_dim = 40;              // site count cap for dense superoperators

// -- generator identities ---------------------------------------------------------
inline constexpr double duality_rel = 1e-11;            // |tr(A Lrho) - tr((L'A) rho)| budget
inline constexpr double gamma_identity_abs = 1e-12;     // gamma vs L'<x> cross-check
inline constexpr double kappa_norm_abs = 1e-10;         // kappa vs |eig|_max agreement
inline constexpr double kappa_dephasing_abs = 1e-12;    // dephasing leaves kappa unchanged
inline constexpr double adjoint_closed_form_abs = 1e-12;

// -- model assumptions --------------------------------------------------------------
inline constexpr int max_expansion_order = 8;
inline constexpr double assumption_ceiling_factor = 10.0;

// -- verification battery --------------------------------------------------------------
inline constexpr double expansion_slope_margin = 0.5;   // fitted slope <= -(n - margin)
inline constexpr double expansion_r2_min = 0.98;
inline constexpr double expansion_offset_stability = 0.3;
inline constexpr double expansion_exact_zero = 1e-14;   // remainder treated as identically zero
inline constexpr double basic_equality_residual = 1e-6;
inline constexpr double basic_equality_refinement = 4.0;
inline constexpr double rme_slope_max = -1.5;
inline constexpr double rme_exact_zero = 1e-14;
inline constexpr double lightcone_slope_max = -1.5;
inline constexpr double lightcone_r2_min = 0.9;
inline constexpr double front_threshold = 1e-6;         // leakage level defining the front
inline constexpr int front_boundary_clearance = 5;      // sites the front must stay off the wall
inline constexpr double front_speed_factor = 1.2;       // measured speed <= factor * kappa
inline constexpr double leakage_clamp = -1e-12;         // negatives beyond this are an error

// -- stationary states ---------------------------------------------------------------------
inline constexpr double stationary_residual = 1e-9;
inline constexpr double stationary_drift = 1e-7;        // entrywise drift after evolving rho_st
inline constexpr double stationary_degenerate_sv = 1e-8;
inline constexpr double stationary_max_sv = 1e-6;       // larger smallest-sv is a failure

// -- cross-checks -------------------------------------------------------------------------------
inline constexpr double backend_agreement_abs = 1e-6;   // rk4 vs superop, entrywise

}  // namespace lindblad::tol
