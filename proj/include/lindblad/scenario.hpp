#pragma once

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lindblad/config.hpp"
#include "lindblad/dynamics.hpp"
#include "lindblad/lightcone.hpp"
#include "lindblad/report_io.hpp"
#include "lindblad/svg_plot.hpp"
#include "lindblad/tolerances.hpp"

// Turns a parsed RunConfig into model runs and writes the report files
// (summary.json, leakage.csv, fits.json, audit.json, plot.svg). Files written
// before a module error are removed again; files from a completed run with
// failing checks are kept.
//
// Exit codes: 0 all checks passed, 2 a check failed, 3 configuration or
// input error, 4 numeric failure.

namespace lindblad {

using Json = nlohmann::ordered_json;

inline constexpr int exit_ok = 0;
inline constexpr int exit_checks_failed = 2;
inline constexpr int exit_config_error = 3;
inline constexpr int exit_numeric_failure = 4;

struct ScenarioContext {
  std::string output_dir;  // empty: take output.dir from the config
  int threads = 1;
  bool verbose = false;
  std::ostream* log = &std::cerr;
};

namespace detail {

class ReportWriter {
 public:
  explicit ReportWriter(std::filesystem::path dir)
      : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {}

  void emit(const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir_);
    write_text_file((dir_ / name).string(), text);
    files_.push_back(name);
  }

  void discard_partial() {
    std::error_code ec;
    for (const auto& name : files_) std::filesystem::remove(dir_ / name, ec);
    files_.clear();
  }

  double elapsed_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
  std::chrono::steady_clock::time_point start_;
};

inline void note(const ScenarioContext& ctx, const std::string& message) {
  if (ctx.verbose) (*ctx.log) << "[lindblad-lightcone] " << message << '\n';
}

inline ModelSpec build_model(const RunConfig& cfg) {
  const LatticeGeometry geometry = make_geometry(cfg.half_width);
  std::vector<double> potential(geometry.size(), cfg.potential);
  KrausFamily family = cfg.kraus == "none"
                           ? make_custom_kraus({}, geometry)
                           : make_kraus_family(cfg.kraus == "dephasing" ? KrausKind::dephasing
                                                                        : KrausKind::directed_jump,
                                               cfg.strength);
  return make_model_spec(geometry, cfg.hopping, cfg.hopping_range, std::move(potential),
                         std::move(family), cfg.order);
}

inline InitialState build_initial(const RunConfig& cfg, const ModelSpec& spec) {
  std::optional<DensityMatrix> stationary;
  double packet_trace = 1.0;
  switch (cfg.stationary) {
    case StationaryChoice::none:
      break;
    case StationaryChoice::uniform: {
      const double n = static_cast<double>(spec.geometry.size());
      ComplexMatrix uniform = ComplexMatrix::identity(spec.geometry.size());
      uniform *= 0.5 / n;
      stationary = DensityMatrix{std::move(uniform), 0.5};
      packet_trace = 0.5;
      break;
    }
    case StationaryChoice::solve: {
      const StationaryResult res = stationary_state(spec);
      if (!res.state)
        throw NumericFailureError(
            "initial.stationary=solve: stationary kernel has no density-matrix representative");
      ComplexMatrix half = res.state->matrix;
      half *= 0.5;
      stationary = DensityMatrix{std::move(half), 0.5};
      packet_trace = 0.5;
      break;
    }
  }
  ComplexMatrix packet = gaussian_packet(spec.geometry, cfg.initial_center, cfg.initial_width,
                                         cfg.radius_b, packet_trace);
  return make_initial_state(spec.geometry, std::move(stationary), std::move(packet),
                            cfg.radius_b);
}

inline EvolveOptions build_evolve_options(const RunConfig& cfg) {
  EvolveOptions opts;
  opts.backend = cfg.backend == "rk4" ? EvolveBackend::rk4 : EvolveBackend::superop_exp;
  if (cfg.dt) opts.dt = *cfg.dt;
  opts.sample_count = static_cast<std::size_t>(cfg.samples);
  opts.positivity_checks = static_cast<std::size_t>(cfg.positivity_checks);
  return opts;
}

inline std::vector<double> make_eta_grid(const RunConfig& cfg, const ModelSpec& spec) {
  const double lo = cfg.frame_a + 1.0;
  const double hi = position_weight(spec.geometry.half_width) - 1.0;
  if (!(hi > lo)) throw InvalidInputError("eta grid is empty; enlarge lattice.half_width");
  std::vector<double> grid;
  for (int k = 0; k < cfg.eta_count; ++k)
    grid.push_back(lo + (hi - lo) * k / static_cast<double>(cfg.eta_count - 1));
  return grid;
}

// c and c', resolving "auto" to 1.5 kappa and 1.2 kappa.
inline std::pair<double, double> resolve_speeds(const RunConfig& cfg, double kappa) {
  const double inner = cfg.speed_inner ? *cfg.speed_inner : 1.2 * kappa;
  const double outer = cfg.speed_outer ? *cfg.speed_outer : 1.5 * kappa;
  if (!(inner > 0.0) || !(outer > inner))
    throw InvalidInputError(
        "cone speeds degenerate (kappa may be zero); set cone.speed_inner/outer explicitly");
  return {outer, inner};
}

inline Json config_echo(const RunConfig& cfg) {
  Json j;
  j["scenario"] = to_string(cfg.scenario);
  j["seed"] = cfg.seed;
  j["lattice.half_width"] = cfg.half_width;
  j["model.hopping"] = cfg.hopping;
  j["model.hopping_range"] = cfg.hopping_range;
  j["model.potential"] = cfg.potential;
  j["model.kraus"] = cfg.kraus;
  j["model.strength"] = cfg.strength;
  j["model.order"] = cfg.order;
  j["evolve.backend"] = cfg.backend;
  return j;
}

inline Json fit_json(const ScalingFit& fit) {
  Json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["points_used"] = fit.points_used;
  return j;
}

inline Json fit_json(const LinearFit& fit) {
  Json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  return j;
}

inline Json audit_json(const RunConfig& cfg, const ModelSpec& spec) {
  const AssumptionAudit audit = check_assumptions(spec);
  const VelocityReport velocity = velocity_operator(spec);
  Json j;
  j["config"] = config_echo(cfg);
  j["ceiling"] = audit.ceiling;
  j["hamiltonian_adjoint_norms"] = audit.hamiltonian_adjoint_norms;
  j["kraus_adjoint_sums"] = audit.kraus_adjoint_sums;
  j["domain_condition_holds"] = audit.domain_condition_holds;
  j["passed"] = audit.passed;
  j["kappa"] = velocity.kappa;
  j["hamiltonian_speed"] = velocity.hamiltonian_speed;
  j["environment_shift"] = velocity.environment_shift;
  j["dual_deviation"] = velocity.dual_deviation;
  return j;
}

inline bool write_summary(ReportWriter& out, Json& summary, const Json& checks) {
  bool all = true;
  for (const auto& item : checks.items())
    all = all && item.value().get<bool>();
  summary["checks"] = checks;
  summary["passed"] = all;
  summary["wall_clock_seconds"] = out.elapsed_seconds();
  std::vector<std::string> files = out.files();
  files.push_back("summary.json");
  summary["files"] = files;
  out.emit("summary.json", summary.dump(2) + "\n");
  return all;
}

// -- battery: CPTP metrics plus front tracking on one model ---------------

inline bool scenario_battery(const RunConfig& cfg, const ScenarioContext& ctx,
                             ReportWriter& out) {
  const ModelSpec spec = build_model(cfg);
  out.emit("audit.json", audit_json(cfg, spec).dump(2) + "\n");
  const InitialState initial = build_initial(cfg, spec);
  const VelocityReport velocity = velocity_operator(spec);
  const std::vector<double> grid = make_eta_grid(cfg, spec);
  note(ctx, "battery: evolving " + std::to_string(spec.geometry.size()) + " sites to t = " +
                format_short(cfg.t_final));

  FrontTracker tracker(grid, spec.geometry, baseline_diagonal(initial));
  CsvBuilder csv({"time", "eta", "leakage"});
  std::vector<double> times;
  std::vector<std::vector<double>> traces(grid.size());
  EvolveOptions opts = build_evolve_options(cfg);
  opts.keep_states = false;
  opts.observer = [&](std::size_t, double t, const ComplexMatrix& rho) {
    tracker.observe(t, rho);
    times.push_back(t);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double value = leakage(rho, grid[k], spec.geometry);
      traces[k].push_back(value);
      csv.add_row({format_double(t), format_double(grid[k]), format_double(value)});
    }
  };
  const EvolutionResult run = evolve(spec, initial, cfg.t_final, opts);
  const FrontReport front = fit_front(tracker);

  const double drift_tol =
      opts.backend == EvolveBackend::rk4 ? tol::trace_drift_rk4 : tol::trace_drift_superop;
  Json checks;
  checks["trace_drift"] = run.trace_drift <= drift_tol;
  checks["positivity"] = run.min_eigenvalue >= tol::evolved_min_eig_floor;
  checks["hermiticity_correction"] = run.hermiticity_correction <= tol::step_hermiticity_cap;
  if (cfg.hopping != 0.0)
    checks["front_speed"] = front.fit_ok && front.speed > 0.0 &&
                            front.speed <= tol::front_speed_factor * velocity.kappa;

  Json summary;
  summary["config"] = config_echo(cfg);
  summary["kappa"] = velocity.kappa;
  summary["hamiltonian_speed"] = velocity.hamiltonian_speed;
  summary["environment_shift"] = velocity.environment_shift;
  summary["trace_drift"] = run.trace_drift;
  summary["min_eigenvalue"] = run.min_eigenvalue;
  summary["hermiticity_correction"] = run.hermiticity_correction;
  summary["integrator"] = run.integrator;
  summary["dt_used"] = run.dt_used;
  summary["halvings"] = run.halvings;
  summary["front_speed"] = front.speed;
  summary["front_fit_ok"] = front.fit_ok;
  summary["front_crossings"] = front.crossings.size();
  summary["boundary_mass_max"] = front.boundary_mass_max;
  summary["run_valid"] = front.run_valid;

  Json fits;
  fits["front"] = fit_json(front.fit);
  out.emit("fits.json", fits.dump(2) + "\n");
  out.emit("leakage.csv", csv.text());

  std::vector<PlotSeries> series;
  const std::vector<std::string> palette = {"#1f6fb2", "#c23b22", "#2e8540", "#8d5fb2"};
  for (std::size_t pick = 0; pick < 4; ++pick) {
    const std::size_t k = pick * (grid.size() - 1) / 3;
    PlotSeries s;
    s.label = "eta=" + format_short(grid[k]);
    s.xs = times;
    s.ys = traces[k];
    s.color = palette[pick];
    series.push_back(std::move(s));
  }
  out.emit("plot.svg", plot_lines(series, "leakage vs time", "t", "Tr(chi rho)"));
  return write_summary(out, summary, checks);
}

// -- lightcone: cone-edge scaling experiment --------------------------------

inline bool scenario_lightcone(const RunConfig& cfg, const ScenarioContext& ctx,
                               ReportWriter& out) {
  const ModelSpec spec = build_model(cfg);
  out.emit("audit.json", audit_json(cfg, spec).dump(2) + "\n");
  const InitialState initial = build_initial(cfg, spec);
  const double kappa = velocity_operator(spec).kappa;
  const auto [outer, inner] = resolve_speeds(cfg, kappa);
  const SmoothCutoff f = make_cutoff(outer, inner);
  note(ctx, "lightcone: c = " + format_short(outer) + ", c' = " + format_short(inner) +
                ", kappa = " + format_short(kappa));

  LightconeOptions opts;
  opts.frame_a = cfg.frame_a;
  opts.eta_grid = make_eta_grid(cfg, spec);
  opts.samples_per_run = static_cast<std::size_t>(cfg.samples);
  opts.threads = ctx.threads;
  opts.evolve = build_evolve_options(cfg);
  const LightconeReport report =
      run_lightcone_experiment(spec, f, initial, cfg.cone_scales, opts);

  Json checks;
  checks["cone_decay_slope"] = report.cone_fit.slope <= tol::lightcone_slope_max;
  checks["cone_decay_r2"] = report.cone_fit.r_squared >= tol::lightcone_r2_min;
  checks["edge_decay_slope"] = report.edge_fit.slope <= tol::lightcone_slope_max;
  checks["edge_decay_r2"] = report.edge_fit.r_squared >= tol::lightcone_r2_min;
  checks["run_valid"] = report.transport.front.run_valid;
  if (report.transport.front.fit_ok)
    checks["front_speed"] =
        report.transport.front.speed <= tol::front_speed_factor * report.velocity.kappa;

  Json summary;
  summary["config"] = config_echo(cfg);
  summary["kappa"] = report.velocity.kappa;
  summary["speed_outer"] = outer;
  summary["speed_inner"] = inner;
  summary["s_values"] = report.s_values;
  summary["edge_leakages"] = report.edge_leakages;
  summary["cone_expectations"] = report.cone_expectations;
  summary["constant_estimate"] = report.constant_estimate;
  summary["front_speed"] = report.transport.front.speed;
  summary["run_valid"] = report.transport.front.run_valid;

  Json fits;
  fits["edge"] = fit_json(report.edge_fit);
  fits["cone"] = fit_json(report.cone_fit);
  fits["front"] = fit_json(report.transport.front.fit);
  out.emit("fits.json", fits.dump(2) + "\n");

  CsvBuilder csv({"s", "t", "eta", "leakage", "f_expectation"});
  for (const auto& row : report.transport.rows)
    csv.add_row({format_double(row.s), format_double(row.t), format_double(row.eta),
                 format_double(row.value), format_double(row.f_expectation)});
  out.emit("leakage.csv", csv.text());

  PlotSeries edge{"edge leakage", report.s_values, report.edge_leakages, "#1f6fb2"};
  PlotSeries cone{"cone expectation", report.s_values, report.cone_expectations, "#2e8540"};
  PlotLine fitline{"slope " + format_short(report.edge_fit.slope), report.edge_fit.slope,
                   report.edge_fit.intercept, "#c23b22"};
  out.emit("plot.svg",
           plot_loglog({edge, cone}, {fitline}, "beyond-cone decay", "s", "leakage"));
  return write_summary(out, summary, checks);
}

// -- rme: monotonicity-estimate residual scaling ------------------------------

inline bool scenario_rme(const RunConfig& cfg, const ScenarioContext& ctx, ReportWriter& out) {
  const ModelSpec spec = build_model(cfg);
  out.emit("audit.json", audit_json(cfg, spec).dump(2) + "\n");
  const double kappa = velocity_operator(spec).kappa;
  const auto [outer, inner] = resolve_speeds(cfg, kappa);
  const SmoothCutoff f = make_cutoff(outer, inner);
  note(ctx, "rme: scanning " + std::to_string(cfg.rme_scales.size()) + " scales");
  const RmeReport report = verify_rme(spec, f, cfg.rme_frame_a, cfg.radius_b, cfg.rme_scales);

  Json checks;
  checks["residual_decay"] = report.pass;

  Json summary;
  summary["config"] = config_echo(cfg);
  summary["kappa"] = report.kappa;
  summary["s_values"] = report.s_values;
  summary["residual_max_eigs"] = report.residual_max_eigs;
  summary["residual_pos"] = report.residual_pos;
  summary["all_zero"] = report.all_zero;
  summary["c2_estimate"] = report.c2_estimate;
  summary["subtracted"] = report.subtracted;

  Json fits;
  if (report.fit) fits["residual"] = fit_json(*report.fit);
  fits["c2_estimate"] = report.c2_estimate;
  out.emit("fits.json", fits.dump(2) + "\n");

  PlotSeries mu{"positive residual", report.s_values, report.residual_pos, "#1f6fb2"};
  std::vector<PlotLine> lines;
  if (report.fit)
    lines.push_back({"slope " + format_short(report.fit->slope), report.fit->slope,
                     report.fit->intercept, "#c23b22"});
  out.emit("plot.svg", plot_loglog({mu}, lines, "monotonicity residual", "s", "mu+"));
  return write_summary(out, summary, checks);
}

// -- expansion: commutator expansion remainder scaling --------------------------

inline bool scenario_expansion(const RunConfig& cfg, const ScenarioContext& ctx,
                               ReportWriter& out) {
  const ModelSpec spec = build_model(cfg);
  out.emit("audit.json", audit_json(cfg, spec).dump(2) + "\n");
  const double kappa = velocity_operator(spec).kappa;
  const auto [outer, inner] = resolve_speeds(cfg, kappa);
  const SmoothCutoff f = make_cutoff(outer, inner);
  const ComplexMatrix h = build_hamiltonian(spec);

  const double w_max = position_weight(spec.geometry.half_width);
  double s_max = 0.0;
  for (double s : cfg.expansion_scales) s_max = std::max(s_max, s);
  for (double a : cfg.expansion_offsets)
    if (a + f.support_right * s_max + spec.hopping_range + 1 > w_max)
      throw InvalidInputError("expansion window leaves the lattice; enlarge lattice.half_width");
  note(ctx, "expansion: " + std::to_string(cfg.expansion_orders.size()) + " orders x " +
                std::to_string(cfg.expansion_offsets.size()) + " offsets");

  Json checks;
  Json fits;
  CsvBuilder csv({"order", "offset", "s", "remainder_norm"});
  std::vector<PlotSeries> series;
  const std::vector<std::string> palette = {"#1f6fb2", "#c23b22", "#2e8540", "#8d5fb2"};
  std::size_t color_at = 0;
  for (int order : cfg.expansion_orders) {
    const ExpansionSweep sweep = verify_expansion_offsets(
        h, f, spec.geometry, cfg.expansion_offsets, cfg.expansion_scales, order);
    checks["order_" + std::to_string(order)] = sweep.pass;
    Json per;
    per["slope_spread"] = sweep.slope_spread;
    for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
      const ExpansionReport& r = sweep.reports[i];
      Json rj = fit_json(r.fit);
      rj["offset"] = r.offset;
      rj["order_constant"] = r.order_constant;
      rj["bn_norm"] = r.bn_norm;
      per["offset_" + std::to_string(i)] = rj;
      for (std::size_t k = 0; k < r.s_values.size(); ++k)
        csv.add_row({std::to_string(order), format_double(r.offset),
                     format_double(r.s_values[k]), format_double(r.errors[k])});
    }
    fits["order_" + std::to_string(order)] = per;
    PlotSeries s;
    s.label = "n=" + std::to_string(order);
    s.xs = sweep.reports.front().s_values;
    s.ys = sweep.reports.front().errors;
    s.color = palette[color_at++ % palette.size()];
    series.push_back(std::move(s));
  }
  out.emit("fits.json", fits.dump(2) + "\n");
  out.emit("leakage.csv", csv.text());
  out.emit("plot.svg", plot_loglog(series, {}, "expansion remainder", "s", "E(s)"));

  Json summary;
  summary["config"] = config_echo(cfg);
  summary["orders"] = cfg.expansion_orders;
  summary["scales"] = cfg.expansion_scales;
  summary["offsets"] = cfg.expansion_offsets;
  return write_summary(out, summary, checks);
}

// -- basic equality -----------------------------------------------------------

inline bool scenario_basic_equality(const RunConfig& cfg, const ScenarioContext& ctx,
                                    ReportWriter& out) {
  const ModelSpec spec = build_model(cfg);
  out.emit("audit.json", audit_json(cfg, spec).dump(2) + "\n");
  const InitialState initial = build_initial(cfg, spec);
  const double kappa = velocity_operator(spec).kappa;
  const auto [outer, inner] = resolve_speeds(cfg, kappa);
  const SmoothCutoff f = make_cutoff(outer, inner);
  note(ctx, "basic-equality: coarse and refined quadrature passes");

  EvolveOptions opts = build_evolve_options(cfg);
  const std::size_t nodes = static_cast<std::size_t>(cfg.equality_nodes);
  const BasicEqualityReport coarse = verify_basic_equality(
      spec, f, initial, cfg.frame_a, cfg.equality_scale, cfg.t_final, nodes, opts);
  EvolveOptions fine_opts = opts;
  fine_opts.dt = coarse.dt_used / 2.0;
  const BasicEqualityReport fine = verify_basic_equality(
      spec, f, initial, cfg.frame_a, cfg.equality_scale, cfg.t_final, 2 * nodes - 1, fine_opts);
  const double ratio = coarse.residual / std::max(fine.residual, 1e-300);

  Json checks;
  checks["residual"] = coarse.residual <= tol::basic_equality_residual;
  checks["refinement"] = ratio >= tol::basic_equality_refinement;

  Json summary;
  summary["config"] = config_echo(cfg);
  summary["initial_value"] = coarse.initial_value;
  summary["final_value"] = coarse.final_value;
  summary["integral"] = coarse.integral;
  summary["residual"] = coarse.residual;
  summary["residual_refined"] = fine.residual;
  summary["refinement_ratio"] = ratio;
  summary["nodes"] = coarse.nodes;
  summary["dt_used"] = coarse.dt_used;
  return write_summary(out, summary, checks);
}

// -- stationary ----------------------------------------------------------------

inline bool scenario_stationary(const RunConfig& cfg, const ScenarioContext& ctx,
                                ReportWriter& out) {
  const ModelSpec spec = build_model(cfg);
  out.emit("audit.json", audit_json(cfg, spec).dump(2) + "\n");
  note(ctx, "stationary: solving the vectorized kernel");
  const StationaryResult res = stationary_state(spec);

  Json checks;
  Json summary;
  summary["config"] = config_echo(cfg);
  summary["degenerate"] = res.degenerate;
  summary["smallest_singular_values"] = res.smallest_singular_values;
  if (res.state) {
    checks["residual"] = res.residual <= tol::stationary_residual;
    summary["residual"] = res.residual;

    InitialState still{*res.state, ComplexMatrix(spec.geometry.size()), 1.0};
    double drift = 0.0;
    EvolveOptions opts = build_evolve_options(cfg);
    opts.keep_states = false;
    const ComplexMatrix& target = res.state->matrix;
    opts.observer = [&](std::size_t, double, const ComplexMatrix& rho) {
      drift = std::max(drift, (rho - target).max_abs());
    };
    evolve(spec, still, cfg.t_final, opts);
    checks["evolution_drift"] = drift <= tol::stationary_drift;
    summary["evolution_drift"] = drift;
  } else {
    checks["state_found"] = false;
  }
  return write_summary(out, summary, checks);
}

// -- conjecture scan --------------------------------------------------------------

inline bool scenario_conjecture(const RunConfig& cfg, const ScenarioContext& ctx,
                                ReportWriter& out) {
  ScanConfig scan;
  scan.geometry = make_geometry(cfg.half_width);
  scan.hopping = cfg.hopping;
  scan.hopping_range = cfg.hopping_range;
  scan.strength = cfg.conjecture_strength;
  scan.potential_amplitude = cfg.conjecture_amplitude;
  scan.seed = cfg.seed;
  note(ctx, "conjecture: " + std::to_string(cfg.conjecture_trials) + " random models");
  const ConjectureReport report =
      conjecture_scan(scan, static_cast<std::size_t>(cfg.conjecture_trials));

  CsvBuilder csv({"trial", "kappa", "hamiltonian_speed", "environment_shift"});
  for (const auto& row : report.rows)
    csv.add_row({std::to_string(row.trial), format_double(row.kappa),
                 format_double(row.hamiltonian_speed), format_double(row.environment_shift)});
  out.emit("leakage.csv", csv.text());

  Json summary;
  summary["config"] = config_echo(cfg);
  summary["trials"] = report.rows.size();
  summary["violations"] = report.violations;
  summary["min_environment_shift"] = report.min_shift;

  Json checks;
  checks["scan_complete"] = report.rows.size() == static_cast<std::size_t>(cfg.conjecture_trials);
  return write_summary(out, summary, checks);
}

// -- audit (also reachable via the `audit` subcommand) -----------------------------

inline bool scenario_audit(const RunConfig& cfg, const ScenarioContext& ctx, ReportWriter& out) {
  const ModelSpec spec = build_model(cfg);
  note(ctx, "audit: adjoint norms up to order " + std::to_string(cfg.order));
  const Json j = audit_json(cfg, spec);
  out.emit("audit.json", j.dump(2) + "\n");
  return j["passed"].get<bool>();
}

}  // namespace detail

inline int run_scenario(const RunConfig& cfg, const ScenarioContext& ctx) {
  detail::ReportWriter out(ctx.output_dir.empty() ? cfg.output_dir : ctx.output_dir);
  try {
    bool ok = false;
    switch (cfg.scenario) {
      case Scenario::battery: ok = detail::scenario_battery(cfg, ctx, out); break;
      case Scenario::lightcone: ok = detail::scenario_lightcone(cfg, ctx, out); break;
      case Scenario::rme: ok = detail::scenario_rme(cfg, ctx, out); break;
      case Scenario::expansion: ok = detail::scenario_expansion(cfg, ctx, out); break;
      case Scenario::basic_equality: ok = detail::scenario_basic_equality(cfg, ctx, out); break;
      case Scenario::stationary: ok = detail::scenario_stationary(cfg, ctx, out); break;
      case Scenario::conjecture: ok = detail::scenario_conjecture(cfg, ctx, out); break;
      case Scenario::audit: ok = detail::scenario_audit(cfg, ctx, out); break;
    }
    return ok ? exit_ok : exit_checks_failed;
  } catch (const NumericFailureError& e) {
    out.discard_partial();
    (*ctx.log) << "numeric failure: " << e.what() << '\n';
    return exit_numeric_failure;
  } catch (const InvalidInputError& e) {
    out.discard_partial();
    (*ctx.log) << "error: " << e.what() << '\n';
    return exit_config_error;
  }
}

// `audit <config>`: assumption norms and the speed report without dynamics.
inline int run_audit(const RunConfig& cfg, const ScenarioContext& ctx) {
  RunConfig audit_cfg = cfg;
  audit_cfg.scenario = Scenario::audit;
  return run_scenario(audit_cfg, ctx);
}

}  // namespace lindblad
