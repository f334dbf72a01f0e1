#include "saddle/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

#include "saddle/errors.h"
#include "saddle/model.h"
#include "saddle/parallel.h"
#include "saddle/scalar.h"
#include "saddle/symmetry.h"

namespace saddle {

namespace fs = std::filesystem;

namespace {

BistableModel load_model(const RunOptions& opts, double lambda) {
  if (opts.model_file) return BistableModel::from_file(*opts.model_file, lambda, opts.p);
  return BistableModel::cubic(lambda, opts.p);
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string stepper_name(StepperKind s) {
  return s == StepperKind::Explicit ? "explicit" : "implicit";
}

void require_out(const RunOptions& opts) {
  if (opts.out.empty()) throw ConfigError("--out DIR is required");
  fs::create_directories(opts.out);
}

std::vector<double> rho_list(const RunOptions& opts) {
  std::vector<double> rho = opts.rho.empty() ? default_rho_list(opts.radius) : opts.rho;
  for (double r : rho)
    if (!(r > 0.0) || !(r < opts.radius))
      throw ConfigError("every --rho value must lie in (0, radius)");
  return rho;
}

// Everything that has to agree between a checkpoint and the run resuming it.
KeyValues config_echo(const RunOptions& opts, bool cone, const BistableModel& model,
                      double dt) {
  KeyValues kv;
  kv["config.mode"] = cone ? "cone" : "planar";
  kv[cone ? "config.m" : "config.k"] = std::to_string(cone ? opts.m : opts.k);
  kv["config.lambda"] = format_double(model.lambda());
  kv["config.p"] = format_double(model.p());
  kv["config.M"] = format_double(model.M());
  kv["config.model"] = opts.model_file ? opts.model_file->string() : "cubic";
  kv["config.radius"] = format_double(opts.radius);
  kv["config.grid_n"] = std::to_string(opts.grid_n);
  kv["config.dt"] = format_double(dt);
  kv["config.tol"] = format_double(opts.flow.tol);
  kv["config.max_steps"] = std::to_string(opts.flow.max_steps);
  kv["config.project_box"] = yes_no(opts.flow.project_box);
  kv["config.project_order"] = yes_no(opts.flow.project_order);
  kv["config.project_symmetry_every"] = std::to_string(opts.flow.project_symmetry_every);
  kv["config.checkpoint_every"] = std::to_string(opts.flow.checkpoint_every);
  kv["config.energy_every"] = std::to_string(opts.flow.energy_every);
  kv["config.stepper"] = stepper_name(opts.flow.stepper);
  return kv;
}

FieldHeader make_header(const BistableModel& model, int symmetry_param) {
  FieldHeader h;
  h.symmetry_param = symmetry_param;
  h.lambda = model.lambda();
  h.p = model.p();
  h.M = model.M();
  return h;
}

void write_trace(const FlowReport& rep, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "step,J,projected\n";
  for (const auto& s : rep.energy_trace)
    out << s.step << ',' << format_double(s.J) << ',' << (s.projected ? 1 : 0) << '\n';
}

void add_report(KeyValues& kv, const FlowReport& rep) {
  kv["result.converged"] = yes_no(rep.converged);
  kv["result.steps_taken"] = std::to_string(rep.steps_taken);
  kv["result.final_step"] = std::to_string(rep.final_step);
  kv["result.dt"] = format_double(rep.dt);
  kv["result.final_residual"] = format_double(rep.final_residual);
  kv["result.max_energy_increase"] = format_double(rep.max_energy_increase);
  kv["result.max_relative_energy_increase"] = format_double(rep.max_relative_energy_increase);
  kv["violations.box"] = std::to_string(rep.violations.box);
  kv["violations.order"] = std::to_string(rep.violations.order);
  kv["violations.symmetry"] = std::to_string(rep.violations.symmetry);
  kv["violations.box_magnitude"] = format_double(rep.violations.box_magnitude);
  kv["violations.order_magnitude"] = format_double(rep.violations.order_magnitude);
  kv["violations.symmetry_magnitude"] = format_double(rep.violations.symmetry_magnitude);
  kv["observed.min_value"] = format_double(rep.observed.min_value);
  kv["observed.max_value"] = format_double(rep.observed.max_value);
  kv["observed.max_order_deficit"] = format_double(rep.observed.max_order_deficit);
  kv["observed.max_symmetry_residual"] = format_double(rep.observed.max_symmetry_residual);
}

void add_fit(KeyValues& kv, const PolyFit& fit) {
  for (std::size_t i = 0; i < fit.coeffs.size(); ++i)
    kv["fit.a" + std::to_string(i)] = format_double(fit.coeffs[i]);
}

bool within_policy(const FlowReport& rep, bool exact_symmetry) {
  if (rep.violations.box_magnitude > kProjectionPolicy) return false;
  if (rep.violations.order_magnitude > kProjectionPolicy) return false;
  if (exact_symmetry && rep.violations.symmetry_magnitude > kProjectionPolicy) return false;
  return true;
}

// min of u - v over Interior nodes of the u-dominant region farther than 2h
// from its boundary lines.
double min_interior_gap(const FieldPair& pair, const SymmetrySpec& spec) {
  const GridSpec& g = pair.grid();
  const double margin = 2.0 * g.h();
  std::vector<std::uint8_t> keep;
  if (spec.mode() == SymmetryMode::Planar) {
    keep = off_line_mask(g, spec.k(), margin);
  } else {
    keep.assign(g.size(), 0);
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) {
        const Point2 x = g.node(i, j);
        if (g.kind(i, j) == NodeKind::Interior && (x.x1 - x.x2) / std::sqrt(2.0) > margin)
          keep[g.index(i, j)] = 1;
      }
  }
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const std::size_t idx = g.index(i, j);
      if (!keep[idx] || !spec.in_sector(g.node(i, j))) continue;
      gap = std::min(gap, pair.u[idx] - pair.v[idx]);
    }
  return gap;
}

void write_checkpoint(const fs::path& dir, long step, const FieldPair& state,
                      const FieldHeader& header, const KeyValues& echo) {
  write_field(dir / "checkpoint_u.sfld.tmp", state.u, header);
  write_field(dir / "checkpoint_v.sfld.tmp", state.v, header);
  KeyValues kv = echo;
  kv["step"] = std::to_string(step);
  write_key_values(dir / "checkpoint.txt.tmp", kv);
  fs::rename(dir / "checkpoint_u.sfld.tmp", dir / "checkpoint_u.sfld");
  fs::rename(dir / "checkpoint_v.sfld.tmp", dir / "checkpoint_v.sfld");
  fs::rename(dir / "checkpoint.txt.tmp", dir / "checkpoint.txt");
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SystemRun run_system(const RunOptions& opts, bool cone) {
  const auto t0 = std::chrono::steady_clock::now();
  const BistableModel model = load_model(opts, opts.lambda);
  const SymmetrySpec spec = cone ? SymmetrySpec::cone(opts.m) : SymmetrySpec::planar(opts.k);
  const GridPtr grid = cone ? GridSpec::st_quadrant(opts.radius, opts.grid_n, opts.m)
                            : GridSpec::disk(opts.radius, opts.grid_n);
  const std::vector<double> rho = rho_list(opts);
  require_out(opts);
  const double dt = resolve_dt(opts.flow, *grid);
  const KeyValues echo = config_echo(opts, cone, model, dt);
  const FieldHeader header = make_header(model, cone ? opts.m : opts.k);

  FieldPair initial = init_state(grid, spec, model);
  long start_step = 0;
  const fs::path ckpt = opts.out / "checkpoint.txt";
  if (opts.resume && fs::exists(ckpt)) {
    KeyValues saved = read_key_values(ckpt);
    for (const auto& [k, v] : echo) {
      auto it = saved.find(k);
      if (it == saved.end() || it->second != v)
        throw ConfigError("checkpoint was written with a different " + k);
    }
    start_step = std::stol(saved.at("step"));
    initial.u = read_field_on(opts.out / "checkpoint_u.sfld", grid);
    initial.v = read_field_on(opts.out / "checkpoint_v.sfld", grid);
  }

  const CheckpointHook hook = [&](long s, const FieldPair& state) {
    write_checkpoint(opts.out, s, state, header, echo);
  };
  auto [state, report] = run_to_steady(initial, model, spec, opts.flow, hook, start_step);

  SystemRun run;
  run.state = std::move(state);
  run.report = std::move(report);
  run.residual = residual_check(run.state, model, spec);
  run.residual_free = residual_check_free(run.state, model, spec);
  run.symmetry_residual = symmetry_residual(spec, run.state);
  const InteractionPotential pot(model);
  run.energy = sector_energy_scan(run.state, spec, pot, rho);
  run.min_interior_gap = min_interior_gap(run.state, spec);
  const ThresholdResult thr = segregation_threshold_holds(pot);

  if (!run.report.converged) {
    run.exit_code = kExitNoConvergence;
  } else if (!within_policy(run.report, spec.grid_exact())) {
    run.exit_code = kExitPolicy;
  }

  write_field(opts.out / "u.sfld", run.state.u, header);
  write_field(opts.out / "v.sfld", run.state.v, header);
  write_energy_csv(run.energy, opts.out / "energy.csv");
  write_trace(run.report, opts.out / "trace.csv");

  KeyValues kv = echo;
  kv["command"] = opts.command_echo;
  kv["model.kind"] = model.kind_name();
  kv["model.F0"] = format_double(model.F(0.0));
  kv["geometry.h"] = format_double(grid->h());
  kv["geometry.c_m"] = format_double(grid->measure_constant());
  kv["threshold.holds"] = yes_no(thr.holds);
  kv["threshold.inf_value"] = format_double(thr.inf_value);
  kv["threshold.argmin"] = format_double(thr.argmin);
  kv["result.start_step"] = std::to_string(start_step);
  kv["result.residual_check"] = format_double(run.residual);
  kv["result.residual_check_free"] = format_double(run.residual_free);
  kv["result.symmetry_residual"] = format_double(run.symmetry_residual);
  kv["result.J_total"] = format_double(discrete_J(run.state, region_all(*grid), pot));
  kv["result.min_interior_u_minus_v"] = format_double(run.min_interior_gap);
  kv["result.exit_code"] = std::to_string(run.exit_code);
  add_report(kv, run.report);
  add_fit(kv, run.energy.fit);
  kv["files.u"] = "u.sfld";
  kv["files.v"] = "v.sfld";
  kv["files.energy"] = "energy.csv";
  kv["files.trace"] = "trace.csv";
  kv["threads"] = std::to_string(configure_threads());
  kv["wall_seconds"] = format_double(elapsed_seconds(t0));
  write_key_values(opts.out / "manifest.txt", kv);
  return run;
}

int cmd_solve2d(const RunOptions& opts) { return run_system(opts, false).exit_code; }

int cmd_saddle(const RunOptions& opts) { return run_system(opts, true).exit_code; }

int cmd_scalar(const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const BistableModel model = load_model(opts, 0.0);
  const ScalarProblem prob = ScalarProblem::make(model, opts.k, opts.radius, opts.grid_n);
  const std::vector<double> rho = rho_list(opts);
  require_out(opts);

  auto [w_sector, report] = solve_scalar_sector(prob, opts.flow);
  const ScalarField w = reflect_to_plane(w_sector, opts.k);
  const GridSpec& g = *prob.grid;
  const double sector_res = scalar_residual(w_sector, sector_mask(prob), model);
  const double plane_res = scalar_residual(w, off_line_mask(g, opts.k, g.h()), model);
  const EnergyReport energy = scalar_energy_estimate(w, model, rho);
  const MinimalityResult mini =
      minimality_check(prob, w_sector, opts.minimality_samples, opts.seed);

  int code = kExitOk;
  if (!report.converged) {
    code = kExitNoConvergence;
  } else if (report.violations.box_magnitude > kProjectionPolicy) {
    code = kExitPolicy;
  }

  const FieldHeader header = make_header(model, opts.k);
  write_field(opts.out / "w_sector.sfld", w_sector, header);
  write_field(opts.out / "w.sfld", w, header);
  write_energy_csv(energy, opts.out / "energy.csv");
  write_trace(report, opts.out / "trace.csv");

  KeyValues kv;
  kv["command"] = opts.command_echo;
  kv["config.mode"] = "scalar";
  kv["config.k"] = std::to_string(opts.k);
  kv["config.model"] = opts.model_file ? opts.model_file->string() : "cubic";
  kv["config.radius"] = format_double(opts.radius);
  kv["config.grid_n"] = std::to_string(opts.grid_n);
  kv["config.tol"] = format_double(opts.flow.tol);
  kv["config.max_steps"] = std::to_string(opts.flow.max_steps);
  kv["config.project_box"] = yes_no(opts.flow.project_box);
  kv["config.stepper"] = stepper_name(opts.flow.stepper);
  kv["config.seed"] = std::to_string(opts.seed);
  kv["model.M"] = format_double(model.M());
  kv["model.F0"] = format_double(model.F(0.0));
  kv["result.sector_residual"] = format_double(sector_res);
  kv["result.plane_residual_off_lines"] = format_double(plane_res);
  kv["minimality.samples"] = std::to_string(mini.samples);
  kv["minimality.lower_count"] = std::to_string(mini.lower_count);
  kv["minimality.reference_energy"] = format_double(mini.reference_energy);
  kv["minimality.min_perturbed_energy"] = format_double(mini.min_perturbed_energy);
  kv["result.exit_code"] = std::to_string(code);
  add_report(kv, report);
  add_fit(kv, energy.fit);
  kv["files.w_sector"] = "w_sector.sfld";
  kv["files.w"] = "w.sfld";
  kv["files.energy"] = "energy.csv";
  kv["files.trace"] = "trace.csv";
  kv["wall_seconds"] = format_double(elapsed_seconds(t0));
  write_key_values(opts.out / "manifest.txt", kv);
  return code;
}

int cmd_sweep(const RunOptions& opts, const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw ConfigError("--lambdas needs at least one value");
  require_out(opts);
  std::ofstream summary(opts.out / "summary.csv");
  if (!summary) throw ConfigError("cannot write summary.csv");
  summary << "lambda,holds,J_slope,min_interior_u_minus_v\n";
  int worst = kExitOk;
  for (double lambda : lambdas) {
    RunOptions sub = opts;
    sub.lambda = lambda;
    sub.out = opts.out / ("lambda_" + format_double(lambda));
    const SystemRun run = run_system(sub, false);
    const BistableModel model = load_model(sub, lambda);
    const bool holds = segregation_threshold_holds(InteractionPotential(model)).holds;
    summary << format_double(lambda) << ',' << (holds ? 1 : 0) << ','
            << format_double(run.energy.fit.coeff(1)) << ','
            << format_double(run.min_interior_gap) << '\n';
    worst = std::max(worst, run.exit_code);
  }
  return worst;
}

namespace {

void add_flow_flags(CLI::App* sub, RunOptions& o) {
  sub->add_option("--dt", o.flow.dt, "time step (0: 0.2 h^2 default)");
  sub->add_option("--tol", o.flow.tol, "steady-state threshold on max|dU/dt|");
  sub->add_option("--max-steps", o.flow.max_steps);
  sub->add_option("--project-box", o.flow.project_box, "clamp to [0,M] (true/false)");
  sub->add_option("--project-order", o.flow.project_order, "enforce u >= v on the sector");
  sub->add_option("--project-symmetry-every", o.flow.project_symmetry_every,
                  "symmetry projection cadence (-1 auto, 0 off)");
  sub->add_option("--checkpoint-every", o.flow.checkpoint_every);
  sub->add_option("--energy-every", o.flow.energy_every);
  sub->add_option("--stepper", o.flow.stepper, "explicit | implicit")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, StepperKind>{{"explicit", StepperKind::Explicit},
                                             {"implicit", StepperKind::DiagonalImplicit}},
          CLI::ignore_case));
}

void add_geometry_flags(CLI::App* sub, RunOptions& o) {
  sub->add_option("--radius", o.radius);
  sub->add_option("--grid-n", o.grid_n);
  sub->add_option("--out", o.out, "output directory")->required();
  sub->add_option("--rho", o.rho, "energy radii")->delimiter(',');
  sub->add_option("--model-file", o.model_file, "tabulated nonlinearity ('M <v>' then 't f' lines)");
}

}  // namespace

int run_cli(int argc, char** argv) {
  configure_threads();
  CLI::App app{"Saddle-type solutions of segregated two-component systems"};
  app.require_subcommand(1);

  RunOptions o;
  std::vector<double> lambdas;
  for (int a = 0; a < argc; ++a) o.command_echo += (a ? " " : "") + std::string(argv[a]);

  auto* solve2d = app.add_subcommand("solve2d", "planar saddle-type system on a disk");
  solve2d->add_option("--k", o.k, "number of nodal lines (>= 2)");
  auto* saddle = app.add_subcommand("saddle", "cone-symmetric system in R^{2m}");
  saddle->add_option("--m", o.m, "half dimension (>= 2)");
  auto* scalar = app.add_subcommand("scalar", "scalar saddle-type solution w_k");
  scalar->add_option("--k", o.k, "number of nodal lines (>= 2)");
  auto* sweep = app.add_subcommand("sweep", "solve2d over a list of couplings");
  sweep->add_option("--k", o.k, "number of nodal lines (>= 2)");
  sweep->add_option("--lambdas", lambdas, "comma-separated couplings")
      ->delimiter(',')
      ->required();

  for (auto* sub : {solve2d, saddle, scalar, sweep}) {
    add_geometry_flags(sub, o);
    add_flow_flags(sub, o);
  }
  for (auto* sub : {solve2d, saddle}) {
    sub->add_option("--lambda", o.lambda, "coupling strength");
    sub->add_option("--p", o.p, "coupling exponent (>= 1)");
    sub->add_flag("--resume", o.resume, "continue from checkpoint in --out");
  }
  sweep->add_option("--p", o.p, "coupling exponent (>= 1)");
  sweep->add_flag("--resume", o.resume, "continue each run from its checkpoint");
  scalar->add_option("--minimality-samples", o.minimality_samples);
  scalar->add_option("--seed", o.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*solve2d) return cmd_solve2d(o);
    if (*saddle) return cmd_saddle(o);
    if (*scalar) return cmd_scalar(o);
    return cmd_sweep(o, lambdas);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedModeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace saddle
