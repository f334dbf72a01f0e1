// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.
// Optional arguments select criteria by number, e.g. `acceptance 1 6`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "oracle.h"
#include "saddle/energy.h"
#include "saddle/flow.h"
#include "saddle/model.h"
#include "saddle/parallel.h"
#include "saddle/scalar.h"
#include "saddle/symmetry.h"

using namespace saddle;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

/// min of u - v over Interior sector nodes farther than 2h from the sector edges.
double interior_gap(const FieldPair& p, const SymmetrySpec& spec) {
  const GridSpec& g = p.grid();
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const Point2 x = g.node(i, j);
      if (g.kind(i, j) != NodeKind::Interior || !spec.in_sector(x)) continue;
      if (!(spec.distance_to_lines(x) > 2.0 * g.h())) continue;
      gap = std::min(gap, p.u.at(i, j) - p.v.at(i, j));
    }
  return gap;
}

Outcome threshold_sharpness() {
  Outcome o{true, ""};
  auto holds = [](double l) {
    return segregation_threshold_holds(InteractionPotential(BistableModel::cubic(l))).holds;
  };
  o.pass = !holds(1.0 - 1e-6) && !holds(1.0) && holds(1.0 + 1e-6);
  double worst = 0.0;
  for (double l : {0.5, 1.0, 2.0, 5.0}) {
    const ThresholdResult r = segregation_threshold_holds(InteractionPotential(BistableModel::cubic(l)));
    worst = std::max(worst, std::abs(r.inf_value - l / (2 * (1 + l))));
    worst = std::max(worst, std::abs(r.scan_value - l / (2 * (1 + l))));
  }
  o.pass = o.pass && worst <= 1e-12;
  o.detail = "flip at 1, max |inf W(s,s) - L/(2(1+L))| = " + fmt("%.3g", worst);
  return o;
}

struct SmallRun {
  FieldPair state;
  FlowReport rep;
};

const SmallRun& dissipation_run() {
  static const SmallRun run = [] {
    const BistableModel m = BistableModel::cubic(2.0);
    const SymmetrySpec s = SymmetrySpec::planar(2);
    const GridPtr g = GridSpec::disk(10.0, 81);
    FlowConfig cfg;
    cfg.energy_every = 1;
    auto [state, rep] = run_to_steady(init_state(g, s, m), m, s, cfg);
    return SmallRun{std::move(state), std::move(rep)};
  }();
  return run;
}

Outcome dissipation() {
  const SmallRun& r = dissipation_run();
  const double h = r.state.grid().h();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < r.rep.energy_trace.size(); ++i) {
    const double inc = r.rep.energy_trace[i].J - r.rep.energy_trace[i - 1].J;
    worst = std::max(worst, inc / std::abs(r.rep.energy_trace[i - 1].J));
  }
  Outcome o;
  o.pass = r.rep.converged && worst <= 1e-12 && r.rep.violations.total() == 0 &&
           std::abs(r.rep.dt - 0.2 * h * h) <= 1e-15;
  o.detail = std::to_string(r.rep.steps_taken) + " steps, max relative increase " +
             fmt("%.3g", worst) + ", projections " + std::to_string(r.rep.violations.total());
  return o;
}

Outcome invariance() {
  const SmallRun& r = dissipation_run();
  const SymmetrySpec s = SymmetrySpec::planar(2);
  const InvarianceObservation& ob = r.rep.observed;
  const double gap = interior_gap(r.state, s);
  Outcome o;
  o.pass = ob.min_value >= 0.0 && ob.max_value <= 1.0 && ob.max_order_deficit <= 0.0 &&
           ob.max_symmetry_residual == 0.0 && symmetry_residual(s, r.state) == 0.0 &&
           r.rep.violations.total() == 0 && gap > 0.0;
  o.detail = "range [" + fmt("%.3g", ob.min_value) + ", " + fmt("%.6g", ob.max_value) +
             "], order deficit " + fmt("%.3g", ob.max_order_deficit) + ", symmetry " +
             fmt("%.3g", ob.max_symmetry_residual) + ", final gap " + fmt("%.4g", gap);
  return o;
}

Outcome energy_dichotomy() {
  const BistableModel m = BistableModel::cubic(2.0);
  const SymmetrySpec s = SymmetrySpec::planar(2);
  const GridPtr g = GridSpec::disk(40.0, 321);
  const auto [state, rep] = run_to_steady(init_state(g, s, m), m, s, FlowConfig{});
  const std::vector<double> rho = {10, 15, 20, 25, 30, 35};
  const EnergyReport e = sector_energy_scan(state, s, InteractionPotential(m), rho);
  const double F0 = m.F(0.0);
  bool below = true;
  for (std::size_t i = 0; i < rho.size(); ++i)
    below = below && e.J_sector[i] < e.coexistence_floor[i];
  const double a2 = e.fit.coeff(2);
  Outcome o;
  o.pass = rep.converged && std::abs(a2) <= 0.05 * F0 * std::numbers::pi / 2 && below;
  o.detail = std::to_string(rep.steps_taken) + " steps, a2 = " + fmt("%.3g", a2) +
             " (bound " + fmt("%.3g", 0.05 * F0 * std::numbers::pi / 2) + "), a1 = " +
             fmt("%.4g", e.fit.coeff(1)) + ", J below floor at every rho: " +
             (below ? "yes" : "no");
  return o;
}

Outcome scalar_estimate() {
  const BistableModel m = BistableModel::cubic(0.0);
  const double F0 = m.F(0.0);
  const std::vector<double> rho = {10, 15, 20, 25, 30, 35};
  Outcome o{true, ""};
  for (int k : {2, 3}) {
    const ScalarProblem p = ScalarProblem::make(m, k, 40.0, 321);
    const auto [w, rep] = solve_scalar_sector(p, FlowConfig{});
    const ScalarField full = reflect_to_plane(w, k);
    const EnergyReport e = scalar_energy_estimate(full, m, rho);
    const double a2 = e.fit.coeff(2);
    o.pass = o.pass && rep.converged && a2 <= 0.05 * F0 * std::numbers::pi;
    o.detail += "k=" + std::to_string(k) + ": " + std::to_string(rep.steps_taken) +
                " steps, a2 = " + fmt("%.3g", a2) + "; ";
    if (k == 2) {
      const EnergyReport z = scalar_energy_estimate(ScalarField(p.grid, 0.0), m, rho);
      const double rel = std::abs(z.fit.coeff(2) / (F0 * std::numbers::pi) - 1.0);
      o.pass = o.pass && rel <= 0.01;
      o.detail += "zero-field a2/(F0 pi) - 1 = " + fmt("%.3g", rel) + "; ";
    }
  }
  o.detail += "bound " + fmt("%.3g", 0.05 * F0 * std::numbers::pi);
  return o;
}

Outcome oracle_equivalence() {
  const oracle::Problem pb;
  const BistableModel m = BistableModel::cubic(pb.lambda);
  const SymmetrySpec s = SymmetrySpec::planar(2);
  const GridPtr g = GridSpec::disk(pb.R, pb.n);
  FlowConfig cfg;
  cfg.tol = 1e-13;
  const auto [state, rep] = run_to_steady(init_state(g, s, m), m, s, cfg);
  const double J = discrete_J(state, region_all(*g), InteractionPotential(m));
  const oracle::Result best = oracle::minimize(pb, 40, 2024);
  Outcome o;
  o.pass = rep.converged && std::abs(J - best.J) <= 1e-6;
  o.detail = "flow J = " + fmt("%.12f", J) + ", oracle J = " + fmt("%.12f", best.J) + " (" +
             std::to_string(best.restarts) + " restarts, " + std::to_string(best.sweeps) +
             " sweeps)";
  return o;
}

Outcome cone_mode() {
  const BistableModel m = BistableModel::cubic(2.0);
  const SymmetrySpec s = SymmetrySpec::cone(2);
  const GridPtr g = GridSpec::st_quadrant(30.0, 121, 2);
  const auto [state, rep] = run_to_steady(init_state(g, s, m), m, s, FlowConfig{});
  double swap = 0.0, gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g->n(); ++j)
    for (int i = 0; i < g->n(); ++i) {
      if (g->kind(i, j) != NodeKind::Interior) continue;
      swap = std::max(swap, std::abs(state.v.at(i, j) - state.u.at(j, i)));
      if (i > j) gap = std::min(gap, state.u.at(i, j) - state.v.at(i, j));
    }
  const std::vector<double> rho = default_rho_list(30.0, 10);
  const EnergyReport e = sector_energy_scan(state, s, InteractionPotential(m), rho);
  const double bound = 0.05 * m.F(0.0) * g->measure_constant();
  const double a4 = e.fit.coeff(4);
  Outcome o;
  o.pass = rep.converged && swap <= 1e-12 && gap > 0.0 && a4 <= bound;
  o.detail = std::to_string(rep.steps_taken) + " steps, swap residual " + fmt("%.3g", swap) +
             ", min u-v on s>t " + fmt("%.4g", gap) + ", a4 = " + fmt("%.3g", a4) +
             " (bound " + fmt("%.3g", bound) + "), a3 = " + fmt("%.4g", e.fit.coeff(3));
  return o;
}

Outcome decoupled() {
  const BistableModel m = BistableModel::cubic(0.0);
  const SymmetrySpec s = SymmetrySpec::planar(2);
  const GridPtr g = GridSpec::disk(10.0, 81);
  FlowConfig cfg;
  cfg.tol = 1e-11;
  const FieldPair init = init_state(g, s, m);
  const auto [sys, rep] = run_to_steady(init, m, s, cfg);
  const auto [wu, ru] = solve_scalar_dirichlet(init.u, m, cfg, 0.0, m.M());
  const auto [wv, rv] = solve_scalar_dirichlet(init.v, m, cfg, 0.0, m.M());
  double cross = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    cross = std::max(cross, std::abs(sys.u[i] - wu[i]));
    cross = std::max(cross, std::abs(sys.v[i] - wv[i]));
  }
  std::vector<std::uint8_t> interior(g->size(), 0);
  for (std::size_t i = 0; i < g->size(); ++i) interior[i] = g->kind(i) == NodeKind::Interior;
  const double res = std::max(scalar_residual(sys.u, interior, m), scalar_residual(sys.v, interior, m));
  Outcome o;
  o.pass = rep.converged && ru.converged && rv.converged && cross <= 1e-8 && res <= 1e-8;
  o.detail = "max |system - scalar| = " + fmt("%.3g", cross) +
             ", scalar residual of the system state " + fmt("%.3g", res) + ", projections " +
             std::to_string(rep.violations.total());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads();
  std::set<int> only;
  for (int a = 1; a < argc; ++a) only.insert(std::atoi(argv[a]));
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"threshold sharpness", threshold_sharpness},
      {"dissipation", dissipation},
      {"invariance", invariance},
      {"energy-growth dichotomy", energy_dichotomy},
      {"scalar energy estimate", scalar_estimate},
      {"small-grid oracle", oracle_equivalence},
      {"cone mode", cone_mode},
      {"decoupled consistency", decoupled},
  };
  int failed = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id,
                criteria[c].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
