#include "saddle/flow.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "saddle/energy.h"
#include "saddle/errors.h"

namespace saddle {

namespace {

void check_modes(const GridSpec& g, const SymmetrySpec& spec) {
  if (spec.mode() == SymmetryMode::Planar && g.domain() != DomainKind::Disk)
    throw ShapeError("planar symmetry needs a Disk grid");
  if (spec.mode() == SymmetryMode::Cone) {
    if (g.domain() != DomainKind::STQuadrant)
      throw ShapeError("cone symmetry needs an STQuadrant grid");
    if (g.m() != spec.m()) throw ShapeError("cone dimension differs between grid and symmetry");
  }
}

// Sum of the diagonal entries of the negative Laplacian along both axes.
std::vector<double> stencil_diagonal(const GridSpec& g) {
  const auto cp = g.coeff_plus();
  const auto cm = g.coeff_minus();
  const int n = g.n();
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = cp[i] + cm[i];
  return d;
}

}  // namespace

double resolve_dt(const FlowConfig& cfg, const GridSpec& grid) {
  if (cfg.dt < 0.0 || !std::isfinite(cfg.dt)) throw ConfigError("time step must be positive");
  if (cfg.max_steps < 0) throw ConfigError("max_steps must be nonnegative");
  if (!(cfg.tol > 0.0)) throw ConfigError("steady-state tolerance must be positive");
  const double dt = cfg.dt == 0.0 ? 0.8 / grid.max_diagonal() : cfg.dt;
  if (cfg.stepper == StepperKind::Explicit && dt * grid.max_diagonal() > 1.0 + 1e-12) {
    throw ConfigError("explicit time step too large: need dt <= " +
                      std::to_string(1.0 / grid.max_diagonal()) + " on this grid");
  }
  return dt;
}

int resolve_symmetry_every(const FlowConfig& cfg) {
  return cfg.project_symmetry_every >= 0 ? cfg.project_symmetry_every : 1;
}

FieldPair init_state(GridPtr grid, const SymmetrySpec& spec, const BistableModel& model) {
  check_modes(*grid, spec);
  FieldPair pair{ScalarField(grid), ScalarField(grid)};
  const int n = grid->n();
  const double M = model.M();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double w = spec.building_block(grid->node(i, j), M);
      pair.u.at(i, j) = w > 0.0 ? w : 0.0;
      pair.v.at(i, j) = w < 0.0 ? -w : 0.0;
    }
  }
  return pair;
}

GradientFlow::GradientFlow(FieldPair initial, const BistableModel& model,
                           const SymmetrySpec& spec, const FlowConfig& cfg, long start_step)
    : model_(model),
      spec_(spec),
      cfg_(cfg),
      dt_(0.0),
      symmetry_every_(0),
      step_(start_step),
      cur_(std::move(initial)) {
  check_same_grid(cur_.u, cur_.v);
  const GridSpec& g = cur_.grid();
  check_modes(g, spec_);
  dt_ = resolve_dt(cfg_, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.kind(i) != NodeKind::Exterior &&
        !(std::isfinite(cur_.u[i]) && std::isfinite(cur_.v[i])))
      throw DivergenceError("non-finite value in the state at step " + std::to_string(step_),
                            step_);
  symmetry_every_ = resolve_symmetry_every(cfg_);
  next_ = cur_;
  diag_ = stencil_diagonal(g);

  // Without grid-exact symmetry the discrete nodal set is only located to
  // within O(h) of the lines, so ordering is enforced away from them.
  const double margin = spec_.grid_exact() ? 0.0 : kOrderMargin * g.h();
  sign_.assign(g.size(), 0);
  const int n = g.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Point2 x = g.node(i, j);
      if (margin > 0.0 && !(spec_.distance_to_lines(x) > margin)) continue;
      sign_[g.index(i, j)] = static_cast<std::int8_t>(spec_.sector_sign(x));
    }

  if (spec_.grid_exact()) {
    if (spec_.mode() == SymmetryMode::Cone) {
      img_t0_ = node_image(spec_, g, {true, 0, true});
    } else {
      img_t0_ = node_image(spec_, g, {true, 1, true});
      img_t1_ = node_image(spec_, g, {true, 3, true});
      img_mirror_ = node_image(spec_, g, {true, 0, false});
    }
  } else {
    const std::vector<std::uint8_t> free = free_nodes(g, spec_);
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      if (g.kind(idx) != NodeKind::Interior || free[idx]) continue;
      const Folded f = spec_.fold(g.node(static_cast<int>(idx % n), static_cast<int>(idx / n)));
      slaved_.push_back(idx);
      fold_stencil_.push_back(interpolation_stencil(g, f.point));
      fold_swaps_.push_back(f.parity < 0 ? 1 : 0);
    }
    ext_u_.assign(slaved_.size(), 0.0);
    ext_v_.assign(slaved_.size(), 0.0);
  }

  const double inf = std::numeric_limits<double>::infinity();
  observed_.min_value = inf;
  observed_.max_value = -inf;
}

void GradientFlow::sweep() {
  const GridSpec& g = cur_.grid();
  const int n = g.n();
  const double dt = dt_;
  const double M = model_.M();
  const bool implicit = cfg_.stepper == StepperKind::DiagonalImplicit;
  const bool clamp = cfg_.project_box;
  const double* u = cur_.u.values().data();
  const double* v = cur_.v.values().data();
  double* un = next_.u.values().data();
  double* vn = next_.v.values().data();
  const double* diag = diag_.data();

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  long box_count = 0;
  double box_mag = 0.0;
  int bad_row = -1;

#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi, box_mag, bad_row) reduction(+ : box_count)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) != NodeKind::Interior) continue;
      const double a = u[idx], b = v[idx];
      const double lu = detail::stencil(g, u, i, j);
      const double lv = detail::stencil(g, v, i, j);
      double ua, va;
      if (implicit) {
        const double D = diag[i] + diag[j];
        const double denom = 1.0 + dt * D;
        ua = (a + dt * (lu + D * a + model_.reaction(a, b))) / denom;
        va = (b + dt * (lv + D * b + model_.reaction(b, a))) / denom;
      } else {
        ua = a + dt * (lu + model_.reaction(a, b));
        va = b + dt * (lv + model_.reaction(b, a));
      }
      if (!std::isfinite(ua) || !std::isfinite(va)) {
        bad_row = std::max(bad_row, j);
        continue;
      }
      lo = std::min(lo, std::min(ua, va));
      hi = std::max(hi, std::max(ua, va));
      for (double* dst : {&ua, &va}) {
        const double x = *dst;
        if (x < 0.0 || x > M) {
          ++box_count;
          box_mag = std::max(box_mag, x < 0.0 ? -x : x - M);
          if (clamp) *dst = std::clamp(x, 0.0, M);
        }
      }
      un[idx] = ua;
      vn[idx] = va;
    }
  }
  if (bad_row >= 0) {
    throw DivergenceError("non-finite value in the flow at step " + std::to_string(step_ + 1),
                          step_ + 1);
  }
  observed_.min_value = std::min(observed_.min_value, lo);
  observed_.max_value = std::max(observed_.max_value, hi);
  if (clamp && box_count > 0) {
    counters_.box += box_count;
    counters_.box_magnitude = std::max(counters_.box_magnitude, box_mag);
    projected_last_ = true;
  }
}

void GradientFlow::project_symmetry() {
  const GridSpec& g = next_.grid();
  const int n = g.n();
  if (spec_.grid_exact()) {
    const double* u = next_.u.values().data();
    const double* v = next_.v.values().data();
    const bool cone = spec_.mode() == SymmetryMode::Cone;
    double worst = 0.0;
    long count = 0;
#pragma omp parallel for schedule(static) reduction(max : worst) reduction(+ : count)
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j);
        if (g.kind(idx) != NodeKind::Interior) continue;
        double d = std::abs(v[idx] - u[img_t0_[idx]]);
        if (!cone) {
          d = std::max(d, std::abs(v[idx] - u[img_t1_[idx]]));
          d = std::max(d, std::abs(u[idx] - u[img_mirror_[idx]]));
        }
        if (d != 0.0) {
          ++count;
          worst = std::max(worst, d);
        }
      }
    }
    observed_.max_symmetry_residual = std::max(observed_.max_symmetry_residual, worst);
    if (count > 0) {
      next_ = symmetrize_pair(spec_, next_);
      counters_.symmetry += count;
      counters_.symmetry_magnitude = std::max(counters_.symmetry_magnitude, worst);
      projected_last_ = true;
    }
    return;
  }

  // Only the fundamental wedge evolves freely; every other Interior node takes
  // the (interpolated) value of its folded image. Averaging the whole state
  // instead acts as O(h^2/dt) extra diffusion and the flow never settles.
  const long count_nodes = static_cast<long>(slaved_.size());
  const double* u = next_.u.values().data();
  const double* v = next_.v.values().data();
#pragma omp parallel for schedule(static)
  for (long q = 0; q < count_nodes; ++q) {
    const InterpolationStencil& st = fold_stencil_[q];
    double iu = 0.0, iv = 0.0;
    for (int c = 0; c < 4; ++c) {
      iu += st.weight[c] * u[st.index[c]];
      iv += st.weight[c] * v[st.index[c]];
    }
    ext_u_[q] = fold_swaps_[q] ? iv : iu;
    ext_v_[q] = fold_swaps_[q] ? iu : iv;
  }
  double worst = 0.0;
  long count = 0;
  for (long q = 0; q < count_nodes; ++q) {
    const std::size_t idx = slaved_[q];
    const double d =
        std::max(std::abs(ext_u_[q] - next_.u[idx]), std::abs(ext_v_[q] - next_.v[idx]));
    if (d != 0.0) {
      ++count;
      worst = std::max(worst, d);
    }
    next_.u[idx] = ext_u_[q];
    next_.v[idx] = ext_v_[q];
  }
  observed_.max_symmetry_residual = std::max(observed_.max_symmetry_residual, worst);
  if (count > 0) {
    counters_.symmetry += count;
    counters_.symmetry_magnitude = std::max(counters_.symmetry_magnitude, worst);
    projected_last_ = true;
  }
}

void GradientFlow::project_order() {
  const GridSpec& g = next_.grid();
  const int n = g.n();
  double* u = next_.u.values().data();
  double* v = next_.v.values().data();
  const bool fix = cfg_.project_order;
  double deficit = 0.0;
  long count = 0;
#pragma omp parallel for schedule(static) reduction(max : deficit) reduction(+ : count)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) != NodeKind::Interior) continue;
      const int s = sign_[idx];
      if (s == 0) continue;
      const double d = s > 0 ? v[idx] - u[idx] : u[idx] - v[idx];
      if (d > 0.0) {
        deficit = std::max(deficit, d);
        ++count;
        if (fix) std::swap(u[idx], v[idx]);
      }
    }
  }
  observed_.max_order_deficit = std::max(observed_.max_order_deficit, deficit);
  if (fix && count > 0) {
    counters_.order += count;
    counters_.order_magnitude = std::max(counters_.order_magnitude, deficit);
    projected_last_ = true;
  }
}

double GradientFlow::advance() {
  projected_last_ = false;
  sweep();
  const long global = step_ + 1;
  const bool symmetrize = symmetry_every_ > 0 && global % symmetry_every_ == 0;
  if (spec_.grid_exact()) {
    if (symmetrize) project_symmetry();
    project_order();
  } else {
    // ordering acts on the free wedge values before they are propagated
    project_order();
    if (symmetrize) project_symmetry();
  }

  const GridSpec& g = cur_.grid();
  const int n = g.n();
  const double* u0 = cur_.u.values().data();
  const double* v0 = cur_.v.values().data();
  const double* u1 = next_.u.values().data();
  const double* v1 = next_.v.values().data();
  double change = 0.0;
#pragma omp parallel for schedule(static) reduction(max : change)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) != NodeKind::Interior) continue;
      change = std::max(change, std::max(std::abs(u1[idx] - u0[idx]), std::abs(v1[idx] - v0[idx])));
    }
  }
  std::swap(cur_, next_);
  step_ = global;
  return change / dt_;
}

FieldPair step(const FieldPair& pair, const BistableModel& model, const SymmetrySpec& spec,
               const FlowConfig& cfg) {
  GradientFlow flow(pair, model, spec, cfg);
  flow.advance();
  return flow.state();
}

std::pair<FieldPair, FlowReport> run_to_steady(const FieldPair& pair,
                                               const BistableModel& model,
                                               const SymmetrySpec& spec,
                                               const FlowConfig& cfg,
                                               const CheckpointHook& hook,
                                               long start_step) {
  GradientFlow flow(pair, model, spec, cfg, start_step);
  const GridSpec& g = pair.grid();
  const InteractionPotential pot(model);
  const RegionWeights everywhere = region_all(g);

  FlowReport rep;
  rep.dt = flow.dt();
  double last_J = discrete_J(flow.state(), everywhere, pot);
  rep.energy_trace.push_back({start_step, last_J, false});
  bool projected_since = false;

  auto sample = [&](long s) {
    const double J = discrete_J(flow.state(), everywhere, pot);
    rep.energy_trace.push_back({s, J, projected_since});
    if (!projected_since) {
      const double inc = J - last_J;
      rep.max_energy_increase = std::max(rep.max_energy_increase, inc);
      if (last_J != 0.0)
        rep.max_relative_energy_increase =
            std::max(rep.max_relative_energy_increase, inc / std::abs(last_J));
    }
    last_J = J;
    projected_since = false;
  };

  double residual = std::numeric_limits<double>::infinity();
  while (flow.step_index() < cfg.max_steps) {
    residual = flow.advance();
    projected_since = projected_since || flow.projected_last_step();
    const long s = flow.step_index();
    ++rep.steps_taken;
    const bool done = residual <= cfg.tol;
    if (done || (cfg.energy_every > 0 && s % cfg.energy_every == 0)) sample(s);
    if (hook && cfg.checkpoint_every > 0 && s % cfg.checkpoint_every == 0) hook(s, flow.state());
    if (done) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && rep.energy_trace.back().step != flow.step_index())
    sample(flow.step_index());

  rep.final_step = flow.step_index();
  rep.final_residual = residual;
  rep.violations = flow.counters();
  rep.observed = flow.observed();
  return {flow.state(), std::move(rep)};
}

namespace {

double residual_on(const FieldPair& pair, const BistableModel& model, const SymmetrySpec& spec,
                   const std::vector<std::uint8_t>* mask) {
  check_same_grid(pair.u, pair.v);
  const GridSpec& g = pair.grid();
  check_modes(g, spec);
  const int n = g.n();
  const double* u = pair.u.values().data();
  const double* v = pair.v.values().data();
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) != NodeKind::Interior || (mask && !(*mask)[idx])) continue;
      const double ru = detail::stencil(g, u, i, j) + model.reaction(u[idx], v[idx]);
      const double rv = detail::stencil(g, v, i, j) + model.reaction(v[idx], u[idx]);
      worst = std::max(worst, std::max(std::abs(ru), std::abs(rv)));
    }
  }
  return worst;
}

}  // namespace

std::vector<std::uint8_t> free_nodes(const GridSpec& g, const SymmetrySpec& spec) {
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) != NodeKind::Interior) continue;
      const Point2 x = g.node(i, j);
      const Folded f = spec.fold(x);
      mask[idx] = spec.grid_exact() ||
                  (f.parity == 1 && f.point.x1 == x.x1 && f.point.x2 == x.x2);
    }
  return mask;
}

double residual_check(const FieldPair& pair, const BistableModel& model,
                      const SymmetrySpec& spec) {
  return residual_on(pair, model, spec, nullptr);
}

double residual_check_free(const FieldPair& pair, const BistableModel& model,
                           const SymmetrySpec& spec) {
  const std::vector<std::uint8_t> mask = free_nodes(pair.grid(), spec);
  return residual_on(pair, model, spec, &mask);
}

std::pair<ScalarField, FlowReport> run_scalar_flow(const ScalarField& initial,
                                                   const ScalarFlowSetup& setup,
                                                   const BistableModel& model,
                                                   const FlowConfig& cfg) {
  const GridSpec& g = initial.grid();
  if (setup.active.size() != g.size()) throw ShapeError("active mask does not match the grid");
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (setup.active[idx] && g.kind(idx) != NodeKind::Interior)
      throw ShapeError("only Interior nodes may be active");
  const double dt = resolve_dt(cfg, g);
  const bool implicit = cfg.stepper == StepperKind::DiagonalImplicit;
  const std::vector<double> diag = stencil_diagonal(g);
  const int n = g.n();
  const RegionWeights everywhere = region_all(g);

  ScalarField cur = initial, next = initial;
  FlowReport rep;
  rep.dt = dt;
  const double inf = std::numeric_limits<double>::infinity();
  rep.observed.min_value = inf;
  rep.observed.max_value = -inf;
  double last_E = discrete_E(cur, everywhere, model);
  rep.energy_trace.push_back({0, last_E, false});
  bool projected_since = false;

  auto sample = [&](long s) {
    const double E = discrete_E(cur, everywhere, model);
    rep.energy_trace.push_back({s, E, projected_since});
    if (!projected_since) {
      const double inc = E - last_E;
      rep.max_energy_increase = std::max(rep.max_energy_increase, inc);
      if (last_E != 0.0)
        rep.max_relative_energy_increase =
            std::max(rep.max_relative_energy_increase, inc / std::abs(last_E));
    }
    last_E = E;
    projected_since = false;
  };

  double residual = inf;
  long s = 0;
  while (s < cfg.max_steps) {
    const double* w = cur.values().data();
    double* wn = next.values().data();
    double lo = inf, hi = -inf, change = 0.0, mag = 0.0;
    long clamped = 0;
    int bad = -1;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi, change, mag, bad) reduction(+ : clamped)
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j);
        if (!setup.active[idx]) continue;
        const double a = w[idx];
        const double lap = detail::stencil(g, w, i, j);
        double x;
        if (implicit) {
          const double D = diag[i] + diag[j];
          x = (a + dt * (lap + D * a + model.f_trunc(a))) / (1.0 + dt * D);
        } else {
          x = a + dt * (lap + model.f_trunc(a));
        }
        if (!std::isfinite(x)) {
          bad = std::max(bad, j);
          continue;
        }
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        if (x < setup.lo || x > setup.hi) {
          ++clamped;
          mag = std::max(mag, x < setup.lo ? setup.lo - x : x - setup.hi);
          if (cfg.project_box) x = std::clamp(x, setup.lo, setup.hi);
        }
        wn[idx] = x;
        change = std::max(change, std::abs(x - a));
      }
    }
    ++s;
    if (bad >= 0)
      throw DivergenceError("non-finite value in the scalar flow at step " + std::to_string(s), s);
    rep.observed.min_value = std::min(rep.observed.min_value, lo);
    rep.observed.max_value = std::max(rep.observed.max_value, hi);
    if (cfg.project_box && clamped > 0) {
      rep.violations.box += clamped;
      rep.violations.box_magnitude = std::max(rep.violations.box_magnitude, mag);
      projected_since = true;
    }
    std::swap(cur, next);
    ++rep.steps_taken;
    residual = change / dt;
    const bool done = residual <= cfg.tol;
    if (done || (cfg.energy_every > 0 && s % cfg.energy_every == 0)) sample(s);
    if (done) {
      rep.converged = true;
      break;
    }
  }
  if (!rep.converged && rep.energy_trace.back().step != s) sample(s);
  rep.final_step = s;
  rep.final_residual = residual;
  return {std::move(cur), std::move(rep)};
}

double scalar_residual(const ScalarField& w, const std::vector<std::uint8_t>& active,
                       const BistableModel& model) {
  const GridSpec& g = w.grid();
  if (active.size() != g.size()) throw ShapeError("active mask does not match the grid");
  const int n = g.n();
  const double* f = w.values().data();
  double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (!active[idx] || g.kind(idx) != NodeKind::Interior) continue;
      worst = std::max(worst, std::abs(detail::stencil(g, f, i, j) + model.f_trunc(f[idx])));
    }
  }
  return worst;
}

}  // namespace saddle
