#include "saddle/scalar.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "saddle/errors.h"

namespace saddle {

ScalarProblem ScalarProblem::make(const BistableModel& model, int k, double R, int n) {
  SymmetrySpec::planar(k);  // validates k
  return ScalarProblem{model, k, R, GridSpec::disk(R, n)};
}

std::vector<std::uint8_t> sector_mask(const ScalarProblem& prob) {
  const GridSpec& g = *prob.grid;
  const SymmetrySpec spec = SymmetrySpec::planar(prob.k);
  std::vector<std::uint8_t> active(g.size(), 0);
  const int n = g.n();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (g.kind(idx) != NodeKind::Interior) continue;
      if (spec.sector_sign(g.node(i, j)) > 0 && spec.in_sector(g.node(i, j))) active[idx] = 1;
    }
  }
  return active;
}

std::pair<ScalarField, FlowReport> solve_scalar_sector(const ScalarProblem& prob,
                                                       const FlowConfig& cfg) {
  const GridSpec& g = *prob.grid;
  const SymmetrySpec spec = SymmetrySpec::planar(prob.k);
  ScalarFlowSetup setup;
  setup.active = sector_mask(prob);
  setup.lo = 0.0;
  setup.hi = prob.model.M();
  ScalarField w0(prob.grid, 0.0);
  const int n = g.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      if (setup.active[idx])
        w0[idx] = std::max(spec.building_block(g.node(i, j), prob.model.M()), 0.0);
    }
  return run_scalar_flow(w0, setup, prob.model, cfg);
}

ScalarField reflect_to_plane(const ScalarField& w_sector, int k) {
  const GridSpec& g = w_sector.grid();
  if (g.domain() != DomainKind::Disk) throw ShapeError("reflection needs a Disk grid");
  const SymmetrySpec spec = SymmetrySpec::planar(k);
  ScalarField out(w_sector.grid_ptr(), 0.0);
  const int n = g.n();
  const int c = g.center();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (g.kind(i, j) == NodeKind::Exterior) continue;
      if (k == 2) {
        const int a = std::abs(i - c), b = std::abs(j - c);
        if (a > b) {
          out.at(i, j) = w_sector.at(c + a, c + b);
        } else if (a < b) {
          out.at(i, j) = -w_sector.at(c + b, c + a);
        }
        continue;
      }
      const Point2 x = g.node(i, j);
      if (spec.sector_sign(x) == 0) continue;
      const Folded f = spec.fold(x);
      out.at(i, j) = f.parity * interpolate(w_sector, f.point);
    }
  }
  return out;
}

std::vector<std::uint8_t> off_line_mask(const GridSpec& grid, int k, double margin) {
  const SymmetrySpec spec = SymmetrySpec::planar(k);
  std::vector<std::uint8_t> mask(grid.size(), 0);
  const int n = grid.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (grid.kind(i, j) == NodeKind::Interior &&
          spec.distance_to_lines(grid.node(i, j)) > margin)
        mask[grid.index(i, j)] = 1;
  return mask;
}

EnergyReport scalar_energy_estimate(const ScalarField& w, const BistableModel& model,
                                    std::span<const double> rho_list) {
  const GridSpec& g = w.grid();
  const double F0 = model.F(0.0);
  EnergyReport rep;
  for (double rho : rho_list) {
    const RegionWeights region = region_ball(g, rho);
    const double area = region_measure(g, region);
    const double E = discrete_E(w, region, model);
    rep.rho_values.push_back(rho);
    rep.area.push_back(area);
    rep.J_sector.push_back(E);
    rep.excess.push_back(E - F0 * area);
    rep.coexistence_floor.push_back(F0 * area);
  }
  if (rep.rho_values.size() >= 3) rep.fit = fit_polynomial(rep.rho_values, rep.J_sector, 2);
  return rep;
}

std::pair<ScalarField, FlowReport> solve_scalar_dirichlet(const ScalarField& initial,
                                                          const BistableModel& model,
                                                          const FlowConfig& cfg,
                                                          double lo, double hi) {
  const GridSpec& g = initial.grid();
  ScalarFlowSetup setup;
  setup.active.assign(g.size(), 0);
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    setup.active[idx] = g.kind(idx) == NodeKind::Interior ? 1 : 0;
  setup.lo = lo;
  setup.hi = hi;
  return run_scalar_flow(initial, setup, model, cfg);
}

MinimalityResult minimality_check(const ScalarProblem& prob, const ScalarField& w,
                                  int samples, std::uint64_t seed) {
  const GridSpec& g = *prob.grid;
  if (!w.grid().same_as(g)) throw ShapeError("state does not live on the problem grid");
  const std::vector<std::uint8_t> active = sector_mask(prob);
  const RegionWeights everywhere = region_all(g);
  const double M = prob.model.M();
  const int n = g.n();
  const int c = g.center();

  MinimalityResult res;
  res.samples = samples;
  res.reference_energy = discrete_E(w, everywhere, prob.model);
  res.min_perturbed_energy = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  constexpr double kAmplitudes[] = {1e-3, 1e-2, 1e-1};
  for (int s = 0; s < samples; ++s) {
    const double amp = kAmplitudes[s % 3];
    ScalarField trial = w;
    // draw on the x2 >= 0 half and mirror, so the trial stays even in x2
    for (int j = c; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const std::size_t idx = g.index(i, j);
        if (!active[idx]) continue;
        const double x = std::clamp(w[idx] + amp * unit(rng), 0.0, M);
        trial[idx] = x;
        trial.at(i, 2 * c - j) = x;
      }
    }
    const double E = discrete_E(trial, everywhere, prob.model);
    res.min_perturbed_energy = std::min(res.min_perturbed_energy, E);
    if (E < res.reference_energy) ++res.lower_count;
  }
  return res;
}

}  // namespace saddle
