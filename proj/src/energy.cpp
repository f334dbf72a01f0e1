#include "saddle/energy.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "saddle/errors.h"
#include "saddle/parallel.h"

namespace saddle {

namespace {

double node_radius(const GridSpec& g, int i, int j) {
  const Point2 x = g.node(i, j);
  return std::sqrt(x.x1 * x.x1 + x.x2 * x.x2);
}

bool active(const GridSpec& g, std::size_t idx) {
  return g.kind(idx) != NodeKind::Exterior;
}

// Energy density of one node: potential times node measure plus half of each
// incident edge's gradient energy. `pot(idx)` returns the potential value.
template <class Potential, class EdgeSq>
double weighted_sum(const GridSpec& g, const RegionWeights& region, Potential pot,
                    EdgeSq edge_sq) {
  const int n = g.n();
  const auto a = g.cell_measure();
  const auto b = g.edge_conductance();
  std::vector<double> rows(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      const double w = region[idx];
      if (w == 0.0 || !active(g, idx)) continue;
      double e = a[i] * a[j] * pot(idx);
      double grad = 0.0;
      if (i + 1 < n && active(g, idx + 1)) grad += b[i] * a[j] * edge_sq(idx, idx + 1);
      if (i > 0 && active(g, idx - 1)) grad += b[i - 1] * a[j] * edge_sq(idx, idx - 1);
      if (j + 1 < n && active(g, idx + n)) grad += b[j] * a[i] * edge_sq(idx, idx + n);
      if (j > 0 && active(g, idx - n)) grad += b[j - 1] * a[i] * edge_sq(idx, idx - n);
      // each edge energy 1/2 w d^2, half of it attributed to this node
      e += 0.25 * grad;
      acc += w * e;
    }
    rows[j] = acc;
  }
  return g.measure_constant() * tree_sum(rows);
}

}  // namespace

RegionWeights region_all(const GridSpec& grid) {
  RegionWeights w(grid.size(), 0.0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx)
    if (active(grid, idx)) w[idx] = 1.0;
  return w;
}

RegionWeights region_ball(const GridSpec& grid, double rho) {
  RegionWeights w(grid.size(), 0.0);
  const int n = grid.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = grid.index(i, j);
      if (active(grid, idx) && node_radius(grid, i, j) < rho) w[idx] = 1.0;
    }
  return w;
}

RegionWeights region_sector(const GridSpec& grid, const SymmetrySpec& spec, double rho) {
  if (spec.mode() == SymmetryMode::Cone) return region_ball(grid, rho);
  if (grid.domain() != DomainKind::Disk) throw ShapeError("planar sector needs a Disk grid");
  RegionWeights w(grid.size(), 0.0);
  const int n = grid.n();
  const double alpha = spec.alpha();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = grid.index(i, j);
      if (!active(grid, idx) || !(node_radius(grid, i, j) < rho)) continue;
      const Point2 x = grid.node(i, j);
      if (x.x1 == 0.0 && x.x2 == 0.0) {
        w[idx] = 1.0 / (2.0 * spec.k());
        continue;
      }
      const double d = alpha * x.x1 - std::abs(x.x2);
      const double tol = spec.k() == 2 ? 0.0 : 1e-12 * std::max(1.0, std::abs(x.x1));
      if (d > tol) {
        w[idx] = 1.0;
      } else if (x.x1 > 0.0 && std::abs(d) <= tol) {
        w[idx] = 0.5;
      }
    }
  }
  return w;
}

RegionWeights region_from_predicate(const GridSpec& grid,
                                    const std::function<bool(Point2)>& pred) {
  RegionWeights w(grid.size(), 0.0);
  const int n = grid.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = grid.index(i, j);
      if (active(grid, idx) && pred(grid.node(i, j))) w[idx] = 1.0;
    }
  return w;
}

double region_measure(const GridSpec& grid, const RegionWeights& region) {
  return weighted_sum(
      grid, region, [](std::size_t) { return 1.0; },
      [](std::size_t, std::size_t) { return 0.0; });
}

double discrete_J(const FieldPair& pair, const RegionWeights& region,
                  const InteractionPotential& pot) {
  check_same_grid(pair.u, pair.v);
  const GridSpec& g = pair.grid();
  if (region.size() != g.size()) throw ShapeError("region weights do not match the grid");
  const auto u = pair.u.values();
  const auto v = pair.v.values();
  return weighted_sum(
      g, region, [&](std::size_t idx) { return pot(u[idx], v[idx]); },
      [&](std::size_t p, std::size_t q) {
        const double du = u[p] - u[q], dv = v[p] - v[q];
        return du * du + dv * dv;
      });
}

double discrete_E(const ScalarField& w, const RegionWeights& region,
                  const BistableModel& model) {
  const GridSpec& g = w.grid();
  if (region.size() != g.size()) throw ShapeError("region weights do not match the grid");
  const auto f = w.values();
  return weighted_sum(
      g, region, [&](std::size_t idx) { return model.F(f[idx]); },
      [&](std::size_t p, std::size_t q) {
        const double d = f[p] - f[q];
        return d * d;
      });
}

double PolyFit::eval(double x) const {
  double r = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
  return r;
}

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
  if (x.size() != y.size()) throw ShapeError("fit data sizes differ");
  if (degree < 0 || x.size() < static_cast<std::size_t>(degree) + 1)
    throw ConfigError("not enough samples for the requested polynomial degree");
  double scale = 0.0;
  for (double xi : x) scale = std::max(scale, std::abs(xi));
  if (scale == 0.0) scale = 1.0;
  Eigen::MatrixXd A(x.size(), degree + 1);
  Eigen::VectorXd rhs(x.size());
  for (std::size_t r = 0; r < x.size(); ++r) {
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      A(r, c) = p;
      p *= x[r] / scale;
    }
    rhs(r) = y[r];
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);
  PolyFit fit;
  fit.coeffs.resize(degree + 1);
  double p = 1.0;
  for (int c = 0; c <= degree; ++c) {
    fit.coeffs[c] = sol(c) / p;
    p *= scale;
  }
  return fit;
}

FieldPair build_competitor(const FieldPair& pair, const SymmetrySpec& spec,
                           const BistableModel& model, double rho) {
  check_same_grid(pair.u, pair.v);
  const GridSpec& g = pair.grid();
  if (!(rho > 1.0) || !(rho + 2.0 < g.R()))
    throw ConfigError("competitor radius must satisfy 1 < rho < R - 2");
  FieldPair out = pair;
  const int n = g.n();
  const double M = model.M();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t idx = g.index(i, j);
      const double r = node_radius(g, i, j);
      if (r >= rho) continue;
      const double tau = std::min(1.0, rho - r);
      const double xi = tau * tau * (3.0 - 2.0 * tau);
      const double w = spec.building_block(g.node(i, j), M);
      const double wp = std::max(w, 0.0), wm = std::max(-w, 0.0);
      out.u[idx] = xi * wp + (1.0 - xi) * pair.u[idx];
      out.v[idx] = xi * wm + (1.0 - xi) * pair.v[idx];
    }
  }
  return out;
}

EnergyReport sector_energy_scan(const FieldPair& pair, const SymmetrySpec& spec,
                                const InteractionPotential& pot,
                                std::span<const double> rho_list) {
  const GridSpec& g = pair.grid();
  const double F0 = pot.model().F(0.0);
  const double floor_density = segregation_threshold_holds(pot).inf_value;
  EnergyReport rep;
  for (double rho : rho_list) {
    const RegionWeights region = region_sector(g, spec, rho);
    const double area = region_measure(g, region);
    const double J = discrete_J(pair, region, pot);
    rep.rho_values.push_back(rho);
    rep.area.push_back(area);
    rep.J_sector.push_back(J);
    rep.excess.push_back(J - F0 * area);
    rep.coexistence_floor.push_back(floor_density * area);
  }
  const int degree = spec.mode() == SymmetryMode::Cone ? 2 * spec.m() : 2;
  if (rep.rho_values.size() >= static_cast<std::size_t>(degree) + 1)
    rep.fit = fit_polynomial(rep.rho_values, rep.excess, degree);
  return rep;
}

void write_energy_csv(const EnergyReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "rho,area,J,excess,floor\n" << std::setprecision(17);
  for (std::size_t r = 0; r < report.rho_values.size(); ++r) {
    out << report.rho_values[r] << ',' << report.area[r] << ',' << report.J_sector[r]
        << ',' << report.excess[r] << ',' << report.coexistence_floor[r] << '\n';
  }
}

std::vector<double> default_rho_list(double R, int count) {
  std::vector<double> out;
  const double lo = 0.25 * R, hi = R - 3.0;
  if (count < 2 || !(hi > lo)) return out;
  for (int c = 0; c < count; ++c) out.push_back(lo + (hi - lo) * c / (count - 1));
  return out;
}

}  // namespace saddle
