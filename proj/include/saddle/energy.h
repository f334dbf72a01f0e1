#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "saddle/grid.h"
#include "saddle/model.h"
#include "saddle/symmetry.h"

namespace saddle {

/// Per-node quadrature weights in [0, 1] selecting a region. Weights below one
/// mark nodes on the region's straight edges (1/2) or at its apex.
using RegionWeights = std::vector<double>;

/// Every non-Exterior node.
RegionWeights region_all(const GridSpec& grid);
/// Non-Exterior nodes with |x| < rho (Disk) or s^2 + t^2 < rho^2 (STQuadrant).
RegionWeights region_ball(const GridSpec& grid, double rho);
/// Planar: the sector S_rho = S_k cap B_rho, half weight on the two bounding
/// rays and 1/(2k) at the apex. Cone: the full ball B_rho.
RegionWeights region_sector(const GridSpec& grid, const SymmetrySpec& spec, double rho);
RegionWeights region_from_predicate(const GridSpec& grid,
                                    const std::function<bool(Point2)>& pred);

/// Discrete measure of a region, including the angular constant in cone mode.
double region_measure(const GridSpec& grid, const RegionWeights& region);

/// J((u,v), region) = sum of 1/2|grad u|^2 + 1/2|grad v|^2 + W(u,v).
///
/// Gradient terms live on grid edges between non-Exterior nodes; each edge is
/// split evenly between its endpoints, so J is additive over disjoint regions
/// and its gradient is exactly the stencil used by the flow.
double discrete_J(const FieldPair& pair, const RegionWeights& region,
                  const InteractionPotential& pot);

/// Scalar energy E(w, region) = sum of 1/2|grad w|^2 + F(w).
double discrete_E(const ScalarField& w, const RegionWeights& region,
                  const BistableModel& model);

struct PolyFit {
  std::vector<double> coeffs;  // a_0 + a_1 x + ...
  double eval(double x) const;
  double coeff(std::size_t i) const { return i < coeffs.size() ? coeffs[i] : 0.0; }
};

/// Ordinary least squares for a polynomial of the given degree.
PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

struct EnergyReport {
  std::vector<double> rho_values;
  std::vector<double> area;
  std::vector<double> J_sector;
  std::vector<double> excess;
  std::vector<double> coexistence_floor;
  PolyFit fit;  // of excess against rho
};

/// (phi, psi) = xi (w+, w-) + (1 - xi)(u, v) with a radial cubic-smoothstep
/// cutoff, xi = 1 on B_{rho-1} and 0 outside B_rho. Requires 1 < rho < R - 2.
FieldPair build_competitor(const FieldPair& pair, const SymmetrySpec& spec,
                           const BistableModel& model, double rho);

/// Sector energies, excess over F(0)|S_rho| and the coexistence floor
/// inf W(s,s)|S_rho| at each radius; the excess is fitted by a polynomial of
/// degree equal to the space dimension (2, or 2m in cone mode).
EnergyReport sector_energy_scan(const FieldPair& pair, const SymmetrySpec& spec,
                                const InteractionPotential& pot,
                                std::span<const double> rho_list);

/// CSV with columns rho,area,J,excess,floor.
void write_energy_csv(const EnergyReport& report, const std::filesystem::path& path);

/// Default radii: `count` equally spaced samples over [R/4, R-3].
std::vector<double> default_rho_list(double R, int count = 6);

}  // namespace saddle
