#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "saddle/energy.h"
#include "saddle/flow.h"
#include "saddle/grid.h"
#include "saddle/model.h"
#include "saddle/symmetry.h"

namespace saddle {

/// Scalar saddle-type problem -Lap w = f(w) on the sector S_k of a disk grid,
/// w = 0 on the sector edges and on the outer circle.
struct ScalarProblem {
  BistableModel model;
  int k = 2;
  double R = 0.0;
  GridPtr grid;

  /// Builds the disk grid; throws ConfigError for k < 2.
  static ScalarProblem make(const BistableModel& model, int k, double R, int n);
};

/// Nodes updated by the sector flow: Interior nodes strictly inside S_k.
std::vector<std::uint8_t> sector_mask(const ScalarProblem& prob);

/// Gradient flow for the sector problem started from max(w_k, 0), with every
/// node outside the open sector pinned to zero and values kept in [0, M].
std::pair<ScalarField, FlowReport> solve_scalar_sector(const ScalarProblem& prob,
                                                       const FlowConfig& cfg);

/// Odd reflection of a sector solution across the k lines; nodes on the lines
/// (and the origin) carry 0. Index-exact for k = 2, bilinear otherwise.
ScalarField reflect_to_plane(const ScalarField& w_sector, int k);

/// Interior nodes at distance > `margin` from every nodal line of w_k.
std::vector<std::uint8_t> off_line_mask(const GridSpec& grid, int k, double margin);

/// E(w, B_rho) for each radius with a quadratic least-squares fit of E against
/// rho; `floor` holds F(0)|B_rho|, the energy of the zero field.
EnergyReport scalar_energy_estimate(const ScalarField& w, const BistableModel& model,
                                    std::span<const double> rho_list);

/// Scalar flow on every Interior node of a grid, Dirichlet data taken from
/// `initial`, values kept in [lo, hi].
std::pair<ScalarField, FlowReport> solve_scalar_dirichlet(const ScalarField& initial,
                                                          const BistableModel& model,
                                                          const FlowConfig& cfg,
                                                          double lo, double hi);

struct MinimalityResult {
  double reference_energy = 0.0;
  double min_perturbed_energy = 0.0;
  int samples = 0;
  /// Perturbations whose energy is below the reference.
  int lower_count = 0;
};

/// Compares E of the sector state with `samples` random perturbations that
/// stay in the admissible class (supported in the sector, even in x2, clamped
/// to [0, M]). Amplitudes cycle through 1e-3, 1e-2 and 1e-1.
MinimalityResult minimality_check(const ScalarProblem& prob, const ScalarField& w,
                                  int samples = 50, std::uint64_t seed = 12345);

}  // namespace saddle
