#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "saddle/grid.h"
#include "saddle/model.h"
#include "saddle/symmetry.h"

namespace saddle {

enum class StepperKind {
  Explicit,
  /// Linear diagonal treated implicitly; same fixed points, no step-size limit
  /// from the stencil.
  DiagonalImplicit,
};

struct FlowConfig {
  /// 0 selects the default 0.2 h^2 (scaled to the stencil's largest diagonal
  /// in cone mode).
  double dt = 0.0;
  long max_steps = 5'000'000;
  /// Steady state once max |U+ - U| / dt <= tol.
  double tol = 1e-8;
  bool project_box = true;
  bool project_order = true;
  /// Symmetry projection cadence in steps; 0 disables it, -1 means every step.
  /// Grid-exact groups average the state (and only when it is asymmetric);
  /// otherwise nodes outside the fundamental wedge are re-read from their
  /// folded images, so the wedge carries the unknowns.
  int project_symmetry_every = -1;
  long checkpoint_every = 10'000;
  /// Energy sampling cadence for the dissipation trace.
  long energy_every = 100;
  StepperKind stepper = StepperKind::Explicit;
};

/// Ordering band for specs without grid-exact symmetry: u >= v is enforced
/// only at nodes farther than kOrderMargin * h from the nodal lines.
inline constexpr double kOrderMargin = 2.0;

/// Time step actually used for `cfg` on `grid`. Throws ConfigError when an
/// explicit step violates dt * max_diagonal <= 1 (dt <= h^2/4 on the disk).
double resolve_dt(const FlowConfig& cfg, const GridSpec& grid);
int resolve_symmetry_every(const FlowConfig& cfg);

struct ProjectionCounters {
  long box = 0;
  long order = 0;
  long symmetry = 0;
  double box_magnitude = 0.0;
  double order_magnitude = 0.0;
  double symmetry_magnitude = 0.0;

  long total() const { return box + order + symmetry; }
};

struct EnergySample {
  long step = 0;
  double J = 0.0;
  /// A projection fired since the previous sample.
  bool projected = false;
};

/// What the stepper observed before any projection, accumulated over all steps.
struct InvarianceObservation {
  double min_value = 0.0;
  double max_value = 0.0;
  /// max of (v - u) on u-dominant nodes and (u - v) on v-dominant nodes.
  double max_order_deficit = 0.0;
  /// Exact (grid-exact specs) or interpolated symmetry residual.
  double max_symmetry_residual = 0.0;
};

struct FlowReport {
  long steps_taken = 0;
  long final_step = 0;
  double dt = 0.0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<EnergySample> energy_trace;
  ProjectionCounters violations;
  InvarianceObservation observed;
  /// Largest J_{n+1} - J_n between consecutive samples with no projection.
  double max_energy_increase = 0.0;
  /// Same, relative to |J_n|.
  double max_relative_energy_increase = 0.0;
};

/// (w+, w-) of the building block at every node; Dirichlet nodes keep it.
FieldPair init_state(GridPtr grid, const SymmetrySpec& spec, const BistableModel& model);

/// Checkpoint callback, invoked every cfg.checkpoint_every steps.
using CheckpointHook = std::function<void(long step, const FieldPair& state)>;

/// Double-buffered stepper for the auxiliary parabolic system
///   U_t = Lap U + f~(U) - lambda |U|^{p-1} U |V|^{p+1}  (and U <-> V)
/// with frozen Dirichlet data, followed by the box, symmetry and ordering
/// projections. Every projection that changes a value is counted.
class GradientFlow {
 public:
  GradientFlow(FieldPair initial, const BistableModel& model, const SymmetrySpec& spec,
               const FlowConfig& cfg, long start_step = 0);

  /// One step; returns max |U+ - U| / dt over Interior nodes.
  double advance();

  const FieldPair& state() const { return cur_; }
  long step_index() const { return step_; }
  double dt() const { return dt_; }
  const ProjectionCounters& counters() const { return counters_; }
  const InvarianceObservation& observed() const { return observed_; }
  /// Whether any projection fired during the most recent step.
  bool projected_last_step() const { return projected_last_; }

 private:
  void sweep();
  void project_symmetry();
  void project_order();

  const BistableModel& model_;
  SymmetrySpec spec_;
  FlowConfig cfg_;
  double dt_;
  int symmetry_every_;
  long step_;
  FieldPair cur_, next_;
  std::vector<std::int8_t> sign_;
  std::vector<double> diag_;
  // exact maps for generators T_0, T_1 (planar) or the swap (cone) and the
  // x2 mirror
  std::vector<std::size_t> img_t0_, img_t1_, img_mirror_;
  // other specs: Interior nodes outside the fundamental wedge, with the
  // bilinear stencil of their folded image and whether the fold swaps u and v
  std::vector<std::size_t> slaved_;
  std::vector<InterpolationStencil> fold_stencil_;
  std::vector<std::uint8_t> fold_swaps_;
  std::vector<double> ext_u_, ext_v_;
  ProjectionCounters counters_;
  InvarianceObservation observed_;
  bool projected_last_ = false;
};

/// Single step of the flow (projections per cfg).
FieldPair step(const FieldPair& pair, const BistableModel& model, const SymmetrySpec& spec,
               const FlowConfig& cfg);

/// Steps until the steady-state test passes or max_steps is reached.
/// Non-convergence is reported, not thrown; non-finite values throw
/// DivergenceError naming the step.
std::pair<FieldPair, FlowReport> run_to_steady(const FieldPair& pair,
                                               const BistableModel& model,
                                               const SymmetrySpec& spec,
                                               const FlowConfig& cfg,
                                               const CheckpointHook& hook = {},
                                               long start_step = 0);

/// max over Interior nodes of |Lap u + f(u) - lambda |u|^{p-1}u|v|^{p+1}| and
/// the v-analogue.
double residual_check(const FieldPair& pair, const BistableModel& model,
                      const SymmetrySpec& spec);

/// Interior nodes that carry unknowns: all of them for grid-exact specs,
/// otherwise those of the fundamental wedge 0 <= x2, angle <= pi/(2k).
std::vector<std::uint8_t> free_nodes(const GridSpec& grid, const SymmetrySpec& spec);

/// residual_check restricted to free_nodes; equal to it for grid-exact specs.
double residual_check_free(const FieldPair& pair, const BistableModel& model,
                           const SymmetrySpec& spec);

/// Scalar gradient flow w_t = Lap w + f~(w) on the nodes flagged in `active`
/// (which must be Interior); all other nodes keep their initial values.
/// Values are clamped to [lo, hi] when cfg.project_box is set.
struct ScalarFlowSetup {
  std::vector<std::uint8_t> active;
  double lo = 0.0;
  double hi = 1.0;
};

std::pair<ScalarField, FlowReport> run_scalar_flow(const ScalarField& initial,
                                                   const ScalarFlowSetup& setup,
                                                   const BistableModel& model,
                                                   const FlowConfig& cfg);

/// max over active nodes of |Lap w + f(w)|.
double scalar_residual(const ScalarField& w, const std::vector<std::uint8_t>& active,
                       const BistableModel& model);

}  // namespace saddle
