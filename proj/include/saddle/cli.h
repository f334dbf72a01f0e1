#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "saddle/energy.h"
#include "saddle/field_io.h"
#include "saddle/flow.h"

namespace saddle {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitNoConvergence = 3,
  kExitDivergence = 4,
  /// Converged, but a projection fired beyond the reporting policy.
  kExitPolicy = 5,
};

/// Everything a run needs; mirrored one-to-one by command-line flags.
struct RunOptions {
  int k = 2;
  int m = 2;
  double lambda = 2.0;
  double p = 1.0;
  double radius = 20.0;
  int grid_n = 161;
  FlowConfig flow;
  std::filesystem::path out;
  bool resume = false;
  std::optional<std::filesystem::path> model_file;
  std::vector<double> rho;
  int minimality_samples = 50;
  std::uint64_t seed = 12345;
  std::string command_echo;
};

/// Largest projection magnitude still compatible with exit code 0.
inline constexpr double kProjectionPolicy = 1e-12;

/// Final state and derived quantities of a solve2d/saddle run.
struct SystemRun {
  FieldPair state;
  FlowReport report;
  EnergyReport energy;
  double residual = 0.0;
  /// Residual on the free nodes (the fundamental wedge for k >= 3).
  double residual_free = 0.0;
  /// symmetry_residual of the final state.
  double symmetry_residual = 0.0;
  double min_interior_gap = 0.0;
  int exit_code = kExitOk;
};

/// Solves the planar (cone = false) or cone system and writes the artifacts
/// into opts.out. Throws ConfigError / DivergenceError.
SystemRun run_system(const RunOptions& opts, bool cone);

int cmd_solve2d(const RunOptions& opts);
int cmd_saddle(const RunOptions& opts);
int cmd_scalar(const RunOptions& opts);
/// One solve2d run per lambda in subdirectories lambda_<value>; writes
/// summary.csv with lambda,holds,J_slope,min_interior_u_minus_v.
int cmd_sweep(const RunOptions& opts, const std::vector<double>& lambdas);

/// Parses argv and dispatches; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace saddle
