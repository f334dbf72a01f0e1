#pragma once

#include <span>

namespace saddle {

/// Applies the SADDLE_THREADS cap (if set) to the OpenMP runtime. Returns the
/// number of worker threads in use.
int configure_threads();

/// Pairwise (tree) sum in a fixed order, independent of thread count.
double tree_sum(std::span<const double> parts);

}  // namespace saddle
