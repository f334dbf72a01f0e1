#include "saddle/parallel.h"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace saddle {

int configure_threads() {
  if (const char* env = std::getenv("SADDLE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) omp_set_num_threads(cap);
  }
  return omp_get_max_threads();
}

double tree_sum(std::span<const double> parts) {
  if (parts.empty()) return 0.0;
  if (parts.size() == 1) return parts[0];
  const std::size_t half = parts.size() / 2;
  return tree_sum(parts.first(half)) + tree_sum(parts.subspan(half));
}

}  // namespace saddle
