#pragma once

#include <vector>

namespace landau {

/// Sets the worker count used by the data-parallel kernels.
void set_thread_count(int n);
int thread_count();
/// Reads LANDAU_NUM_THREADS (if set) and applies it.
void configure_threads_from_env();

/// Sum of chunk(i) for i in [0, n_chunks). Chunks are evaluated in parallel
/// but added in index order, so the result does not depend on the thread count.
template <typename F>
double ordered_sum(int n_chunks, F&& chunk) {
  std::vector<double> partial(static_cast<std::size_t>(n_chunks), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_chunks; ++i) partial[static_cast<std::size_t>(i)] = chunk(i);
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace landau
