#include "landau/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace landau {

void set_thread_count(int n) { omp_set_num_threads(n > 0 ? n : 1); }

int thread_count() { return omp_get_max_threads(); }

void configure_threads_from_env() {
  if (const char* env = std::getenv("LANDAU_NUM_THREADS")) {
    try {
      set_thread_count(std::stoi(env));
    } catch (const std::exception&) {
      // unparsable value: keep the OpenMP default
    }
  }
}

}  // namespace landau
