#include "aftnet/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aftnet {

int thread_cap() {
  const char* env = std::getenv("AFTNET_THREADS");
  if (env != nullptr) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
      // fall through to the default
    }
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void apply_thread_cap() {
#ifdef _OPENMP
  omp_set_num_threads(thread_cap());
#endif
}

}  // namespace aftnet
