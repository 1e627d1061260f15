#include "frontforge/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace frontforge {

int thread_budget() {
  static const int budget = [] {
    int fallback = 1;
#ifdef _OPENMP
    fallback = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("FRONTFORGE_THREADS")) {
      try {
        const int requested = std::stoi(env);
        if (requested > 0) return requested;
      } catch (...) {
      }
    }
    return fallback;
  }();
  return budget;
}

}  // namespace frontforge
