#include "sppa/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sppa {

int max_threads() {
#ifdef _OPENMP
  int n = 0;
  if (const char* env = std::getenv("SPPA_THREADS")) {
    try {
      n = std::stoi(env);
    } catch (...) {
      n = 0;
    }
  }
  if (n <= 0) n = omp_get_max_threads();
  return n;
#else
  return 1;
#endif
}

}  // namespace sppa
