#include "lowreg/parallel.hpp"

namespace lowreg::par {

Mode& mode() {
#ifdef _OPENMP
  static Mode m = Mode::OpenMP;
#else
  static Mode m = Mode::Serial;
#endif
  return m;
}

int worker_count() {
#ifdef _OPENMP
  return mode() == Mode::OpenMP ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

}  // namespace lowreg::par
