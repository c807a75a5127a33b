#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lowreg::par {

/// Execution mode for the data-parallel kernels. Serial is the reference
/// implementation; OpenMP must produce bit-identical results (kernels fill
/// per-index slots, reductions run serially in fixed order afterwards).
enum class Mode { Serial, OpenMP };

Mode& mode();
int worker_count();

template <class F>
void for_index(std::size_t n, F&& f) {
  if (n == 0) return;
#ifdef _OPENMP
  if (mode() == Mode::OpenMP) {
    std::exception_ptr err;
    #pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      try {
        f(static_cast<std::size_t>(i));
      } catch (...) {
        #pragma omp critical(lowreg_par_err)
        {
          if (!err) err = std::current_exception();
        }
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) f(i);
}

}  // namespace lowreg::par
