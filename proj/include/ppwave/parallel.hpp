#pragma once

#include <cstddef>
#include <functional>

#ifdef PPWAVE_HAVE_OPENMP
#include <omp.h>
#endif

namespace ppwave::par {

/// Serial reference loop. Kept separate so tests and benchmarks can compare
/// it against the OpenMP path on identical inputs.
template <typename F>
void serial_for(std::size_t count, F&& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

/// Runs body(i) for i in [0, count). jobs <= 0 means use all available
/// threads; jobs == 1 is the serial reference. Bodies must write only to
/// their own slot of any shared output so results are order-independent.
template <typename F>
void parallel_for(std::size_t count, F&& body, int jobs = 0) {
#ifdef PPWAVE_HAVE_OPENMP
  if (jobs != 1) {
    int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long long i = 0; i < static_cast<long long>(count); ++i)
      body(static_cast<std::size_t>(i));
    return;
  }
#else
  (void)jobs;
#endif
  serial_for(count, body);
}

inline int hardware_jobs() {
#ifdef PPWAVE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace ppwave::par
