#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>

#ifdef RDMFT_HAVE_OPENMP
#include <omp.h>
#endif

namespace rdmft {

/// Thread budget: RDMFT_QFI_THREADS caps parallelism; absent means the
/// hardware default.
inline int max_threads() {
#ifdef RDMFT_HAVE_OPENMP
  if (const char* env = std::getenv("RDMFT_QFI_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs fn(0..n-1). Results must not depend on execution order; output
/// ordering is the caller's index order, so files built from the results are
/// reproducible for any thread count.
inline void parallel_for(int n, const std::function<void(int)>& fn,
                         bool serial = false) {
#ifdef RDMFT_HAVE_OPENMP
  if (!serial && max_threads() > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
#endif
  (void)serial;
  for (int i = 0; i < n; ++i) fn(i);
}

/// splitmix64 mix of a base seed and an index; deterministic per-point RNG
/// streams for grid sweeps.
inline uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace rdmft
