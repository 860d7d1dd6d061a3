#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sl2wild {

// Execution policy for the data-parallel kernels (mesh sweeps, theta scans,
// batch integration). Serial is the reference implementation; results must be
// bitwise identical since every work item writes only its own slot.
enum class Exec { Serial, Parallel };

inline Exec& default_exec() {
    static Exec e = Exec::Parallel;
    return e;
}

template <class F>
void parallel_for(std::size_t n, Exec exec, F&& body) {
    if (exec == Exec::Parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < (long long)n; ++i) body(std::size_t(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) body(i);
}

inline int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace sl2wild
