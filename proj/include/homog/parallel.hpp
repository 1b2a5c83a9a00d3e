#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace homog {

// Honors HOMOG_THREADS; never exceeds what the runtime offers.
inline int thread_count() {
#ifdef _OPENMP
    int hw = omp_get_max_threads();
#else
    int hw = 1;
#endif
    if (const char* env = std::getenv("HOMOG_THREADS")) {
        int want = std::atoi(env);
        if (want >= 1) return std::min(want, hw);
    }
    return hw;
}

} // namespace homog
