// SPDX-License-Identifier: Apache-2.0
//
// OpenMP work sharing with a serial reference path. Callers write results
// into per-index slots and reduce in a fixed order afterwards, so outputs are
// bit-identical regardless of thread count.

#ifndef ISACSPIKE_PARALLEL_HPP_
#define ISACSPIKE_PARALLEL_HPP_

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace isacspike {

enum class ExecMode { serial, openmp };

inline int hardware_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

template <typename Fn>
void for_index(std::size_t count, Fn&& fn, ExecMode mode, int max_threads = 0) {
#if defined(_OPENMP)
    if (mode == ExecMode::openmp) {
        const int threads = max_threads > 0 ? max_threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(count); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)mode;
    (void)max_threads;
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace isacspike

#endif  // ISACSPIKE_PARALLEL_HPP_
