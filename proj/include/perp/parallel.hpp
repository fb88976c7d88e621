#pragma once

#include <cstdint>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace perp {

inline int hardware_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Runs body(batch_index) for every index in [0, n_batches). Each batch owns a
// private random substream and writes into its own result slot; reduction
// happens afterwards in index order, so the outcome is bit-identical for any
// thread count. threads <= 1 is the serial reference path.
template <class F>
void parallel_for_batches(std::int64_t n_batches, int threads, F&& body) {
#if defined(_OPENMP)
    if (threads > 1 && n_batches > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::int64_t g = 0; g < n_batches; ++g) body(g);
        return;
    }
#else
    (void)threads;
#endif
    for (std::int64_t g = 0; g < n_batches; ++g) body(g);
}

}  // namespace perp
