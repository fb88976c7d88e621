#pragma once

// Internal batched Monte Carlo driver shared by the estimator translation
// units. Batches are indexed by absolute sample position: batch g covers
// samples [g*kBatchSize, (g+1)*kBatchSize) intersected with the requested
// range and always draws from substream(seed, g); per-batch partial sums are
// reduced in index order. Results are therefore bit-identical for any thread
// count, and runs over batch-aligned disjoint ranges merge exactly.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "perp/engine.hpp"
#include "perp/errors.hpp"
#include "perp/parallel.hpp"
#include "perp/rng.hpp"

namespace perp::detail {

struct BatchStat {
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    double censored_sum = 0.0;
    std::int64_t overflow = 0;
};

inline EstimateRecord finalize(std::int64_t samples, std::string target,
                               const std::vector<BatchStat>& stats) {
    EstimateRecord rec;
    rec.n_samples = samples;
    rec.target = std::move(target);
    for (const BatchStat& s : stats) {
        rec.sum_w += s.sum_w;
        rec.sum_w2 += s.sum_w2;
        rec.censored_sum += s.censored_sum;
        rec.overflow_paths += s.overflow;
    }
    const double n = static_cast<double>(samples);
    rec.value = rec.sum_w / n;
    rec.censored_weight = rec.censored_sum / n;
    if (samples > 1) {
        const double var_num = std::max(0.0, rec.sum_w2 - rec.sum_w * rec.sum_w / n);
        rec.std_error = std::sqrt(var_num / (n * (n - 1.0)));
    }
    rec.ess = rec.sum_w2 > 0.0 ? rec.sum_w * rec.sum_w / rec.sum_w2 : 0.0;
    return rec;
}

template <class PerSample>
EstimateRecord run_estimator(std::int64_t samples, std::uint64_t seed, const EngineOptions& opts,
                             std::string target, PerSample&& per_sample) {
    if (samples < 1) throw DomainError("samples must be >= 1");
    const std::int64_t lo = opts.sample_offset;
    const std::int64_t hi = lo + samples;
    const std::int64_t first_batch = lo / kBatchSize;
    const std::int64_t last_batch = (hi - 1) / kBatchSize;
    const std::int64_t n_batches = last_batch - first_batch + 1;
    std::vector<BatchStat> stats(static_cast<std::size_t>(n_batches));
    const int threads = opts.threads > 0 ? opts.threads : hardware_threads();
    parallel_for_batches(n_batches, threads, [&](std::int64_t slot) {
        const std::int64_t g = first_batch + slot;
        const std::int64_t count =
            std::min(hi, (g + 1) * kBatchSize) - std::max(lo, g * kBatchSize);
        RandomStream rng = RandomStream::substream(seed, static_cast<std::uint64_t>(g));
        BatchStat& stat = stats[static_cast<std::size_t>(slot)];
        for (std::int64_t i = 0; i < count; ++i) per_sample(rng, stat);
    });
    return finalize(samples, std::move(target), stats);
}

}  // namespace perp::detail
