// Benchmark: serial reference path (threads = 1) versus the OpenMP batch
// kernel on the two hottest estimators. Results must be bit-identical; this
// tool reports throughput and the parallel speedup.

#include <chrono>
#include <cstdio>

#include "perp/engine.hpp"
#include "perp/parallel.hpp"
#include "perp/walk_ldp.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
void bench(const char* name, std::int64_t samples, F&& run) {
    perp::EngineOptions serial;
    serial.threads = 1;
    perp::EngineOptions parallel;
    parallel.threads = perp::hardware_threads();

    auto t0 = Clock::now();
    const perp::EstimateRecord a = run(serial);
    const double ts = seconds_since(t0);
    t0 = Clock::now();
    const perp::EstimateRecord b = run(parallel);
    const double tp = seconds_since(t0);

    const bool identical = a.sum_w == b.sum_w && a.sum_w2 == b.sum_w2 &&
                           a.censored_sum == b.censored_sum && a.n_samples == b.n_samples;
    std::printf("%-28s serial %7.3fs  omp(%d) %7.3fs  speedup %5.2fx  %9.3g paths/s  %s\n", name,
                ts, parallel.threads, tp, ts / tp, static_cast<double>(samples) / tp,
                identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
    const perp::InnovationLaw law{perp::LogNormalA{-1.0, std::sqrt(2.0)}, perp::ConstB{1.0}};
    const perp::InnovationLaw law2{perp::LogNormalA{-2.0, 1.0}, perp::UniformB{1.0, 2.0}};
    const double u = std::exp(16.0);

    bench("pointwise tilted (k=8)", 2'000'000, [&](const perp::EngineOptions& opts) {
        return perp::estimate_pointwise(law, 2.0, u, 2'000'000, 42,
                                        perp::PointwiseMethod::tilted, opts);
    });
    bench("twophase pivot (k=24)", 500'000, [&](const perp::EngineOptions& opts) {
        return perp::estimate_pointwise_twophase(law2, 0.5, 3.0, std::exp(12.0), 500'000, 42,
                                                 opts);
    });
    bench("ruin alpha0-tilt", 500'000, [&](const perp::EngineOptions& opts) {
        return perp::estimate_ruin(law, u, 500'000, 3.0, 42, opts);
    });
    bench("mc_walk_tail (n=50)", 1'000'000, [&](const perp::EngineOptions& opts) {
        return perp::mc_walk_tail(law, 50, std::exp(50.0 * 0.35), 1'000'000, 0.675, 42, opts);
    });
    return 0;
}
