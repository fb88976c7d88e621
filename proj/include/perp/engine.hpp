#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perp/cgf.hpp"
#include "perp/laws.hpp"
#include "perp/rng.hpp"

namespace perp {

// ---------------------------------------------------------------------------
// Path simulation of (Y_n, M_n, Pi_n), first-passage detection, and unbiased
// rare-event estimators driven by exponential tilt schedules. Pi is tracked
// in log scale only; Y and M in linear scale. Estimators are embarrassingly
// parallel over fixed-size sample batches; batch g draws from the substream
// derived from (seed, g) and partial sums are reduced in batch order, so a
// given (seed, config) produces bit-identical records for any thread count.
// ---------------------------------------------------------------------------

struct TiltPhase {
    double s;            // tilt parameter, 0 = untilted
    std::int64_t steps;  // phase length
};

class TiltSchedule {
  public:
    static TiltSchedule untilted() { return TiltSchedule{}; }
    static TiltSchedule constant(double s, std::int64_t horizon);
    static TiltSchedule two_phase(double s1, std::int64_t n1, double s2, std::int64_t n2);

    const std::vector<TiltPhase>& phases() const { return phases_; }
    double tilt_at(std::int64_t step) const;  // 1-based; 0 beyond the schedule

  private:
    std::vector<TiltPhase> phases_;
};

struct PathRecord {
    std::int64_t tau = 0;  // passage step; 0 when censored at n_max
    bool censored = false;
    bool overflowed = false;      // Y left the double range (counts as exceedance)
    double log_pi_at_stop = 0.0;  // log Pi_tau (Pi_{n_max} when censored)
    double y_at_stop = 0.0;
    double m_prev = 0.0;    // M_{tau-1} = max{0, Y_1, ..., Y_{tau-1}}
    double log_weight = 0.0;  // sum over tilted drawn steps of Lambda(s) - s log A
};

PathRecord run_path(const InnovationLaw& law, const TiltSchedule& schedule, double u,
                    std::int64_t n_max, RandomStream& rng);

struct EstimateRecord {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    double ess = 0.0;              // (sum w)^2 / sum w^2
    double censored_weight = 0.0;  // weighted mass of censored paths, never added to value
    // Pooled sufficient statistics; merge() is exact over these.
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    double censored_sum = 0.0;
    std::int64_t overflow_paths = 0;
    std::string target;  // merge-compatibility tag
};

// Pools sufficient statistics of records produced for the identical target
// with disjoint streams. Throws MixedTargetError on mismatched tags.
EstimateRecord merge(const std::vector<EstimateRecord>& records);

struct EngineOptions {
    int threads = 0;                 // 0 = all available
    std::int64_t sample_offset = 0;  // absolute index of the first sample; batch-aligned
                                     // offsets make split runs merge bit-exactly
};

constexpr std::int64_t kBatchSize = 16384;

enum class PointwiseMethod { naive, tilted };

// Passage step targeted by the pointwise estimators: floor(log u / rho) + 1.
// The estimated probability is P[tau_u = k + 1] = P[M_k <= u < Y_{k+1}] with
// k = floor(log u / rho), the event of Proposition-3.1 form; Theta(u) =
// log u / rho - k is the discreteness correction used downstream.
std::int64_t pointwise_target_step(double u, double rho);

// Tilted: ConstantTilt(alpha, horizon = k) with alpha = solve_alpha(rho) and
// per-path contribution exp(k Lambda(alpha) - alpha log Pi_k) 1{tau = k + 1}.
// Naive: plain indicator under the base law.
EstimateRecord estimate_pointwise(const InnovationLaw& law, double rho, double u,
                                  std::int64_t samples, std::uint64_t seed,
                                  PointwiseMethod method = PointwiseMethod::tilted,
                                  const EngineOptions& opts = {});

// Two-phase schedule of the counterexample regime: n1 = min(k, floor(log u /
// Lambda'(beta))) steps at tilt beta, then tilt 1 up to step k. The step
// joining the phases is the crossing pivot: its A is not sampled but
// integrated in closed form over the admissible crossing interval
// (Rao-Blackwellised; see README). Unbiased for the same pointwise target.
EstimateRecord estimate_pointwise_twophase(const InnovationLaw& law, double rho, double beta,
                                           double u, std::int64_t samples, std::uint64_t seed,
                                           const EngineOptions& opts = {});

// Ruin probability P[tau_u < infinity] via the alpha0-tilt; per-path weight
// exp(-alpha0 log Pi_tau) on {tau <= n_max}, n_max = horizon_factor *
// ceil(log u / rho0). Censored tilted mass is reported, never extrapolated.
EstimateRecord estimate_ruin(const InnovationLaw& law, double u, std::int64_t samples,
                             double horizon_factor, std::uint64_t seed,
                             const EngineOptions& opts = {});

struct CltDiagnostics {
    double mean_ratio;  // (weighted mean tau) * rho0 / log u
    double ks_sigma0;   // KS distance under the sigma0 rho0^{-3/2} scale
    double ks_var0;     // KS distance under the sqrt(sigma0 - rho0^2) rho0^{-3/2} scale
    std::int64_t hits;
};

// Weighted law of tau_u conditioned on passage, against the two candidate CLT
// scales (the written second moment versus the variance square root).
CltDiagnostics clt_diagnostics(const InnovationLaw& law, double u, std::int64_t hits,
                               std::uint64_t seed, const EngineOptions& opts = {});

// Limit constant via the terminal-window representation: c_L =
// sqrt(rho)/(alpha sigma(alpha) sqrt(2 pi)) * lambda(alpha)^{-L} *
// E[((Y_{L+1})^alpha - (M_L)^alpha)_+], evaluated by the exact
// alpha-tilt change of measure on the scaled recursion Z_j = Y_j / Pi_j
// (the untilted expectation is a rare-event functional; see README).
EstimateRecord estimate_constant_series(const InnovationLaw& law, double alpha, std::int64_t L,
                                        std::int64_t samples, std::uint64_t seed,
                                        const EngineOptions& opts = {});

}  // namespace perp
