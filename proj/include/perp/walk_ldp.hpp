#pragma once

#include <cstdint>

#include "perp/engine.hpp"
#include "perp/laws.hpp"

namespace perp {

// ---------------------------------------------------------------------------
// Sharp large-deviation evaluators for the multiplicative walk
// Pi_n = A_1 ... A_n, plus exact and Monte Carlo oracles to validate them.
// The evaluators return the leading term only: the (1 + O(|gamma_n|)) inside
// the exponent and the trailing (1 + o(1)) carry no constants in the source
// statement, so comparisons are ratio-based with n-dependent tolerance.
// ---------------------------------------------------------------------------

struct PetrovQuery {
    std::int64_t n;  // number of steps
    double c;        // exponential rate target
    double gamma_n;  // perturbation
    double alpha;    // solves Lambda'(alpha) = c
};

// (1/(alpha sigma(alpha) sqrt(2 pi n))) *
//   exp{-n (alpha (c + gamma) - Lambda(alpha) + gamma^2 / (2 sigma^2(alpha)))},
// approximating P[Pi_n > e^{n(c + gamma)}]. Rejects lattice A
// (LatticeLawError) and c outside (E log A, sup Lambda') (RangeError).
double petrov_prob(const ALaw& law, const PetrovQuery& query);

// Shifted variant: (1/(alpha sigma sqrt(2 pi n))) t^{-alpha_bar} e^{-alpha n
// delta_n} e^{-j_n Lambda(alpha)} with t = e^{n Lambda'(alpha)}, approximating
// P[Pi_{n - j_n} >= t e^{n delta_n}]. Reduces bit-for-bit to petrov_prob at
// gamma = 0 when j_n = 0 and delta_n = 0.
double petrov_shifted(const ALaw& law, std::int64_t n, std::int64_t j_n, double delta_n,
                      double alpha);

// Exact P[Pi_n > threshold] for lognormal steps: the standard normal upper
// tail via erfc.
double exact_gaussian_walk_tail(double mu, double sigma, std::int64_t n, double threshold);

// Unbiased importance-sampling estimate of P[Pi_n > t]: steps drawn from
// tilt_a(law, tilt_alpha), weight exp(n Lambda(tilt_alpha) - tilt_alpha log
// Pi_n) on the event. tilt_alpha = 0 is plain Monte Carlo.
EstimateRecord mc_walk_tail(const InnovationLaw& law, std::int64_t n, double t,
                            std::int64_t samples, double tilt_alpha, std::uint64_t seed,
                            const EngineOptions& opts = {});

}  // namespace perp
