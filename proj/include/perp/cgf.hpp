#pragma once

#include <optional>

#include "perp/laws.hpp"

namespace perp {

// ---------------------------------------------------------------------------
// Cumulant machinery for Lambda(s) = log E[A^s]: root finding on the strictly
// increasing Lambda', the convex conjugate, the decay index
// alpha_bar = alpha - Lambda(alpha)/Lambda'(alpha) = Lambda*(rho)/rho, and the
// Cramer constants alpha0, rho0 = E[A^{alpha0} log A], sigma0 =
// E[A^{alpha0} (log A)^2]. All solvers are safeguarded Newton with a
// bracketing fallback; tolerances are fixed here, not by callers.
// ---------------------------------------------------------------------------

inline constexpr double kRootTolerance = 1e-10;
inline constexpr int kMaxRootIterations = 200;

struct CumulantProfile {
    double alpha_min;              // argmin of Lambda (inf when Lambda' < 0 throughout)
    double e_log_a;                // Lambda'(0)
    std::optional<double> alpha0;  // Cramer root: Lambda(alpha0) = 0, alpha0 > 0
    double rho0;                   // Lambda'(alpha0), NaN when alpha0 absent
    double sigma0;                 // lambda''(alpha0) = E[A^{alpha0} (log A)^2], NaN when absent
    double tolerance;              // tolerance used by the solvers
};

enum class Flag { no, yes, unknown };

struct HypothesisReport {
    bool h_contractive;      // E log A < 0
    bool h_moments;          // E A^{alpha+eps} and E|B|^{alpha+eps} finite
    double h_moments_eps;    // the eps used (structural check)
    bool h_index;            // alpha_min <= 1 or Lambda(1) < Lambda(alpha)
    Flag h_support;          // exist (a1,b1),(a2,b2) in supp mu: a1<1<a2, b2/(1-a2) < b1/(1-a1)
    bool h_density;          // A has a density and the joint law is the product form
    bool thm2_regime;        // Lambda(alpha) < Lambda(1), B > 0 a.s., density floor
    double alpha_used;
};

// Unique alpha >= 0 with Lambda'(alpha) = rho. Throws RangeError when rho is
// outside (E log A, sup Lambda').
double solve_alpha(const ALaw& law, double rho);

// alpha - Lambda(alpha)/Lambda'(alpha); DomainError when Lambda'(alpha) <= 0.
double alpha_bar(const ALaw& law, double alpha);

// Fenchel-Legendre transform sup_{s>=0} {s x - Lambda(s)}; 0 for x <= Lambda'(0),
// RangeError above sup Lambda'.
double legendre(const ALaw& law, double x);

// Profile with the Cramer root when it exists on (0, s_cap], s_cap doubling up
// to 2^10; alpha0 is reported absent otherwise (callers that need it throw
// NoRootError).
CumulantProfile cramer_root(const ALaw& law);

HypothesisReport hypothesis_report(const InnovationLaw& law, double alpha);

// I(rho) = Lambda*(rho)/rho, the rate of the interval-level large deviations.
double rate_I(const ALaw& law, double rho);

// sigma(alpha) = sqrt(Lambda''(alpha)), the Bahadur-Rao normalization.
inline double sigma_alpha(const ALaw& law, double alpha) {
    return std::sqrt(log_mgf_derivs(law, alpha).d2);
}

}  // namespace perp
