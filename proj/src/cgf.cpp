#include "perp/cgf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "perp/errors.hpp"

namespace perp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kSCap = 1024.0;  // 2^10, outer cap for bracket doubling

// sup of Lambda' over s >= 0: log(ess sup A), +inf for lognormal.
double sup_lambda_prime(const ALaw& law) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                return kInf;
            } else if constexpr (std::is_same_v<T, UniformA>) {
                return std::log(v.hi);
            } else {
                return v.p1 < 1.0 ? std::log(v.a2) : std::log(v.a1);
            }
        },
        law);
}

// Safeguarded Newton for f(s) = target on [lo, hi], f strictly increasing,
// d/ds f = fp. Caller guarantees f(lo) <= target <= f(hi).
template <class F, class Fp>
double newton_bracketed(F f, Fp fp, double target, double lo, double hi) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxRootIterations; ++it) {
        const double val = f(x);
        if (std::abs(val - target) <= kRootTolerance * std::max(1.0, std::abs(target))) return x;
        if (val < target)
            lo = x;
        else
            hi = x;
        const double der = fp(x);
        double next = der > 0.0 ? x - (val - target) / der : x;
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
        if (hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

// Root of Lambda' on (0, kSCap], or +inf when Lambda' stays negative.
double find_alpha_min(const ALaw& law) {
    const double at0 = log_mgf_derivs(law, 0.0).d1;
    if (at0 >= 0.0) return 0.0;
    double hi = 1.0;
    while (log_mgf_derivs(law, hi).d1 < 0.0) {
        hi *= 2.0;
        if (hi > kSCap) return kInf;
    }
    return newton_bracketed([&](double s) { return log_mgf_derivs(law, s).d1; },
                            [&](double s) { return log_mgf_derivs(law, s).d2; }, 0.0, 0.0, hi);
}

}  // namespace

double solve_alpha(const ALaw& law, double rho) {
    const double lo_limit = log_mgf_derivs(law, 0.0).d1;  // E log A
    if (!(rho > lo_limit))
        throw RangeError("solve_alpha: rho must exceed E log A = " + std::to_string(lo_limit));
    const double hi_limit = sup_lambda_prime(law);
    if (!(rho < hi_limit))
        throw RangeError("solve_alpha: rho must be below sup Lambda' = " +
                         std::to_string(hi_limit));
    double hi = 1.0;
    while (log_mgf_derivs(law, hi).d1 < rho) {
        hi *= 2.0;
        if (!std::isfinite(hi)) throw RangeError("solve_alpha: rho not attainable");
    }
    return newton_bracketed([&](double s) { return log_mgf_derivs(law, s).d1; },
                            [&](double s) { return log_mgf_derivs(law, s).d2; }, rho, 0.0, hi);
}

double alpha_bar(const ALaw& law, double alpha) {
    const CumulantTriple t = log_mgf_derivs(law, alpha);
    if (!(t.d1 > 0.0))
        throw DomainError("alpha_bar: Lambda'(alpha) must be positive (tangent must cross the axis)");
    return alpha - t.value / t.d1;
}

double legendre(const ALaw& law, double x) {
    if (x <= log_mgf_derivs(law, 0.0).d1) return 0.0;
    const double s = solve_alpha(law, x);
    return s * x - log_mgf_derivs(law, s).value;
}

CumulantProfile cramer_root(const ALaw& law) {
    CumulantProfile profile{};
    profile.tolerance = kRootTolerance;
    profile.e_log_a = log_mgf_derivs(law, 0.0).d1;
    if (!(profile.e_log_a < 0.0))
        throw DomainError("cramer_root: requires the contractive case E log A < 0");
    profile.alpha_min = find_alpha_min(law);
    profile.rho0 = kNan;
    profile.sigma0 = kNan;
    if (!std::isfinite(profile.alpha_min)) return profile;  // Lambda < 0 throughout, no root

    double hi = std::max(1.0, 2.0 * profile.alpha_min);
    while (log_mgf_derivs(law, hi).value <= 0.0) {
        hi *= 2.0;
        if (hi > kSCap) return profile;  // alpha0 absent on (0, 2^10]
    }
    const double alpha0 =
        newton_bracketed([&](double s) { return log_mgf_derivs(law, s).value; },
                         [&](double s) { return log_mgf_derivs(law, s).d1; }, 0.0,
                         profile.alpha_min, hi);
    profile.alpha0 = alpha0;
    const CumulantTriple t = log_mgf_derivs(law, alpha0);
    profile.rho0 = t.d1;
    // lambda''(alpha0) = (Lambda'' + Lambda'^2) lambda(alpha0), with lambda(alpha0) = 1.
    profile.sigma0 = (t.d2 + t.d1 * t.d1) * mgf_a(law, alpha0);
    return profile;
}

HypothesisReport hypothesis_report(const InnovationLaw& law, double alpha) {
    HypothesisReport report{};
    report.alpha_used = alpha;
    const CumulantTriple at_alpha = log_mgf_derivs(law.a, alpha);
    const CumulantTriple at_one = log_mgf_derivs(law.a, 1.0);
    const double alpha_min = find_alpha_min(law.a);

    report.h_contractive = log_mgf_derivs(law.a, 0.0).d1 < 0.0;
    // Every admitted A variant has lambda(alpha + eps) < inf and every admitted
    // B variant a finite (alpha + eps)-moment; the check is structural.
    report.h_moments = true;
    report.h_moments_eps = 0.5;
    report.h_index = alpha_min <= 1.0 || at_one.value < at_alpha.value;

    const SupportExtremes ext = support_extremes(law);
    if (!ext.has_a_below_1 || !ext.has_a_above_1) {
        report.h_support = Flag::no;
    } else if (ext.b_hi > 0.0) {
        // Take b1 = b2 = b > 0: b/(1-a2) < 0 < b/(1-a1).
        report.h_support = Flag::yes;
    } else {
        // All of supp B is <= 0, so b2/(1-a2) >= 0 >= b1/(1-a1) always.
        report.h_support = Flag::no;
    }

    report.h_density = a_has_density(law.a);
    const bool density_floor = a_has_density(law.a) && ext.a_hi > 1.0;
    report.thm2_regime =
        at_alpha.value < at_one.value && b_strictly_positive(law.b) && density_floor;
    return report;
}

double rate_I(const ALaw& law, double rho) { return alpha_bar(law, solve_alpha(law, rho)); }

}  // namespace perp
