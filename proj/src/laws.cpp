#include "perp/laws.hpp"

#include <cmath>
#include <limits>

#include "perp/errors.hpp"

namespace perp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double phi_normal(double z) { return 0.5 * std::erfc(-z / M_SQRT2); }

}  // namespace

void validate(const ALaw& law) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                if (!(v.sigma > 0.0)) throw DomainError("lognormal A: sigma must be > 0");
            } else if constexpr (std::is_same_v<T, UniformA>) {
                if (!(v.lo > 0.0) || !(v.lo < v.hi))
                    throw DomainError("uniform A: need 0 < lo < hi");
            } else {
                if (!(v.a1 > 0.0) || !(v.a1 < v.a2))
                    throw DomainError("twopoint A: need 0 < a1 < a2");
                if (!(v.p1 > 0.0) || !(v.p1 <= 1.0))
                    throw DomainError("twopoint A: need p1 in (0, 1]");
            }
        },
        law);
}

void validate(const BLaw& law) {
    std::visit(
        [](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstB>) {
                if (!std::isfinite(v.value)) throw DomainError("const B: value must be finite");
            } else if constexpr (std::is_same_v<T, UniformB>) {
                if (!(v.lo < v.hi)) throw DomainError("uniform B: need lo < hi");
            } else if constexpr (std::is_same_v<T, ExponentialB>) {
                if (!(v.rate > 0.0)) throw DomainError("exponential B: rate must be > 0");
            } else {
                if (!(v.b1 < v.b2)) throw DomainError("twopoint B: need b1 < b2");
                if (!(v.p1 > 0.0) || !(v.p1 <= 1.0))
                    throw DomainError("twopoint B: need p1 in (0, 1]");
            }
        },
        law);
}

double sample_a(const ALaw& law, RandomStream& rng) {
    return std::visit(
        [&rng](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                return std::exp(v.mu + v.sigma * rng.next_normal());
            } else if constexpr (std::is_same_v<T, UniformA>) {
                return v.lo + (v.hi - v.lo) * rng.next_double();
            } else {
                return rng.next_double() < v.p1 ? v.a1 : v.a2;
            }
        },
        law);
}

double sample_b(const BLaw& law, RandomStream& rng) {
    return std::visit(
        [&rng](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstB>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, UniformB>) {
                return v.lo + (v.hi - v.lo) * rng.next_double();
            } else if constexpr (std::is_same_v<T, ExponentialB>) {
                return rng.next_exponential() / v.rate;
            } else {
                return rng.next_double() < v.p1 ? v.b1 : v.b2;
            }
        },
        law);
}

double mgf_a(const ALaw& law, double s) {
    if (s < 0.0) throw DomainError("mgf_a: s must be >= 0");
    if (s == 0.0) return 1.0;
    return std::visit(
        [s](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                return std::exp(v.mu * s + 0.5 * v.sigma * v.sigma * s * s);
            } else if constexpr (std::is_same_v<T, UniformA>) {
                const double p = s + 1.0;
                return (std::pow(v.hi, p) - std::pow(v.lo, p)) / (p * (v.hi - v.lo));
            } else {
                return v.p1 * std::pow(v.a1, s) + (1.0 - v.p1) * std::pow(v.a2, s);
            }
        },
        law);
}

CumulantTriple log_mgf_derivs(const ALaw& law, double s) {
    if (s < 0.0) throw DomainError("log_mgf_derivs: s must be >= 0");
    CumulantTriple triple = std::visit(
        [s](const auto& v) -> CumulantTriple {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                const double s2 = v.sigma * v.sigma;
                return {v.mu * s + 0.5 * s2 * s * s, v.mu + s2 * s, s2};
            } else if constexpr (std::is_same_v<T, UniformA>) {
                // Lambda = log N(s) - log(s+1) - log(hi-lo), N(s) = hi^{s+1} - lo^{s+1},
                // factored through q = (lo/hi)^{s+1} so large s cannot overflow.
                const double p = s + 1.0;
                const double llo = std::log(v.lo), lhi = std::log(v.hi);
                const double q = std::exp(p * (llo - lhi));
                const double om = 1.0 - q;
                const double lam = p * lhi + std::log1p(-q) - std::log(p) - std::log(v.hi - v.lo);
                const double u1 = (lhi - q * llo) / om;
                const double u2 = (lhi * lhi - q * llo * llo) / om;
                return {lam, u1 - 1.0 / p, u2 - u1 * u1 + 1.0 / (p * p)};
            } else {
                const double l1 = std::log(v.a1), l2 = std::log(v.a2);
                const double p2 = 1.0 - v.p1;
                if (p2 == 0.0) return {s * l1, l1, 0.0};
                const double d = s * (l2 - l1);
                const double logit = std::log(p2 / v.p1) + d;  // log(w2/w1)
                const double q = logit > 0.0 ? std::exp(-logit) / (1.0 + std::exp(-logit))
                                             : 1.0 / (1.0 + std::exp(logit));
                const double lam = s * l2 + std::log(p2 + v.p1 * std::exp(-d));
                const double d1 = q * l1 + (1.0 - q) * l2;
                return {lam, d1, q * (1.0 - q) * (l2 - l1) * (l2 - l1)};
            }
        },
        law);
    if (s == 0.0) triple.value = 0.0;  // lambda(0) = 1 exactly
    return triple;
}

double cdf_a(const ALaw& law, double x) {
    return std::visit(
        [x](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                if (x <= 0.0) return 0.0;
                return phi_normal((std::log(x) - v.mu) / v.sigma);
            } else if constexpr (std::is_same_v<T, UniformA>) {
                if (x <= v.lo) return 0.0;
                if (x >= v.hi) return 1.0;
                return (x - v.lo) / (v.hi - v.lo);
            } else {
                if (x < v.a1) return 0.0;
                if (x < v.a2) return v.p1;
                return 1.0;
            }
        },
        law);
}

TiltedALaw::TiltedALaw(const ALaw& base, double s) : base_(base), s_(s) {
    if (s < 0.0) throw DomainError("tilt_a: s must be >= 0");
    log_normalizer_ = log_mgf_derivs(base, s).value;
    sampler_ = std::visit(
        [s](const auto& v) -> std::variant<LogNormalA, PowerSampler, TwoPointA> {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                // Completion of the square: tilt shifts mu by s * sigma^2.
                return LogNormalA{v.mu + s * v.sigma * v.sigma, v.sigma};
            } else if constexpr (std::is_same_v<T, UniformA>) {
                const double p = s + 1.0;
                const double lo_pow = std::pow(v.lo, p);
                return PowerSampler{lo_pow, std::pow(v.hi, p) - lo_pow, 1.0 / p};
            } else {
                const double w1 = v.p1 * std::pow(v.a1, s);
                const double w2 = (1.0 - v.p1) * std::pow(v.a2, s);
                return TwoPointA{v.a1, w1 / (w1 + w2), v.a2};
            }
        },
        base);
}

double TiltedALaw::sample(RandomStream& rng) const {
    return std::visit(
        [&rng](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                return std::exp(v.mu + v.sigma * rng.next_normal());
            } else if constexpr (std::is_same_v<T, PowerSampler>) {
                // Inverse CDF of density proportional to a^s on [lo, hi].
                return std::pow(v.lo_pow + v.span * rng.next_double(), v.inv_exp);
            } else {
                return rng.next_double() < v.p1 ? v.a1 : v.a2;
            }
        },
        sampler_);
}

TiltedALaw tilt_a(const ALaw& law, double s) { return TiltedALaw(law, s); }

SupportExtremes support_extremes(const InnovationLaw& law) {
    SupportExtremes ext{};
    std::visit(
        [&ext](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>) {
                ext.a_lo = 0.0;
                ext.a_hi = kInf;
            } else if constexpr (std::is_same_v<T, UniformA>) {
                ext.a_lo = v.lo;
                ext.a_hi = v.hi;
            } else {
                ext.a_lo = v.a1;
                ext.a_hi = v.p1 < 1.0 ? v.a2 : v.a1;
            }
        },
        law.a);
    std::visit(
        [&ext](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstB>) {
                ext.b_lo = ext.b_hi = v.value;
            } else if constexpr (std::is_same_v<T, UniformB>) {
                ext.b_lo = v.lo;
                ext.b_hi = v.hi;
            } else if constexpr (std::is_same_v<T, ExponentialB>) {
                ext.b_lo = 0.0;
                ext.b_hi = kInf;
            } else {
                ext.b_lo = v.b1;
                ext.b_hi = v.p1 < 1.0 ? v.b2 : v.b1;
            }
        },
        law.b);
    ext.has_a_below_1 = ext.a_lo < 1.0;
    ext.has_a_above_1 = ext.a_hi > 1.0;
    return ext;
}

bool a_has_density(const ALaw& law) { return !std::holds_alternative<TwoPointA>(law); }

bool a_is_lattice(const ALaw& law) { return std::holds_alternative<TwoPointA>(law); }

bool b_strictly_positive(const BLaw& law) {
    return std::visit(
        [](const auto& v) -> bool {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstB>) {
                return v.value > 0.0;
            } else if constexpr (std::is_same_v<T, UniformB>) {
                return v.lo > 0.0;
            } else if constexpr (std::is_same_v<T, ExponentialB>) {
                return true;
            } else {
                return v.b1 > 0.0;
            }
        },
        law);
}

}  // namespace perp
