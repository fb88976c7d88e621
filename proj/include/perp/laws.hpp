#pragma once

#include <optional>
#include <variant>

#include "perp/rng.hpp"

namespace perp {

// ---------------------------------------------------------------------------
// Innovation laws for the i.i.d. pairs (A, B) driving the perpetuity
//   Y_n = B_1 + A_1 B_2 + ... + (A_1 ... A_{n-1}) B_n.
// A and B are independent by construction, so the joint law is the product
// f_A(a) da x nu(db) and exponential tilting of A leaves B untouched.
// Only laws with closed-form lambda(s) = E[A^s], its log-derivatives, and a
// closed-form tilted sampler are admitted; nothing downstream integrates
// numerically.
// ---------------------------------------------------------------------------

struct LogNormalA {
    double mu;     // log A ~ Normal(mu, sigma^2)
    double sigma;  // > 0
};

struct UniformA {
    double lo;  // 0 < lo < hi
    double hi;
};

struct TwoPointA {
    double a1;  // 0 < a1 < a2
    double p1;  // P[A = a1], in (0, 1]
    double a2;
};

using ALaw = std::variant<LogNormalA, UniformA, TwoPointA>;

struct ConstB {
    double value;
};

struct UniformB {
    double lo;  // lo < hi, may straddle 0
    double hi;
};

struct ExponentialB {
    double rate;  // > 0
};

struct TwoPointB {
    double b1;  // b1 < b2
    double p1;  // P[B = b1], in (0, 1]
    double b2;
};

using BLaw = std::variant<ConstB, UniformB, ExponentialB, TwoPointB>;

struct InnovationLaw {
    ALaw a;
    BLaw b;
};

// Throws DomainError when a parameter violates its constraint.
void validate(const ALaw& law);
void validate(const BLaw& law);
inline void validate(const InnovationLaw& law) {
    validate(law.a);
    validate(law.b);
}

double sample_a(const ALaw& law, RandomStream& rng);
double sample_b(const BLaw& law, RandomStream& rng);

// lambda(s) = E[A^s], s >= 0 (all admitted variants are finite for all s >= 0).
double mgf_a(const ALaw& law, double s);

struct CumulantTriple {
    double value;  // Lambda(s)   = log lambda(s)
    double d1;     // Lambda'(s)
    double d2;     // Lambda''(s)
};

// Closed-form Lambda, Lambda', Lambda''; no finite differences.
CumulantTriple log_mgf_derivs(const ALaw& law, double s);

// Right-continuous CDF P[A <= x].
double cdf_a(const ALaw& law, double x);

// Exponentially tilted law dmu_s = a^s dmu / lambda(s) with a closed-form
// sampler: LogNormal shifts its location, UniformInterval becomes a power
// density inverted analytically, TwoPoint reweights its atoms.
class TiltedALaw {
  public:
    TiltedALaw(const ALaw& base, double s);

    double sample(RandomStream& rng) const;
    double s() const { return s_; }
    double log_normalizer() const { return log_normalizer_; }  // Lambda(s)
    const ALaw& base() const { return base_; }

  private:
    struct PowerSampler {
        double lo_pow;   // lo^{s+1}
        double span;     // hi^{s+1} - lo^{s+1}
        double inv_exp;  // 1 / (s+1)
    };
    ALaw base_;
    double s_ = 0.0;
    double log_normalizer_ = 0.0;
    std::variant<LogNormalA, PowerSampler, TwoPointA> sampler_;
};

TiltedALaw tilt_a(const ALaw& law, double s);

struct SupportExtremes {
    double a_lo;  // essential infimum of A (0 for unbounded-below densities)
    double a_hi;  // essential supremum, +inf when unbounded
    double b_lo;  // -inf / +inf allowed
    double b_hi;
    bool has_a_below_1;
    bool has_a_above_1;
};

SupportExtremes support_extremes(const InnovationLaw& law);

// Structural flags.
bool a_has_density(const ALaw& law);       // LogNormal, UniformInterval
bool a_is_lattice(const ALaw& law);        // TwoPoint (oracle-only for Petrov)
bool b_strictly_positive(const BLaw& law); // support contained in (0, inf)

// E log A = Lambda'(0).
inline double e_log_a(const ALaw& law) { return log_mgf_derivs(law, 0.0).d1; }

}  // namespace perp
