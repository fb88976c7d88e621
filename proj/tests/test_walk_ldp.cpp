#include <doctest.h>

#include <cmath>

#include "perp/cgf.hpp"
#include "perp/errors.hpp"
#include "perp/oracle.hpp"
#include "perp/walk_ldp.hpp"

using namespace perp;

namespace {

const ALaw kLogNormal = LogNormalA{-1.0, std::sqrt(2.0)};
const double kSqrt2 = std::sqrt(2.0);

PetrovQuery query(const ALaw& law, std::int64_t n, double c, double gamma) {
    return PetrovQuery{n, c, gamma, solve_alpha(law, c)};
}

}  // namespace

TEST_CASE("petrov_prob: Gaussian cross-check at n=25, c=0.2") {
    const double value = petrov_prob(kLogNormal, query(kLogNormal, 25, 0.2, 0.0));
    // Independent oracle: phi(x)/x with x = sqrt(n) (c - mu) / sigma.
    const double x = std::sqrt(25.0) * 1.2 / kSqrt2;
    const double mills = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI) / x;
    CHECK(value == doctest::Approx(mills).epsilon(1e-12));
    CHECK(value == doctest::Approx(1.161e-5).epsilon(2e-3));

    const double exact = exact_gaussian_walk_tail(-1.0, kSqrt2, 25, std::exp(25.0 * 0.2));
    CHECK(exact == doctest::Approx(1.10e-5).epsilon(5e-3));
    const double ratio = value / exact;
    CHECK(ratio > 1.0);
    CHECK(ratio < 1.06);
}

TEST_CASE("petrov_prob reduces to the Bahadur-Rao form at gamma = 0") {
    for (const double c : {0.1, 0.3, 0.7}) {
        const PetrovQuery q = query(kLogNormal, 80, c, 0.0);
        const CumulantTriple t = log_mgf_derivs(kLogNormal, q.alpha);
        const double br = std::exp(-80.0 * legendre(kLogNormal, c)) /
                          (q.alpha * std::sqrt(t.d2) * std::sqrt(2.0 * M_PI * 80.0));
        CHECK(petrov_prob(kLogNormal, q) == doctest::Approx(br).epsilon(1e-12));
    }
}

TEST_CASE("petrov_prob ratio to the exact Gaussian tail on the grid") {
    for (const std::int64_t n : {100, 400}) {
        for (const double c : {0.1, 0.2, 0.5}) {
            const double approx = petrov_prob(kLogNormal, query(kLogNormal, n, c, 0.0));
            const double exact = exact_gaussian_walk_tail(
                -1.0, kSqrt2, n, std::exp(static_cast<double>(n) * c));
            const double x = std::sqrt(static_cast<double>(n)) * (c + 1.0) / kSqrt2;
            const double band = 2.0 / (x * x);
            CHECK(approx / exact > 1.0 - band);
            CHECK(approx / exact < 1.0 + band);
        }
    }
}

TEST_CASE("petrov_prob: errors") {
    CHECK_THROWS_AS(petrov_prob(ALaw{TwoPointA{0.5, 0.75, 2.0}},
                                PetrovQuery{10, 0.2, 0.0, 1.0}),
                    LatticeLawError);
    CHECK_THROWS_AS(petrov_prob(kLogNormal, PetrovQuery{10, -1.5, 0.0, 0.5}), RangeError);
    CHECK_THROWS_AS(petrov_prob(kLogNormal, PetrovQuery{10, 0.2, 0.0, 0.9}), DomainError);
}

TEST_CASE("petrov_shifted: reduction, factorization, exponent identity") {
    const double alpha = 1.5;
    const double c = log_mgf_derivs(kLogNormal, alpha).d1;  // = 2

    // bit-for-bit reduction at j = 0, delta = 0
    const double shifted = petrov_shifted(kLogNormal, 100, 0, 0.0, alpha);
    const double plain = petrov_prob(kLogNormal, PetrovQuery{100, c, 0.0, alpha});
    CHECK(shifted == plain);

    // factorization in j: e^{-j Lambda(alpha)} per unit of j
    const double lam = log_mgf_derivs(kLogNormal, alpha).value;  // 0.75
    CHECK(petrov_shifted(kLogNormal, 100, 5, 0.0, alpha) ==
          doctest::Approx(plain * std::exp(-5.0 * lam)).epsilon(1e-12));

    // the formula depends on (t, delta) only through T = t e^{n delta}:
    // log value = -log(alpha sigma sqrt(2 pi n)) - alpha log T + (n - j) Lambda
    for (const double delta : {-0.02, 0.0, 0.03}) {
        const std::int64_t n = 60, j = 3;
        const CumulantTriple t = log_mgf_derivs(kLogNormal, alpha);
        const double log_T = static_cast<double>(n) * (t.d1 + delta);
        const double direct =
            -std::log(alpha * std::sqrt(t.d2) * std::sqrt(2.0 * M_PI * n)) -
            alpha * log_T + static_cast<double>(n - j) * t.value;
        CHECK(petrov_shifted(kLogNormal, n, j, delta, alpha) ==
              doctest::Approx(std::exp(direct)).epsilon(1e-12));
    }
}

TEST_CASE("exact_gaussian_walk_tail: examples") {
    CHECK(exact_gaussian_walk_tail(-1.0, kSqrt2, 30, std::exp(-30.0)) == 0.5);
    CHECK(exact_gaussian_walk_tail(0.0, 1.0, 1, std::exp(1.0)) ==
          doctest::Approx(0.15865525393145707).epsilon(1e-10));
    CHECK(exact_gaussian_walk_tail(-1.0, kSqrt2, 10, 2.0) >
          exact_gaussian_walk_tail(-1.0, kSqrt2, 10, 3.0));
}

TEST_CASE("mc_walk_tail: plain Monte Carlo matches the enumeration oracle") {
    const InnovationLaw law{TwoPointA{0.5, 0.75, 2.0}, ConstB{1.0}};
    const double t = 0.3;  // off the attainable grid
    const double exact = exact_walk_tail(Atoms{{0.5, 0.75}, {2.0, 0.25}}, 10, t);
    const EstimateRecord rec = mc_walk_tail(law, 10, t, 200'000, 0.0, 99);
    CHECK(std::abs(rec.value - exact) <= 4.0 * rec.std_error);
    CHECK(rec.ess == doctest::Approx(rec.sum_w).epsilon(1e-12));  // unit weights
}

TEST_CASE("mc_walk_tail: tilted deep tail matches the Gaussian oracle") {
    const InnovationLaw law{kLogNormal, ConstB{1.0}};
    const double c = 0.30;
    const std::int64_t n = 40;
    const double t = std::exp(static_cast<double>(n) * c);
    const double alpha = solve_alpha(kLogNormal, c);
    const EstimateRecord rec = mc_walk_tail(law, n, t, 100'000, alpha, 1234);
    const double exact = exact_gaussian_walk_tail(-1.0, kSqrt2, n, t);
    CHECK(std::abs(rec.value - exact) <= 4.0 * rec.std_error);
    CHECK(rec.ess >= 1000.0);
}

TEST_CASE("mc_walk_tail: t -> 0 gives probability one with zero variance") {
    const InnovationLaw law{kLogNormal, ConstB{1.0}};
    const EstimateRecord rec = mc_walk_tail(law, 5, 1e-300, 2'000, 0.0, 7);
    CHECK(rec.value == 1.0);
    CHECK(rec.std_error == 0.0);
}

TEST_CASE("mc_walk_tail: tilt invariance of the estimate") {
    const InnovationLaw law{kLogNormal, ConstB{1.0}};
    const std::int64_t n = 20;
    const double t = std::exp(2.0);
    const EstimateRecord a = mc_walk_tail(law, n, t, 150'000, 0.6, 5);
    const EstimateRecord b = mc_walk_tail(law, n, t, 150'000, 1.1, 6);
    const double se = std::hypot(a.std_error, b.std_error);
    CHECK(std::abs(a.value - b.value) <= 5.0 * se);
}
