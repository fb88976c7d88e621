#include <doctest.h>

#include <cmath>
#include <vector>

#include "perp/errors.hpp"
#include "perp/laws.hpp"

using namespace perp;

namespace {

const ALaw kLogNormal = LogNormalA{-1.0, std::sqrt(2.0)};
const ALaw kUniform = UniformA{0.2, 1.4};
const ALaw kTwoPoint = TwoPointA{0.5, 0.75, 2.0};

struct MeanAccumulator {
    double sum = 0.0, sum2 = 0.0;
    std::int64_t n = 0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    double mean() const { return sum / n; }
    double stderr_mean() const {
        const double v = (sum2 - sum * sum / n) / (n - 1.0);
        return std::sqrt(std::max(v, 0.0) / n);
    }
};

}  // namespace

TEST_CASE("sample_a: degenerate two-point weight always draws a1") {
    RandomStream rng(7);
    const ALaw law = TwoPointA{0.5, 1.0, 2.0};
    for (int i = 0; i < 200; ++i) CHECK(sample_a(law, rng) == 0.5);
}

TEST_CASE("sample_a: uniform support containment") {
    RandomStream rng(11);
    const double eps = 1e-3;
    const ALaw law = UniformA{1.0, 1.0 + eps};
    for (int i = 0; i < 1000; ++i) {
        const double a = sample_a(law, rng);
        CHECK(a >= 1.0);
        CHECK(a <= 1.0 + eps);
    }
}

TEST_CASE("sample_a: standard lognormal log-mean within CLT band") {
    RandomStream rng(13);
    const ALaw law = LogNormalA{0.0, 1.0};
    MeanAccumulator acc;
    for (int i = 0; i < 1'000'000; ++i) acc.add(std::log(sample_a(law, rng)));
    CHECK(std::abs(acc.mean()) < 4e-3);  // 4/sqrt(n) on a standard normal mean
}

TEST_CASE("sample_b: examples") {
    RandomStream rng(17);
    CHECK(sample_b(ConstB{1.0}, rng) == 1.0);

    MeanAccumulator expo;
    for (int i = 0; i < 1'000'000; ++i) expo.add(sample_b(ExponentialB{2.0}, rng));
    CHECK(std::abs(expo.mean() - 0.5) < 4.0 * 0.5 / 1000.0);

    MeanAccumulator unif;
    for (int i = 0; i < 1'000'000; ++i) unif.add(sample_b(UniformB{-1.0, 1.0}, rng));
    CHECK(std::abs(unif.mean()) < 4.0 / (std::sqrt(3.0) * 1000.0));
}

TEST_CASE("mgf_a: closed-form examples") {
    CHECK(mgf_a(kLogNormal, 2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(mgf_a(kUniform, 1.0) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(mgf_a(kTwoPoint, 1.0) == doctest::Approx(0.875).epsilon(1e-12));
    CHECK_THROWS_AS(mgf_a(kLogNormal, -0.1), DomainError);
}

TEST_CASE("log_mgf_derivs: closed-form examples") {
    const CumulantTriple t = log_mgf_derivs(kLogNormal, 1.0);
    CHECK(t.value == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(t.d1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(t.d2 == doctest::Approx(2.0).epsilon(1e-14));

    for (const ALaw* law : {&kLogNormal, &kUniform, &kTwoPoint})
        CHECK(log_mgf_derivs(*law, 0.0).value == 0.0);  // Lambda(0) = 0 exactly

    CHECK(log_mgf_derivs(kTwoPoint, 0.0).d1 ==
          doctest::Approx(-0.5 * std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(log_mgf_derivs(kUniform, -1e-9), DomainError);
}

TEST_CASE("log_mgf_derivs matches central finite differences of Lambda") {
    // First derivative at the spec step 1e-5; the curvature check uses a
    // larger step so that roundoff in the second difference stays below the
    // 1e-6 budget.
    for (const ALaw* law : {&kLogNormal, &kUniform, &kTwoPoint}) {
        for (double s = 0.1; s <= 5.0; s += 0.35) {
            const double h1 = 1e-5;
            const CumulantTriple t = log_mgf_derivs(*law, s);
            const double lp = log_mgf_derivs(*law, s + h1).value;
            const double lm = log_mgf_derivs(*law, s - h1).value;
            CHECK(std::abs((lp - lm) / (2.0 * h1) - t.d1) < 1e-6);
            const double h2 = 1e-4;
            const double lp2 = log_mgf_derivs(*law, s + h2).value;
            const double lm2 = log_mgf_derivs(*law, s - h2).value;
            CHECK(std::abs((lp2 - 2.0 * t.value + lm2) / (h2 * h2) - t.d2) < 1e-6);
        }
    }
}

TEST_CASE("strict convexity on the grid for non-degenerate laws") {
    for (const ALaw* law : {&kLogNormal, &kUniform, &kTwoPoint})
        for (double s = 0.0; s <= 5.0; s += 0.25) CHECK(log_mgf_derivs(*law, s).d2 > 0.0);
}

TEST_CASE("large s stays finite (no overflow in the factored forms)") {
    for (const ALaw* law : {&kUniform, &kTwoPoint}) {
        const CumulantTriple t = log_mgf_derivs(*law, 1024.0);
        CHECK(std::isfinite(t.value));
        CHECK(std::isfinite(t.d1));
        CHECK(std::isfinite(t.d2));
    }
}

TEST_CASE("empirical moments match mgf_a within 5 stderr") {
    for (const ALaw* law : {&kLogNormal, &kUniform, &kTwoPoint}) {
        for (const double s : {0.0, 0.5, 1.0, 2.0}) {
            RandomStream rng(1000 + static_cast<std::uint64_t>(10 * s));
            MeanAccumulator acc;
            for (int i = 0; i < 1'000'000; ++i) acc.add(std::pow(sample_a(*law, rng), s));
            const double err = std::abs(acc.mean() - mgf_a(*law, s));
            CHECK(err <= 5.0 * std::max(acc.stderr_mean(), 1e-15));
        }
    }
}

TEST_CASE("tilt_a: closed-form examples") {
    // LogNormal(-1, sqrt 2) tilted at s = 1 is LogNormal(1, sqrt 2): check the
    // log-draw mean and normalizer.
    const TiltedALaw tilted = tilt_a(kLogNormal, 1.0);
    CHECK(tilted.log_normalizer() == doctest::Approx(0.0).epsilon(1e-14));
    RandomStream rng(3);
    MeanAccumulator acc;
    for (int i = 0; i < 200'000; ++i) acc.add(std::log(tilted.sample(rng)));
    CHECK(std::abs(acc.mean() - 1.0) <= 5.0 * acc.stderr_mean());

    // TwoPoint tilt reweights atoms: p1 a1 / lambda(1) = 0.375/0.875.
    const TiltedALaw tp = tilt_a(kTwoPoint, 1.0);
    std::int64_t low = 0;
    const std::int64_t n = 400'000;
    RandomStream rng2(5);
    for (std::int64_t i = 0; i < n; ++i)
        if (tp.sample(rng2) == 0.5) ++low;
    const double p = 0.375 / 0.875;
    const double freq = static_cast<double>(low) / static_cast<double>(n);
    CHECK(std::abs(freq - p) <= 5.0 * std::sqrt(p * (1.0 - p) / n));

    // normalizer equals mgf_a to 1e-12 relative
    for (const ALaw* law : {&kLogNormal, &kUniform, &kTwoPoint})
        for (const double s : {0.0, 0.5, 1.0, 2.0})
            CHECK(std::exp(tilt_a(*law, s).log_normalizer()) ==
                  doctest::Approx(mgf_a(*law, s)).epsilon(1e-12));

    CHECK_THROWS_AS(tilt_a(kUniform, -0.5), DomainError);
}

TEST_CASE("identity tilt reproduces the base law") {
    for (const ALaw* law : {&kLogNormal, &kUniform, &kTwoPoint}) {
        const TiltedALaw id = tilt_a(*law, 0.0);
        CHECK(id.log_normalizer() == 0.0);
        RandomStream r1(99), r2(99);
        MeanAccumulator a1, a2;
        for (int i = 0; i < 200'000; ++i) {
            a1.add(id.sample(r1));
            a2.add(sample_a(*law, r2));
        }
        const double se = std::hypot(a1.stderr_mean(), a2.stderr_mean());
        CHECK(std::abs(a1.mean() - a2.mean()) <= 5.0 * std::max(se, 1e-15));
    }
}

TEST_CASE("tilt consistency: reweighted tilted means match base means") {
    // h bounded: indicators h(a) = 1{a <= q} on a grid of thresholds.
    for (const ALaw* law : {&kLogNormal, &kUniform, &kTwoPoint}) {
        for (const double s : {0.5, 1.0, 2.0}) {
            const TiltedALaw tilted = tilt_a(*law, s);
            const double lam = std::exp(tilted.log_normalizer());
            for (const double q : {0.5, 1.0, 1.3}) {
                RandomStream r1(31), r2(32);
                MeanAccumulator base, rew;
                for (int i = 0; i < 200'000; ++i) {
                    base.add(sample_a(*law, r1) <= q ? 1.0 : 0.0);
                    const double a = tilted.sample(r2);
                    rew.add((a <= q ? 1.0 : 0.0) * lam / std::pow(a, s));
                }
                const double se = std::hypot(base.stderr_mean(), rew.stderr_mean());
                CHECK(std::abs(base.mean() - rew.mean()) <= 5.0 * std::max(se, 1e-15));
            }
        }
    }
}

TEST_CASE("support_extremes examples") {
    const InnovationLaw u{UniformA{0.2, 1.4}, ConstB{1.0}};
    SupportExtremes e = support_extremes(u);
    CHECK(e.a_lo == 0.2);
    CHECK(e.a_hi == 1.4);
    CHECK(e.has_a_below_1);
    CHECK(e.has_a_above_1);

    const InnovationLaw tp{TwoPointA{0.5, 0.75, 2.0}, ConstB{1.0}};
    e = support_extremes(tp);
    CHECK(e.a_lo == 0.5);
    CHECK(e.a_hi == 2.0);
    CHECK(e.has_a_below_1);
    CHECK(e.has_a_above_1);

    const InnovationLaw ln{LogNormalA{-1.0, std::sqrt(2.0)}, ConstB{1.0}};
    e = support_extremes(ln);
    CHECK(e.a_lo == 0.0);
    CHECK(std::isinf(e.a_hi));
    CHECK(e.has_a_below_1);
    CHECK(e.has_a_above_1);
}

TEST_CASE("structural flags") {
    CHECK(a_has_density(kLogNormal));
    CHECK(a_has_density(kUniform));
    CHECK_FALSE(a_has_density(kTwoPoint));
    CHECK(a_is_lattice(kTwoPoint));
    CHECK(b_strictly_positive(ConstB{1.0}));
    CHECK_FALSE(b_strictly_positive(ConstB{0.0}));
    CHECK(b_strictly_positive(UniformB{1.0, 2.0}));
    CHECK_FALSE(b_strictly_positive(UniformB{-1.0, 1.0}));
    CHECK(b_strictly_positive(ExponentialB{2.0}));
}

TEST_CASE("cdf_a is a right-continuous CDF") {
    CHECK(cdf_a(kTwoPoint, 0.4) == 0.0);
    CHECK(cdf_a(kTwoPoint, 0.5) == 0.75);
    CHECK(cdf_a(kTwoPoint, 1.9) == 0.75);
    CHECK(cdf_a(kTwoPoint, 2.0) == 1.0);
    CHECK(cdf_a(kUniform, 0.8) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cdf_a(kLogNormal, std::exp(-1.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cdf_a(kLogNormal, 0.0) == 0.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(ALaw{LogNormalA{0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(validate(ALaw{UniformA{0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(validate(ALaw{UniformA{1.0, 0.5}}), DomainError);
    CHECK_THROWS_AS(validate(ALaw{TwoPointA{2.0, 0.5, 0.5}}), DomainError);
    CHECK_THROWS_AS(validate(ALaw{TwoPointA{0.5, 0.0, 2.0}}), DomainError);
    CHECK_THROWS_AS(validate(BLaw{UniformB{1.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(validate(BLaw{ExponentialB{0.0}}), DomainError);
    CHECK_NOTHROW(validate(ALaw{TwoPointA{0.5, 1.0, 2.0}}));  // degenerate weight allowed
    CHECK_NOTHROW(validate(BLaw{UniformB{-1.0, 1.0}}));       // B may straddle 0
}
