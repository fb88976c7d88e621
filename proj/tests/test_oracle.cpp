#include <doctest.h>

#include <cmath>

#include "perp/errors.hpp"
#include "perp/oracle.hpp"

using namespace perp;

namespace {

DiscreteInstance standard_instance(double u, std::int64_t n_max = 12) {
    DiscreteInstance inst;
    inst.a_atoms = {{0.5, 0.75}, {2.0, 0.25}};
    inst.b_atoms = {{1.0, 1.0}};
    inst.n_max = n_max;
    inst.u = u;
    return inst;
}

}  // namespace

TEST_CASE("exact_tau_pmf: hand enumerations") {
    // Y_1 = 1 > 0.5 always.
    const TauPmf low = exact_tau_pmf(standard_instance(0.5));
    CHECK(low.pmf.at(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(low.censored_mass == 0.0);

    // Y_2 = 1 + A_1 > 2 iff A_1 = 2.
    const TauPmf mid = exact_tau_pmf(standard_instance(2.0));
    CHECK(mid.pmf.count(1) == 0);
    CHECK(mid.pmf.at(2) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("exact_tau_pmf: mass conservation") {
    for (const double u : {1.7, 2.9, 4.3, 10.0}) {
        const TauPmf result = exact_tau_pmf(standard_instance(u));
        double total = result.censored_mass;
        for (const auto& [k, p] : result.pmf) total += p;
        CHECK(std::abs(total - 1.0) < 1e-10);
    }
}

TEST_CASE("exact_tau_pmf: stochastic ordering in u") {
    const TauPmf a = exact_tau_pmf(standard_instance(2.3));
    const TauPmf b = exact_tau_pmf(standard_instance(3.7));
    double cum_a = 0.0, cum_b = 0.0;
    for (std::int64_t k = 1; k <= 12; ++k) {
        if (a.pmf.count(k)) cum_a += a.pmf.at(k);
        if (b.pmf.count(k)) cum_b += b.pmf.at(k);
        CHECK(cum_b <= cum_a + 1e-12);
    }
}

TEST_CASE("exact_walk_tail: examples") {
    const Atoms atoms{{0.5, 0.75}, {2.0, 0.25}};
    CHECK(exact_walk_tail(atoms, 1, 0.4) == doctest::Approx(1.0).epsilon(1e-12));
    // n = 2, t = 1: only (2,2) exceeds.
    CHECK(exact_walk_tail(atoms, 2, 1.0) == doctest::Approx(0.0625).epsilon(1e-12));
    // monotone in t
    CHECK(exact_walk_tail(atoms, 6, 0.3) >= exact_walk_tail(atoms, 6, 0.9));
}

TEST_CASE("exact_event_prob equals the pmf on tie-free instances") {
    for (const double u : {1.7, 2.9, 4.3}) {
        const DiscreteInstance inst = standard_instance(u);
        const TauPmf pmf = exact_tau_pmf(inst);
        for (std::int64_t k = 1; k <= inst.n_max; ++k) {
            const double expected = pmf.pmf.count(k) ? pmf.pmf.at(k) : 0.0;
            CHECK(exact_event_prob(inst, k) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
    // u above anything attainable in two steps
    CHECK(exact_event_prob(standard_instance(100.0), 2) == 0.0);
}

TEST_CASE("guards") {
    DiscreteInstance inst = standard_instance(2.0);
    inst.n_max = 30;
    CHECK_THROWS_AS(inst.validate(), DomainError);
    inst.n_max = 22;
    inst.a_atoms = {{0.5, 0.5}, {1.0, 0.25}, {2.0, 0.25}};
    inst.b_atoms = {{1.0, 0.5}, {2.0, 0.5}};  // (3*2)^22 > 1e8
    CHECK_THROWS_AS(inst.validate(), GuardError);

    DiscreteInstance bad = standard_instance(2.0);
    bad.a_atoms = {{0.5, 0.8}, {2.0, 0.1}};  // probabilities do not sum to 1
    CHECK_THROWS_AS(bad.validate(), DomainError);

    CHECK_THROWS_AS(exact_walk_tail(Atoms{{0.5, 0.5}, {2.0, 0.5}}, 40, 1.0), GuardError);
}
