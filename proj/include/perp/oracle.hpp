#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace perp {

// ---------------------------------------------------------------------------
// Exact brute-force enumeration for small discrete instances. Ground truth
// for the estimator tests: pmf of the first passage time tau_u = inf{n: Y_n > u},
// exact walk tails P[Pi_n > t], and the pointwise first-passage event.
// Pi is carried in log space, Y and the path probability in linear scale.
// ---------------------------------------------------------------------------

using Atoms = std::vector<std::pair<double, double>>;  // (value, probability)

struct DiscreteInstance {
    Atoms a_atoms;  // values > 0
    Atoms b_atoms;
    std::int64_t n_max;  // <= 22
    double u;            // > 0

    // Throws DomainError on bad atoms, GuardError when (|a||b|)^n_max > 1e8.
    void validate() const;
};

struct TauPmf {
    std::map<std::int64_t, double> pmf;  // step -> P[tau_u = step], steps 1..n_max
    double censored_mass;                // P[tau_u > n_max]
};

// Depth-first enumeration with first-exceedance pruning; ties (Y == u) count
// as non-exceedance, matching the strict inequality in tau_u.
TauPmf exact_tau_pmf(const DiscreteInstance& inst);

// Exact P[Pi_n > t] summed over multinomial type classes of the atom counts.
double exact_walk_tail(const Atoms& a_atoms, std::int64_t n, double t);

// Exact P[M_{k-1} <= u < Y_k] with M_n = max{0, Y_1, ..., Y_n}; independent of
// the pruned pmf enumeration.
double exact_event_prob(const DiscreteInstance& inst, std::int64_t k);

}  // namespace perp
