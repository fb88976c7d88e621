#include "perp/oracle.hpp"

#include <cmath>
#include <functional>

#include "perp/errors.hpp"

namespace perp {

namespace {

void check_atoms(const Atoms& atoms, bool positive, const char* what) {
    if (atoms.empty()) throw DomainError(std::string(what) + ": no atoms");
    double total = 0.0;
    for (const auto& [value, prob] : atoms) {
        if (positive && !(value > 0.0)) throw DomainError(std::string(what) + ": values must be > 0");
        if (!(prob >= 0.0)) throw DomainError(std::string(what) + ": negative probability");
        total += prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw DomainError(std::string(what) + ": probabilities must sum to 1");
}

}  // namespace

void DiscreteInstance::validate() const {
    check_atoms(a_atoms, true, "a_atoms");
    check_atoms(b_atoms, false, "b_atoms");
    if (n_max < 1 || n_max > 22) throw DomainError("n_max must be in [1, 22]");
    if (!(u > 0.0)) throw DomainError("u must be > 0");
    const double paths =
        std::pow(static_cast<double>(a_atoms.size() * b_atoms.size()), static_cast<double>(n_max));
    if (paths > 1e8) throw GuardError("instance would enumerate more than 1e8 paths");
}

TauPmf exact_tau_pmf(const DiscreteInstance& inst) {
    inst.validate();
    TauPmf out;
    out.censored_mass = 0.0;
    // State entering depth: (log Pi_{d-1}, Y_{d-1}, path probability).
    std::function<void(std::int64_t, double, double, double)> rec =
        [&](std::int64_t depth, double log_pi, double y, double prob) {
            const double pi = std::exp(log_pi);
            for (const auto& [b, pb] : inst.b_atoms) {
                const double y_next = y + pi * b;
                const double p_step = prob * pb;
                if (y_next > inst.u) {
                    out.pmf[depth] += p_step;  // first exceedance, prune deeper
                    continue;
                }
                if (depth == inst.n_max) {
                    out.censored_mass += p_step;
                    continue;
                }
                for (const auto& [a, pa] : inst.a_atoms)
                    rec(depth + 1, log_pi + std::log(a), y_next, p_step * pa);
            }
        };
    rec(1, 0.0, 0.0, 1.0);
    return out;
}

double exact_walk_tail(const Atoms& a_atoms, std::int64_t n, double t) {
    check_atoms(a_atoms, true, "a_atoms");
    if (n < 1) throw DomainError("n must be >= 1");
    if (std::pow(static_cast<double>(a_atoms.size()), static_cast<double>(n)) > 1e8)
        throw GuardError("walk enumeration exceeds 1e8 paths");
    const std::size_t m = a_atoms.size();
    const double log_t = std::log(t);
    double total = 0.0;
    // Enumerate type classes: counts (k_1, ..., k_m) summing to n.
    std::vector<std::int64_t> counts(m, 0);
    std::function<void(std::size_t, std::int64_t)> rec = [&](std::size_t i, std::int64_t left) {
        if (i + 1 == m) {
            counts[i] = left;
            double log_pi = 0.0, log_prob = std::lgamma(static_cast<double>(n) + 1.0);
            for (std::size_t j = 0; j < m; ++j) {
                log_pi += static_cast<double>(counts[j]) * std::log(a_atoms[j].first);
                log_prob += static_cast<double>(counts[j]) * std::log(a_atoms[j].second) -
                            std::lgamma(static_cast<double>(counts[j]) + 1.0);
            }
            if (log_pi > log_t) total += std::exp(log_prob);
            return;
        }
        for (std::int64_t k = 0; k <= left; ++k) {
            counts[i] = k;
            rec(i + 1, left - k);
        }
    };
    rec(0, n);
    return total;
}

double exact_event_prob(const DiscreteInstance& inst, std::int64_t k) {
    inst.validate();
    if (k < 1 || k > inst.n_max) throw DomainError("k must be in [1, n_max]");
    double total = 0.0;
    // P[Y_j <= u for j < k, Y_k > u]; full recursion, no pmf bookkeeping.
    std::function<void(std::int64_t, double, double, double)> rec =
        [&](std::int64_t depth, double log_pi, double y, double prob) {
            const double pi = std::exp(log_pi);
            for (const auto& [b, pb] : inst.b_atoms) {
                const double y_next = y + pi * b;
                const double p_step = prob * pb;
                if (depth == k) {
                    if (y_next > inst.u) total += p_step;
                    continue;
                }
                if (y_next > inst.u) continue;  // violates M_{k-1} <= u
                for (const auto& [a, pa] : inst.a_atoms)
                    rec(depth + 1, log_pi + std::log(a), y_next, p_step * pa);
            }
        };
    rec(1, 0.0, 0.0, 1.0);
    return total;
}

}  // namespace perp
