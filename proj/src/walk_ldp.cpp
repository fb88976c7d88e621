#include "perp/walk_ldp.hpp"

#include <cmath>
#include <cstdio>

#include "batched_driver.hpp"
#include "perp/cgf.hpp"
#include "perp/errors.hpp"

namespace perp {

namespace {

// Common Bahadur-Rao core: log of 1/(alpha sigma sqrt(2 pi n)) e^{-n(alpha c - Lambda)}.
// petrov_prob and petrov_shifted both add their extra exponents to this value,
// so the j_n = 0, delta_n = 0 and gamma = 0 cases are the identical expression.
double bahadur_rao_log(const ALaw& law, std::int64_t n, double c, double alpha) {
    if (a_is_lattice(law))
        throw LatticeLawError("petrov: the law of log A must be nonlattice");
    const CumulantTriple t = log_mgf_derivs(law, alpha);
    const double e_log_a = log_mgf_derivs(law, 0.0).d1;
    if (!(c > e_log_a)) throw RangeError("petrov: c must exceed E log A");
    if (std::abs(t.d1 - c) > 1e-6 * std::max(1.0, std::abs(c)))
        throw DomainError("petrov: alpha does not solve Lambda'(alpha) = c");
    if (!(t.d2 > 0.0)) throw DomainError("petrov: sigma^2(alpha) must be positive");
    const double nd = static_cast<double>(n);
    return -std::log(alpha * std::sqrt(t.d2) * std::sqrt(2.0 * M_PI * nd)) -
           nd * (alpha * c - t.value);
}

}  // namespace

double petrov_prob(const ALaw& law, const PetrovQuery& query) {
    if (query.n < 1) throw DomainError("petrov: n must be >= 1");
    const CumulantTriple t = log_mgf_derivs(law, query.alpha);
    const double core = bahadur_rao_log(law, query.n, query.c, query.alpha);
    const double nd = static_cast<double>(query.n);
    const double gamma = query.gamma_n;
    return std::exp(core - nd * query.alpha * gamma - nd * gamma * gamma / (2.0 * t.d2));
}

double petrov_shifted(const ALaw& law, std::int64_t n, std::int64_t j_n, double delta_n,
                      double alpha) {
    if (n < 1 || j_n < 0) throw DomainError("petrov_shifted: need n >= 1 and j_n >= 0");
    const CumulantTriple t = log_mgf_derivs(law, alpha);
    // t^{-alpha_bar} with t = e^{n rho}: exponent -n (alpha rho - Lambda),
    // identical to the Bahadur-Rao core at c = rho.
    const double core = bahadur_rao_log(law, n, t.d1, alpha);
    const double nd = static_cast<double>(n);
    return std::exp(core - alpha * nd * delta_n - static_cast<double>(j_n) * t.value);
}

double exact_gaussian_walk_tail(double mu, double sigma, std::int64_t n, double threshold) {
    if (!(threshold > 0.0)) throw DomainError("threshold must be > 0");
    if (n < 1) throw DomainError("n must be >= 1");
    const double nd = static_cast<double>(n);
    const double z = (std::log(threshold) - nd * mu) / (sigma * std::sqrt(nd));
    return 0.5 * std::erfc(z / M_SQRT2);
}

EstimateRecord mc_walk_tail(const InnovationLaw& law, std::int64_t n, double t,
                            std::int64_t samples, double tilt_alpha, std::uint64_t seed,
                            const EngineOptions& opts) {
    if (n < 1) throw DomainError("mc_walk_tail: n must be >= 1");
    if (!(t > 0.0)) throw DomainError("mc_walk_tail: t must be > 0");
    const double log_t = std::log(t);
    const TiltedALaw sampler = tilt_a(law.a, tilt_alpha);
    const double lam = sampler.log_normalizer();
    const double nd = static_cast<double>(n);
    char buf[160];
    std::snprintf(buf, sizeof buf, "walk_tail(n=%lld,t=%.17g,tilt=%.17g)",
                  static_cast<long long>(n), t, tilt_alpha);
    return detail::run_estimator(
        samples, seed, opts, buf,
        [&, n, log_t, lam, tilt_alpha, nd](RandomStream& rng, detail::BatchStat& st) {
            double log_pi = 0.0;
            for (std::int64_t step = 0; step < n; ++step) log_pi += std::log(sampler.sample(rng));
            if (log_pi > log_t) {
                const double w =
                    tilt_alpha == 0.0 ? 1.0 : std::exp(nd * lam - tilt_alpha * log_pi);
                st.sum_w += w;
                st.sum_w2 += w * w;
            }
        });
}

}  // namespace perp
