#include "perp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "batched_driver.hpp"
#include "perp/errors.hpp"
#include "perp/parallel.hpp"

namespace perp {

using detail::BatchStat;
using detail::run_estimator;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string law_tag(const InnovationLaw& law) {
    char buf[160];
    std::string out;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>)
                std::snprintf(buf, sizeof buf, "LN(%.17g,%.17g)", v.mu, v.sigma);
            else if constexpr (std::is_same_v<T, UniformA>)
                std::snprintf(buf, sizeof buf, "UA(%.17g,%.17g)", v.lo, v.hi);
            else
                std::snprintf(buf, sizeof buf, "TA(%.17g,%.17g,%.17g)", v.a1, v.p1, v.a2);
            out += buf;
        },
        law.a);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstB>)
                std::snprintf(buf, sizeof buf, "|CB(%.17g)", v.value);
            else if constexpr (std::is_same_v<T, UniformB>)
                std::snprintf(buf, sizeof buf, "|UB(%.17g,%.17g)", v.lo, v.hi);
            else if constexpr (std::is_same_v<T, ExponentialB>)
                std::snprintf(buf, sizeof buf, "|EB(%.17g)", v.rate);
            else
                std::snprintf(buf, sizeof buf, "|TB(%.17g,%.17g,%.17g)", v.b1, v.p1, v.b2);
            out += buf;
        },
        law.b);
    return out;
}

std::string format_target(const InnovationLaw& law, const char* fmt, double x1, double x2,
                          double x3 = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, fmt, x1, x2, x3);
    return law_tag(law) + buf;
}

}  // namespace

TiltSchedule TiltSchedule::constant(double s, std::int64_t horizon) {
    if (horizon < 0) throw DomainError("schedule horizon must be >= 0");
    TiltSchedule sched;
    if (horizon > 0) sched.phases_.push_back({s, horizon});
    return sched;
}

TiltSchedule TiltSchedule::two_phase(double s1, std::int64_t n1, double s2, std::int64_t n2) {
    if (n1 < 0 || n2 < 0) throw DomainError("schedule phase lengths must be >= 0");
    TiltSchedule sched;
    if (n1 > 0) sched.phases_.push_back({s1, n1});
    if (n2 > 0) sched.phases_.push_back({s2, n2});
    return sched;
}

double TiltSchedule::tilt_at(std::int64_t step) const {
    std::int64_t upto = 0;
    for (const TiltPhase& phase : phases_) {
        upto += phase.steps;
        if (step <= upto) return phase.s;
    }
    return 0.0;
}

PathRecord run_path(const InnovationLaw& law, const TiltSchedule& schedule, double u,
                    std::int64_t n_max, RandomStream& rng) {
    if (!(u > 0.0)) throw DomainError("run_path: u must be > 0");
    if (n_max < 1) throw DomainError("run_path: n_max must be >= 1");
    // Per-phase samplers prepared once; s = 0 contributes exactly zero weight.
    struct Prepared {
        TiltedALaw sampler;
        double s;
        std::int64_t upto;
    };
    std::vector<Prepared> phases;
    std::int64_t upto = 0;
    for (const TiltPhase& phase : schedule.phases()) {
        upto += phase.steps;
        phases.push_back({tilt_a(law.a, phase.s), phase.s, upto});
    }

    PathRecord rec;
    double log_pi = 0.0, y = 0.0, m = 0.0, log_weight = 0.0;
    std::size_t phase_idx = 0;
    for (std::int64_t step = 1; step <= n_max; ++step) {
        while (phase_idx < phases.size() && step > phases[phase_idx].upto) ++phase_idx;
        double a;
        if (phase_idx < phases.size()) {
            const Prepared& ph = phases[phase_idx];
            a = ph.sampler.sample(rng);
            if (ph.s != 0.0) log_weight += ph.sampler.log_normalizer() - ph.s * std::log(a);
        } else {
            a = sample_a(law.a, rng);
        }
        const double b = sample_b(law.b, rng);
        y += std::exp(log_pi) * b;
        log_pi += std::log(a);
        if (std::isnan(y)) {  // inf - inf; abandon the path as censored
            rec.overflowed = true;
            break;
        }
        if (y > u) {
            rec.tau = step;
            rec.y_at_stop = y;
            rec.m_prev = m;
            rec.log_pi_at_stop = log_pi;
            rec.log_weight = log_weight;
            rec.overflowed = rec.overflowed || !std::isfinite(y);
            return rec;
        }
        if (y > m) m = y;
    }
    rec.censored = true;
    rec.tau = 0;
    rec.y_at_stop = y;
    rec.m_prev = m;
    rec.log_pi_at_stop = log_pi;
    rec.log_weight = log_weight;
    return rec;
}

EstimateRecord merge(const std::vector<EstimateRecord>& records) {
    if (records.empty()) throw MixedTargetError("merge: no records");
    EstimateRecord out;
    out.target = records.front().target;
    for (const EstimateRecord& rec : records) {
        if (rec.target != out.target)
            throw MixedTargetError("merge: records were produced for different targets");
        out.n_samples += rec.n_samples;
        out.sum_w += rec.sum_w;
        out.sum_w2 += rec.sum_w2;
        out.censored_sum += rec.censored_sum;
        out.overflow_paths += rec.overflow_paths;
    }
    const double n = static_cast<double>(out.n_samples);
    out.value = out.sum_w / n;
    out.censored_weight = out.censored_sum / n;
    if (out.n_samples > 1) {
        const double var_num = std::max(0.0, out.sum_w2 - out.sum_w * out.sum_w / n);
        out.std_error = std::sqrt(var_num / (n * (n - 1.0)));
    }
    out.ess = out.sum_w2 > 0.0 ? out.sum_w * out.sum_w / out.sum_w2 : 0.0;
    return out;
}

std::int64_t pointwise_target_step(double u, double rho) {
    if (!(u > 0.0)) throw DomainError("u must be > 0");
    if (!(rho > 0.0)) throw DomainError("rho must be > 0");
    return static_cast<std::int64_t>(std::floor(std::log(u) / rho)) + 1;
}

EstimateRecord estimate_pointwise(const InnovationLaw& law, double rho, double u,
                                  std::int64_t samples, std::uint64_t seed,
                                  PointwiseMethod method, const EngineOptions& opts) {
    validate(law);
    const std::int64_t k = pointwise_target_step(u, rho) - 1;  // tilt horizon
    const bool tilted = method == PointwiseMethod::tilted;
    double alpha = 0.0, lam_alpha = 0.0;
    TiltedALaw sampler = tilt_a(law.a, 0.0);
    if (tilted) {
        alpha = solve_alpha(law.a, rho);
        lam_alpha = log_mgf_derivs(law.a, alpha).value;
        sampler = tilt_a(law.a, alpha);
    }
    const std::string target =
        format_target(law, tilted ? "|pointwise(u=%.17g,rho=%.17g,tilted)"
                                  : "|pointwise(u=%.17g,rho=%.17g,naive)",
                      u, rho);
    return run_estimator(
        samples, seed, opts, target, [&, k, u, alpha, lam_alpha](RandomStream& rng, BatchStat& st) {
            double log_pi = 0.0, y = 0.0;
            for (std::int64_t step = 1; step <= k + 1; ++step) {
                double log_a = 0.0;
                if (step <= k)
                    log_a = std::log(tilted ? sampler.sample(rng) : sample_a(law.a, rng));
                const double b = sample_b(law.b, rng);
                y += std::exp(log_pi) * b;
                if (std::isnan(y)) {
                    ++st.overflow;
                    return;
                }
                if (y > u) {
                    if (step == k + 1) {
                        // log_pi here is log Pi_k: step k+1's A is never drawn.
                        const double w =
                            tilted ? std::exp(static_cast<double>(k) * lam_alpha - alpha * log_pi)
                                   : 1.0;
                        st.sum_w += w;
                        st.sum_w2 += w * w;
                        if (!std::isfinite(y)) ++st.overflow;
                    }
                    return;
                }
                if (step <= k) log_pi += log_a;
            }
        });
}

EstimateRecord estimate_pointwise_twophase(const InnovationLaw& law, double rho, double beta,
                                           double u, std::int64_t samples, std::uint64_t seed,
                                           const EngineOptions& opts) {
    validate(law);
    const std::int64_t k = pointwise_target_step(u, rho) - 1;
    if (k < 1)
        return estimate_pointwise(law, rho, u, samples, seed, PointwiseMethod::naive, opts);
    const double alpha = solve_alpha(law.a, rho);
    const CumulantTriple at_beta = log_mgf_derivs(law.a, beta);
    if (at_beta.d1 < rho)
        throw DomainError("twophase: Lambda'(beta) must be >= rho (beta >= alpha)");
    const std::int64_t n1 =
        std::min(k, static_cast<std::int64_t>(std::floor(std::log(u) / at_beta.d1)));
    if (n1 < 1) throw DomainError("twophase: empty first phase (Lambda'(beta) > log u)");
    const std::int64_t n2 = k - n1;
    (void)alpha;

    const TiltedALaw phase1 = tilt_a(law.a, beta);
    const TiltedALaw phase2 = tilt_a(law.a, 1.0);
    const double lam_beta = at_beta.value;
    const double lam_one = log_mgf_derivs(law.a, 1.0).value;
    const std::string target =
        format_target(law, "|twophase(u=%.17g,rho=%.17g,beta=%.17g)", u, rho, beta);

    return run_estimator(samples, seed, opts, target, [&, k, n1, n2, u](RandomStream& rng,
                                                                        BatchStat& st) {
        // Steps 1..n1-1 at tilt beta; the pivot step n1 has its A integrated
        // analytically over the crossing interval; steps n1+1..k at tilt 1;
        // B_{k+1} closes the window. All B draws are from the base law.
        double log_pi = 0.0, y = 0.0, log_weight = 0.0;
        for (std::int64_t step = 1; step < n1; ++step) {
            const double a = phase1.sample(rng);
            const double b = sample_b(law.b, rng);
            y += std::exp(log_pi) * b;
            log_weight += lam_beta - beta * std::log(a);
            log_pi += std::log(a);
            if (std::isnan(y)) {
                ++st.overflow;
                return;
            }
            if (y > u) return;  // passage before the pivot: tau <= k
        }
        const double b_pivot = sample_b(law.b, rng);
        const double head = y + std::exp(log_pi) * b_pivot;  // Y_{n1} for any pivot A
        if (std::isnan(head)) {
            ++st.overflow;
            return;
        }
        if (head > u) return;
        const double gap = u - head;

        // Relative phase-2 walk: Y'_j = sum_{i<=j} Pi'_{i-1} B_{n1+i}.
        double rel_log_pi = 0.0, y_prime = 0.0, m_prime = 0.0;
        for (std::int64_t j = 1; j <= n2; ++j) {
            const double a = phase2.sample(rng);
            const double b = sample_b(law.b, rng);
            y_prime += std::exp(rel_log_pi) * b;
            log_weight += lam_one - std::log(a);
            rel_log_pi += std::log(a);
            if (y_prime > m_prime) m_prime = y_prime;
        }
        const double b_last = sample_b(law.b, rng);
        const double y_prime_end = y_prime + std::exp(rel_log_pi) * b_last;  // Y'_{n2+1}
        if (std::isnan(y_prime_end) || !(y_prime_end > 0.0)) return;

        const double pi_head = std::exp(log_pi);  // Pi_{n1-1}
        // tau = k+1 iff A_{n1} in (lower, upper]: the crossing interval.
        const double lower = gap / (pi_head * y_prime_end);
        const double upper = m_prime > 0.0 ? gap / (pi_head * m_prime) : kInf;
        const double mass = cdf_a(law.a, upper) - cdf_a(law.a, lower);
        if (mass <= 0.0) return;
        const double w = mass * std::exp(log_weight);
        st.sum_w += w;
        st.sum_w2 += w * w;
    });
}

EstimateRecord estimate_ruin(const InnovationLaw& law, double u, std::int64_t samples,
                             double horizon_factor, std::uint64_t seed,
                             const EngineOptions& opts) {
    validate(law);
    if (!(u > 0.0)) throw DomainError("u must be > 0");
    if (!(horizon_factor >= 2.0)) throw DomainError("horizon_factor must be >= 2");
    const CumulantProfile profile = cramer_root(law.a);
    if (!profile.alpha0) throw NoRootError("estimate_ruin: no Cramer root alpha0");
    const double alpha0 = *profile.alpha0;
    const std::int64_t n_max = static_cast<std::int64_t>(
        std::max(1.0, horizon_factor * std::ceil(std::log(u) / profile.rho0)));
    const TiltedALaw sampler = tilt_a(law.a, alpha0);
    const std::string target =
        format_target(law, "|ruin(u=%.17g,alpha0=%.17g,hf=%.17g)", u, alpha0, horizon_factor);
    return run_estimator(
        samples, seed, opts, target, [&, u, alpha0, n_max](RandomStream& rng, BatchStat& st) {
            double log_pi = 0.0, y = 0.0;
            for (std::int64_t step = 1; step <= n_max; ++step) {
                const double a = sampler.sample(rng);
                const double b = sample_b(law.b, rng);
                y += std::exp(log_pi) * b;
                log_pi += std::log(a);  // lambda(alpha0) = 1: weight is exp(-alpha0 log Pi)
                if (std::isnan(y)) {
                    ++st.overflow;
                    return;
                }
                if (y > u) {
                    const double w = std::exp(-alpha0 * log_pi);
                    st.sum_w += w;
                    st.sum_w2 += w * w;
                    if (!std::isfinite(y)) ++st.overflow;
                    return;
                }
            }
            st.censored_sum += std::exp(-alpha0 * log_pi);
        });
}

CltDiagnostics clt_diagnostics(const InnovationLaw& law, double u, std::int64_t hits,
                               std::uint64_t seed, const EngineOptions& opts) {
    validate(law);
    if (!(u > 1.0)) throw DomainError("clt_diagnostics: u must exceed 1");
    if (hits < 10) throw DomainError("clt_diagnostics: need at least 10 hits");
    const CumulantProfile profile = cramer_root(law.a);
    if (!profile.alpha0) throw NoRootError("clt_diagnostics: no Cramer root alpha0");
    const double alpha0 = *profile.alpha0;
    const double rho0 = profile.rho0;
    const double sigma0 = profile.sigma0;
    const double log_u = std::log(u);
    const std::int64_t n_max =
        static_cast<std::int64_t>(std::max(1.0, 4.0 * std::ceil(log_u / rho0)));
    const TiltedALaw sampler = tilt_a(law.a, alpha0);
    const int threads = opts.threads > 0 ? opts.threads : hardware_threads();

    // Waves of a fixed batch count keep the stopping rule independent of
    // thread scheduling; tau is integer valued, so weights aggregate per tau.
    constexpr std::int64_t kPathsPerBatch = 2048;
    constexpr std::int64_t kWaveBatches = 64;
    struct HitCount {
        double weight = 0.0;
        std::int64_t paths = 0;
    };
    std::map<std::int64_t, HitCount> by_tau;
    std::int64_t total_hits = 0;
    std::int64_t wave_start = 0;
    while (total_hits < hits) {
        std::vector<std::map<std::int64_t, HitCount>> slots(kWaveBatches);
        parallel_for_batches(kWaveBatches, threads, [&](std::int64_t slot) {
            RandomStream rng =
                RandomStream::substream(seed, static_cast<std::uint64_t>(wave_start + slot));
            auto& local = slots[static_cast<std::size_t>(slot)];
            for (std::int64_t i = 0; i < kPathsPerBatch; ++i) {
                double log_pi = 0.0, y = 0.0;
                for (std::int64_t step = 1; step <= n_max; ++step) {
                    const double a = sampler.sample(rng);
                    const double b = sample_b(law.b, rng);
                    y += std::exp(log_pi) * b;
                    log_pi += std::log(a);
                    if (std::isnan(y)) break;
                    if (y > u) {
                        HitCount& hc = local[step];
                        hc.weight += std::exp(-alpha0 * log_pi);
                        hc.paths += 1;
                        break;
                    }
                }
            }
        });
        for (const auto& local : slots)
            for (const auto& [tau, hc] : local) {
                by_tau[tau].weight += hc.weight;
                by_tau[tau].paths += hc.paths;
                total_hits += hc.paths;
            }
        wave_start += kWaveBatches;
    }

    double sum_w = 0.0, sum_wt = 0.0;
    for (const auto& [tau, hc] : by_tau) {
        sum_w += hc.weight;
        sum_wt += hc.weight * static_cast<double>(tau);
    }
    CltDiagnostics diag{};
    diag.hits = total_hits;
    diag.mean_ratio = (sum_wt / sum_w) * rho0 / log_u;

    const double scale_sigma0 = sigma0 * std::pow(rho0, -1.5);
    const double scale_var0 = std::sqrt(sigma0 - rho0 * rho0) * std::pow(rho0, -1.5);
    const auto ks_against_normal = [&](double scale) {
        double cdf = 0.0, dist = 0.0;
        for (const auto& [tau, hc] : by_tau) {
            const double x =
                (static_cast<double>(tau) - log_u / rho0) / (scale * std::sqrt(log_u));
            const double gaussian = 0.5 * std::erfc(-x / M_SQRT2);
            dist = std::max(dist, std::abs(cdf - gaussian));  // left limit
            cdf += hc.weight / sum_w;
            dist = std::max(dist, std::abs(cdf - gaussian));
        }
        return dist;
    };
    diag.ks_sigma0 = ks_against_normal(scale_sigma0);
    diag.ks_var0 = ks_against_normal(scale_var0);
    return diag;
}

EstimateRecord estimate_constant_series(const InnovationLaw& law, double alpha, std::int64_t L,
                                        std::int64_t samples, std::uint64_t seed,
                                        const EngineOptions& opts) {
    validate(law);
    if (L < 0) throw DomainError("L must be >= 0");
    const CumulantTriple at_alpha = log_mgf_derivs(law.a, alpha);
    if (!(at_alpha.d1 > 0.0))
        throw DomainError("constant series: Lambda'(alpha) must be positive");
    const double sigma = std::sqrt(at_alpha.d2);
    const double pref = std::sqrt(at_alpha.d1) / (alpha * sigma * std::sqrt(2.0 * M_PI));
    const TiltedALaw sampler = tilt_a(law.a, alpha);
    const std::string target =
        format_target(law, "|cseries(alpha=%.17g,L=%.17g)", alpha, static_cast<double>(L));
    return run_estimator(
        samples, seed, opts, target, [&, L, alpha, pref](RandomStream& rng, BatchStat& st) {
            // Scaled recursion under the alpha-tilt: Z_j = Y_j / Pi_j and
            // W_j = M_j / Pi_j, so the weighted functional is
            // ((Z_L + B_{L+1})_+^alpha - W_L^alpha)_+ without overflow.
            double z = 0.0, w_scaled = 0.0;
            for (std::int64_t j = 0; j < L; ++j) {
                const double a = sampler.sample(rng);
                const double b = sample_b(law.b, rng);
                z = (z + b) / a;
                w_scaled = std::max(w_scaled / a, z);
            }
            const double b_last = sample_b(law.b, rng);
            const double tip = std::max(z + b_last, 0.0);
            const double f =
                std::max(std::pow(tip, alpha) - std::pow(w_scaled, alpha), 0.0);
            const double w = pref * f;
            st.sum_w += w;
            st.sum_w2 += w * w;
        });
}

}  // namespace perp
