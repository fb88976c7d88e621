#include "perp/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "perp/errors.hpp"

namespace perp {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Two-sided 97.5% Student-t quantiles for df = 1..30; 1.96 beyond.
double t_quantile_975(int df) {
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                       2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                       2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                       2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (df < 1) return kNan;
    if (df <= 30) return table[df - 1];
    return 1.96;
}

std::uint64_t point_seed(std::uint64_t seed, int index) {
    return mix64(seed ^ mix64(0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(index + 1)));
}

}  // namespace

std::vector<double> geometric_grid(const GridSpec& grid) {
    if (!(grid.u_lo > 0.0) || !(grid.u_hi > grid.u_lo) || grid.points < 2)
        throw DomainError("grid: need 0 < u_lo < u_hi and points >= 2");
    std::vector<double> us(static_cast<std::size_t>(grid.points));
    const double llo = std::log(grid.u_lo), lhi = std::log(grid.u_hi);
    for (int i = 0; i < grid.points; ++i)
        us[static_cast<std::size_t>(i)] =
            std::exp(llo + (lhi - llo) * static_cast<double>(i) / (grid.points - 1));
    return us;
}

double normalize_pointwise(double p_hat, double u, const InnovationLaw& law, double alpha,
                           double rho) {
    if (!(p_hat > 0.0)) return 0.0;
    const double log_u = std::log(u);
    const double ratio = log_u / rho;
    const double theta = ratio - std::floor(ratio);
    const double abar = alpha_bar(law.a, alpha);
    const double lam = log_mgf_derivs(law.a, alpha).value;
    const double log_c = std::log(p_hat) + 0.5 * std::log(log_u) + abar * log_u + theta * lam;
    return std::exp(log_c);
}

FitSummary fit_loglog(const std::vector<GridRow>& rows) {
    FitSummary fit;
    fit.slope = fit.slope_ci_lo = fit.slope_ci_hi = kNan;
    fit.c_mean = fit.c_rel_spread = kNan;
    double sw = 0.0, swx = 0.0, swy = 0.0;
    double c_min = kNan, c_max = kNan, c_sum = 0.0;
    int m = 0;
    for (const GridRow& row : rows) {
        if (!row.included) continue;
        ++m;
        const double se_log = row.std_error / row.p_hat;
        const double w = 1.0 / (se_log * se_log);
        sw += w;
        swx += w * std::log(row.u);
        swy += w * std::log(row.c_hat);
        c_sum += row.c_hat;
        c_min = m == 1 ? row.c_hat : std::min(c_min, row.c_hat);
        c_max = m == 1 ? row.c_hat : std::max(c_max, row.c_hat);
    }
    fit.rows_used = m;
    if (m == 0) return fit;
    fit.c_mean = c_sum / m;
    fit.c_rel_spread = (c_max - c_min) / fit.c_mean;
    if (m < 3) return fit;

    const double xb = swx / sw, yb = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (const GridRow& row : rows) {
        if (!row.included) continue;
        const double se_log = row.std_error / row.p_hat;
        const double w = 1.0 / (se_log * se_log);
        const double dx = std::log(row.u) - xb;
        sxx += w * dx * dx;
        sxy += w * dx * (std::log(row.c_hat) - yb);
    }
    fit.slope = sxy / sxx;
    double wrss = 0.0;
    for (const GridRow& row : rows) {
        if (!row.included) continue;
        const double se_log = row.std_error / row.p_hat;
        const double w = 1.0 / (se_log * se_log);
        const double r =
            std::log(row.c_hat) - yb - fit.slope * (std::log(row.u) - xb);
        wrss += w * r * r;
    }
    const double se_slope = std::sqrt(wrss / (m - 2) / sxx);
    const double t = t_quantile_975(m - 2);
    fit.slope_ci_lo = fit.slope - t * se_slope;
    fit.slope_ci_hi = fit.slope + t * se_slope;
    return fit;
}

GridReport run_grid(const InnovationLaw& law, double rho, const GridSpec& grid,
                    std::int64_t samples_per_point, GridMethod method, std::uint64_t seed,
                    std::optional<double> beta, const EngineOptions& opts) {
    if (method == GridMethod::twophase && !beta)
        throw DomainError("run_grid: twophase method requires beta");
    const double alpha =
        method == GridMethod::naive ? kNan : solve_alpha(law.a, rho);
    GridReport report;
    report.regime_tag = "thm1";
    const std::vector<double> us = geometric_grid(grid);
    for (int i = 0; i < static_cast<int>(us.size()); ++i) {
        const double u = us[static_cast<std::size_t>(i)];
        EstimateRecord rec;
        switch (method) {
            case GridMethod::naive:
                rec = estimate_pointwise(law, rho, u, samples_per_point, point_seed(seed, i),
                                         PointwiseMethod::naive, opts);
                break;
            case GridMethod::tilted:
                rec = estimate_pointwise(law, rho, u, samples_per_point, point_seed(seed, i),
                                         PointwiseMethod::tilted, opts);
                break;
            case GridMethod::twophase:
                rec = estimate_pointwise_twophase(law, rho, *beta, u, samples_per_point,
                                                  point_seed(seed, i), opts);
                break;
        }
        GridRow row{};
        row.u = u;
        const double ratio = std::log(u) / rho;
        row.k_u = static_cast<std::int64_t>(std::floor(ratio));
        row.theta = ratio - std::floor(ratio);
        row.p_hat = rec.value;
        row.std_error = rec.std_error;
        row.ess = rec.ess;
        const double alpha_for_norm =
            method == GridMethod::naive ? solve_alpha(law.a, rho) : alpha;
        row.c_hat = normalize_pointwise(rec.value, u, law, alpha_for_norm, rho);
        row.included = row.ess >= 100.0 && row.p_hat > 0.0;
        report.rows.push_back(row);
    }
    report.fit = fit_loglog(report.rows);
    return report;
}

GridReport kesten_goldie_grid(const InnovationLaw& law, const GridSpec& grid,
                              std::int64_t samples_per_point, std::uint64_t seed,
                              double horizon_factor, const EngineOptions& opts) {
    const CumulantProfile profile = cramer_root(law.a);
    if (!profile.alpha0) throw NoRootError("kesten_goldie_grid: no Cramer root");
    const double alpha0 = *profile.alpha0;
    GridReport report;
    report.regime_tag = "kg";
    const std::vector<double> us = geometric_grid(grid);
    for (int i = 0; i < static_cast<int>(us.size()); ++i) {
        const double u = us[static_cast<std::size_t>(i)];
        const EstimateRecord rec =
            estimate_ruin(law, u, samples_per_point, horizon_factor, point_seed(seed, i), opts);
        GridRow row{};
        row.u = u;
        const double ratio = std::log(u) / profile.rho0;
        row.k_u = static_cast<std::int64_t>(std::floor(ratio));
        row.theta = ratio - std::floor(ratio);
        row.p_hat = rec.value;
        row.std_error = rec.std_error;
        row.ess = rec.ess;
        row.c_hat = rec.value > 0.0
                        ? std::exp(std::log(rec.value) + alpha0 * std::log(u))
                        : 0.0;
        row.included = row.ess >= 100.0 && row.p_hat > 0.0;
        report.rows.push_back(row);
    }
    report.fit = fit_loglog(report.rows);
    return report;
}

void write_grid_csv(const GridReport& report, std::ostream& os) {
    os << "u,k_u,theta,p_hat,stderr,ess,c_hat\n";
    char buf[320];
    for (const GridRow& row : report.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.u,
                      static_cast<long long>(row.k_u), row.theta, row.p_hat, row.std_error,
                      row.ess, row.c_hat);
        os << buf;
    }
}

}  // namespace perp
