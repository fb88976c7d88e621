#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "perp/engine.hpp"

namespace perp {

// ---------------------------------------------------------------------------
// Experiment harness: turns pointwise/ruin estimates over geometric u-grids
// into verdicts on the first-passage asymptotics. The normalized constant is
//   c_hat = p_hat sqrt(log u) u^{alpha_bar} lambda(alpha)^{Theta(u)},
// computed in log space, with Theta(u) = log u / rho - floor(log u / rho).
// Constancy (or growth) is judged by weighted least squares of log c_hat on
// log u, rows weighted by 1/stderr(log c_hat)^2.
// ---------------------------------------------------------------------------

struct GridSpec {
    double u_lo;
    double u_hi;
    int points;  // >= 2; the harness demands >= 6 for fits it reports
};

struct GridRow {
    double u;
    std::int64_t k_u;  // floor(log u / rho); the estimated passage step is k_u + 1
    double theta;      // log u / rho - k_u
    double p_hat;
    double std_error;
    double ess;
    double c_hat;
    bool included;  // ess >= 100 and p_hat > 0; rows failing this are excluded from the fit
};

struct FitSummary {
    double slope = 0.0;
    double slope_ci_lo = 0.0;
    double slope_ci_hi = 0.0;
    double c_mean = 0.0;
    double c_rel_spread = 0.0;  // (max - min) / mean over included rows
    int rows_used = 0;
};

struct GridReport {
    std::vector<GridRow> rows;
    FitSummary fit;
    std::string regime_tag;  // thm1 | thm2 | kg
};

enum class GridMethod { naive, tilted, twophase };

double normalize_pointwise(double p_hat, double u, const InnovationLaw& law, double alpha,
                           double rho);

// Pure function of the rows: weighted least squares on (log u, log c_hat)
// with a t-based confidence interval; bit-reproducible on reruns.
FitSummary fit_loglog(const std::vector<GridRow>& rows);

GridReport run_grid(const InnovationLaw& law, double rho, const GridSpec& grid,
                    std::int64_t samples_per_point, GridMethod method, std::uint64_t seed,
                    std::optional<double> beta = std::nullopt, const EngineOptions& opts = {});

// Kesten-Goldie rows: c0_hat(u) = ruin estimate * u^{alpha0}.
GridReport kesten_goldie_grid(const InnovationLaw& law, const GridSpec& grid,
                              std::int64_t samples_per_point, std::uint64_t seed,
                              double horizon_factor = 3.0, const EngineOptions& opts = {});

// Geometric grid points, log-evenly spaced, endpoints included.
std::vector<double> geometric_grid(const GridSpec& grid);

// CSV with header exactly: u,k_u,theta,p_hat,stderr,ess,c_hat
void write_grid_csv(const GridReport& report, std::ostream& os);

}  // namespace perp
