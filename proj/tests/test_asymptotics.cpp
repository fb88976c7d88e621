#include <doctest.h>

#include <cmath>
#include <sstream>

#include "perp/asymptotics.hpp"
#include "perp/errors.hpp"

using namespace perp;

namespace {

const InnovationLaw kStd{LogNormalA{-1.0, std::sqrt(2.0)}, ConstB{1.0}};

// Rows manufactured from a known constant c and optional planted exponent.
std::vector<GridRow> synthetic_rows(double c, double delta, double rho, double alpha) {
    const double abar = alpha_bar(kStd.a, alpha);
    const double lam = log_mgf_derivs(kStd.a, alpha).value;
    std::vector<GridRow> rows;
    for (int i = 0; i < 10; ++i) {
        const double log_u = 8.0 + 12.0 * i / 9.0;
        const double u = std::exp(log_u);
        const double ratio = log_u / rho;
        const double theta = ratio - std::floor(ratio);
        GridRow row{};
        row.u = u;
        row.k_u = static_cast<std::int64_t>(std::floor(ratio));
        row.theta = theta;
        row.p_hat = std::exp(std::log(c) - theta * lam - abar * log_u -
                             0.5 * std::log(log_u) + delta * log_u);
        row.std_error = 1e-3 * row.p_hat;
        row.ess = 1e6;
        row.c_hat = normalize_pointwise(row.p_hat, u, kStd, alpha, rho);
        row.included = true;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("normalize_pointwise: inversion round trip") {
    const double c = 0.177;
    for (const GridRow& row : synthetic_rows(c, 0.0, 2.0, 1.5))
        CHECK(row.c_hat == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("normalize_pointwise: theta factor") {
    // Integer k_u: no lambda(alpha) factor at all.
    const double u0 = std::exp(10.0);
    const double base = normalize_pointwise(1.0, u0, kStd, 1.5, 2.0);
    CHECK(base == doctest::Approx(std::sqrt(10.0) * std::exp(1.125 * 10.0)).epsilon(1e-12));

    // u = e^{10.6}, rho = 2: Theta = 0.3, factor lambda(1.5)^{0.3} = e^{0.225}.
    const double u1 = std::exp(10.6);
    const double withTheta = normalize_pointwise(1.0, u1, kStd, 1.5, 2.0);
    const double expected =
        std::sqrt(10.6) * std::exp(1.125 * 10.6) * std::exp(0.3 * 0.75);
    CHECK(withTheta == doctest::Approx(expected).epsilon(1e-10));

    CHECK(normalize_pointwise(0.0, u1, kStd, 1.5, 2.0) == 0.0);
}

TEST_CASE("fit_loglog: synthetic injection recovers a flat constant") {
    const FitSummary fit = fit_loglog(synthetic_rows(0.2, 0.0, 2.0, 1.5));
    CHECK(std::abs(fit.slope) < 1e-12);
    CHECK(fit.c_mean == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(fit.c_rel_spread < 1e-12);
    CHECK(fit.slope_ci_lo < 0.0);
    CHECK(fit.slope_ci_hi > 0.0);
}

TEST_CASE("fit_loglog: planted growth exponent is recovered exactly") {
    const FitSummary fit = fit_loglog(synthetic_rows(0.2, 0.2, 2.0, 1.5));
    CHECK(fit.slope == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("fit_loglog: reruns are bit-identical and exclusions apply") {
    std::vector<GridRow> rows = synthetic_rows(0.2, 0.1, 2.0, 1.5);
    rows[3].ess = 5.0;
    rows[3].included = false;
    const FitSummary a = fit_loglog(rows);
    const FitSummary b = fit_loglog(rows);
    CHECK(a.slope == b.slope);
    CHECK(a.slope_ci_lo == b.slope_ci_lo);
    CHECK(a.c_mean == b.c_mean);
    CHECK(a.rows_used == 9);
}

TEST_CASE("geometric_grid endpoints and spacing") {
    const std::vector<double> us = geometric_grid({std::exp(8.0), std::exp(20.0), 10});
    CHECK(us.size() == 10);
    CHECK(us.front() == doctest::Approx(std::exp(8.0)).epsilon(1e-12));
    CHECK(us.back() == doctest::Approx(std::exp(20.0)).epsilon(1e-12));
    const double r0 = us[1] / us[0], r1 = us[5] / us[4];
    CHECK(r0 == doctest::Approx(r1).epsilon(1e-9));
    CHECK_THROWS_AS(geometric_grid({10.0, 5.0, 8}), DomainError);
}

TEST_CASE("run_grid: small tilted grid has consistent rows") {
    const GridSpec grid{std::exp(4.0), std::exp(9.0), 6};
    const GridReport report =
        run_grid(kStd, 2.0, grid, 20'000, GridMethod::tilted, 1234);
    CHECK(report.rows.size() == 6);
    CHECK(report.regime_tag == "thm1");
    for (const GridRow& row : report.rows) {
        const double ratio = std::log(row.u) / 2.0;
        CHECK(row.theta == ratio - static_cast<double>(row.k_u));  // invariant
        CHECK(row.theta >= 0.0);
        CHECK(row.theta < 1.0);
        if (row.p_hat > 0.0) CHECK(row.c_hat > 0.0);
    }
    CHECK_THROWS_AS(
        run_grid(kStd, 2.0, grid, 1000, GridMethod::twophase, 1, std::nullopt), DomainError);
}

TEST_CASE("kesten_goldie_grid: rows carry u^alpha0-normalized constants") {
    const GridSpec grid{std::exp(4.0), std::exp(8.0), 6};
    const GridReport report = kesten_goldie_grid(kStd, grid, 20'000, 99, 3.0);
    CHECK(report.regime_tag == "kg");
    for (const GridRow& row : report.rows) {
        CHECK(row.c_hat == doctest::Approx(row.p_hat * row.u).epsilon(1e-9));  // alpha0 = 1
        CHECK(row.included);
    }
}

TEST_CASE("write_grid_csv: exact header and LF rows") {
    GridReport report;
    report.regime_tag = "thm1";
    report.rows = synthetic_rows(0.2, 0.0, 2.0, 1.5);
    std::ostringstream os;
    write_grid_csv(report, os);
    const std::string text = os.str();
    CHECK(text.rfind("u,k_u,theta,p_hat,stderr,ess,c_hat\n", 0) == 0);
    CHECK(text.find("\r") == std::string::npos);
    // one row per grid point plus the header
    std::size_t lines = 0;
    for (const char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 11);
}
