// perp: large-deviation analytics and rare-event Monte Carlo for perpetuity
// first passage times. Subcommands: analyze, simulate, verify, walk, oracle.
// One JSON config per run plus a few override flags; every stochastic command
// requires an explicit seed, and results are bit-reproducible for any
// --threads value.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>

#include "perp/asymptotics.hpp"
#include "perp/cgf.hpp"
#include "perp/engine.hpp"
#include "perp/errors.hpp"
#include "perp/json_io.hpp"
#include "perp/oracle.hpp"
#include "perp/walk_ldp.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDomain = 3;
constexpr int kExitLowConfidence = 4;
constexpr int kExitDegenerateGrid = 5;

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> samples;
    std::optional<std::string> out;
    int threads = 0;
};

void check_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    if (!j.is_object()) throw perp::ConfigError(std::string(where) + ": expected an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw perp::ConfigError(std::string(where) + ": unknown key \"" + item.key() + "\"");
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw perp::ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw perp::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return j;
}

double require_num(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw perp::ConfigError(std::string(where) + ": missing numeric \"" + key + "\"");
    return j.at(key).get<double>();
}

std::int64_t require_int(const json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j.at(key).is_number_integer())
        throw perp::ConfigError(std::string(where) + ": missing integer \"" + key + "\"");
    return j.at(key).get<std::int64_t>();
}

std::uint64_t require_seed(const json& block, const Overrides& ov, const char* where) {
    if (ov.seed) return *ov.seed;
    if (!block.contains("seed") || !block.at("seed").is_number())
        throw perp::ConfigError(std::string(where) +
                                ": \"seed\" is required (no wall-clock default)");
    return block.at("seed").get<std::uint64_t>();
}

perp::InnovationLaw require_law(const json& cfg) {
    if (!cfg.contains("law")) throw perp::ConfigError("config: missing \"law\"");
    return perp::law_from_json(cfg.at("law"));
}

json flag_to_json(perp::Flag f) {
    if (f == perp::Flag::yes) return true;
    if (f == perp::Flag::no) return false;
    return nullptr;
}

json hypothesis_to_json(const perp::HypothesisReport& rep) {
    return json{{"h_contractive", rep.h_contractive},
                {"h_moments", rep.h_moments},
                {"h_moments_eps", rep.h_moments_eps},
                {"h_index", rep.h_index},
                {"h_support", flag_to_json(rep.h_support)},
                {"h_density", rep.h_density},
                {"thm2_regime", rep.thm2_regime},
                {"alpha_used", rep.alpha_used}};
}

int cmd_analyze(const json& cfg, const Overrides& ov) {
    (void)ov;
    check_keys(cfg, {"law", "analyze"}, "config");
    if (!cfg.contains("analyze")) throw perp::ConfigError("config: missing \"analyze\" block");
    const json& block = cfg.at("analyze");
    check_keys(block, {"rho"}, "analyze");
    const perp::InnovationLaw law = require_law(cfg);
    const double rho = require_num(block, "rho", "analyze");

    const double alpha = perp::solve_alpha(law.a, rho);
    const perp::CumulantProfile profile = perp::cramer_root(law.a);
    const perp::HypothesisReport rep = perp::hypothesis_report(law, alpha);

    json out{{"alpha", alpha},
             {"alpha_bar", perp::alpha_bar(law.a, alpha)},
             {"rate_I", perp::rate_I(law.a, rho)},
             {"alpha_min", profile.alpha_min},
             {"hypothesis_report", hypothesis_to_json(rep)}};
    if (profile.alpha0) {
        out["alpha0"] = *profile.alpha0;
        out["rho0"] = profile.rho0;
        out["sigma0"] = profile.sigma0;
    } else {
        out["alpha0"] = nullptr;
        out["rho0"] = nullptr;
        out["sigma0"] = nullptr;
    }
    if (perp::a_is_lattice(law.a))
        out["warning"] = "oracle-only law: lattice log A is rejected by the Petrov evaluators";
    std::cout << out.dump() << "\n";
    return kExitOk;
}

json record_to_json(const perp::EstimateRecord& rec, std::int64_t k_u, double alpha,
                    json schedule) {
    json out{{"value", rec.value},          {"stderr", rec.std_error},
             {"n_samples", rec.n_samples},  {"ess", rec.ess},
             {"censored_weight", rec.censored_weight}, {"k_u", k_u},
             {"alpha", alpha},              {"schedule", std::move(schedule)}};
    if (rec.ess < 100.0) out["low_confidence"] = true;
    return out;
}

int cmd_simulate(const json& cfg, const Overrides& ov) {
    check_keys(cfg, {"law", "simulate"}, "config");
    if (!cfg.contains("simulate")) throw perp::ConfigError("config: missing \"simulate\" block");
    const json& block = cfg.at("simulate");
    check_keys(block,
               {"target", "rho", "beta", "u", "samples", "method", "seed", "horizon_factor",
                "hits"},
               "simulate");
    const perp::InnovationLaw law = require_law(cfg);
    if (!block.contains("target") || !block.at("target").is_string())
        throw perp::ConfigError("simulate: missing \"target\"");
    const std::string target = block.at("target").get<std::string>();
    const std::uint64_t seed = require_seed(block, ov, "simulate");
    perp::EngineOptions opts;
    opts.threads = ov.threads;

    if (target == "pointwise") {
        const double rho = require_num(block, "rho", "simulate");
        const double u = require_num(block, "u", "simulate");
        const std::int64_t samples =
            ov.samples ? *ov.samples : require_int(block, "samples", "simulate");
        const std::string method = block.contains("method")
                                       ? block.at("method").get<std::string>()
                                       : std::string("tilted");
        const std::int64_t k = perp::pointwise_target_step(u, rho) - 1;
        perp::EstimateRecord rec;
        double alpha = std::numeric_limits<double>::quiet_NaN();
        json schedule;
        if (method == "tilted") {
            alpha = perp::solve_alpha(law.a, rho);
            rec = perp::estimate_pointwise(law, rho, u, samples, seed,
                                           perp::PointwiseMethod::tilted, opts);
            schedule = {{"variant", "constant"}, {"s", alpha}, {"horizon", k}};
        } else if (method == "naive") {
            rec = perp::estimate_pointwise(law, rho, u, samples, seed,
                                           perp::PointwiseMethod::naive, opts);
            schedule = {{"variant", "untilted"}};
        } else if (method == "twophase") {
            const double beta = require_num(block, "beta", "simulate");
            alpha = perp::solve_alpha(law.a, rho);
            rec = perp::estimate_pointwise_twophase(law, rho, beta, u, samples, seed, opts);
            const double rho_beta = perp::log_mgf_derivs(law.a, beta).d1;
            const std::int64_t n1 = std::min(
                k, static_cast<std::int64_t>(std::floor(std::log(u) / rho_beta)));
            schedule = {{"variant", "twophase"}, {"s1", beta},        {"n1", n1},
                        {"s2", 1.0},             {"n2", k - n1},      {"pivot", true}};
        } else {
            throw perp::ConfigError("simulate: unknown method \"" + method + "\"");
        }
        std::cout << record_to_json(rec, k, alpha, schedule).dump() << "\n";
        return rec.ess < 100.0 ? kExitLowConfidence : kExitOk;
    }
    if (target == "ruin") {
        const double u = require_num(block, "u", "simulate");
        const std::int64_t samples =
            ov.samples ? *ov.samples : require_int(block, "samples", "simulate");
        const double horizon_factor =
            block.contains("horizon_factor") ? block.at("horizon_factor").get<double>() : 3.0;
        const perp::CumulantProfile profile = perp::cramer_root(law.a);
        if (!profile.alpha0) throw perp::NoRootError("simulate ruin: no Cramer root");
        const perp::EstimateRecord rec =
            perp::estimate_ruin(law, u, samples, horizon_factor, seed, opts);
        const std::int64_t k_u =
            static_cast<std::int64_t>(std::floor(std::log(u) / profile.rho0));
        json schedule{{"variant", "constant"},
                      {"s", *profile.alpha0},
                      {"horizon", static_cast<std::int64_t>(
                                      horizon_factor * std::ceil(std::log(u) / profile.rho0))}};
        std::cout << record_to_json(rec, k_u, *profile.alpha0, schedule).dump() << "\n";
        return rec.ess < 100.0 ? kExitLowConfidence : kExitOk;
    }
    if (target == "clt") {
        const double u = require_num(block, "u", "simulate");
        const std::int64_t hits = block.contains("hits")
                                      ? require_int(block, "hits", "simulate")
                                      : (ov.samples ? *ov.samples : 10000);
        const perp::CltDiagnostics diag = perp::clt_diagnostics(law, u, hits, seed, opts);
        std::cout << json{{"mean_ratio", diag.mean_ratio},
                          {"ks_sigma0", diag.ks_sigma0},
                          {"ks_var0", diag.ks_var0},
                          {"hits", diag.hits},
                          {"u", u}}
                         .dump()
                  << "\n";
        return kExitOk;
    }
    throw perp::ConfigError("simulate: unknown target \"" + target + "\"");
}

json summary_to_json(const perp::GridReport& report) {
    return json{{"slope", report.fit.slope},
                {"slope_ci_lo", report.fit.slope_ci_lo},
                {"slope_ci_hi", report.fit.slope_ci_hi},
                {"c_mean", report.fit.c_mean},
                {"c_rel_spread", report.fit.c_rel_spread},
                {"regime_tag", report.regime_tag}};
}

int cmd_verify(const json& cfg, const Overrides& ov) {
    check_keys(cfg, {"law", "verify"}, "config");
    if (!cfg.contains("verify")) throw perp::ConfigError("config: missing \"verify\" block");
    const json& block = cfg.at("verify");
    check_keys(block,
               {"regime", "rho", "beta", "method", "u_grid", "samples", "seed", "horizon_factor",
                "out"},
               "verify");
    const perp::InnovationLaw law = require_law(cfg);
    if (!block.contains("regime") || !block.at("regime").is_string())
        throw perp::ConfigError("verify: missing \"regime\"");
    const std::string regime = block.at("regime").get<std::string>();
    const std::uint64_t seed = require_seed(block, ov, "verify");
    const std::int64_t samples =
        ov.samples ? *ov.samples : require_int(block, "samples", "verify");

    if (!block.contains("u_grid")) throw perp::ConfigError("verify: missing \"u_grid\"");
    const json& jg = block.at("u_grid");
    check_keys(jg, {"lo", "hi", "points", "spacing"}, "verify.u_grid");
    if (jg.contains("spacing") && jg.at("spacing").get<std::string>() != "geometric")
        throw perp::ConfigError("verify.u_grid: only geometric spacing is supported");
    perp::GridSpec grid{require_num(jg, "lo", "u_grid"), require_num(jg, "hi", "u_grid"),
                        static_cast<int>(require_int(jg, "points", "u_grid"))};
    if (grid.points < 6) throw perp::ConfigError("verify.u_grid: need at least 6 points");

    perp::EngineOptions opts;
    opts.threads = ov.threads;
    perp::GridReport report;
    if (regime == "kg") {
        const double horizon_factor =
            block.contains("horizon_factor") ? block.at("horizon_factor").get<double>() : 3.0;
        report = perp::kesten_goldie_grid(law, grid, samples, seed, horizon_factor, opts);
    } else if (regime == "thm1" || regime == "thm2") {
        const double rho = require_num(block, "rho", "verify");
        std::string method = regime == "thm1" ? "tilted" : "twophase";
        if (block.contains("method")) method = block.at("method").get<std::string>();
        perp::GridMethod gm;
        std::optional<double> beta;
        if (method == "tilted") {
            gm = perp::GridMethod::tilted;
        } else if (method == "naive") {
            gm = perp::GridMethod::naive;
        } else if (method == "twophase") {
            gm = perp::GridMethod::twophase;
            beta = require_num(block, "beta", "verify");
        } else {
            throw perp::ConfigError("verify: unknown method \"" + method + "\"");
        }
        report = perp::run_grid(law, rho, grid, samples, gm, seed, beta, opts);
        report.regime_tag = regime;
    } else {
        throw perp::ConfigError("verify: unknown regime \"" + regime + "\"");
    }

    const std::string out_base = ov.out ? *ov.out
                                 : block.contains("out") ? block.at("out").get<std::string>()
                                                         : std::string("verify");
    {
        std::ofstream csv(out_base + ".csv", std::ios::binary);
        if (!csv) throw perp::ConfigError("cannot write " + out_base + ".csv");
        perp::write_grid_csv(report, csv);
    }
    const json summary = summary_to_json(report);
    {
        std::ofstream js(out_base + ".json", std::ios::binary);
        if (!js) throw perp::ConfigError("cannot write " + out_base + ".json");
        js << summary.dump(2) << "\n";
    }
    std::cout << summary.dump() << "\n";

    std::int64_t excluded = 0;
    for (const perp::GridRow& row : report.rows)
        if (!row.included) ++excluded;
    if (2 * excluded > static_cast<std::int64_t>(report.rows.size())) return kExitDegenerateGrid;
    return kExitOk;
}

json walk_query(const perp::InnovationLaw& law, const json& q, const Overrides& ov) {
    check_keys(q, {"n", "c", "gamma", "j", "delta", "samples", "tilt_alpha", "seed"}, "walk");
    const std::int64_t n = require_int(q, "n", "walk");
    const double c = require_num(q, "c", "walk");
    const double gamma = q.contains("gamma") ? q.at("gamma").get<double>() : 0.0;
    const double alpha = perp::solve_alpha(law.a, c);
    json out{{"n", n}, {"c", c}, {"gamma", gamma}, {"alpha", alpha}};
    out["petrov"] = perp::petrov_prob(law.a, perp::PetrovQuery{n, c, gamma, alpha});
    if (q.contains("j") || q.contains("delta")) {
        const std::int64_t j = q.contains("j") ? q.at("j").get<std::int64_t>() : 0;
        const double delta = q.contains("delta") ? q.at("delta").get<double>() : 0.0;
        out["petrov_shifted"] = perp::petrov_shifted(law.a, n, j, delta, alpha);
    }
    if (const auto* ln = std::get_if<perp::LogNormalA>(&law.a))
        out["exact"] = perp::exact_gaussian_walk_tail(ln->mu, ln->sigma, n,
                                                      std::exp(static_cast<double>(n) * (c + gamma)));
    if (q.contains("samples")) {
        const std::int64_t samples = ov.samples ? *ov.samples : q.at("samples").get<std::int64_t>();
        const double tilt = q.contains("tilt_alpha") ? q.at("tilt_alpha").get<double>() : alpha;
        const std::uint64_t seed = require_seed(q, ov, "walk");
        perp::EngineOptions opts;
        opts.threads = ov.threads;
        const perp::EstimateRecord rec = perp::mc_walk_tail(
            law, n, std::exp(static_cast<double>(n) * (c + gamma)), samples, tilt, seed, opts);
        out["mc"] = {{"value", rec.value},
                     {"stderr", rec.std_error},
                     {"ess", rec.ess},
                     {"n_samples", rec.n_samples}};
    }
    return out;
}

int cmd_walk(const json& cfg, const Overrides& ov) {
    check_keys(cfg, {"law", "walk"}, "config");
    if (!cfg.contains("walk")) throw perp::ConfigError("config: missing \"walk\" block");
    const perp::InnovationLaw law = require_law(cfg);
    const json& block = cfg.at("walk");
    if (block.is_array()) {
        for (const json& q : block) std::cout << walk_query(law, q, ov).dump() << "\n";
    } else {
        std::cout << walk_query(law, block, ov).dump() << "\n";
    }
    return kExitOk;
}

int cmd_oracle(const json& cfg, const Overrides& ov) {
    (void)ov;
    check_keys(cfg, {"oracle", "law"}, "config");
    if (!cfg.contains("oracle")) throw perp::ConfigError("config: missing \"oracle\" block");
    const json& block = cfg.at("oracle");
    check_keys(block, {"instance"}, "oracle");
    const json& ji = block.at("instance");
    check_keys(ji, {"a_atoms", "b_atoms", "n_max", "u"}, "oracle.instance");
    perp::DiscreteInstance inst;
    for (const json& pair : ji.at("a_atoms"))
        inst.a_atoms.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    for (const json& pair : ji.at("b_atoms"))
        inst.b_atoms.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    inst.n_max = require_int(ji, "n_max", "oracle.instance");
    inst.u = require_num(ji, "u", "oracle.instance");

    const perp::TauPmf result = perp::exact_tau_pmf(inst);
    std::cout << "k,prob\n";
    char buf[64];
    for (std::int64_t k = 1; k <= inst.n_max; ++k) {
        const auto it = result.pmf.find(k);
        std::snprintf(buf, sizeof buf, "%lld,%.17g\n", static_cast<long long>(k),
                      it == result.pmf.end() ? 0.0 : it->second);
        std::cout << buf;
    }
    std::cerr << json{{"censored_mass", result.censored_mass}}.dump() << "\n";
    return kExitOk;
}

json error_json(const char* type, const std::string& message) {
    return json{{"error", {{"type", type}, {"message", message}}}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perpetuity first-passage analytics and rare-event simulation"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;
    std::uint64_t seed_flag = 0;
    std::int64_t samples_flag = 0;
    std::string out_flag;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        sub->add_option("--seed", seed_flag, "override config seed");
        sub->add_option("--samples", samples_flag, "override config sample count");
        sub->add_option("--out", out_flag, "override output base path");
        sub->add_option("--threads", ov.threads, "worker threads (default: all cores)");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "cumulant profile and hypothesis report");
    CLI::App* simulate = app.add_subcommand("simulate", "single rare-event estimate");
    CLI::App* verify = app.add_subcommand("verify", "u-grid run with slope verdict");
    CLI::App* walk = app.add_subcommand("walk", "random-walk large-deviation evaluators");
    CLI::App* oracle = app.add_subcommand("oracle", "exact pmf of a discrete instance");
    for (CLI::App* sub : {analyze, simulate, verify, walk, oracle}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) ov.seed = seed_flag;
    if (sub->count("--samples")) ov.samples = samples_flag;
    if (sub->count("--out")) ov.out = out_flag;

    try {
        const json cfg = load_config(config_path);
        const std::string name = sub->get_name();
        if (name == "analyze") return cmd_analyze(cfg, ov);
        if (name == "simulate") return cmd_simulate(cfg, ov);
        if (name == "verify") return cmd_verify(cfg, ov);
        if (name == "walk") return cmd_walk(cfg, ov);
        if (name == "oracle") return cmd_oracle(cfg, ov);
        std::cerr << error_json("ConfigError", "unknown subcommand").dump() << "\n";
        return kExitConfig;
    } catch (const perp::ConfigError& e) {
        std::cerr << error_json("ConfigError", e.what()).dump() << "\n";
        return kExitConfig;
    } catch (const perp::RangeError& e) {
        std::cerr << error_json("RangeError", e.what()).dump() << "\n";
        return kExitDomain;
    } catch (const perp::DomainError& e) {
        std::cerr << error_json("DomainError", e.what()).dump() << "\n";
        return kExitDomain;
    } catch (const perp::NoRootError& e) {
        std::cerr << error_json("NoRootError", e.what()).dump() << "\n";
        return kExitDomain;
    } catch (const perp::LatticeLawError& e) {
        std::cerr << error_json("LatticeLawError", e.what()).dump() << "\n";
        return kExitDomain;
    } catch (const perp::GuardError& e) {
        std::cerr << error_json("GuardError", e.what()).dump() << "\n";
        return kExitDomain;
    } catch (const perp::MixedTargetError& e) {
        std::cerr << error_json("MixedTargetError", e.what()).dump() << "\n";
        return kExitDomain;
    } catch (const json::exception& e) {
        std::cerr << error_json("ConfigError", e.what()).dump() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << error_json("InternalError", e.what()).dump() << "\n";
        return 1;
    }
}
