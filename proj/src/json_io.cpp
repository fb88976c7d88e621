#include "perp/json_io.hpp"

#include <nlohmann/json.hpp>
#include <set>
#include <string>

#include "perp/errors.hpp"

namespace perp {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    for (const auto& item : j.items())
        if (!allowed.count(item.key()))
            throw ConfigError(std::string(where) + ": unknown key \"" + item.key() + "\"");
    for (const auto& key : allowed)
        if (!j.contains(key))
            throw ConfigError(std::string(where) + ": missing key \"" + key + "\"");
}

double num(const json& j, const char* key, const char* where) {
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(std::string(where) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace

InnovationLaw law_from_json(const json& j) {
    require_keys(j, {"A", "B"}, "law");
    const json& ja = j.at("A");
    const json& jb = j.at("B");
    if (!ja.is_object() || !ja.contains("type") || !ja.at("type").is_string())
        throw ConfigError("law.A: missing string \"type\"");
    if (!jb.is_object() || !jb.contains("type") || !jb.at("type").is_string())
        throw ConfigError("law.B: missing string \"type\"");

    InnovationLaw law{LogNormalA{0.0, 1.0}, ConstB{0.0}};
    const std::string ta = ja.at("type").get<std::string>();
    if (ta == "lognormal") {
        require_keys(ja, {"type", "mu", "sigma"}, "law.A");
        law.a = LogNormalA{num(ja, "mu", "law.A"), num(ja, "sigma", "law.A")};
    } else if (ta == "uniform") {
        require_keys(ja, {"type", "lo", "hi"}, "law.A");
        law.a = UniformA{num(ja, "lo", "law.A"), num(ja, "hi", "law.A")};
    } else if (ta == "twopoint") {
        require_keys(ja, {"type", "a1", "p1", "a2"}, "law.A");
        law.a = TwoPointA{num(ja, "a1", "law.A"), num(ja, "p1", "law.A"), num(ja, "a2", "law.A")};
    } else {
        throw ConfigError("law.A: unknown type \"" + ta + "\"");
    }

    const std::string tb = jb.at("type").get<std::string>();
    if (tb == "const") {
        require_keys(jb, {"type", "value"}, "law.B");
        law.b = ConstB{num(jb, "value", "law.B")};
    } else if (tb == "uniform") {
        require_keys(jb, {"type", "lo", "hi"}, "law.B");
        law.b = UniformB{num(jb, "lo", "law.B"), num(jb, "hi", "law.B")};
    } else if (tb == "exponential") {
        require_keys(jb, {"type", "rate"}, "law.B");
        law.b = ExponentialB{num(jb, "rate", "law.B")};
    } else if (tb == "twopoint") {
        require_keys(jb, {"type", "b1", "p1", "b2"}, "law.B");
        law.b = TwoPointB{num(jb, "b1", "law.B"), num(jb, "p1", "law.B"), num(jb, "b2", "law.B")};
    } else {
        throw ConfigError("law.B: unknown type \"" + tb + "\"");
    }
    validate(law);
    return law;
}

json law_to_json(const InnovationLaw& law) {
    json out;
    std::visit(
        [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, LogNormalA>)
                out["A"] = {{"type", "lognormal"}, {"mu", v.mu}, {"sigma", v.sigma}};
            else if constexpr (std::is_same_v<T, UniformA>)
                out["A"] = {{"type", "uniform"}, {"lo", v.lo}, {"hi", v.hi}};
            else
                out["A"] = {{"type", "twopoint"}, {"a1", v.a1}, {"p1", v.p1}, {"a2", v.a2}};
        },
        law.a);
    std::visit(
        [&out](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ConstB>)
                out["B"] = {{"type", "const"}, {"value", v.value}};
            else if constexpr (std::is_same_v<T, UniformB>)
                out["B"] = {{"type", "uniform"}, {"lo", v.lo}, {"hi", v.hi}};
            else if constexpr (std::is_same_v<T, ExponentialB>)
                out["B"] = {{"type", "exponential"}, {"rate", v.rate}};
            else
                out["B"] = {{"type", "twopoint"}, {"b1", v.b1}, {"p1", v.p1}, {"b2", v.b2}};
        },
        law.b);
    return out;
}

}  // namespace perp
