#pragma once

#include <nlohmann/json_fwd.hpp>

#include "perp/laws.hpp"

namespace perp {

// JSON law schema, e.g.
//   {"A": {"type": "lognormal", "mu": -1.0, "sigma": 1.4142135623730951},
//    "B": {"type": "const", "value": 1.0}}
// A types: lognormal | uniform | twopoint; B types: const | uniform |
// exponential | twopoint. Unknown keys are a hard parse error (ConfigError).
InnovationLaw law_from_json(const nlohmann::json& j);
nlohmann::json law_to_json(const InnovationLaw& law);

}  // namespace perp
