#pragma once

#include <stdexcept>
#include <string>

namespace perp {

// Parameter outside the mathematical domain of an operation (s < 0 for a
// moment function, tangent with nonpositive slope, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Target value outside the attainable range of a strictly monotone map
// (rho outside the range of Lambda', Legendre point above sup Lambda').
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Lambda has no positive zero on the searched range.
struct NoRootError : std::runtime_error {
    explicit NoRootError(const std::string& msg) : std::runtime_error(msg) {}
};

// Operation requires a nonlattice log A (sharp large-deviation evaluators).
struct LatticeLawError : std::runtime_error {
    explicit LatticeLawError(const std::string& msg) : std::runtime_error(msg) {}
};

// Enumeration would exceed the path-count cap.
struct GuardError : std::runtime_error {
    explicit GuardError(const std::string& msg) : std::runtime_error(msg) {}
};

// Merge of estimate records produced for different targets.
struct MixedTargetError : std::runtime_error {
    explicit MixedTargetError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or incomplete experiment configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace perp
