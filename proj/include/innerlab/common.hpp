#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace innerlab {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

// Single place for angular comparison tolerance. Arc membership, endpoint
// ties and union merging all use this value.
inline constexpr double kAngleTol = 1e-12;

// Zeros (and Mobius parameters) this close to the unit circle are rejected:
// the boundary derivative grows like 1/(1-|a|) and doubles degrade.
inline constexpr double kZeroGuard = 1e-9;

// Interior orbits closer to the circle than this abort instead of continuing
// with denormal-polluted values of 1-|F_n(0)|.
inline constexpr double kOrbitGuard = 1e-14;

struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

struct ConstructionError : std::invalid_argument {
    explicit ConstructionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Orbit too close to the unit circle for double arithmetic; carries the step.
struct PrecisionExhausted : std::runtime_error {
    std::int64_t step;
    PrecisionExhausted(std::int64_t n, const std::string& msg)
        : std::runtime_error(msg), step(n) {}
};

// Exact-preimage work would exceed the configured arc budget.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

// A precondition such as "all maps fix 0" was violated by a supplied map.
struct ContractViolation : std::runtime_error {
    explicit ContractViolation(const std::string& msg) : std::runtime_error(msg) {}
};

// Bracketed root finding failed to converge; carries diagnostics, never
// returned silently.
struct RootFindError : std::runtime_error {
    explicit RootFindError(const std::string& msg) : std::runtime_error(msg) {}
};

// A sequence horizon was too short to complete the requested construction.
// realized reports how much was completed before running out.
struct HorizonError : std::runtime_error {
    std::int64_t realized;
    HorizonError(std::int64_t done, const std::string& msg)
        : std::runtime_error(msg), realized(done) {}
};

struct ConfigError : std::runtime_error {
    std::string key;
    int line;
    ConfigError(std::string k, int ln, const std::string& msg)
        : std::runtime_error(msg), key(std::move(k)), line(ln) {}
};

}  // namespace innerlab
