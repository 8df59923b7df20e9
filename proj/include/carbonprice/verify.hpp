#pragma once

#include <string>
#include <vector>

#include "carbonprice/scenario.hpp"

namespace carbonprice {

struct Check {
    std::string name;
    bool passed = false;
    /// Measured discrepancy and the bound it was held to.
    double value = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::vector<Check> checks;
    bool passed() const;
};

/// Cross-checks the scenario's closed-form firm optima, intermediated prices
/// and clearing residuals against the brute-force oracles.
VerificationReport verify_scenario(const Scenario& scenario, const OracleConfig& cfg);

}  // namespace carbonprice
