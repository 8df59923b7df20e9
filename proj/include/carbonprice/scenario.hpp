#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "carbonprice/accounting.hpp"
#include "carbonprice/oracle.hpp"

namespace carbonprice {

struct FirmSpec {
    /// Stored in euros and tons; any `quadratic_unit` scaling is already applied.
    CompanyParams params;
    /// Display group, e.g. "Brown" or "Green".
    std::string group;
};

struct EmissionSpec {
    enum class Kind { deterministic, lognormal, empirical };
    Kind kind = Kind::deterministic;
    /// Log-volatility s of the mean-one lognormal.
    double sigma = 0.0;
    std::vector<double> draws;

    EmissionModel model() const;
};

/// Parsed and validated scenario document.
struct Scenario {
    std::string name;
    std::vector<FirmSpec> firms;

    /// Exactly one of `cap` and `cap_fraction` (A / E_bau) is set.
    std::optional<double> cap;
    std::optional<double> cap_fraction;
    double a_hat_ratio = 1.05;
    std::optional<double> a_hat;
    std::optional<double> tau;
    std::optional<double> penalty;
    /// Access per firm for the hybrid scheme; empty when not given.
    AccessProfile access;

    EmissionSpec emissions;
    std::optional<OracleConfig> oracle;

    Portfolio portfolio() const;
    std::vector<std::string> groups() const;
    double resolved_cap() const;
    PolicyConfig policy(Scheme scheme) const;
    OracleConfig oracle_config() const { return oracle.value_or(OracleConfig{}); }
};

/// Throws ScenarioError with line/column or key context on malformed input,
/// and on any unknown key.
Scenario parse_scenario_text(const std::string& text, const std::string& source = "<text>");
Scenario parse_scenario(const std::filesystem::path& path);

/// Bundled scenario name or path to a scenario file.
Scenario load_scenario(const std::string& name_or_path);

/// Canonical JSON with all values in euros and tons.
std::string serialize_scenario(const Scenario& s);

std::vector<std::string> bundled_scenario_names();
/// Throws ScenarioError for an unknown name.
const std::string& bundled_scenario_text(const std::string& name);

}  // namespace carbonprice
