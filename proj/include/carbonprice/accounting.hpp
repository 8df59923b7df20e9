#pragma once

#include <optional>
#include <string>
#include <vector>

#include "carbonprice/clearing.hpp"
#include "carbonprice/clearing_random.hpp"

namespace carbonprice {

enum class Scheme { bau, tax, spot, intermediated, hybrid };

const char* to_string(Scheme s);
/// Accepts the lower-case names printed by to_string.
Scheme scheme_from_string(const std::string& name);

/// Deterministic emissions, or emissions q*f*X with X drawn from `dist`.
struct EmissionModel {
    EmissionDistribution dist;

    static EmissionModel deterministic() { return {}; }
    static EmissionModel lognormal(double sigma) { return {EmissionDistribution::lognormal(sigma)}; }
    bool stochastic() const { return !dist.is_degenerate(); }
};

struct PolicyConfig {
    Scheme scheme = Scheme::tax;
    /// Certificates auctioned, A. Also the emissions target of the deterministic tax.
    double cap = 0.0;
    /// Expected emissions target for stochastic runs; 0 means a_hat_ratio * cap.
    double a_hat = 0.0;
    double a_hat_ratio = 1.05;
    /// Explicit rates; calibrated from the targets when absent.
    std::optional<double> tau;
    std::optional<double> penalty;
    /// Per-firm access for the hybrid scheme; ignored otherwise.
    AccessProfile access;

    double resolved_a_hat() const { return a_hat > 0.0 ? a_hat : a_hat_ratio * cap; }
};

struct SchemeAccounts {
    Scheme scheme = Scheme::bau;
    bool stochastic = false;
    Portfolio portfolio;
    std::vector<CompanyOutcome> firms;
    /// delta_i (P_i - S) per firm; empty when no firm is intermediated.
    std::vector<double> intermediary_wealth;
    /// Tons of bau emissions per euro of bau wealth.
    std::vector<double> carbon_intensity;

    double regulator_wealth = 0.0;
    double tech_provider_wealth = 0.0;
    double companies_wealth = 0.0;
    double intermediaries_wealth = 0.0;
    /// Companies + intermediaries + regulator.
    double gdp = 0.0;
    /// gdp plus tech-provider wealth (the table "Total" row).
    double gdp_with_tech = 0.0;
    double total_emissions = 0.0;

    double cap = 0.0;
    double a_hat = 0.0;
    std::optional<double> tau;
    std::optional<double> spot;
    std::optional<double> penalty;
    std::optional<ClearingResult> clearing;
    std::vector<std::string> notes;
};

/// tau = (E_bau - cap) / rho over the portfolio. Throws InfeasibleError listing
/// every firm for which the rate breaks feasibility.
double calibrate_tau(const Portfolio& portfolio, double cap);

SchemeAccounts run_scheme(const Portfolio& portfolio, const PolicyConfig& policy,
                          const EmissionModel& model);

/// delta_i (P_i - S) for each firm of a cleared market.
std::vector<double> intermediary_wealth_detailed(const ClearingResult& clearing);

enum class Verdict { gains, loses, neutral };
const char* to_string(Verdict v);

/// Market-vs-tax outcome of one firm.
struct WinnerRow {
    std::string label;
    /// Deterministic: E_mar,i / rho_i for intermediated firms, 0 for direct
    /// ones. Stochastic: effective per-ton rate paid under the market.
    double lhs = 0.0;
    /// Deterministic: sum of intermediated E_mar over the economy-wide rho.
    /// Stochastic: the calibrated tax rate.
    double rhs = 0.0;
    Verdict predicted = Verdict::neutral;
    double wealth_delta = 0.0;
    Verdict observed = Verdict::neutral;
};

/// `other` minus `base` for every aggregate.
struct ComparisonReport {
    Scheme base = Scheme::tax;
    Scheme other = Scheme::tax;
    bool stochastic = false;
    double gdp_delta = 0.0;
    double gdp_with_tech_delta = 0.0;
    double companies_delta = 0.0;
    double regulator_delta = 0.0;
    double intermediaries_delta = 0.0;
    double tech_delta = 0.0;
    double emissions_delta = 0.0;
    std::vector<double> firm_wealth_delta;
    /// 1/2 ((sum_b E_b)^2 / rho - sum_b E_b^2 / rho_b), deterministic interior markets.
    std::optional<double> jensen_gap;
    /// -A * sum_b E_b / rho, deterministic interior markets.
    std::optional<double> regulator_gap;
    std::vector<WinnerRow> winners;
};

/// Compares every entry of `accounts` against the first one. All entries must
/// share the portfolio and cap.
std::vector<ComparisonReport> compare_schemes(const std::vector<SchemeAccounts>& accounts);

/// Single comparison of `other` against `base`.
ComparisonReport compare_pair(const SchemeAccounts& base, const SchemeAccounts& other);

}  // namespace carbonprice
