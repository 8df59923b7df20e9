#pragma once

#include <string>
#include <vector>

#include "carbonprice/agents.hpp"

namespace carbonprice {

/// How a firm reaches the certificate auction.
enum class Access { direct, intermediated };

using AccessProfile = std::vector<Access>;

AccessProfile all_direct(std::size_t n);
AccessProfile all_intermediated(std::size_t n);

enum class Corner {
    interior,
    /// The intermediary's preferred price exceeds the penalty and is capped at it.
    price_capped_at_penalty,
    /// Demand would be negative at this spot price and was floored at zero.
    zero_demand,
};

const char* to_string(Access a);
const char* to_string(Corner c);

struct DirectDemand {
    double demand = 0.0;
    bool clamped = false;
};

/// E_bau - spot*rho, floored at zero.
DirectDemand direct_demand(const CompanyParams& p, double spot);

struct IntermediatedResponse {
    double price = 0.0;
    double demand = 0.0;
    bool capped = false;
};

/// Wealth-maximizing price of an intermediary facing a firm with direct
/// demand E_bau - P*rho, buying at `spot` and capped by `penalty`.
IntermediatedResponse intermediated_response(const CompanyParams& p, double spot, double penalty);

/// Caps A for which the deterministic market clears.
struct FeasibilityWindow {
    /// Aggregate demand at spot = penalty.
    double a_min = 0.0;
    /// Aggregate demand as spot -> 0.
    double a_max = 0.0;
    /// Smallest cap for which no intermediated price hits the penalty.
    double interior_a_min = 0.0;

    bool contains(double cap) const { return cap >= a_min && cap < a_max; }
    bool interior(double cap) const { return cap >= interior_a_min && cap < a_max; }
};

/// Throws InfeasibleError when the window is empty.
FeasibilityWindow feasibility_window(const Portfolio& portfolio, double penalty,
                                     const AccessProfile& access);

/// Aggregate certificate demand at a given spot price.
double aggregate_demand(const Portfolio& portfolio, double spot, double penalty,
                        const AccessProfile& access);

struct ClearingResult {
    double spot = 0.0;
    double penalty = 0.0;
    double cap = 0.0;
    AccessProfile access;
    std::vector<double> effective_prices;
    std::vector<double> demands;
    /// Expected emissions per firm; equal to demands in the deterministic case.
    std::vector<double> emissions;
    std::vector<Corner> corner_flags;
    /// Sum of demands minus cap.
    double residual = 0.0;
    bool used_closed_form = false;
    int iterations = 0;
    std::vector<std::string> warnings;
};

/// Deterministic equilibrium spot price. Closed forms apply when the cap lies in
/// the interior window; otherwise the piecewise-linear clearing condition is
/// bisected.
ClearingResult equilibrium_spot(const Portfolio& portfolio, double cap, double penalty,
                                const AccessProfile& access);

/// Chosen default penalty for deterministic market runs.
struct PenaltyChoice {
    double penalty = 0.0;
    /// Valid interior range [lower, upper) the default was picked from.
    double lower = 0.0;
    double upper = 0.0;
    std::string note;
};

/// Midpoint of the penalties that are feasible for every firm and keep all
/// intermediated prices below the cap. Interior results do not depend on it.
PenaltyChoice default_penalty(const Portfolio& portfolio, double cap, const AccessProfile& access);

}  // namespace carbonprice
