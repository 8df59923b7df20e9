#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "carbonprice/risk.hpp"

namespace carbonprice {

/// Production and abatement primitives of one firm.
///
/// Raw wealth is pi(q) = pi0*q - pi1/2*q^2 and abating to a fraction f of the
/// reference emissions q costs gamma/2 * ((1-f) q)^2. All values are in euros
/// and tons; any display scaling is applied before construction.
struct CompanyParams {
    std::string id;
    std::string label;
    double pi0 = 0.0;
    double pi1 = 0.0;
    double gamma = 0.0;

    /// Throws DomainError unless pi0, pi1, gamma are finite and positive.
    void validate() const;

    double rho() const { return 1.0 / pi1 + 1.0 / gamma; }
    /// Variance-adjusted emission factor 1/pi1 + 1/(gamma*sigma2).
    double rho_hat(double sigma2) const { return 1.0 / pi1 + 1.0 / (gamma * sigma2); }
    double q_bau() const { return pi0 / pi1; }
    double e_bau() const { return q_bau(); }
    double w_bau() const { return pi0 * pi0 / (2.0 * pi1); }
    /// Tons emitted per euro of business-as-usual wealth.
    double carbon_intensity() const { return e_bau() / w_bau(); }
};

using Portfolio = std::vector<CompanyParams>;

/// Optimal decisions of one firm under a given carbon price.
struct CompanyOutcome {
    double q = 0.0;
    /// e^{-a}: share of reference emissions left after abatement.
    double abatement_factor = 1.0;
    double delta = 0.0;
    /// Expected emissions f*q (times E[X] = 1 in the stochastic case).
    double emissions = 0.0;
    double wealth = 0.0;
    double green_cost = 0.0;
    double carbon_price = 0.0;

    double abatement_effort() const { return -std::log(abatement_factor); }
};

enum class PricingMode { tax, market };

struct FeasibilityReport {
    bool ok = true;
    /// E_bau - rate * rho (or rho_hat); must be strictly positive.
    double slack = 0.0;
    std::string reason;
};

/// Standing sufficient condition for an interior optimum: rate*rho < E_bau and
/// rate < pi0. `sigma2 > 1` checks the variance-adjusted factor instead.
FeasibilityReport check_feasibility(const CompanyParams& p, double rate, PricingMode mode,
                                    double sigma2 = 1.0);

CompanyOutcome bau_outcome(const CompanyParams& p);

CompanyOutcome tax_optimum(const CompanyParams& p, double tau);

/// Requires 0 < price < penalty and penalty*rho < E_bau.
CompanyOutcome market_optimum(const CompanyParams& p, double price, double penalty);

CompanyOutcome tax_optimum_random(const CompanyParams& p, double tau, double sigma2);

/// Market optimum when emissions are q*f*X. The firm behaves as if taxed at
/// the effective rate price * ES_{price/penalty}(X) and buys VaR_{price/penalty}(X)
/// certificates per unit of expected emissions.
CompanyOutcome market_optimum_random(const CompanyParams& p, double price, double penalty,
                                     const EmissionDistribution& dist);

/// Effective per-ton rate price * ES_{price/penalty}(X).
double effective_rate(double price, double penalty, const EmissionDistribution& dist);

/// Unchecked closed-form demand at a stochastic market price; `emissions` and
/// `delta` go negative once the effective rate exceeds E_bau / rho_hat.
/// Root-finders use this to probe prices outside the feasible range.
struct MarketResponse {
    double effective_rate = 0.0;
    double var = 1.0;
    double emissions = 0.0;
    double delta = 0.0;
};
MarketResponse market_response_random(const CompanyParams& p, double price, double penalty,
                                      const EmissionDistribution& dist);

/// d(delta)/d(price) of the stochastic market demand.
double demand_derivative_random(const CompanyParams& p, double price, double penalty,
                                const EmissionDistribution& dist);

double green_cost(const CompanyParams& p, double q, double abatement_factor, double sigma2 = 1.0);

}  // namespace carbonprice
