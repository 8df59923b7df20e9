#pragma once

#include "carbonprice/clearing.hpp"
#include "carbonprice/risk.hpp"

namespace carbonprice {

/// Market with random emissions q*f*X, E[X] = 1.
struct RandomClearingProblem {
    Portfolio portfolio;
    /// Auctioned certificates A.
    double cap = 0.0;
    /// Tolerated aggregate expected emissions, strictly above `cap`.
    double a_hat = 0.0;
    double penalty = 0.0;
    EmissionDistribution dist;
    AccessProfile access;

    /// Throws DomainError on size mismatch, a_hat <= cap or cap <= 0.
    void validate(bool need_penalty = true) const;
};

/// Largest price an intermediary can charge before the firm's expected
/// emissions reach zero; equals `penalty` when penalty*rho_hat < E_bau.
double zero_emission_price(const CompanyParams& p, double penalty, const EmissionDistribution& dist);

/// Solves the intermediary's first-order condition delta'(P)(P-S) + delta(P) = 0
/// on (spot, min(penalty, zero_emission_price)).
double intermediated_price_random(const CompanyParams& p, double spot, double penalty,
                                  const EmissionDistribution& dist);

/// delta'(P)(P - spot) + delta(P), used to audit solver output.
double foc_residual(const CompanyParams& p, double price, double spot, double penalty,
                    const EmissionDistribution& dist);

/// Aggregate certificate demand sum_i delta_i(P_i(spot)).
double aggregate_demand_random(const RandomClearingProblem& problem, double spot);

/// Unique spot price clearing the random-emissions market, by bisection on
/// aggregate demand over (0, penalty].
ClearingResult equilibrium_spot_random(const RandomClearingProblem& problem);

/// tau = (E_bau - a_hat) / rho_hat over the portfolio.
double calibrate_tau_random(const Portfolio& portfolio, double a_hat, double sigma2);

struct PenaltyCalibration {
    double penalty = 0.0;
    ClearingResult clearing;
    double expected_emissions = 0.0;
    int iterations = 0;
    bool closed_form = false;
};

/// Penalty at which the equilibrium's aggregate expected emissions equal a_hat.
/// All-direct portfolios with a smooth distribution use the closed form;
/// everything else is root-found on log(penalty).
PenaltyCalibration calibrate_lambda(const RandomClearingProblem& problem);

/// Spot-scheme closed form: the penalty making expected emissions equal a_hat
/// when every firm buys directly.
double spot_penalty_closed_form(const Portfolio& portfolio, double cap, double a_hat,
                                const EmissionDistribution& dist);

/// Closed forms for N identical firms all served by intermediaries.
struct SymmetricSolution {
    double penalty = 0.0;
    double price = 0.0;
    double spot = 0.0;
    /// Sum over all intermediaries.
    double intermediary_wealth = 0.0;
};
/// The penalty is the one making expected emissions equal a_hat.
SymmetricSolution symmetric_intermediated(const CompanyParams& p, std::size_t n, double cap,
                                          double a_hat, const EmissionDistribution& dist);

/// Auction revenue plus expected penalties paid on excess emissions.
double regulator_wealth_random(const ClearingResult& clearing, double penalty,
                               const EmissionDistribution& dist, double cap);

}  // namespace carbonprice
