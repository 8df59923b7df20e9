#pragma once

#include <cstdint>
#include <vector>

#include "carbonprice/accounting.hpp"

namespace carbonprice {

struct OracleConfig {
    /// Points per axis of every (q, f) grid.
    int grid_points = 201;
    /// Zoom rounds after the coarse grid; each zooms to +-4 cells of the argmax.
    int refinement_rounds = 3;
    /// Grid size for intermediary-price searches.
    int price_grid_points = 100000;
    std::size_t mc_paths = 1000000;
    std::uint64_t mc_seed = 42;
    double tolerance = 1e-6;
    unsigned threads = 1;

    /// Throws DomainError when a field is below its minimum.
    void validate() const;
};

struct Pricing {
    PricingMode mode = PricingMode::tax;
    /// Tax rate, or market price.
    double rate = 0.0;
    double penalty = 0.0;

    static Pricing tax(double tau) { return {PricingMode::tax, tau, 0.0}; }
    static Pricing market(double price, double penalty) { return {PricingMode::market, price, penalty}; }
};

struct OracleOutcome {
    CompanyOutcome outcome;
    /// Best objective value after the coarse grid and after each zoom.
    std::vector<double> round_wealth;
    /// Monte-Carlo standard error of the wealth; zero when deterministic.
    double wealth_se = 0.0;
    /// Final grid spacing on each axis.
    double q_step = 0.0;
    double f_step = 0.0;
};

/// Maximizes the firm's raw wealth over (q, f) by grid refinement. In the
/// market the certificate holding is resolved in closed form; in the
/// stochastic case the expectation is a sample average over `mc_paths` draws.
OracleOutcome oracle_firm_optimum(const CompanyParams& p, const Pricing& pricing,
                                  const EmissionModel& model, const OracleConfig& cfg);

/// Same, reusing a sample already drawn from the model's distribution.
OracleOutcome oracle_firm_optimum(const CompanyParams& p, const Pricing& pricing,
                                  const EmissionModel& model, const OracleConfig& cfg,
                                  const Sample& sample);

/// Grid argmax of delta(P)(P - spot) over [spot, penalty].
double oracle_intermediary_price(const CompanyParams& p, double spot, double penalty,
                                 const EmissionModel& model, const OracleConfig& cfg);

/// Recomputes every firm's certificate demand at its assigned price and
/// returns sum(delta) - cap.
double oracle_clearing_residual(const ClearingResult& result, const Portfolio& portfolio,
                                const EmissionModel& model);

}  // namespace carbonprice
