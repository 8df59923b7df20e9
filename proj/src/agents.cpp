#include "carbonprice/agents.hpp"

#include <sstream>

#include "carbonprice/errors.hpp"

namespace carbonprice {

void CompanyParams::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(pi0) || !positive(pi1) || !positive(gamma)) {
        std::ostringstream msg;
        msg << "company '" << (label.empty() ? id : label)
            << "': pi0, pi1 and gamma must be finite and > 0 (got " << pi0 << ", " << pi1 << ", "
            << gamma << ")";
        throw DomainError(msg.str());
    }
}

FeasibilityReport check_feasibility(const CompanyParams& p, double rate, PricingMode mode,
                                    double sigma2) {
    const char* name = mode == PricingMode::tax ? "tax" : "penalty";
    FeasibilityReport r;
    r.slack = p.e_bau() - rate * p.rho_hat(sigma2);
    std::ostringstream why;
    if (!(rate >= 0.0)) {
        r.ok = false;
        why << name << " rate must be >= 0";
    } else if (!(r.slack > 0.0)) {
        r.ok = false;
        why << name << " rate " << rate << " violates rate*rho < E_bau (slack " << r.slack << ")";
    } else if (!(rate < p.pi0)) {
        r.ok = false;
        why << name << " rate " << rate << " is not below pi0 = " << p.pi0;
    }
    r.reason = why.str();
    return r;
}

namespace {

void require_feasible(const CompanyParams& p, double rate, PricingMode mode, double sigma2) {
    const auto report = check_feasibility(p, rate, mode, sigma2);
    if (!report.ok) {
        throw InfeasibleError(mode == PricingMode::tax ? "rate*rho < E_bau" : "penalty*rho < E_bau",
                              "company '" + p.label + "': " + report.reason);
    }
}

// Optimum of pi(q) - (g/2)((1-f)q)^2 - rate*f*q with g = gamma*sigma2.
CompanyOutcome taxed_outcome(const CompanyParams& p, double rate, double sigma2) {
    const double rho = p.rho_hat(sigma2);
    CompanyOutcome o;
    o.q = (p.pi0 - rate) / p.pi1;
    o.emissions = p.e_bau() - rate * rho;
    o.abatement_factor = o.emissions / o.q;
    o.wealth = p.w_bau() - rate * (p.e_bau() - 0.5 * rate * rho);
    o.green_cost = green_cost(p, o.q, o.abatement_factor, sigma2);
    o.carbon_price = rate;
    return o;
}

void require_price_below_penalty(double price, double penalty) {
    if (!(price > 0.0) || !(price < penalty)) {
        std::ostringstream msg;
        msg << "market price must satisfy 0 < price < penalty (price " << price << ", penalty "
            << penalty << ")";
        throw DomainError(msg.str());
    }
}

}  // namespace

CompanyOutcome bau_outcome(const CompanyParams& p) {
    p.validate();
    CompanyOutcome o;
    o.q = p.q_bau();
    o.abatement_factor = 1.0;
    o.emissions = p.e_bau();
    o.wealth = p.w_bau();
    return o;
}

CompanyOutcome tax_optimum(const CompanyParams& p, double tau) {
    p.validate();
    require_feasible(p, tau, PricingMode::tax, 1.0);
    return taxed_outcome(p, tau, 1.0);
}

CompanyOutcome market_optimum(const CompanyParams& p, double price, double penalty) {
    p.validate();
    require_price_below_penalty(price, penalty);
    require_feasible(p, penalty, PricingMode::market, 1.0);
    CompanyOutcome o = taxed_outcome(p, price, 1.0);
    o.delta = o.emissions;
    return o;
}

CompanyOutcome tax_optimum_random(const CompanyParams& p, double tau, double sigma2) {
    p.validate();
    if (!(sigma2 >= 1.0)) throw DomainError("second moment sigma2 must be >= 1");
    require_feasible(p, tau, PricingMode::tax, sigma2);
    return taxed_outcome(p, tau, sigma2);
}

double effective_rate(double price, double penalty, const EmissionDistribution& dist) {
    return price * dist.es(price / penalty);
}

MarketResponse market_response_random(const CompanyParams& p, double price, double penalty,
                                      const EmissionDistribution& dist) {
    const double eps = price / penalty;
    MarketResponse r;
    r.effective_rate = price * dist.es(eps);
    r.var = dist.var(eps);
    r.emissions = p.e_bau() - r.effective_rate * p.rho_hat(dist.sigma2());
    r.delta = r.var * r.emissions;
    return r;
}

CompanyOutcome market_optimum_random(const CompanyParams& p, double price, double penalty,
                                     const EmissionDistribution& dist) {
    p.validate();
    require_price_below_penalty(price, penalty);
    const double sigma2 = dist.sigma2();
    const double rate = effective_rate(price, penalty, dist);
    // The firm's problem is a tax problem at the effective rate; feasibility is
    // checked there rather than at the penalty.
    require_feasible(p, rate, PricingMode::market, sigma2);
    CompanyOutcome o = taxed_outcome(p, rate, sigma2);
    o.delta = dist.var(price / penalty) * o.emissions;
    o.carbon_price = price;
    return o;
}

double demand_derivative_random(const CompanyParams& p, double price, double penalty,
                                const EmissionDistribution& dist) {
    p.validate();
    require_price_below_penalty(price, penalty);
    if (dist.is_degenerate()) return -p.rho();

    const auto r = market_response_random(p, price, penalty, dist);
    const double slope = dist.survival_derivative(r.var);
    if (slope == 0.0 || !std::isfinite(slope)) {
        std::ostringstream msg;
        msg << "demand derivative: survival density vanishes at VaR = " << r.var << " (price "
            << price << ", penalty " << penalty << ")";
        throw SolverError(msg.str());
    }
    return r.emissions / (penalty * slope) - p.rho_hat(dist.sigma2()) * r.var * r.var;
}

double green_cost(const CompanyParams& p, double q, double abatement_factor, double sigma2) {
    const double abated = (1.0 - abatement_factor) * q;
    return 0.5 * p.gamma * sigma2 * abated * abated;
}

}  // namespace carbonprice
