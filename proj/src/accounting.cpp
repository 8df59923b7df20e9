#include "carbonprice/accounting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carbonprice/errors.hpp"
#include "carbonprice/numeric.hpp"

namespace carbonprice {

const char* to_string(Scheme s) {
    switch (s) {
        case Scheme::bau: return "bau";
        case Scheme::tax: return "tax";
        case Scheme::spot: return "spot";
        case Scheme::intermediated: return "intermediated";
        case Scheme::hybrid: return "hybrid";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& name) {
    for (Scheme s : {Scheme::bau, Scheme::tax, Scheme::spot, Scheme::intermediated, Scheme::hybrid})
        if (name == to_string(s)) return s;
    throw DomainError("unknown scheme '" + name + "' (expected bau, tax, spot, intermediated or hybrid)");
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::gains: return "gains";
        case Verdict::loses: return "loses";
        case Verdict::neutral: return "neutral";
    }
    return "?";
}

double calibrate_tau(const Portfolio& portfolio, double cap) {
    if (portfolio.empty()) throw DomainError("portfolio is empty");
    double e = 0.0, rho = 0.0;
    for (const auto& p : portfolio) {
        p.validate();
        e += p.e_bau();
        rho += p.rho();
    }
    if (!(cap > 0.0) || cap > e) {
        std::ostringstream msg;
        msg << "cap " << cap << " must lie in (0, E_bau = " << e << "]";
        throw DomainError(msg.str());
    }
    const double tau = (e - cap) / rho;
    std::ostringstream bad;
    for (const auto& p : portfolio)
        if (!check_feasibility(p, tau, PricingMode::tax).ok) bad << " " << p.label;
    if (!bad.str().empty()) {
        std::ostringstream msg;
        msg << "calibrated tax " << tau << " is infeasible for:" << bad.str();
        throw InfeasibleError("tau*rho < E_bau", msg.str());
    }
    return tau;
}

std::vector<double> intermediary_wealth_detailed(const ClearingResult& clearing) {
    std::vector<double> w(clearing.demands.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = clearing.demands[i] * (clearing.effective_prices[i] - clearing.spot);
    return w;
}

namespace {

// Firm outcome at the price a cleared market assigns to it. A price capped at
// the penalty is treated as a tax at that rate.
CompanyOutcome outcome_in_market(const CompanyParams& p, double price, double penalty,
                                 const EmissionDistribution& dist) {
    if (dist.is_degenerate()) {
        if (price < penalty) return market_optimum(p, price, penalty);
        CompanyOutcome o = tax_optimum(p, penalty);
        o.delta = o.emissions;
        return o;
    }
    if (price < penalty) return market_optimum_random(p, price, penalty, dist);
    CompanyOutcome o = tax_optimum_random(p, penalty, dist.sigma2());
    o.delta = 0.0;
    return o;
}

AccessProfile access_for(const PolicyConfig& policy, std::size_t n) {
    switch (policy.scheme) {
        case Scheme::spot: return all_direct(n);
        case Scheme::intermediated: return all_intermediated(n);
        case Scheme::hybrid:
            if (policy.access.size() != n) {
                std::ostringstream msg;
                msg << "hybrid scheme needs an access mode for each of the " << n << " firms";
                throw DomainError(msg.str());
            }
            return policy.access;
        default: return {};
    }
}

void finish(SchemeAccounts& a) {
    std::vector<double> wealth, cost, emissions;
    for (const auto& o : a.firms) {
        wealth.push_back(o.wealth);
        cost.push_back(o.green_cost);
        emissions.push_back(o.emissions);
    }
    a.companies_wealth = numeric::pairwise_sum(wealth);
    a.tech_provider_wealth = numeric::pairwise_sum(cost);
    a.total_emissions = numeric::pairwise_sum(emissions);
    a.intermediaries_wealth = numeric::pairwise_sum(a.intermediary_wealth);
    a.gdp = a.companies_wealth + a.intermediaries_wealth + a.regulator_wealth;
    a.gdp_with_tech = a.gdp + a.tech_provider_wealth;
    for (const auto& p : a.portfolio) a.carbon_intensity.push_back(p.carbon_intensity());
}

}  // namespace

SchemeAccounts run_scheme(const Portfolio& portfolio, const PolicyConfig& policy,
                          const EmissionModel& model) {
    if (portfolio.empty()) throw DomainError("portfolio is empty");
    for (const auto& p : portfolio) p.validate();

    SchemeAccounts a;
    a.scheme = policy.scheme;
    a.stochastic = model.stochastic();
    a.portfolio = portfolio;
    a.cap = policy.cap;
    const double sigma2 = model.dist.sigma2();

    if (policy.scheme == Scheme::bau) {
        for (const auto& p : portfolio) a.firms.push_back(bau_outcome(p));
        finish(a);
        return a;
    }
    if (!(policy.cap > 0.0)) throw DomainError("policy cap A must be > 0");

    if (a.stochastic) a.a_hat = policy.resolved_a_hat();

    if (policy.scheme == Scheme::tax) {
        double tau = 0.0;
        if (policy.tau) {
            tau = *policy.tau;
        } else {
            tau = a.stochastic ? calibrate_tau_random(portfolio, a.a_hat, sigma2)
                               : calibrate_tau(portfolio, policy.cap);
        }
        a.tau = tau;
        for (const auto& p : portfolio)
            a.firms.push_back(a.stochastic ? tax_optimum_random(p, tau, sigma2) : tax_optimum(p, tau));
        std::vector<double> e;
        for (const auto& o : a.firms) e.push_back(o.emissions);
        a.regulator_wealth = tau * numeric::pairwise_sum(e);
        finish(a);
        return a;
    }

    const AccessProfile access = access_for(policy, portfolio.size());
    ClearingResult clearing;
    if (!a.stochastic) {
        double penalty = 0.0;
        if (policy.penalty) {
            penalty = *policy.penalty;
        } else {
            const auto choice = default_penalty(portfolio, policy.cap, access);
            penalty = choice.penalty;
            a.notes.push_back(choice.note);
        }
        clearing = equilibrium_spot(portfolio, policy.cap, penalty, access);
        a.regulator_wealth = clearing.spot * policy.cap;
    } else {
        RandomClearingProblem problem{portfolio, policy.cap, a.a_hat, 0.0, model.dist, access};
        if (policy.penalty) {
            problem.penalty = *policy.penalty;
            clearing = equilibrium_spot_random(problem);
        } else {
            auto cal = calibrate_lambda(problem);
            clearing = std::move(cal.clearing);
            std::ostringstream note;
            note << "penalty calibrated to expected emissions " << a.a_hat << ": " << cal.penalty
                 << (cal.closed_form ? " (closed form)" : " (root-found)");
            a.notes.push_back(note.str());
        }
        a.regulator_wealth =
            regulator_wealth_random(clearing, clearing.penalty, model.dist, policy.cap);
    }
    a.penalty = clearing.penalty;
    a.spot = clearing.spot;
    for (std::size_t i = 0; i < portfolio.size(); ++i)
        a.firms.push_back(outcome_in_market(portfolio[i], clearing.effective_prices[i],
                                            clearing.penalty, model.dist));
    if (std::any_of(access.begin(), access.end(),
                    [](Access x) { return x == Access::intermediated; }))
        a.intermediary_wealth = intermediary_wealth_detailed(clearing);
    for (const auto& w : clearing.warnings) a.notes.push_back(w);
    a.clearing = std::move(clearing);
    finish(a);
    return a;
}

namespace {

bool same_portfolio(const Portfolio& x, const Portfolio& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i].id != y[i].id || x[i].pi0 != y[i].pi0 || x[i].pi1 != y[i].pi1 ||
            x[i].gamma != y[i].gamma)
            return false;
    return true;
}

Verdict classify_gain(double lhs, double rhs) {
    const double band = 1e-9 * std::abs(rhs);
    if (lhs < rhs - band) return Verdict::gains;
    if (lhs > rhs + band) return Verdict::loses;
    return Verdict::neutral;
}

bool is_market(Scheme s) {
    return s == Scheme::spot || s == Scheme::intermediated || s == Scheme::hybrid;
}

}  // namespace

ComparisonReport compare_pair(const SchemeAccounts& base, const SchemeAccounts& other) {
    if (!same_portfolio(base.portfolio, other.portfolio))
        throw DomainError("comparison: accounts were computed for different portfolios");
    if (base.stochastic != other.stochastic)
        throw DomainError("comparison: mixing deterministic and stochastic accounts");
    if (base.scheme != Scheme::bau && other.scheme != Scheme::bau && base.cap != other.cap)
        throw DomainError("comparison: accounts use different caps");

    ComparisonReport r;
    r.base = base.scheme;
    r.other = other.scheme;
    r.stochastic = base.stochastic;
    r.gdp_delta = other.gdp - base.gdp;
    r.gdp_with_tech_delta = other.gdp_with_tech - base.gdp_with_tech;
    r.companies_delta = other.companies_wealth - base.companies_wealth;
    r.regulator_delta = other.regulator_wealth - base.regulator_wealth;
    r.intermediaries_delta = other.intermediaries_wealth - base.intermediaries_wealth;
    r.tech_delta = other.tech_provider_wealth - base.tech_provider_wealth;
    r.emissions_delta = other.total_emissions - base.total_emissions;
    const std::size_t n = base.firms.size();
    for (std::size_t i = 0; i < n; ++i)
        r.firm_wealth_delta.push_back(other.firms[i].wealth - base.firms[i].wealth);

    if (base.scheme != Scheme::tax || !is_market(other.scheme) || !other.clearing) return r;
    const auto& c = *other.clearing;
    const auto& pf = base.portfolio;

    double rho = 0.0;
    for (const auto& p : pf) rho += p.rho();
    double e_b = 0.0, e_b2 = 0.0;
    bool interior = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (c.corner_flags[i] != Corner::interior) interior = false;
        if (c.access[i] == Access::intermediated) {
            e_b += other.firms[i].emissions;
            e_b2 += other.firms[i].emissions * other.firms[i].emissions / pf[i].rho();
        }
    }
    if (!base.stochastic && interior) {
        r.jensen_gap = 0.5 * (e_b * e_b / rho - e_b2);
        r.regulator_gap = -other.cap * e_b / rho;
    }

    for (std::size_t i = 0; i < n; ++i) {
        WinnerRow w;
        w.label = pf[i].label;
        if (base.stochastic) {
            // Production reveals the rate the firm acted on: q = (pi0 - T) / pi1.
            w.lhs = pf[i].pi0 - pf[i].pi1 * other.firms[i].q;
            w.rhs = base.tau.value_or(0.0);
        } else {
            w.lhs = c.access[i] == Access::intermediated ? other.firms[i].emissions / pf[i].rho() : 0.0;
            w.rhs = e_b / rho;
        }
        w.predicted = classify_gain(w.lhs, w.rhs);
        w.wealth_delta = r.firm_wealth_delta[i];
        const double band = 1e-9 * std::abs(base.firms[i].wealth);
        w.observed = w.wealth_delta > band    ? Verdict::gains
                     : w.wealth_delta < -band ? Verdict::loses
                                              : Verdict::neutral;
        r.winners.push_back(std::move(w));
    }
    return r;
}

std::vector<ComparisonReport> compare_schemes(const std::vector<SchemeAccounts>& accounts) {
    if (accounts.size() < 2) throw DomainError("comparison needs at least two accounts");
    std::vector<ComparisonReport> out;
    for (std::size_t k = 1; k < accounts.size(); ++k) out.push_back(compare_pair(accounts[0], accounts[k]));
    return out;
}

}  // namespace carbonprice
