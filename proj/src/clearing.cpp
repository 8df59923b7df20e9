#include "carbonprice/clearing.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "carbonprice/errors.hpp"
#include "carbonprice/numeric.hpp"

namespace carbonprice {

AccessProfile all_direct(std::size_t n) { return AccessProfile(n, Access::direct); }
AccessProfile all_intermediated(std::size_t n) { return AccessProfile(n, Access::intermediated); }

const char* to_string(Access a) { return a == Access::direct ? "direct" : "intermediated"; }

const char* to_string(Corner c) {
    switch (c) {
        case Corner::interior: return "interior";
        case Corner::price_capped_at_penalty: return "price_capped_at_penalty";
        case Corner::zero_demand: return "zero_demand";
    }
    return "?";
}

DirectDemand direct_demand(const CompanyParams& p, double spot) {
    const double d = p.e_bau() - spot * p.rho();
    if (d < 0.0) return {0.0, true};
    return {d, false};
}

IntermediatedResponse intermediated_response(const CompanyParams& p, double spot, double penalty) {
    if (!(spot > 0.0)) throw DomainError("intermediated response: spot must be > 0");
    if (spot > penalty) {
        std::ostringstream msg;
        msg << "intermediated response: spot " << spot << " exceeds penalty " << penalty;
        throw DomainError(msg.str());
    }
    const double rho = p.rho();
    const double preferred = 0.5 * (spot + p.e_bau() / rho);
    IntermediatedResponse r;
    if (preferred > penalty) {
        r.price = penalty;
        r.capped = true;
    } else {
        r.price = preferred;
    }
    r.demand = std::max(p.e_bau() - r.price * rho, 0.0);
    return r;
}

namespace {

void require_sizes(const Portfolio& portfolio, const AccessProfile& access) {
    if (portfolio.empty()) throw DomainError("portfolio is empty");
    if (access.size() != portfolio.size()) {
        std::ostringstream msg;
        msg << "access profile has " << access.size() << " entries for " << portfolio.size()
            << " firms";
        throw DomainError(msg.str());
    }
}

// Demand of firm i at spot S with the S -> 0 limit handled explicitly.
double demand_at(const CompanyParams& p, double spot, double penalty, Access a) {
    if (a == Access::direct) return direct_demand(p, spot).demand;
    if (spot <= 0.0) {
        const double preferred = 0.5 * p.e_bau() / p.rho();
        return std::max(p.e_bau() - std::min(preferred, penalty) * p.rho(), 0.0);
    }
    return intermediated_response(p, spot, penalty).demand;
}

}  // namespace

double aggregate_demand(const Portfolio& portfolio, double spot, double penalty,
                        const AccessProfile& access) {
    require_sizes(portfolio, access);
    std::vector<double> d(portfolio.size());
    for (std::size_t i = 0; i < portfolio.size(); ++i)
        d[i] = demand_at(portfolio[i], spot, penalty, access[i]);
    return numeric::pairwise_sum(d);
}

FeasibilityWindow feasibility_window(const Portfolio& portfolio, double penalty,
                                     const AccessProfile& access) {
    require_sizes(portfolio, access);
    if (!(penalty > 0.0)) throw DomainError("penalty must be > 0");
    for (const auto& p : portfolio) p.validate();

    FeasibilityWindow w;
    w.a_min = aggregate_demand(portfolio, penalty, penalty, access);
    w.a_max = aggregate_demand(portfolio, 0.0, penalty, access);

    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < portfolio.size(); ++i)
        if (access[i] == Access::intermediated)
            worst_ratio = std::max(worst_ratio, portfolio[i].e_bau() / portfolio[i].rho());
    const double interior_spot = std::min(penalty, 2.0 * penalty - worst_ratio);
    if (interior_spot <= 0.0) {
        w.interior_a_min = w.a_max;
    } else {
        w.interior_a_min = aggregate_demand(portfolio, interior_spot, penalty, access);
    }

    if (!(w.a_min < w.a_max)) {
        std::ostringstream msg;
        msg << "admissible cap window is empty: A_min = " << w.a_min << " >= A_max = " << w.a_max;
        throw InfeasibleError("A_min < A_max", msg.str());
    }
    return w;
}

namespace {

void fill_responses(const Portfolio& portfolio, ClearingResult& r) {
    const std::size_t n = portfolio.size();
    r.effective_prices.assign(n, 0.0);
    r.demands.assign(n, 0.0);
    r.corner_flags.assign(n, Corner::interior);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = portfolio[i];
        if (r.access[i] == Access::direct) {
            const auto d = direct_demand(p, r.spot);
            r.effective_prices[i] = r.spot;
            r.demands[i] = d.demand;
            if (d.clamped) r.corner_flags[i] = Corner::zero_demand;
        } else {
            const auto resp = intermediated_response(p, r.spot, r.penalty);
            r.effective_prices[i] = resp.price;
            r.demands[i] = resp.demand;
            if (resp.capped) r.corner_flags[i] = Corner::price_capped_at_penalty;
            if (resp.demand == 0.0) r.corner_flags[i] = Corner::zero_demand;
        }
    }
    r.emissions = r.demands;
    r.residual = numeric::pairwise_sum(r.demands) - r.cap;
}

}  // namespace

ClearingResult equilibrium_spot(const Portfolio& portfolio, double cap, double penalty,
                                const AccessProfile& access) {
    require_sizes(portfolio, access);
    if (!(cap > 0.0)) throw DomainError("cap A must be > 0");
    for (const auto& p : portfolio) {
        const auto f = check_feasibility(p, penalty, PricingMode::market);
        if (!f.ok)
            throw InfeasibleError("penalty*rho < E_bau", "company '" + p.label + "': " + f.reason);
    }
    const auto w = feasibility_window(portfolio, penalty, access);
    if (cap < w.a_min) {
        std::ostringstream msg;
        msg << "cap " << cap << " is below A_min = " << w.a_min
            << " (demand at spot = penalty already exceeds it)";
        throw InfeasibleError("A >= A_min", msg.str());
    }
    if (cap >= w.a_max) {
        std::ostringstream msg;
        msg << "cap " << cap << " is not below A_max = " << w.a_max;
        throw InfeasibleError("A < A_max", msg.str());
    }

    ClearingResult r;
    r.cap = cap;
    r.penalty = penalty;
    r.access = access;

    if (w.interior(cap)) {
        double e_all = 0.0, rho_all = 0.0, e_b = 0.0, rho_b = 0.0;
        for (std::size_t i = 0; i < portfolio.size(); ++i) {
            e_all += portfolio[i].e_bau();
            rho_all += portfolio[i].rho();
            if (access[i] == Access::intermediated) {
                e_b += portfolio[i].e_bau();
                rho_b += portfolio[i].rho();
            }
        }
        r.spot = (2.0 * (e_all - cap) - e_b) / (2.0 * rho_all - rho_b);
        r.used_closed_form = true;
    } else {
        auto excess = [&](double s) { return aggregate_demand(portfolio, s, penalty, access) - cap; };
        const auto root = numeric::bisect(excess, std::numeric_limits<double>::min(), penalty,
                                          1e-12 * penalty, 200);
        r.spot = root.root;
        r.iterations = root.iterations;
        r.warnings.push_back("cap lies in the corner band; spot found by bisection");
    }
    r.spot = std::min(r.spot, penalty);
    fill_responses(portfolio, r);
    return r;
}

PenaltyChoice default_penalty(const Portfolio& portfolio, double cap, const AccessProfile& access) {
    require_sizes(portfolio, access);
    double e_all = 0.0, rho_all = 0.0, e_b = 0.0, rho_b = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < portfolio.size(); ++i) {
        const auto& p = portfolio[i];
        p.validate();
        const double ratio = p.e_bau() / p.rho();
        upper = std::min(upper, std::min(ratio, p.pi0));
        e_all += p.e_bau();
        rho_all += p.rho();
        if (access[i] == Access::intermediated) {
            e_b += p.e_bau();
            rho_b += p.rho();
            worst_ratio = std::max(worst_ratio, ratio);
        }
    }
    const double spot = (2.0 * (e_all - cap) - e_b) / (2.0 * rho_all - rho_b);
    if (!(spot > 0.0)) {
        std::ostringstream msg;
        msg << "cap " << cap << " is too large for a positive interior spot price";
        throw InfeasibleError("A < A_max", msg.str());
    }

    PenaltyChoice c;
    c.lower = std::max(spot, 0.5 * (spot + worst_ratio));
    c.upper = upper;
    std::ostringstream note;
    if (c.lower < c.upper) {
        c.penalty = 0.5 * (c.lower + c.upper);
        note << "penalty defaulted to the midpoint of the interior range [" << c.lower << ", "
             << c.upper << ")";
    } else {
        c.penalty = c.upper * (1.0 - 1e-9);
        note << "no penalty keeps every intermediated price interior (need >= " << c.lower
             << ", firm feasibility needs < " << c.upper
             << "); using the largest feasible penalty, corner solution";
    }
    c.note = note.str();
    return c;
}

}  // namespace carbonprice
