#include "carbonprice/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carbonprice/errors.hpp"
#include "carbonprice/numeric.hpp"

namespace carbonprice {

void OracleConfig::validate() const {
    std::ostringstream msg;
    if (grid_points < 51) msg << "grid_points must be >= 51; ";
    if (refinement_rounds < 1) msg << "refinement_rounds must be >= 1; ";
    if (price_grid_points < 2) msg << "price_grid_points must be >= 2; ";
    if (mc_paths < 10000) msg << "mc_paths must be >= 10000; ";
    if (!(tolerance > 0.0)) msg << "tolerance must be > 0; ";
    if (!msg.str().empty()) throw DomainError("oracle config: " + msg.str());
}

namespace {

// Sample statistics that make the expected objective exact for a given sample.
struct Moments {
    double m1 = 1.0;
    double m2 = 1.0;
    // mean of (X - var)^+, market only
    double excess = 0.0;
    double var = 1.0;
};

struct Objective {
    const CompanyParams& p;
    Pricing pricing;
    Moments mom;

    // Expected wealth at production q and abatement factor f.
    double operator()(double q, double f) const {
        const double raw = p.pi0 * q - 0.5 * p.pi1 * q * q;
        const double abated = (1.0 - f) * q;
        const double cost = 0.5 * p.gamma * mom.m2 * abated * abated;
        if (pricing.mode == PricingMode::tax) return raw - cost - pricing.rate * f * q * mom.m1;
        const double delta = f * q * mom.var;
        return raw - cost - pricing.rate * delta - pricing.penalty * f * q * mom.excess;
    }

    // Same objective on a single path X = x.
    double path(double q, double f, double x) const {
        const double raw = p.pi0 * q - 0.5 * p.pi1 * q * q;
        const double abated = (1.0 - f) * q * x;
        const double cost = 0.5 * p.gamma * abated * abated;
        if (pricing.mode == PricingMode::tax) return raw - cost - pricing.rate * f * q * x;
        const double delta = f * q * mom.var;
        return raw - cost - pricing.rate * delta -
               pricing.penalty * std::max(f * q * x - delta, 0.0);
    }
};

struct GridBest {
    double q, f, value;
};

GridBest scan(const Objective& obj, double q_lo, double q_hi, double f_lo, double f_hi, int n) {
    GridBest best{q_lo, f_lo, -std::numeric_limits<double>::infinity()};
    const double dq = (q_hi - q_lo) / (n - 1);
    const double df = (f_hi - f_lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double q = q_lo + i * dq;
        for (int j = 0; j < n; ++j) {
            const double f = f_lo + j * df;
            const double v = obj(q, f);
            if (v > best.value) best = {q, f, v};
        }
    }
    return best;
}

Moments moments_from(const Sample& sample, const Pricing& pricing, const EmissionModel& model) {
    Moments m;
    m.m1 = sample.mean();
    m.m2 = sample.second_moment();
    if (pricing.mode == PricingMode::market) {
        m.var = model.dist.var(pricing.rate / pricing.penalty);
        std::vector<double> ex(sample.values().begin(), sample.values().end());
        for (double& x : ex) x = std::max(x - m.var, 0.0);
        m.excess = numeric::pairwise_sum(ex) / static_cast<double>(ex.size());
    }
    return m;
}

void require_pricing(const Pricing& pricing) {
    if (pricing.mode == PricingMode::market &&
        (!(pricing.rate > 0.0) || !(pricing.rate < pricing.penalty)))
        throw DomainError("oracle: market pricing needs 0 < price < penalty");
    if (!(pricing.rate >= 0.0)) throw DomainError("oracle: rate must be >= 0");
}

OracleOutcome optimize(const CompanyParams& p, const Pricing& pricing, const Moments& mom,
                       const OracleConfig& cfg) {
    const Objective obj{p, pricing, mom};
    const int n = cfg.grid_points;
    double q_lo = 0.0, q_hi = 1.2 * p.q_bau(), f_lo = 0.0, f_hi = 1.0;

    OracleOutcome out;
    GridBest best = scan(obj, q_lo, q_hi, f_lo, f_hi, n);
    out.round_wealth.push_back(best.value);
    double dq = (q_hi - q_lo) / (n - 1);
    double df = (f_hi - f_lo) / (n - 1);
    for (int r = 0; r < cfg.refinement_rounds; ++r) {
        const double zq_lo = std::max(0.0, best.q - 4.0 * dq);
        const double zq_hi = std::min(1.2 * p.q_bau(), best.q + 4.0 * dq);
        const double zf_lo = std::max(0.0, best.f - 4.0 * df);
        const double zf_hi = std::min(1.0, best.f + 4.0 * df);
        const GridBest cand = scan(obj, zq_lo, zq_hi, zf_lo, zf_hi, n);
        if (cand.value > best.value) best = cand;
        dq = (zq_hi - zq_lo) / (n - 1);
        df = (zf_hi - zf_lo) / (n - 1);
        out.round_wealth.push_back(best.value);
    }
    out.q_step = dq;
    out.f_step = df;

    CompanyOutcome& o = out.outcome;
    o.q = best.q;
    o.abatement_factor = best.f;
    o.emissions = best.f * best.q;
    o.wealth = best.value;
    o.green_cost = green_cost(p, best.q, best.f, mom.m2);
    o.carbon_price = pricing.rate;
    o.delta = pricing.mode == PricingMode::market ? o.emissions * mom.var : 0.0;
    return out;
}

}  // namespace

OracleOutcome oracle_firm_optimum(const CompanyParams& p, const Pricing& pricing,
                                  const EmissionModel& model, const OracleConfig& cfg) {
    if (!model.stochastic()) {
        cfg.validate();
        p.validate();
        require_pricing(pricing);
        return optimize(p, pricing, Moments{}, cfg);
    }
    const Sample sample = mc_sample(model.dist, cfg.mc_paths, cfg.mc_seed, cfg.threads);
    return oracle_firm_optimum(p, pricing, model, cfg, sample);
}

OracleOutcome oracle_firm_optimum(const CompanyParams& p, const Pricing& pricing,
                                  const EmissionModel& model, const OracleConfig& cfg,
                                  const Sample& sample) {
    cfg.validate();
    p.validate();
    require_pricing(pricing);
    if (!model.stochastic()) return optimize(p, pricing, Moments{}, cfg);
    if (sample.size() < 2) throw DomainError("oracle: sample too small");

    const Moments mom = moments_from(sample, pricing, model);
    OracleOutcome out = optimize(p, pricing, mom, cfg);

    const Objective obj{p, pricing, mom};
    const double q = out.outcome.q, f = out.outcome.abatement_factor;
    std::vector<double> w(sample.size());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = obj.path(q, f, sample[k]);
    const double mean = numeric::pairwise_sum(w) / static_cast<double>(w.size());
    for (double& x : w) x = (x - mean) * (x - mean);
    const double variance = numeric::pairwise_sum(w) / static_cast<double>(w.size() - 1);
    out.wealth_se = std::sqrt(variance / static_cast<double>(w.size()));
    return out;
}

double oracle_intermediary_price(const CompanyParams& p, double spot, double penalty,
                                 const EmissionModel& model, const OracleConfig& cfg) {
    cfg.validate();
    p.validate();
    if (!(spot > 0.0) || !(spot <= penalty))
        throw DomainError("oracle: intermediary price needs 0 < spot <= penalty");
    const int n = cfg.price_grid_points;
    const double step = (penalty - spot) / (n - 1);
    double best_price = spot;
    double best_value = 0.0;
    for (int k = 0; k < n; ++k) {
        const double price = k == n - 1 ? penalty : spot + k * step;
        double delta = 0.0;
        if (!model.stochastic()) {
            delta = p.e_bau() - price * p.rho();
        } else {
            delta = market_response_random(p, price, penalty, model.dist).delta;
        }
        const double value = std::max(delta, 0.0) * (price - spot);
        if (value > best_value) {
            best_value = value;
            best_price = price;
        }
    }
    return best_price;
}

double oracle_clearing_residual(const ClearingResult& result, const Portfolio& portfolio,
                                const EmissionModel& model) {
    if (result.effective_prices.size() != portfolio.size())
        throw DomainError("oracle: clearing result does not match the portfolio");
    std::vector<double> d(portfolio.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& p = portfolio[i];
        const double price = result.effective_prices[i];
        if (!model.stochastic()) {
            d[i] = std::max(p.e_bau() - price * p.rho(), 0.0);
        } else {
            d[i] = std::max(market_response_random(p, price, result.penalty, model.dist).delta, 0.0);
        }
    }
    return numeric::pairwise_sum(d) - result.cap;
}

}  // namespace carbonprice
