#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

#include "carbonprice/accounting.hpp"
#include "carbonprice/scenario.hpp"

namespace fixtures {

using carbonprice::CompanyParams;
using carbonprice::Portfolio;

/// Six-firm reference economy of the bundled scenario, in euros and tons.
inline Portfolio reference() { return carbonprice::load_scenario("reference").portfolio(); }

inline CompanyParams firm(const std::string& id, double pi0, double pi1, double gamma) {
    CompanyParams p;
    p.id = p.label = id;
    p.pi0 = pi0;
    p.pi1 = pi1;
    p.gamma = gamma;
    return p;
}

/// Firm with E_bau / rho = ratio and the given quadratic coefficients.
inline CompanyParams firm_with_ratio(const std::string& id, double ratio, double pi1, double gamma) {
    const double rho = 1.0 / pi1 + 1.0 / gamma;
    return firm(id, ratio * pi1 * rho, pi1, gamma);
}

/// Draws firms with E_bau / rho in [400, 560], pi1 in [1, 5]e-6 and gamma in
/// [3, 30]e-6, matching the scale of the reference economy.
inline Portfolio random_portfolio(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> ratio(400.0, 560.0);
    std::uniform_real_distribution<double> pi1(1e-6, 5e-6);
    std::uniform_real_distribution<double> gamma(3e-6, 30e-6);
    Portfolio pf;
    for (std::size_t i = 0; i < n; ++i)
        pf.push_back(firm_with_ratio("F" + std::to_string(i + 1), ratio(rng), pi1(rng), gamma(rng)));
    return pf;
}

inline double total_bau(const Portfolio& pf) {
    double e = 0.0;
    for (const auto& p : pf) e += p.e_bau();
    return e;
}

inline double total_rho(const Portfolio& pf) {
    double r = 0.0;
    for (const auto& p : pf) r += p.rho();
    return r;
}

struct Economy {
    Portfolio portfolio;
    double cap = 0.0;
};

/// Redraws until `accept` holds; every instance is a pure function of the seed.
inline Economy random_economy(std::mt19937_64& rng, std::size_t min_firms, std::size_t max_firms,
                              double min_fraction, double max_fraction,
                              const std::function<bool(const Economy&)>& accept) {
    std::uniform_int_distribution<std::size_t> count(min_firms, max_firms);
    std::uniform_real_distribution<double> fraction(min_fraction, max_fraction);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Economy e;
        e.portfolio = random_portfolio(rng, count(rng));
        e.cap = fraction(rng) * total_bau(e.portfolio);
        if (accept(e)) return e;
    }
    throw std::runtime_error("random_economy: no acceptable draw");
}

/// True when every scheme in `schemes` solves without throwing.
inline bool solvable(const Economy& e, const carbonprice::EmissionModel& model,
                     std::initializer_list<carbonprice::Scheme> schemes) {
    try {
        for (auto s : schemes) {
            carbonprice::PolicyConfig policy;
            policy.scheme = s;
            policy.cap = e.cap;
            carbonprice::run_scheme(e.portfolio, policy, model);
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

/// Runs one scheme on the economy with default calibration.
inline carbonprice::SchemeAccounts run(const Economy& e, carbonprice::Scheme scheme,
                                       const carbonprice::EmissionModel& model) {
    carbonprice::PolicyConfig policy;
    policy.scheme = scheme;
    policy.cap = e.cap;
    return carbonprice::run_scheme(e.portfolio, policy, model);
}

inline double rel_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace fixtures
