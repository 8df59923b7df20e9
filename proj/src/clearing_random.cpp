#include "carbonprice/clearing_random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "carbonprice/errors.hpp"
#include "carbonprice/numeric.hpp"

namespace carbonprice {

void RandomClearingProblem::validate(bool need_penalty) const {
    if (portfolio.empty()) throw DomainError("portfolio is empty");
    if (access.size() != portfolio.size()) throw DomainError("access profile size mismatch");
    for (const auto& p : portfolio) p.validate();
    if (!(cap > 0.0)) throw DomainError("cap A must be > 0");
    if (!(a_hat > cap)) {
        std::ostringstream msg;
        msg << "expected emissions target " << a_hat << " must exceed the cap " << cap;
        throw DomainError(msg.str());
    }
    if (need_penalty && !(penalty > 0.0)) throw DomainError("penalty must be > 0");
}

double zero_emission_price(const CompanyParams& p, double penalty, const EmissionDistribution& dist) {
    const double rho_hat = p.rho_hat(dist.sigma2());
    if (penalty * rho_hat < p.e_bau()) return penalty;
    // P * ES_{P/penalty} increases with P, so the root is unique.
    auto g = [&](double price) {
        return p.e_bau() - price * dist.es(price / penalty) * rho_hat;
    };
    return numeric::bisect(g, penalty * 1e-300, penalty, 0.0, 2000).root;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// FOC residual with the G' = 0 singularity mapped to -infinity.
double foc(const CompanyParams& p, double price, double spot, double penalty,
           const EmissionDistribution& dist) {
    const auto r = market_response_random(p, price, penalty, dist);
    if (!(r.var > 0.0)) return -kInf;
    const double slope = dist.survival_derivative(r.var);
    if (slope == 0.0) return -kInf;
    const double rho_hat = p.rho_hat(dist.sigma2());
    const double deriv = r.emissions / (penalty * slope) - rho_hat * r.var * r.var;
    return deriv * (price - spot) + r.delta;
}

struct FirmState {
    double price;
    double demand;
    double emissions;
    Corner corner;
};

FirmState respond(const CompanyParams& p, Access access, double spot, double penalty,
                  const EmissionDistribution& dist) {
    const double price = access == Access::direct ? spot
                                                  : intermediated_price_random(p, spot, penalty, dist);
    const auto r = market_response_random(p, price, penalty, dist);
    FirmState s{price, r.delta, r.emissions, Corner::interior};
    if (r.emissions <= 0.0) {
        s.demand = 0.0;
        s.emissions = 0.0;
        s.corner = Corner::zero_demand;
    } else if (price >= penalty) {
        s.corner = Corner::price_capped_at_penalty;
    }
    return s;
}

}  // namespace

double foc_residual(const CompanyParams& p, double price, double spot, double penalty,
                    const EmissionDistribution& dist) {
    return foc(p, price, spot, penalty, dist);
}

double intermediated_price_random(const CompanyParams& p, double spot, double penalty,
                                  const EmissionDistribution& dist) {
    p.validate();
    if (!(spot > 0.0) || spot > penalty) {
        std::ostringstream msg;
        msg << "intermediated price: need 0 < spot <= penalty (spot " << spot << ", penalty "
            << penalty << ")";
        throw DomainError(msg.str());
    }
    if (spot == penalty) return penalty;
    if (dist.is_degenerate()) return std::min(0.5 * (spot + p.e_bau() / p.rho()), penalty);

    const double cap = zero_emission_price(p, penalty, dist);
    // The intermediary cannot sell anything once expected emissions vanish.
    if (spot >= cap) return spot;

    const double lo = spot * (1.0 + 1e-12);
    const double hi = cap * (1.0 - 1e-12);
    if (!(lo < hi)) return spot;
    auto h = [&](double price) { return foc(p, price, spot, penalty, dist); };
    const double h_lo = h(lo);
    const double h_hi = h(hi);
    if (!(h_lo > 0.0) || !(h_hi < 0.0)) {
        std::ostringstream msg;
        msg << "intermediated price FOC does not bracket for company '" << p.label << "': h("
            << lo << ") = " << h_lo << ", h(" << hi << ") = " << h_hi << " (spot " << spot
            << ", penalty " << penalty << ", " << dist.describe() << ")";
        throw SolverError(msg.str());
    }
    return numeric::bisect(h, lo, hi, 0.0, 200).root;
}

double aggregate_demand_random(const RandomClearingProblem& problem, double spot) {
    std::vector<double> d(problem.portfolio.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = respond(problem.portfolio[i], problem.access[i], spot, problem.penalty, problem.dist)
                   .demand;
    return numeric::pairwise_sum(d);
}

ClearingResult equilibrium_spot_random(const RandomClearingProblem& problem) {
    problem.validate();
    const double penalty = problem.penalty;
    const double cap = problem.cap;

    const double s_lo = penalty * 1e-12;
    const double d_lo = aggregate_demand_random(problem, s_lo);
    if (!(d_lo > cap)) {
        std::ostringstream msg;
        msg << "cap " << cap << " exceeds the largest clearable demand " << d_lo
            << " (spot -> 0) at penalty " << penalty;
        throw InfeasibleError("A < sum delta(P(0+))", msg.str());
    }
    auto excess = [&](double s) { return aggregate_demand_random(problem, s) - cap; };
    const auto root = numeric::bisect(excess, s_lo, penalty, 0.0, 200);

    ClearingResult r;
    r.spot = root.root;
    r.iterations = root.iterations;
    r.cap = cap;
    r.penalty = penalty;
    r.access = problem.access;
    const std::size_t n = problem.portfolio.size();
    r.effective_prices.resize(n);
    r.demands.resize(n);
    r.emissions.resize(n);
    r.corner_flags.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = respond(problem.portfolio[i], problem.access[i], r.spot, penalty, problem.dist);
        r.effective_prices[i] = s.price;
        r.demands[i] = s.demand;
        r.emissions[i] = s.emissions;
        r.corner_flags[i] = s.corner;
    }
    r.residual = numeric::pairwise_sum(r.demands) - cap;
    if (problem.dist.kind() == EmissionDistribution::Kind::empirical)
        r.warnings.push_back(
            "empirical distribution: VaR and ES are not smooth in the price; intermediated prices "
            "are best-effort");
    if (std::abs(r.residual) > 1e-9 * cap) {
        std::ostringstream msg;
        msg << "clearing residual " << r.residual << " exceeds 1e-9*A";
        r.warnings.push_back(msg.str());
    }
    return r;
}

double calibrate_tau_random(const Portfolio& portfolio, double a_hat, double sigma2) {
    if (portfolio.empty()) throw DomainError("portfolio is empty");
    if (!(sigma2 >= 1.0)) throw DomainError("second moment sigma2 must be >= 1");
    double e = 0.0, rho_hat = 0.0;
    for (const auto& p : portfolio) {
        p.validate();
        e += p.e_bau();
        rho_hat += p.rho_hat(sigma2);
    }
    if (!(a_hat > 0.0) || a_hat > e) {
        std::ostringstream msg;
        msg << "expected emissions target " << a_hat << " must lie in (0, E_bau = " << e << "]";
        throw DomainError(msg.str());
    }
    return (e - a_hat) / rho_hat;
}

double spot_penalty_closed_form(const Portfolio& portfolio, double cap, double a_hat,
                                const EmissionDistribution& dist) {
    if (!(a_hat > cap) || !(cap > 0.0)) throw DomainError("need 0 < A < A_hat");
    if (dist.is_degenerate())
        throw DomainError("spot penalty closed form needs a non-degenerate distribution");
    const double tau = calibrate_tau_random(portfolio, a_hat, dist.sigma2());
    const double eps = dist.survival(cap / a_hat);
    return tau / (eps * dist.es(eps));
}

namespace {

double total_emissions(const ClearingResult& r) { return numeric::pairwise_sum(r.emissions); }

}  // namespace

PenaltyCalibration calibrate_lambda(const RandomClearingProblem& problem) {
    problem.validate(false);
    const double lambda0 = spot_penalty_closed_form(problem.portfolio, problem.cap, problem.a_hat,
                                                    problem.dist);
    RandomClearingProblem work = problem;

    auto solve_at = [&](double penalty) {
        work.penalty = penalty;
        return equilibrium_spot_random(work);
    };

    const bool all_direct_access =
        std::all_of(problem.access.begin(), problem.access.end(),
                    [](Access a) { return a == Access::direct; });
    PenaltyCalibration out;
    if (all_direct_access && problem.dist.is_smooth()) {
        out.penalty = lambda0;
        out.clearing = solve_at(lambda0);
        out.expected_emissions = total_emissions(out.clearing);
        out.closed_form = true;
        return out;
    }

    int evaluations = 0;
    // Excess expected emissions as a function of log(penalty); decreasing.
    auto f = [&](double log_penalty) {
        ++evaluations;
        return total_emissions(solve_at(std::exp(log_penalty))) - problem.a_hat;
    };
    auto try_f = [&](double log_penalty, double& value) {
        try {
            value = f(log_penalty);
            return true;
        } catch (const InfeasibleError&) {
            return false;
        }
    };

    const double center = std::log(lambda0);
    double lo = center - std::log(10.0);
    double hi = center + std::log(10.0);
    double f_lo = 0.0, f_hi = 0.0;
    // Pull endpoints toward the estimate while the market cannot clear there.
    for (int k = 0; k < 40 && !try_f(lo, f_lo); ++k) lo = 0.5 * (lo + center);
    for (int k = 0; k < 40 && !try_f(hi, f_hi); ++k) hi = 0.5 * (hi + center);
    for (int k = 0; k < 4 && f_lo < 0.0; ++k) {
        double v = 0.0;
        if (!try_f(lo - std::log(10.0), v)) break;
        lo -= std::log(10.0);
        f_lo = v;
    }
    for (int k = 0; k < 4 && f_hi > 0.0; ++k) {
        double v = 0.0;
        if (!try_f(hi + std::log(10.0), v)) break;
        hi += std::log(10.0);
        f_hi = v;
    }
    if (!(f_lo > 0.0) || !(f_hi < 0.0)) {
        const double a = f_hi + problem.a_hat;
        const double b = f_lo + problem.a_hat;
        std::ostringstream msg;
        msg << "no penalty in [" << std::exp(lo) << ", " << std::exp(hi)
            << "] reaches expected emissions " << problem.a_hat << "; achievable range ["
            << std::min(a, b) << ", " << std::max(a, b) << "]";
        if (f_lo < f_hi) msg << " (emissions not decreasing in the penalty)";
        throw CalibrationError(msg.str(), std::min(a, b), std::max(a, b));
    }

    std::uintmax_t max_iter = 100;
    const auto bracket = boost::math::tools::toms748_solve(
        f, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(50), max_iter);
    out.penalty = std::exp(0.5 * (bracket.first + bracket.second));
    out.clearing = solve_at(out.penalty);
    out.expected_emissions = total_emissions(out.clearing);
    out.iterations = evaluations;
    if (!numeric::close_rel(out.expected_emissions, problem.a_hat, 1e-6)) {
        std::ostringstream msg;
        msg << "penalty calibration stalled at " << out.penalty << " with expected emissions "
            << out.expected_emissions << " vs target " << problem.a_hat;
        throw SolverError(msg.str());
    }
    return out;
}

SymmetricSolution symmetric_intermediated(const CompanyParams& p, std::size_t n, double cap,
                                          double a_hat, const EmissionDistribution& dist) {
    if (n == 0) throw DomainError("symmetric case needs at least one firm");
    if (!dist.is_smooth()) throw DomainError("symmetric closed form needs a lognormal distribution");
    const Portfolio firms(n, p);
    SymmetricSolution s;
    s.penalty = spot_penalty_closed_form(firms, cap, a_hat, dist);
    const double ratio = cap / a_hat;
    const double eps = dist.survival(ratio);
    const double slope = dist.survival_derivative(ratio);
    const double lambda = s.penalty;
    const double denom = lambda * static_cast<double>(n) * p.rho_hat(dist.sigma2()) * ratio * ratio -
                         a_hat / slope;
    s.price = lambda * eps;
    s.spot = s.price - lambda * cap / denom;
    s.intermediary_wealth = lambda * cap * cap / denom;
    return s;
}

double regulator_wealth_random(const ClearingResult& clearing, double penalty,
                               const EmissionDistribution& dist, double cap) {
    std::vector<double> terms(clearing.effective_prices.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const double price = clearing.effective_prices[i];
        const double eps = std::min(price / penalty, 1.0);
        terms[i] = (dist.es(eps) - dist.var(eps)) * price * clearing.emissions[i];
    }
    return numeric::pairwise_sum(terms) + clearing.spot * cap;
}

}  // namespace carbonprice
