#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "carbonprice/oracle.hpp"
#include "fixtures.hpp"

using namespace carbonprice;
using fixtures::rel_gap;

namespace {

const auto kDet = EmissionModel::deterministic();

fixtures::Economy draw(std::mt19937_64& rng, const EmissionModel& model, std::initializer_list<Scheme> schemes) {
    return fixtures::random_economy(rng, 3, 20, 0.3, 0.7, [&](const fixtures::Economy& e) {
        return fixtures::solvable(e, model, schemes);
    });
}

}  // namespace

TEST_CASE("tax and spot market coincide on random economies", "[property]") {
    std::mt19937_64 rng(11);
    for (const auto& model : {kDet, EmissionModel::lognormal(1.0)}) {
        for (int k = 0; k < 20; ++k) {
            const auto e = draw(rng, model, {Scheme::tax, Scheme::spot});
            const auto tax = fixtures::run(e, Scheme::tax, model);
            const auto spot = fixtures::run(e, Scheme::spot, model);
            for (std::size_t i = 0; i < tax.firms.size(); ++i) {
                CHECK(rel_gap(tax.firms[i].wealth, spot.firms[i].wealth) <= 1e-9);
                CHECK(rel_gap(tax.firms[i].emissions, spot.firms[i].emissions) <= 1e-9);
            }
        }
    }
}

TEST_CASE("intermediated regulator identity and Jensen gap", "[property]") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 40; ++k) {
        const auto e = draw(rng, kDet, {Scheme::tax, Scheme::intermediated});
        const auto tax = fixtures::run(e, Scheme::tax, kDet);
        const auto mar = fixtures::run(e, Scheme::intermediated, kDet);
        const double rho = fixtures::total_rho(e.portfolio);
        const double identity = *tax.tau * e.cap - e.cap * e.cap / rho;
        CHECK(rel_gap(mar.regulator_wealth, identity) <= 1e-9);
        CHECK(mar.gdp <= tax.gdp);
        CHECK(mar.companies_wealth <= tax.companies_wealth);
        const auto r = compare_pair(tax, mar);
        REQUIRE(r.jensen_gap);
        CHECK(std::abs(r.gdp_delta - *r.jensen_gap) <= 1e-9 * tax.gdp);
        for (const auto& w : r.winners)
            if (w.observed != Verdict::neutral) CHECK(w.predicted == w.observed);
    }
}

TEST_CASE("firm closed forms dominate the grid oracle", "[property][oracle]") {
    std::mt19937_64 rng(13);
    OracleConfig cfg;
    for (int k = 0; k < 20; ++k) {
        const auto p = fixtures::random_portfolio(rng, 1)[0];
        std::uniform_real_distribution<double> frac(0.05, 0.95);
        const double tau = frac(rng) * p.e_bau() / p.rho();
        const auto o = oracle_firm_optimum(p, Pricing::tax(tau), kDet, cfg);
        const double closed = tax_optimum(p, tau).wealth;
        CHECK(o.outcome.wealth <= closed * (1.0 + 1e-12));
        CHECK(closed - o.outcome.wealth <= 1e-6 * std::abs(closed));
    }
}
