// Acceptance runner. Prints one PASS/FAIL line per check and a verdict per
// criterion; exits non-zero when any selected criterion fails.
//
//   carbonprice_acceptance            run criteria 1-9
//   carbonprice_acceptance 3 7        run only the listed criteria

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "carbonprice/oracle.hpp"
#include "carbonprice/report.hpp"
#include "carbonprice/scenario.hpp"
#include "fixtures.hpp"

using namespace carbonprice;
using fixtures::rel_gap;

namespace {

struct Line {
    std::string name;
    bool passed = false;
    std::string detail;
    /// Informational lines are printed but do not decide the criterion.
    bool informational = false;
};

using Lines = std::vector<Line>;

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------
// Table cells

struct Cell {
    std::string label;
    double value;  // model output in display units
    double table;  // published display value
};

void compare_cells(Lines& out, const std::vector<Cell>& cells) {
    for (const auto& c : cells) {
        const double shown = round_half_even(c.value);
        out.push_back({c.label, std::abs(shown - c.table) <= 1.0,
                       fmt("model %.3f -> %.0f, table %.0f, tolerance +-1", c.value, shown, c.table)});
    }
}

struct Columns {
    std::vector<SchemeAccounts> acc;  // bau, tax, mar
};

Columns run_columns(const std::string& scenario) {
    const auto s = load_scenario(scenario);
    Columns c;
    for (Scheme sc : {Scheme::bau, Scheme::tax, Scheme::intermediated})
        c.acc.push_back(run_scheme(s.portfolio(), s.policy(sc), s.emissions.model()));
    return c;
}

struct Published {
    // Per firm, then groups Brown and Green: {bau, tax, mar} wealth and emissions.
    std::vector<std::array<double, 3>> wealth;
    std::vector<std::array<double, 3>> emissions;
    double regulator[2], tech[2], fi, total[3], total_emissions[3];
};

std::vector<Cell> table_cells(const Columns& c, const Published& p) {
    const char* col[] = {"bau", "tax", "mar"};
    const char* rows[] = {"B1", "B2", "B3", "G1", "G2", "G3", "Brown", "Green"};
    std::vector<Cell> cells;
    for (int j = 0; j < 3; ++j) {
        const auto& a = c.acc[j];
        double group_w[2] = {0, 0}, group_e[2] = {0, 0};
        for (std::size_t i = 0; i < 6; ++i) {
            group_w[i / 3] += a.firms[i].wealth;
            group_e[i / 3] += a.firms[i].emissions;
        }
        for (std::size_t r = 0; r < 8; ++r) {
            const double w = r < 6 ? a.firms[r].wealth : group_w[r - 6];
            const double e = r < 6 ? a.firms[r].emissions : group_e[r - 6];
            cells.push_back({fmt("%s %s GDP b EUR", rows[r], col[j]), w / 1e9, p.wealth[r][j]});
            cells.push_back({fmt("%s %s emissions Mt", rows[r], col[j]), e / 1e6, p.emissions[r][j]});
        }
        cells.push_back({fmt("Total %s GDP b EUR", col[j]), a.gdp_with_tech / 1e9, p.total[j]});
        cells.push_back({fmt("Total %s emissions Mt", col[j]), a.total_emissions / 1e6, p.total_emissions[j]});
    }
    for (int j = 1; j < 3; ++j) {
        cells.push_back({fmt("Regulator %s b EUR", col[j]), c.acc[j].regulator_wealth / 1e9, p.regulator[j - 1]});
        cells.push_back({fmt("Tech providers %s b EUR", col[j]), c.acc[j].tech_provider_wealth / 1e9, p.tech[j - 1]});
    }
    cells.push_back({"Financial intermediaries mar b EUR", c.acc[2].intermediaries_wealth / 1e9, p.fi});
    return cells;
}

// 1. Deterministic table.
Lines criterion1() {
    const Published p{
        {{100, 17, 23}, {100, 25, 22}, {100, 38, 41}, {100, 38, 35}, {100, 41, 27}, {100, 55, 56},
         {300, 80, 86}, {300, 134, 117}},
        {{420, 115, 159}, {330, 150, 135}, {300, 98, 116}, {270, 126, 111}, {240, 140, 103}, {210, 79, 83},
         {1051, 363, 411}, {721, 345, 298}},
        {220, 73}, {32, 31}, 154, {600, 467, 462}, {1772, 709, 709}};
    Lines out;
    compare_cells(out, table_cells(run_columns("reference"), p));
    return out;
}

// 2. Random-emissions table.
Lines criterion2() {
    const Published p{
        {{100, 10, 14}, {100, 20, 19}, {100, 28, 28}, {100, 31, 28}, {100, 35, 31}, {100, 45, 42},
         {300, 57, 61}, {300, 112, 101}},
        {{420, 105, 135}, {330, 139, 136}, {300, 121, 120}, {270, 133, 124}, {240, 137, 126}, {210, 109, 102},
         {1051, 365, 392}, {721, 379, 352}},
        {255, 186}, {14, 3}, 75, {600, 438, 426}, {1772, 744, 744}};
    Lines out;
    const auto c = run_columns("reference_random");
    compare_cells(out, table_cells(c, p));

    // Abatement cost evaluated at the nominal intermediated price instead of
    // the effective rate the firms act on.
    const auto& mar = c.acc[2];
    const double s2 = load_scenario("reference_random").emissions.model().dist.sigma2();
    double nominal = 0.0;
    for (std::size_t i = 0; i < mar.firms.size(); ++i) {
        const double price = mar.clearing->effective_prices[i];
        nominal += price * price / (2.0 * mar.portfolio[i].gamma * s2);
    }
    out.push_back({"diagnostic: tech providers mar at nominal prices", true,
                   fmt("sum P^2/(2 gamma sigma^2) = %.3f b EUR; effective-rate value %.3f b EUR; "
                       "companies + regulator + FI = %.3f b EUR",
                       nominal / 1e9, mar.tech_provider_wealth / 1e9, mar.gdp / 1e9),
                   true});
    return out;
}

// ---------------------------------------------------------------------------
// Randomized economies

const auto kDet = EmissionModel::deterministic();
const auto kRand = EmissionModel::lognormal(1.0);

fixtures::Economy draw(std::mt19937_64& rng, const std::vector<std::pair<EmissionModel, Scheme>>& runs) {
    return fixtures::random_economy(rng, 3, 20, 0.3, 0.7, [&](const fixtures::Economy& e) {
        for (const auto& [model, scheme] : runs)
            if (!fixtures::solvable(e, model, {scheme})) return false;
        return true;
    });
}

// 3. Tax and spot market coincide.
Lines criterion3() {
    std::mt19937_64 rng(3003);
    double worst[2] = {0, 0};
    int count = 0;
    for (int k = 0; k < 100; ++k) {
        const auto e = draw(rng, {{kDet, Scheme::tax}, {kDet, Scheme::spot}, {kRand, Scheme::tax}, {kRand, Scheme::spot}});
        int m = 0;
        for (const auto& model : {kDet, kRand}) {
            const auto tax = fixtures::run(e, Scheme::tax, model);
            const auto spot = fixtures::run(e, Scheme::spot, model);
            for (std::size_t i = 0; i < tax.firms.size(); ++i) {
                worst[m] = std::max({worst[m], rel_gap(tax.firms[i].wealth, spot.firms[i].wealth),
                                     rel_gap(tax.firms[i].emissions, spot.firms[i].emissions)});
            }
            ++m;
        }
        ++count;
    }
    return {{"deterministic tax vs spot, per-firm wealth and emissions", worst[0] <= 1e-9,
             fmt("%d economies, worst relative gap %.3e <= 1e-9", count, worst[0])},
            {"random-emissions tax vs spot, per-firm wealth and emissions", worst[1] <= 1e-9,
             fmt("%d economies, worst relative gap %.3e <= 1e-9", count, worst[1])}};
}

// 4. Regulator identity.
Lines criterion4() {
    Lines out;
    std::mt19937_64 rng(4004);
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const auto e = draw(rng, {{kDet, Scheme::tax}, {kDet, Scheme::intermediated}});
        const auto tax = fixtures::run(e, Scheme::tax, kDet);
        const auto mar = fixtures::run(e, Scheme::intermediated, kDet);
        const double identity = *tax.tau * e.cap - e.cap * e.cap / fixtures::total_rho(e.portfolio);
        worst = std::max(worst, rel_gap(mar.regulator_wealth, identity));
    }
    out.push_back({"regulator wealth = tau A - A^2/rho on 200 economies", worst <= 1e-9,
                   fmt("worst relative gap %.3e <= 1e-9", worst)});

    const auto s = load_scenario("reference");
    const auto tax = run_scheme(s.portfolio(), s.policy(Scheme::tax), kDet);
    const auto mar = run_scheme(s.portfolio(), s.policy(Scheme::intermediated), kDet);
    const double gap = tax.regulator_wealth - mar.regulator_wealth;
    // (709.110e6)^2 / 3.42374e6, recomputed independently from the firm table.
    const double expected = 146.8678614707149e9;
    out.push_back({"reference economy regulator gap A^2/rho", rel_gap(gap, expected) <= 1e-9,
                   fmt("%.6f b EUR vs %.6f b EUR (displayed %.0f, table value 147)", gap / 1e9, expected / 1e9,
                       round_half_even(gap / 1e9))});
    return out;
}

// 5. Jensen gap.
Lines criterion5() {
    std::mt19937_64 rng(5005);
    int gdp_ok = 0, wc_ok = 0;
    double worst = 0.0;
    const int n = 500;
    for (int k = 0; k < n; ++k) {
        const auto e = draw(rng, {{kDet, Scheme::tax}, {kDet, Scheme::intermediated}});
        const auto tax = fixtures::run(e, Scheme::tax, kDet);
        const auto mar = fixtures::run(e, Scheme::intermediated, kDet);
        gdp_ok += mar.gdp <= tax.gdp;
        wc_ok += mar.companies_wealth <= tax.companies_wealth;
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < e.portfolio.size(); ++i)
            sum_sq += mar.firms[i].emissions * mar.firms[i].emissions / e.portfolio[i].rho();
        const double jensen = 0.5 * (e.cap * e.cap / fixtures::total_rho(e.portfolio) - sum_sq);
        worst = std::max(worst, rel_gap(mar.gdp - tax.gdp, jensen));
    }
    return {{"GDP(intermediated) <= GDP(tax)", gdp_ok == n, fmt("%d/%d economies", gdp_ok, n)},
            {"W_C(intermediated) <= W_C(tax)", wc_ok == n, fmt("%d/%d economies", wc_ok, n)},
            {"GDP gap equals 1/2 (A^2/rho - sum E_i^2/rho_i)", worst <= 1e-9,
             fmt("worst relative gap %.3e <= 1e-9", worst)}};
}

// 6. Oracle equivalence.
Lines criterion6() {
    std::mt19937_64 rng(6006);
    OracleConfig cfg;
    cfg.mc_paths = 1000000;
    std::uniform_real_distribution<double> frac(0.05, 0.9), sig(0.25, 1.25), spot_frac(0.05, 0.6);
    int det_ok = 0, rand_ok = 0, price_ok = 0, det_n = 0, rand_n = 0, price_n = 0;
    double worst_det = 0.0, worst_z = 0.0, worst_price = 0.0;
    const int instances = 200;
    for (int k = 0; k < instances; ++k) {
        const auto p = fixtures::random_portfolio(rng, 1)[0];
        const double ratio = p.e_bau() / p.rho();
        const double penalty = 0.98 * std::min(ratio, p.pi0);
        const double tau = frac(rng) * ratio;
        const double price = frac(rng) * penalty;

        // Deterministic: tax and market optima.
        for (const auto& pricing : {Pricing::tax(tau), Pricing::market(price, penalty)}) {
            const double closed = pricing.mode == PricingMode::tax ? tax_optimum(p, tau).wealth
                                                                   : market_optimum(p, price, penalty).wealth;
            const auto o = oracle_firm_optimum(p, pricing, kDet, cfg);
            const double gap = std::abs(closed - o.outcome.wealth) / std::abs(closed);
            worst_det = std::max(worst_det, gap);
            det_ok += gap <= 1e-6;
            ++det_n;
        }

        // Random emissions at 10^6 paths.
        const auto model = EmissionModel::lognormal(sig(rng));
        const double s2 = model.dist.sigma2();
        cfg.mc_seed = 1000 + k;
        const auto sample = mc_sample(model.dist, cfg.mc_paths, cfg.mc_seed);
        const double tau_r = frac(rng) * std::min(p.e_bau() / p.rho_hat(s2), p.pi0);
        {
            const auto o = oracle_firm_optimum(p, Pricing::tax(tau_r), model, cfg, sample);
            const double z = std::abs(tax_optimum_random(p, tau_r, s2).wealth - o.outcome.wealth) / o.wealth_se;
            worst_z = std::max(worst_z, z);
            rand_ok += z <= 3.0;
            ++rand_n;
        }
        const double pen_r = 0.98 * std::min(p.e_bau() / p.rho_hat(s2), p.pi0);
        double mprice = frac(rng) * pen_r;
        while (effective_rate(mprice, pen_r, model.dist) >= 0.98 * std::min(p.e_bau() / p.rho_hat(s2), p.pi0))
            mprice *= 0.5;
        {
            const auto o = oracle_firm_optimum(p, Pricing::market(mprice, pen_r), model, cfg, sample);
            const double z =
                std::abs(market_optimum_random(p, mprice, pen_r, model.dist).wealth - o.outcome.wealth) / o.wealth_se;
            worst_z = std::max(worst_z, z);
            rand_ok += z <= 3.0;
            ++rand_n;
        }

        // Intermediated prices against the grid argmax.
        const double spot = spot_frac(rng) * penalty;
        const double step = (penalty - spot) / (cfg.price_grid_points - 1);
        const double det_price = intermediated_response(p, spot, penalty).price;
        const double det_grid = oracle_intermediary_price(p, spot, penalty, kDet, cfg);
        const double spot_r = spot_frac(rng) * pen_r;
        const double step_r = (pen_r - spot_r) / (cfg.price_grid_points - 1);
        const double rand_price = intermediated_price_random(p, spot_r, pen_r, model.dist);
        const double rand_grid = oracle_intermediary_price(p, spot_r, pen_r, model, cfg);
        for (auto [gap, h] : {std::pair{std::abs(det_price - det_grid), step},
                              std::pair{std::abs(rand_price - rand_grid), step_r}}) {
            worst_price = std::max(worst_price, gap / h);
            price_ok += gap <= h * (1.0 + 1e-9);
            ++price_n;
        }
    }
    return {{"deterministic firm optima vs grid oracle", det_ok == det_n,
             fmt("%d/%d within 1e-6 relative wealth, worst %.3e", det_ok, det_n, worst_det)},
            {"random-emissions firm optima vs grid oracle at 10^6 paths", rand_ok == rand_n,
             fmt("%d/%d within 3 standard errors, worst %.2f SE", rand_ok, rand_n, worst_z)},
            {"intermediated prices vs grid argmax", price_ok == price_n,
             fmt("%d/%d within one grid step, worst %.3f steps", price_ok, price_n, worst_price)}};
}

// 7. Solver correctness.
Lines criterion7() {
    Lines out;
    const auto d = EmissionDistribution::lognormal(1.0);
    double worst_foc = 0.0, worst_clear = 0.0;
    auto audit = [&](const ClearingResult& r, const Portfolio& pf, const EmissionModel& model) {
        worst_clear = std::max(worst_clear, std::abs(oracle_clearing_residual(r, pf, model)) / r.cap);
        if (!model.stochastic()) return;
        for (std::size_t i = 0; i < pf.size(); ++i)
            if (r.access[i] == Access::intermediated && r.effective_prices[i] < r.penalty && r.demands[i] > 0.0)
                worst_foc = std::max(worst_foc, std::abs(foc_residual(pf[i], r.effective_prices[i], r.spot,
                                                                      r.penalty, model.dist)) /
                                                    r.demands[i]);
    };

    const auto base = fixtures::reference()[3];
    for (std::size_t n : {1u, 2u, 6u, 50u}) {
        const Portfolio pf(n, base);
        const double cap = 0.4 * n * base.e_bau(), a_hat = 1.05 * cap;
        const auto sym = symmetric_intermediated(base, n, cap, a_hat, d);
        RandomClearingProblem problem{pf, cap, a_hat, 0.0, d, all_intermediated(n)};
        const auto cal = calibrate_lambda(problem);
        double fi = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            fi += cal.clearing.demands[i] * (cal.clearing.effective_prices[i] - cal.clearing.spot);
        const double gap = std::max({rel_gap(cal.penalty, sym.penalty), rel_gap(cal.clearing.spot, sym.spot),
                                     rel_gap(cal.clearing.effective_prices[0], sym.price),
                                     rel_gap(fi, sym.intermediary_wealth)});
        out.push_back({fmt("symmetric intermediated equilibrium, N = %zu", n), gap <= 1e-8,
                       fmt("penalty %.6f spot %.6f price %.6f; worst relative gap %.3e <= 1e-8", cal.penalty,
                           cal.clearing.spot, cal.clearing.effective_prices[0], gap)});
        audit(cal.clearing, pf, kRand);
    }

    for (const char* name : {"reference", "reference_random"}) {
        const auto s = load_scenario(name);
        for (Scheme sc : {Scheme::spot, Scheme::intermediated}) {
            const auto a = run_scheme(s.portfolio(), s.policy(sc), s.emissions.model());
            audit(*a.clearing, s.portfolio(), s.emissions.model());
        }
    }
    std::mt19937_64 rng(7007);
    for (int k = 0; k < 40; ++k) {
        const auto model = k % 2 ? kRand : kDet;
        const auto e = draw(rng, {{model, Scheme::intermediated}});
        const auto a = fixtures::run(e, Scheme::intermediated, model);
        audit(*a.clearing, e.portfolio, model);
        const auto s = fixtures::run(e, Scheme::spot, model);
        audit(*s.clearing, e.portfolio, model);
    }
    out.push_back({"FOC residuals of every intermediated price", worst_foc <= 1e-9,
                   fmt("worst |FOC| / demand %.3e <= 1e-9", worst_foc)});
    out.push_back({"clearing residuals of every solved market", worst_clear <= 1e-9,
                   fmt("worst |sum delta - A| / A %.3e <= 1e-9", worst_clear)});
    return out;
}

// 8. VaR/ES decomposition against Monte Carlo.
Lines criterion8() {
    Lines out;
    const std::size_t n = 1000000;
    for (double s : {0.5, 1.0}) {
        const auto d = EmissionDistribution::lognormal(s);
        const auto x = mc_sample(d, n, 8008);
        out.push_back({fmt("ES_1 = 1 exactly, s = %.2f", s), d.es(1.0) == 1.0, fmt("ES_1 = %.17g", d.es(1.0))});
        for (double eps : {0.05, d.survival(1.0 / 1.05), 0.5, 0.9}) {
            const double v = d.var(eps);
            double m = 0.0, m2 = 0.0;
            for (double xi : x.values()) {
                const double t = std::max(xi - v, 0.0) / eps;
                m += t;
                m2 += t * t;
            }
            m /= n;
            const double se = std::sqrt((m2 / n - m * m) / n);
            const double mc = v + m;
            const double z = std::abs(mc - d.es(eps)) / se;
            out.push_back({fmt("ES = VaR + E[(X - VaR)+]/eps, s = %.2f, eps = %.4f", s, eps), z <= 3.0,
                           fmt("closed %.6f, Monte Carlo %.6f, %.2f SE <= 3", d.es(eps), mc, z)});
        }
    }
    return out;
}

// 9. Winner classification.
Lines criterion9() {
    Lines out;
    const auto s = load_scenario("reference");
    const auto pf = s.portfolio();
    const auto tax = run_scheme(pf, s.policy(Scheme::tax), kDet);
    const auto mar = run_scheme(pf, s.policy(Scheme::intermediated), kDet);
    const auto report = compare_pair(tax, mar);
    // Table pattern: B1, B3 gain; B2, G1, G2 lose. G3 is not constrained.
    const std::map<std::string, bool> table = {{"B1", true}, {"B3", true}, {"B2", false}, {"G1", false}, {"G2", false}};

    const double rho = fixtures::total_rho(pf);
    const double threshold = s.resolved_cap() / (4.0 * rho);
    bool observed_ok = true, stated_ok = true, corrected_ok = true;
    std::ostringstream obs, stated, corrected;
    for (std::size_t i = 0; i < pf.size(); ++i) {
        const auto& w = report.winners[i];
        const double lhs = mar.firms[i].emissions / pf[i].rho();
        const bool stated_gain = lhs > threshold;
        obs << w.label << (w.wealth_delta > 0 ? " gains " : " loses ") << fmt("%+.2f", w.wealth_delta / 1e9) << "; ";
        stated << w.label << fmt(" %.1f", lhs) << (stated_gain ? " gains; " : " loses; ");
        corrected << w.label << " " << to_string(w.predicted) << "; ";
        const auto it = table.find(w.label);
        if (it == table.end()) continue;
        observed_ok = observed_ok && (w.wealth_delta > 0) == it->second;
        stated_ok = stated_ok && stated_gain == it->second;
        corrected_ok = corrected_ok && (w.predicted == Verdict::gains) == it->second;
    }
    out.push_back({"market-minus-tax wealth signs match the table", observed_ok, obs.str()});
    out.push_back({fmt("E_mar,i/rho_i vs A/(4 rho) = %.2f test reproduces the pattern", threshold), stated_ok,
                   stated.str()});
    out.push_back({"diagnostic: effective-price test E_mar,i/rho_i < sum E_mar/rho", corrected_ok,
                   corrected.str() + fmt("threshold %.2f", s.resolved_cap() / rho), true});
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Lines()>>> criteria = {
        {"deterministic table reproduction", criterion1},
        {"random-emissions table reproduction", criterion2},
        {"tax/spot equivalence", criterion3},
        {"regulator identity", criterion4},
        {"Jensen properties", criterion5},
        {"oracle equivalence", criterion6},
        {"solver correctness", criterion7},
        {"risk-measure identities", criterion8},
        {"winner classification", criterion9},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int k = std::atoi(argv[i]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::cerr << "usage: " << argv[0] << " [criterion ...]  (1-" << criteria.size() << ")\n";
            return 2;
        }
        selected.push_back(k);
    }
    if (selected.empty())
        for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) selected.push_back(k);

    int failed = 0;
    std::vector<std::string> summary;
    for (int k : selected) {
        const auto& [title, run] = criteria[k - 1];
        const auto start = std::chrono::steady_clock::now();
        Lines lines;
        bool ok = true;
        try {
            lines = run();
        } catch (const std::exception& e) {
            lines.push_back({"criterion raised an exception", false, e.what()});
        }
        for (const auto& l : lines) {
            if (!l.informational) ok = ok && l.passed;
            std::cout << "[" << k << "] " << (l.informational ? "INFO" : l.passed ? "PASS" : "FAIL") << "  "
                      << l.name << ": " << l.detail << "\n";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        summary.push_back(fmt("criterion %d %s: %s (%.1f s)", k, title, ok ? "PASS" : "FAIL", secs));
        std::cout << summary.back() << "\n" << std::flush;
        failed += ok ? 0 : 1;
    }
    std::cout << "\n";
    for (const auto& s : summary) std::cout << s << "\n";
    return failed == 0 ? 0 : 1;
}
