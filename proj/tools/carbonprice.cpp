// carbonprice command-line tool.
//
// Exit codes: 0 success, 2 usage or scenario error, 3 infeasible input,
// 4 solver failure, 5 verification failure.

#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "carbonprice/accounting.hpp"
#include "carbonprice/errors.hpp"
#include "carbonprice/report.hpp"
#include "carbonprice/scenario.hpp"
#include "carbonprice/verify.hpp"

using namespace carbonprice;

namespace {

constexpr int kUsage = 2;
constexpr int kInfeasible = 3;
constexpr int kSolver = 4;
constexpr int kVerification = 5;

const std::vector<std::string> kSchemeNames = {"bau", "tax", "spot", "intermediated", "hybrid"};

ReportContext context_for(const Scenario& s) { return {s.name, s.groups()}; }

std::vector<SchemeAccounts> run_all(const Scenario& s, const std::vector<std::string>& names) {
    const auto pf = s.portfolio();
    const auto model = s.emissions.model();
    std::vector<SchemeAccounts> out;
    for (const auto& n : names) out.push_back(run_scheme(pf, s.policy(scheme_from_string(n)), model));
    return out;
}

int cmd_validate(const Scenario& s) {
    const auto pf = s.portfolio();
    const auto model = s.emissions.model();
    const double sigma2 = model.dist.sigma2();
    const double cap = s.resolved_cap();
    double e = 0.0;
    for (const auto& p : pf) e += p.e_bau();

    std::cout << "scenario " << s.name << ": " << pf.size() << " firms, "
              << (model.stochastic() ? model.dist.describe() : "deterministic") << " emissions\n";
    std::cout << std::fixed << std::setprecision(4);
    std::cout << "E_bau = " << e / 1e6 << " Mt, cap A = " << cap / 1e6 << " Mt\n";
    bool ok = true;
    double tau = 0.0;
    try {
        tau = model.stochastic() ? calibrate_tau_random(pf, s.policy(Scheme::tax).resolved_a_hat(), sigma2)
                                 : calibrate_tau(pf, cap);
        std::cout << "calibrated tax = " << tau << " EUR/t\n";
    } catch (const DomainError& ex) {
        ok = false;
        std::cout << "tax calibration: " << ex.what() << "\n";
    }
    std::cout << std::left << std::setw(8) << "firm" << std::right << std::setw(14) << "E_bau Mt"
              << std::setw(14) << "W_bau bEUR" << std::setw(14) << "E/rho" << std::setw(14)
              << "slack Mt" << "  status\n";
    for (const auto& p : pf) {
        const auto f = check_feasibility(p, s.tau.value_or(tau), PricingMode::tax, sigma2);
        ok = ok && f.ok;
        std::cout << std::left << std::setw(8) << p.label << std::right << std::setw(14) << p.e_bau() / 1e6
                  << std::setw(14) << p.w_bau() / 1e9 << std::setw(14) << p.e_bau() / p.rho_hat(sigma2)
                  << std::setw(14) << f.slack / 1e6 << "  " << (f.ok ? "ok" : f.reason) << "\n";
    }
    if (!model.stochastic()) {
        for (Scheme sc : {Scheme::spot, Scheme::intermediated}) {
            const auto access = sc == Scheme::spot ? all_direct(pf.size()) : all_intermediated(pf.size());
            try {
                const auto choice = default_penalty(pf, cap, access);
                const double penalty = s.penalty.value_or(choice.penalty);
                const auto w = feasibility_window(pf, penalty, access);
                std::cout << to_string(sc) << ": penalty " << penalty << ", window [" << w.a_min / 1e6
                          << ", " << w.a_max / 1e6 << ") Mt, interior from " << w.interior_a_min / 1e6
                          << " Mt, cap " << (w.contains(cap) ? "inside" : "OUTSIDE") << "\n";
                ok = ok && w.contains(cap);
            } catch (const DomainError& ex) {
                ok = false;
                std::cout << to_string(sc) << ": " << ex.what() << "\n";
            }
        }
    }
    std::cout << (ok ? "valid" : "INFEASIBLE") << "\n";
    return ok ? 0 : kInfeasible;
}

int cmd_calibrate(const Scenario& s) {
    const auto pf = s.portfolio();
    const auto model = s.emissions.model();
    const double cap = s.resolved_cap();
    std::cout << std::setprecision(10);
    if (!model.stochastic()) {
        std::cout << "tax rate tau = " << calibrate_tau(pf, cap) << "\n";
        for (Scheme sc : {Scheme::spot, Scheme::intermediated}) {
            const auto access = sc == Scheme::spot ? all_direct(pf.size()) : all_intermediated(pf.size());
            const auto choice = default_penalty(pf, cap, access);
            const double penalty = s.penalty.value_or(choice.penalty);
            const auto c = equilibrium_spot(pf, cap, penalty, access);
            std::cout << to_string(sc) << ": spot S = " << c.spot << " (penalty " << penalty
                      << (c.used_closed_form ? ", closed form" : ", bisection") << ")\n";
        }
        return 0;
    }
    const double a_hat = s.policy(Scheme::tax).resolved_a_hat();
    const double tau = calibrate_tau_random(pf, a_hat, model.dist.sigma2());
    std::cout << "expected emissions target = " << a_hat << " t\n";
    std::cout << "tax rate tau = " << tau << "\n";
    for (Scheme sc : {Scheme::spot, Scheme::intermediated}) {
        const auto access = sc == Scheme::spot ? all_direct(pf.size()) : all_intermediated(pf.size());
        RandomClearingProblem problem{pf, cap, a_hat, 0.0, model.dist, access};
        const auto cal = calibrate_lambda(problem);
        std::cout << to_string(sc) << ": penalty = " << cal.penalty << " spot S = " << cal.clearing.spot
                  << " S/penalty = " << cal.clearing.spot / cal.penalty
                  << (cal.closed_form ? " (closed form)" : " (root-found)") << "\n";
    }
    return 0;
}

int cmd_verify(const Scenario& s, bool quick) {
    OracleConfig cfg = s.oracle_config();
    if (quick) {
        cfg.mc_paths = 100000;
        cfg.price_grid_points = 20001;
    }
    const auto report = verify_scenario(s, cfg);
    std::size_t failed = 0;
    for (const auto& c : report.checks) {
        failed += c.passed ? 0 : 1;
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": |" << c.value << "| <= " << c.limit;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
    std::cout << report.checks.size() - failed << "/" << report.checks.size() << " checks passed\n";
    return failed == 0 ? 0 : kVerification;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void check_schemes(const std::vector<std::string>& names) {
    for (const auto& n : names)
        if (std::find(kSchemeNames.begin(), kSchemeNames.end(), n) == kSchemeNames.end())
            throw CLI::ValidationError("--scheme", "unknown scheme '" + n + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Carbon tax and cap-and-trade equilibrium solver"};
    app.require_subcommand(1);

    std::string scenario_arg;
    std::string format = "table";
    std::string schemes = "tax";
    bool quick = false;

    auto* validate = app.add_subcommand("validate", "Check feasibility windows and firm conditions");
    auto* solve = app.add_subcommand("solve", "Solve one or more schemes and print the accounts");
    auto* compare = app.add_subcommand("compare", "Compare schemes against the first one listed");
    auto* calibrate = app.add_subcommand("calibrate", "Print calibrated tax, penalty and spot prices");
    auto* verify = app.add_subcommand("verify", "Cross-check closed forms against brute-force oracles");
    auto* report = app.add_subcommand("report", "Business as usual, tax and market columns side by side");
    for (auto* sub : {validate, solve, compare, calibrate, verify, report})
        sub->add_option("scenario", scenario_arg, "Bundled scenario name or path to a JSON file")->required();
    const auto formats = CLI::IsMember({"table", "csv", "records"});
    solve->add_option("--scheme", schemes, "Comma-separated schemes: tax, spot, intermediated, hybrid, bau");
    solve->add_option("--format", format, "table, csv or records")->check(formats);
    compare->add_option("--schemes", schemes, "Comma-separated schemes, first is the base")->required();
    compare->add_option("--format", format, "table or records")->check(CLI::IsMember({"table", "records"}));
    report->add_option("--format", format, "table, csv or records")->check(formats);
    verify->add_flag("--quick", quick, "Smaller Monte-Carlo sample and price grid");

    try {
        app.parse(argc, argv);
        if (solve->parsed() || compare->parsed()) check_schemes(split_list(schemes));
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        const Scenario s = load_scenario(scenario_arg);
        const auto ctx = context_for(s);
        const auto fmt = format_from_string(format);
        if (validate->parsed()) return cmd_validate(s);
        if (calibrate->parsed()) return cmd_calibrate(s);
        if (verify->parsed()) return cmd_verify(s, quick);
        if (solve->parsed()) {
            auto names = split_list(schemes);
            if (fmt == ReportFormat::table && std::find(names.begin(), names.end(), "bau") == names.end())
                names.insert(names.begin(), "bau");
            std::cout << emit_report(ctx, run_all(s, names), fmt);
            return 0;
        }
        if (compare->parsed()) {
            const auto accounts = run_all(s, split_list(schemes));
            if (accounts.size() < 2) throw CLI::ValidationError("--schemes", "need at least two schemes");
            std::cout << emit_comparison(ctx, compare_schemes(accounts), fmt);
            return 0;
        }
        if (report->parsed()) {
            std::cout << emit_report(ctx, run_all(s, {"bau", "tax", "spot", "intermediated"}), fmt);
            return 0;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kUsage;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible (" << e.bound() << "): " << e.what() << "\n";
        return kInfeasible;
    } catch (const DomainError& e) {
        std::cerr << "infeasible input: " << e.what() << "\n";
        return kInfeasible;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << "\n";
        return kSolver;
    } catch (const SolverError& e) {
        std::cerr << "solver failed: " << e.what() << "\n";
        return kSolver;
    }
    return kUsage;
}
