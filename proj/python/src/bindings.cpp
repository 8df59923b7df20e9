#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carbonprice/accounting.hpp"
#include "carbonprice/errors.hpp"
#include "carbonprice/report.hpp"
#include "carbonprice/scenario.hpp"
#include "carbonprice/verify.hpp"

namespace py = pybind11;
using namespace carbonprice;

namespace {

AccessProfile access_from(const std::vector<std::string>& names) {
    AccessProfile out;
    for (const auto& n : names) {
        if (n == "direct") out.push_back(Access::direct);
        else if (n == "intermediated") out.push_back(Access::intermediated);
        else throw DomainError("access entries must be 'direct' or 'intermediated', got '" + n + "'");
    }
    return out;
}

py::dict outcome_dict(const CompanyOutcome& o) {
    py::dict d;
    d["q"] = o.q;
    d["abatement_factor"] = o.abatement_factor;
    d["delta"] = o.delta;
    d["emissions"] = o.emissions;
    d["wealth"] = o.wealth;
    d["green_cost"] = o.green_cost;
    d["carbon_price"] = o.carbon_price;
    return d;
}

py::dict accounts_dict(const SchemeAccounts& a) {
    py::dict d;
    d["scheme"] = to_string(a.scheme);
    d["stochastic"] = a.stochastic;
    py::list firms;
    for (std::size_t i = 0; i < a.firms.size(); ++i) {
        auto f = outcome_dict(a.firms[i]);
        f["id"] = a.portfolio[i].id;
        firms.append(f);
    }
    d["firms"] = firms;
    d["regulator_wealth"] = a.regulator_wealth;
    d["tech_provider_wealth"] = a.tech_provider_wealth;
    d["companies_wealth"] = a.companies_wealth;
    d["intermediaries_wealth"] = a.intermediaries_wealth;
    d["gdp"] = a.gdp;
    d["gdp_with_tech"] = a.gdp_with_tech;
    d["total_emissions"] = a.total_emissions;
    d["cap"] = a.cap;
    d["tau"] = a.tau;
    d["spot"] = a.spot;
    d["penalty"] = a.penalty;
    d["notes"] = a.notes;
    return d;
}

std::vector<SchemeAccounts> run_named(const Scenario& s, const std::vector<std::string>& schemes) {
    std::vector<SchemeAccounts> out;
    for (const auto& n : schemes)
        out.push_back(run_scheme(s.portfolio(), s.policy(scheme_from_string(n)), s.emissions.model()));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Carbon tax and cap-and-trade equilibrium solver";

    auto domain = py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", domain.ptr());
    auto solver = py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<CalibrationError>(m, "CalibrationError", solver.ptr());
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

    py::class_<CompanyParams>(m, "CompanyParams")
        .def(py::init([](std::string id, double pi0, double pi1, double gamma) {
                 CompanyParams p{id, id, pi0, pi1, gamma};
                 p.validate();
                 return p;
             }),
             py::arg("id"), py::arg("pi0"), py::arg("pi1"), py::arg("gamma"))
        .def_readwrite("id", &CompanyParams::id)
        .def_readwrite("label", &CompanyParams::label)
        .def_readwrite("pi0", &CompanyParams::pi0)
        .def_readwrite("pi1", &CompanyParams::pi1)
        .def_readwrite("gamma", &CompanyParams::gamma)
        .def_property_readonly("rho", &CompanyParams::rho)
        .def("rho_hat", &CompanyParams::rho_hat, py::arg("sigma2"))
        .def_property_readonly("e_bau", &CompanyParams::e_bau)
        .def_property_readonly("w_bau", &CompanyParams::w_bau)
        .def("__repr__", [](const CompanyParams& p) {
            return "CompanyParams('" + p.id + "', pi0=" + format_double(p.pi0) + ", pi1=" + format_double(p.pi1) +
                   ", gamma=" + format_double(p.gamma) + ")";
        });

    py::class_<EmissionDistribution>(m, "EmissionDistribution")
        .def(py::init<>())
        .def_static("lognormal", &EmissionDistribution::lognormal, py::arg("sigma"))
        .def("var", &EmissionDistribution::var, py::arg("eps"))
        .def("es", &EmissionDistribution::es, py::arg("eps"))
        .def("survival", &EmissionDistribution::survival, py::arg("t"))
        .def_property_readonly("sigma2", &EmissionDistribution::sigma2)
        .def("__repr__", &EmissionDistribution::describe);

    m.def("bau_outcome", [](const CompanyParams& p) { return outcome_dict(bau_outcome(p)); });
    m.def("tax_optimum", [](const CompanyParams& p, double tau) { return outcome_dict(tax_optimum(p, tau)); },
          py::arg("firm"), py::arg("tau"));
    m.def("market_optimum",
          [](const CompanyParams& p, double price, double penalty, const EmissionDistribution& dist) {
              return outcome_dict(dist.is_degenerate() ? market_optimum(p, price, penalty)
                                                       : market_optimum_random(p, price, penalty, dist));
          },
          py::arg("firm"), py::arg("price"), py::arg("penalty"), py::arg("dist") = EmissionDistribution{});
    m.def("calibrate_tau", &calibrate_tau, py::arg("portfolio"), py::arg("cap"));
    m.def("equilibrium_spot",
          [](const Portfolio& pf, double cap, double penalty, const std::vector<std::string>& access) {
              const auto r = equilibrium_spot(pf, cap, penalty, access_from(access));
              py::dict d;
              d["spot"] = r.spot;
              d["prices"] = r.effective_prices;
              d["demands"] = r.demands;
              d["residual"] = r.residual;
              d["closed_form"] = r.used_closed_form;
              return d;
          },
          py::arg("portfolio"), py::arg("cap"), py::arg("penalty"), py::arg("access"));

    m.def("bundled_scenarios", &bundled_scenario_names);
    m.def("scenario_portfolio", [](const std::string& s) { return load_scenario(s).portfolio(); },
          py::arg("scenario"));
    m.def("solve",
          [](const std::string& scenario, const std::string& scheme) {
              return accounts_dict(run_named(load_scenario(scenario), {scheme})[0]);
          },
          py::arg("scenario"), py::arg("scheme") = "tax");
    m.def("report",
          [](const std::string& scenario, const std::vector<std::string>& schemes, const std::string& format) {
              const auto s = load_scenario(scenario);
              return emit_report({s.name, s.groups()}, run_named(s, schemes), format_from_string(format));
          },
          py::arg("scenario"), py::arg("schemes") = std::vector<std::string>{"bau", "tax", "spot", "intermediated"},
          py::arg("format") = "table");
    m.def("compare",
          [](const std::string& scenario, const std::vector<std::string>& schemes) {
              py::list out;
              for (const auto& r : compare_schemes(run_named(load_scenario(scenario), schemes))) {
                  py::dict d;
                  d["base"] = to_string(r.base);
                  d["other"] = to_string(r.other);
                  d["gdp_delta"] = r.gdp_delta;
                  d["regulator_delta"] = r.regulator_delta;
                  d["companies_delta"] = r.companies_delta;
                  d["jensen_gap"] = r.jensen_gap;
                  py::dict winners;
                  for (const auto& w : r.winners) winners[py::str(w.label)] = to_string(w.predicted);
                  d["winners"] = winners;
                  out.append(d);
              }
              return out;
          },
          py::arg("scenario"), py::arg("schemes"));
    m.def("verify",
          [](const std::string& scenario, std::size_t mc_paths) {
              const auto s = load_scenario(scenario);
              auto cfg = s.oracle_config();
              cfg.mc_paths = mc_paths;
              const auto rep = verify_scenario(s, cfg);
              py::list out;
              for (const auto& c : rep.checks) out.append(py::make_tuple(c.name, c.passed, c.value, c.limit));
              return out;
          },
          py::arg("scenario"), py::arg("mc_paths") = 100000);
}
