#include "carbonprice/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"

#include "carbonprice/errors.hpp"

namespace carbonprice {

using ordered_json = nlohmann::ordered_json;

ReportFormat format_from_string(const std::string& name) {
    if (name == "table") return ReportFormat::table;
    if (name == "csv") return ReportFormat::csv;
    if (name == "records") return ReportFormat::records;
    throw DomainError("unknown format '" + name + "' (expected table, csv or records)");
}

double round_half_even(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    // nearbyint honours the default round-to-nearest-even mode.
    return std::nearbyint(x * scale) / scale;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

constexpr double kBillion = 1e9;
constexpr double kMillion = 1e6;

std::string group_of(const ReportContext& ctx, std::size_t i) {
    if (i < ctx.groups.size() && !ctx.groups[i].empty()) return ctx.groups[i];
    return "Firms";
}

// Groups in order of first appearance with their member indices.
std::vector<std::pair<std::string, std::vector<std::size_t>>> grouping(const ReportContext& ctx,
                                                                       std::size_t n) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
    for (std::size_t i = 0; i < n; ++i) {
        const auto g = group_of(ctx, i);
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == g; });
        if (it == out.end()) {
            out.push_back({g, {}});
            it = out.end() - 1;
        }
        it->second.push_back(i);
    }
    return out;
}

std::string column_name(const SchemeAccounts& a) {
    if (a.scheme == Scheme::intermediated) return "mar";
    return to_string(a.scheme);
}

std::string cell(std::optional<double> v, double unit) {
    if (!v) return "";
    const double r = round_half_even(*v / unit);
    std::ostringstream os;
    os << std::fixed << std::setprecision(0) << (r == 0.0 ? 0.0 : r);
    return os.str();
}

std::string emit_table(const ReportContext& ctx, const std::vector<SchemeAccounts>& accounts) {
    const std::size_t n = accounts.front().firms.size();
    const int label_w = 26;
    const int w = 8;
    std::ostringstream os;
    os << "Scenario: " << ctx.scenario << (accounts.front().stochastic ? " (random emissions)" : "")
       << "\n";
    os << "Wealth in billions of euros (W), emissions in millions of tons (E)\n\n";
    os << std::left << std::setw(label_w) << "" << std::right;
    for (const auto& a : accounts) os << std::setw(2 * w) << column_name(a);
    os << "\n" << std::left << std::setw(label_w) << "Entity" << std::right;
    for (std::size_t k = 0; k < accounts.size(); ++k) os << std::setw(w) << "W" << std::setw(w) << "E";
    os << "\n";

    auto row = [&](const std::string& label, auto wealth, auto emissions) {
        os << std::left << std::setw(label_w) << label << std::right;
        for (const auto& a : accounts)
            os << std::setw(w) << cell(wealth(a), kBillion) << std::setw(w)
               << cell(emissions(a), kMillion);
        os << "\n";
    };
    using opt = std::optional<double>;
    for (const auto& [group, members] : grouping(ctx, n)) {
        os << group << "\n";
        for (std::size_t i : members)
            row("  " + accounts.front().portfolio[i].label,
                [&](const SchemeAccounts& a) -> opt { return a.firms[i].wealth; },
                [&](const SchemeAccounts& a) -> opt { return a.firms[i].emissions; });
        row("  " + group + " subtotal",
            [&](const SchemeAccounts& a) -> opt {
                double s = 0.0;
                for (std::size_t i : members) s += a.firms[i].wealth;
                return s;
            },
            [&](const SchemeAccounts& a) -> opt {
                double s = 0.0;
                for (std::size_t i : members) s += a.firms[i].emissions;
                return s;
            });
    }
    const auto none = [](const SchemeAccounts&) -> opt { return std::nullopt; };
    row("Regulator", [](const SchemeAccounts& a) -> opt { return a.regulator_wealth; }, none);
    row("Tech providers", [](const SchemeAccounts& a) -> opt { return a.tech_provider_wealth; }, none);
    row("Financial intermediaries",
        [](const SchemeAccounts& a) -> opt { return a.intermediaries_wealth; }, none);
    row("Total", [](const SchemeAccounts& a) -> opt { return a.gdp_with_tech; },
        [](const SchemeAccounts& a) -> opt { return a.total_emissions; });
    row("GDP (excl. tech providers)", [](const SchemeAccounts& a) -> opt { return a.gdp; }, none);

    os << "\n";
    for (const auto& a : accounts) {
        if (a.scheme == Scheme::bau) continue;
        os << column_name(a) << ":";
        os << std::fixed << std::setprecision(4);
        if (a.tau) os << " tau = " << *a.tau;
        if (a.spot) os << " spot = " << *a.spot;
        if (a.penalty) os << " penalty = " << *a.penalty;
        os << " cap = " << std::setprecision(6) << a.cap / kMillion << " Mt";
        if (a.stochastic) os << " expected-emissions target = " << a.a_hat / kMillion << " Mt";
        os << "\n";
        if (a.clearing && a.scheme != Scheme::spot) {
            os << "  prices:";
            os << std::setprecision(2);
            for (std::size_t i = 0; i < n; ++i)
                os << " " << a.portfolio[i].label << "=" << a.clearing->effective_prices[i];
            os << "\n";
        }
        for (const auto& note : a.notes) os << "  note: " << note << "\n";
        os.unsetf(std::ios::floatfield);
    }
    return os.str();
}

// Rounded for display; adding +0.0 turns a negative zero positive.
double shown(double x, int decimals = 3) { return round_half_even(x, decimals) + 0.0; }

std::string opt_text(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

std::string emit_csv(const ReportContext& ctx, const std::vector<SchemeAccounts>& accounts) {
    std::ostringstream os;
    os << kCsvHeader << "\n";
    auto line = [&](const SchemeAccounts& a, const std::string& entity, std::optional<double> w,
                    std::optional<double> e, std::optional<double> p, std::optional<double> d) {
        os << ctx.scenario << "," << to_string(a.scheme) << "," << entity << "," << opt_text(w) << ","
           << opt_text(e) << "," << opt_text(p) << "," << opt_text(d) << "\n";
    };
    for (const auto& a : accounts) {
        for (std::size_t i = 0; i < a.firms.size(); ++i) {
            const auto& o = a.firms[i];
            std::optional<double> price, demand;
            if (a.scheme != Scheme::bau) price = o.carbon_price;
            if (a.clearing) demand = o.delta;
            line(a, a.portfolio[i].id, o.wealth, o.emissions, price, demand);
        }
        std::optional<double> reg_price = a.tau ? a.tau : a.spot;
        std::optional<double> reg_demand;
        if (a.clearing) reg_demand = a.cap;
        line(a, "regulator", a.regulator_wealth, std::nullopt, reg_price, reg_demand);
        line(a, "tech_providers", a.tech_provider_wealth, std::nullopt, std::nullopt, std::nullopt);
        line(a, "financial_intermediaries", a.intermediaries_wealth, std::nullopt, std::nullopt,
             std::nullopt);
        line(a, "gdp", a.gdp, a.total_emissions, std::nullopt, std::nullopt);
        line(a, "total", a.gdp_with_tech, a.total_emissions, std::nullopt, std::nullopt);
    }
    return os.str();
}

ordered_json opt_json(std::optional<double> v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::string emit_records(const ReportContext& ctx, const std::vector<SchemeAccounts>& accounts) {
    ordered_json doc;
    doc["scenario"] = ctx.scenario;
    ordered_json schemes = ordered_json::array();
    for (const auto& a : accounts) {
        ordered_json s;
        s["scheme"] = to_string(a.scheme);
        s["stochastic"] = a.stochastic;
        s["tau"] = opt_json(a.tau);
        s["spot"] = opt_json(a.spot);
        s["penalty"] = opt_json(a.penalty);
        s["cap_tons"] = a.cap;
        if (a.stochastic) s["expected_emissions_target_tons"] = a.a_hat;
        const double total = a.gdp_with_tech;
        const double emissions = a.total_emissions;
        ordered_json entities = ordered_json::array();
        auto add = [&](const std::string& entity, const std::string& kind, const std::string& group,
                       double wealth, std::optional<double> e) {
            ordered_json r;
            r["entity"] = entity;
            r["kind"] = kind;
            if (!group.empty()) r["group"] = group;
            r["wealth_eur"] = wealth;
            r["gdp_share"] = total != 0.0 ? wealth / total : 0.0;
            r["emissions_tons"] = opt_json(e);
            r["emission_share"] = e && emissions != 0.0 ? ordered_json(*e / emissions) : ordered_json(nullptr);
            entities.push_back(std::move(r));
        };
        for (std::size_t i = 0; i < a.firms.size(); ++i)
            add(a.portfolio[i].id, "company", group_of(ctx, i), a.firms[i].wealth, a.firms[i].emissions);
        add("regulator", "regulator", "", a.regulator_wealth, std::nullopt);
        add("tech_providers", "tech_providers", "", a.tech_provider_wealth, std::nullopt);
        add("financial_intermediaries", "financial_intermediaries", "", a.intermediaries_wealth,
            std::nullopt);
        s["entities"] = std::move(entities);
        s["totals"] = {{"gdp_eur", a.gdp},
                       {"gdp_with_tech_eur", a.gdp_with_tech},
                       {"companies_eur", a.companies_wealth},
                       {"emissions_tons", a.total_emissions}};
        s["notes"] = a.notes;
        schemes.push_back(std::move(s));
    }
    doc["schemes"] = std::move(schemes);
    return doc.dump(2) + "\n";
}

}  // namespace

std::string emit_report(const ReportContext& ctx, const std::vector<SchemeAccounts>& accounts,
                        ReportFormat format) {
    if (accounts.empty()) throw DomainError("report: no accounts to render");
    switch (format) {
        case ReportFormat::table: return emit_table(ctx, accounts);
        case ReportFormat::csv: return emit_csv(ctx, accounts);
        case ReportFormat::records: return emit_records(ctx, accounts);
    }
    return {};
}

std::string emit_comparison(const ReportContext& ctx, const std::vector<ComparisonReport>& reports,
                            ReportFormat format) {
    if (format == ReportFormat::csv)
        throw DomainError("comparisons are available as table or records, not csv");
    if (format == ReportFormat::records) {
        ordered_json doc;
        doc["scenario"] = ctx.scenario;
        ordered_json list = ordered_json::array();
        for (const auto& r : reports) {
            ordered_json j;
            j["base"] = to_string(r.base);
            j["other"] = to_string(r.other);
            j["stochastic"] = r.stochastic;
            j["gdp_delta_eur"] = r.gdp_delta;
            j["gdp_with_tech_delta_eur"] = r.gdp_with_tech_delta;
            j["companies_delta_eur"] = r.companies_delta;
            j["regulator_delta_eur"] = r.regulator_delta;
            j["intermediaries_delta_eur"] = r.intermediaries_delta;
            j["tech_delta_eur"] = r.tech_delta;
            j["emissions_delta_tons"] = r.emissions_delta;
            j["jensen_gap_eur"] = opt_json(r.jensen_gap);
            j["regulator_gap_closed_form_eur"] = opt_json(r.regulator_gap);
            ordered_json winners = ordered_json::array();
            for (const auto& w : r.winners)
                winners.push_back({{"firm", w.label},
                                   {"lhs", w.lhs},
                                   {"rhs", w.rhs},
                                   {"predicted", to_string(w.predicted)},
                                   {"wealth_delta_eur", w.wealth_delta},
                                   {"observed", to_string(w.observed)}});
            j["winners"] = std::move(winners);
            list.push_back(std::move(j));
        }
        doc["comparisons"] = std::move(list);
        return doc.dump(2) + "\n";
    }

    std::ostringstream os;
    os << "Scenario: " << ctx.scenario << "\n";
    os << std::fixed;
    for (const auto& r : reports) {
        os << "\n" << to_string(r.other) << " minus " << to_string(r.base) << " (billions of euros)\n";
        os << std::setprecision(3);
        os << "  GDP (companies + FI + regulator)  " << std::setw(10) << shown(r.gdp_delta / kBillion) << "\n";
        os << "  GDP including tech providers      " << std::setw(10) << shown(r.gdp_with_tech_delta / kBillion) << "\n";
        os << "  companies                         " << std::setw(10) << shown(r.companies_delta / kBillion) << "\n";
        os << "  regulator                         " << std::setw(10) << shown(r.regulator_delta / kBillion) << "\n";
        os << "  financial intermediaries          " << std::setw(10) << shown(r.intermediaries_delta / kBillion) << "\n";
        os << "  tech providers                    " << std::setw(10) << shown(r.tech_delta / kBillion) << "\n";
        os << "  emissions (Mt)                    " << std::setw(10) << shown(r.emissions_delta / kMillion) << "\n";
        if (r.jensen_gap)
            os << "  Jensen gap, closed form           " << std::setw(10) << shown(*r.jensen_gap / kBillion) << "\n";
        if (r.regulator_gap)
            os << "  regulator gap, closed form        " << std::setw(10) << shown(*r.regulator_gap / kBillion) << "\n";
        if (!r.winners.empty()) {
            const char* lhs_name = r.stochastic ? "rate paid" : "E/rho";
            const char* rhs_name = r.stochastic ? "tax rate" : "threshold";
            os << "  " << std::left << std::setw(10) << "firm" << std::right << std::setw(12) << lhs_name
               << std::setw(12) << rhs_name << std::setw(11) << "predicted" << std::setw(12)
               << "dW (b EUR)" << std::setw(10) << "observed" << "\n";
            for (const auto& w : r.winners) {
                os << "  " << std::left << std::setw(10) << w.label << std::right << std::setprecision(2)
                   << std::setw(12) << shown(w.lhs, 2) << std::setw(12) << shown(w.rhs, 2) << std::setw(11)
                   << to_string(w.predicted) << std::setprecision(3) << std::setw(12)
                   << shown(w.wealth_delta / kBillion) << std::setw(10) << to_string(w.observed) << "\n";
            }
        }
    }
    return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::optional<double> parse_field(const std::string& s, std::size_t line_no) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ScenarioError("csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
    return v;
}

}  // namespace

std::vector<CsvRow> parse_csv_report(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw ScenarioError("csv: missing or unexpected header");
    std::vector<CsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 7)
            throw ScenarioError("csv line " + std::to_string(line_no) + ": expected 7 fields");
        rows.push_back({f[0], f[1], f[2], parse_field(f[3], line_no), parse_field(f[4], line_no),
                        parse_field(f[5], line_no), parse_field(f[6], line_no)});
    }
    return rows;
}

}  // namespace carbonprice
