#include "carbonprice/scenario.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "carbonprice/errors.hpp"

namespace carbonprice {

namespace detail {
const std::vector<std::pair<std::string, std::string>>& bundled_scenario_table();
}

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

EmissionModel EmissionSpec::model() const {
    switch (kind) {
        case Kind::deterministic: return EmissionModel::deterministic();
        case Kind::lognormal: return EmissionModel::lognormal(sigma);
        case Kind::empirical: return {EmissionDistribution::empirical(Sample(draws))};
    }
    return {};
}

Portfolio Scenario::portfolio() const {
    Portfolio p;
    for (const auto& f : firms) p.push_back(f.params);
    return p;
}

std::vector<std::string> Scenario::groups() const {
    std::vector<std::string> g;
    for (const auto& f : firms) g.push_back(f.group);
    return g;
}

double Scenario::resolved_cap() const {
    if (cap) return *cap;
    double e = 0.0;
    for (const auto& f : firms) e += f.params.e_bau();
    return cap_fraction.value_or(0.0) * e;
}

PolicyConfig Scenario::policy(Scheme scheme) const {
    PolicyConfig p;
    p.scheme = scheme;
    p.cap = resolved_cap();
    p.a_hat_ratio = a_hat_ratio;
    p.a_hat = a_hat.value_or(0.0);
    p.tau = tau;
    p.penalty = penalty;
    p.access = access;
    return p;
}

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ScenarioError(source_ + ": " + (key.empty() ? "" : key + ": ") + what);
    }

    void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed,
                   const std::map<std::string, std::string>& hints = {}) const {
        if (!obj.is_object()) fail(where, "expected an object");
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& [k, _] : obj.items()) {
            if (ok.count(k)) continue;
            const auto hint = hints.find(k);
            fail(where.empty() ? k : where + "." + k,
                 hint != hints.end() ? hint->second : "unknown key");
        }
    }

    double number(const json& obj, const std::string& where, const char* key) const {
        const auto it = obj.find(key);
        if (it == obj.end()) fail(where + "." + key, "missing required number");
        if (!it->is_number()) fail(where + "." + key, "expected a number");
        return it->get<double>();
    }

    std::optional<double> optional_number(const json& obj, const std::string& where,
                                          const char* key) const {
        if (!obj.contains(key)) return std::nullopt;
        return number(obj, where, key);
    }

    std::string text(const json& obj, const std::string& where, const char* key, bool required) const {
        const auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) fail(where + "." + key, "missing required string");
            return {};
        }
        if (!it->is_string()) fail(where + "." + key, "expected a string");
        return it->get<std::string>();
    }

    template <class Int>
    std::optional<Int> integer(const json& obj, const std::string& where, const char* key) const {
        const auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        if (!it->is_number_integer() || (it->is_number_integer() && it->get<long long>() < 0))
            fail(where + "." + key, "expected a non-negative integer");
        return it->get<Int>();
    }

private:
    std::string source_;
};

void locate(const std::string& text, std::size_t byte, std::size_t& line, std::size_t& column) {
    line = 1;
    column = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
}

}  // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 0, column = 0;
        locate(text, e.byte == 0 ? 0 : e.byte - 1, line, column);
        std::ostringstream msg;
        msg << source << ":" << line << ":" << column << ": malformed JSON: " << e.what();
        throw ScenarioError(msg.str());
    }

    const Reader rd(source);
    rd.only_keys(doc, "", {"name", "firms", "policy", "emissions", "oracle"});

    Scenario s;
    s.name = rd.text(doc, "", "name", true);
    if (s.name.empty()) rd.fail("name", "must not be empty");

    if (!doc.contains("firms")) rd.fail("firms", "missing; a scenario needs at least one firm");
    const auto& firms = doc["firms"];
    if (!firms.is_array() || firms.empty()) rd.fail("firms", "expected a non-empty array");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < firms.size(); ++i) {
        const std::string where = "firms[" + std::to_string(i) + "]";
        const auto& f = firms[i];
        rd.only_keys(f, where, {"id", "label", "group", "pi0", "pi1", "gamma", "quadratic_unit"});
        FirmSpec spec;
        spec.params.id = rd.text(f, where, "id", true);
        if (!ids.insert(spec.params.id).second) rd.fail(where + ".id", "duplicate id '" + spec.params.id + "'");
        spec.params.label = rd.text(f, where, "label", false);
        if (spec.params.label.empty()) spec.params.label = spec.params.id;
        spec.group = rd.text(f, where, "group", false);
        const double unit = rd.optional_number(f, where, "quadratic_unit").value_or(1.0);
        if (!(unit > 0.0)) rd.fail(where + ".quadratic_unit", "must be > 0");
        spec.params.pi0 = rd.number(f, where, "pi0");
        spec.params.pi1 = rd.number(f, where, "pi1") * unit;
        spec.params.gamma = rd.number(f, where, "gamma") * unit;
        try {
            spec.params.validate();
        } catch (const DomainError& e) {
            rd.fail(where, e.what());
        }
        s.firms.push_back(std::move(spec));
    }

    if (!doc.contains("policy")) rd.fail("policy", "missing; needs cap or cap_fraction");
    const auto& pol = doc["policy"];
    rd.only_keys(pol, "policy", {"cap", "cap_fraction", "a_hat", "a_hat_ratio", "tau", "penalty", "access"},
                 {{"reduction_target",
                   "unsupported (ambiguous); give cap_fraction = A / E_bau or an absolute cap"}});
    s.cap = rd.optional_number(pol, "policy", "cap");
    s.cap_fraction = rd.optional_number(pol, "policy", "cap_fraction");
    if (s.cap.has_value() == s.cap_fraction.has_value())
        rd.fail("policy", "exactly one of cap and cap_fraction is required");
    if (s.cap && !(*s.cap > 0.0)) rd.fail("policy.cap", "must be > 0");
    if (s.cap_fraction && !(*s.cap_fraction > 0.0 && *s.cap_fraction < 1.0))
        rd.fail("policy.cap_fraction", "must lie in (0, 1)");
    s.a_hat_ratio = rd.optional_number(pol, "policy", "a_hat_ratio").value_or(1.05);
    if (!(s.a_hat_ratio > 1.0)) rd.fail("policy.a_hat_ratio", "must be > 1");
    s.a_hat = rd.optional_number(pol, "policy", "a_hat");
    s.tau = rd.optional_number(pol, "policy", "tau");
    s.penalty = rd.optional_number(pol, "policy", "penalty");
    if (s.tau && !(*s.tau >= 0.0)) rd.fail("policy.tau", "must be >= 0");
    if (s.penalty && !(*s.penalty > 0.0)) rd.fail("policy.penalty", "must be > 0");
    if (pol.contains("access")) {
        const auto& acc = pol["access"];
        if (!acc.is_array() || acc.size() != s.firms.size())
            rd.fail("policy.access", "expected one entry per firm");
        for (const auto& a : acc) {
            if (a == "direct") s.access.push_back(Access::direct);
            else if (a == "intermediated") s.access.push_back(Access::intermediated);
            else rd.fail("policy.access", "entries must be \"direct\" or \"intermediated\"");
        }
    }

    if (doc.contains("emissions")) {
        const auto& em = doc["emissions"];
        rd.only_keys(em, "emissions", {"model", "sigma", "draws"});
        const std::string model = rd.text(em, "emissions", "model", true);
        if (model == "deterministic") {
            s.emissions.kind = EmissionSpec::Kind::deterministic;
        } else if (model == "lognormal") {
            s.emissions.kind = EmissionSpec::Kind::lognormal;
            s.emissions.sigma = rd.number(em, "emissions", "sigma");
            if (!(s.emissions.sigma > 0.0)) rd.fail("emissions.sigma", "must be > 0");
        } else if (model == "empirical") {
            s.emissions.kind = EmissionSpec::Kind::empirical;
            if (!em.contains("draws") || !em["draws"].is_array() || em["draws"].size() < 2)
                rd.fail("emissions.draws", "expected an array of at least two positive numbers");
            for (const auto& d : em["draws"]) {
                if (!d.is_number() || !(d.get<double>() > 0.0))
                    rd.fail("emissions.draws", "entries must be positive numbers");
                s.emissions.draws.push_back(d.get<double>());
            }
        } else {
            rd.fail("emissions.model", "expected deterministic, lognormal or empirical");
        }
    }
    const bool stochastic = s.emissions.kind != EmissionSpec::Kind::deterministic;
    if (stochastic) {
        if (s.a_hat && !(*s.a_hat > s.resolved_cap()))
            rd.fail("policy.a_hat", "must exceed the cap");
        if (!s.a_hat && !(s.a_hat_ratio > 1.0)) rd.fail("policy.a_hat_ratio", "must be > 1");
    }

    if (doc.contains("oracle")) {
        const auto& o = doc["oracle"];
        rd.only_keys(o, "oracle", {"grid_points", "refinement_rounds", "price_grid_points", "mc_paths",
                                   "mc_seed", "tolerance", "threads"});
        OracleConfig cfg;
        cfg.grid_points = rd.integer<int>(o, "oracle", "grid_points").value_or(cfg.grid_points);
        cfg.refinement_rounds =
            rd.integer<int>(o, "oracle", "refinement_rounds").value_or(cfg.refinement_rounds);
        cfg.price_grid_points =
            rd.integer<int>(o, "oracle", "price_grid_points").value_or(cfg.price_grid_points);
        cfg.mc_paths = rd.integer<std::size_t>(o, "oracle", "mc_paths").value_or(cfg.mc_paths);
        cfg.mc_seed = rd.integer<std::uint64_t>(o, "oracle", "mc_seed").value_or(cfg.mc_seed);
        cfg.threads = rd.integer<unsigned>(o, "oracle", "threads").value_or(cfg.threads);
        cfg.tolerance = rd.optional_number(o, "oracle", "tolerance").value_or(cfg.tolerance);
        try {
            cfg.validate();
        } catch (const DomainError& e) {
            rd.fail("oracle", e.what());
        }
        s.oracle = cfg;
    }
    return s;
}

Scenario parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path.string());
}

std::vector<std::string> bundled_scenario_names() {
    std::vector<std::string> names;
    for (const auto& [name, _] : detail::bundled_scenario_table()) names.push_back(name);
    return names;
}

const std::string& bundled_scenario_text(const std::string& name) {
    for (const auto& [n, text] : detail::bundled_scenario_table())
        if (n == name) return text;
    throw ScenarioError("no bundled scenario named '" + name + "'");
}

Scenario load_scenario(const std::string& name_or_path) {
    for (const auto& [n, text] : detail::bundled_scenario_table())
        if (n == name_or_path) return parse_scenario_text(text, "bundled:" + n);
    if (!std::filesystem::exists(name_or_path)) {
        std::ostringstream msg;
        msg << "'" << name_or_path << "' is neither a file nor a bundled scenario (bundled:";
        for (const auto& n : bundled_scenario_names()) msg << " " << n;
        msg << ")";
        throw ScenarioError(msg.str());
    }
    return parse_scenario(name_or_path);
}

std::string serialize_scenario(const Scenario& s) {
    ordered_json doc;
    doc["name"] = s.name;
    ordered_json firms = ordered_json::array();
    for (const auto& f : s.firms) {
        ordered_json j;
        j["id"] = f.params.id;
        if (f.params.label != f.params.id) j["label"] = f.params.label;
        if (!f.group.empty()) j["group"] = f.group;
        j["pi0"] = f.params.pi0;
        j["pi1"] = f.params.pi1;
        j["gamma"] = f.params.gamma;
        firms.push_back(std::move(j));
    }
    doc["firms"] = std::move(firms);

    ordered_json pol = ordered_json::object();
    if (s.cap) pol["cap"] = *s.cap;
    if (s.cap_fraction) pol["cap_fraction"] = *s.cap_fraction;
    pol["a_hat_ratio"] = s.a_hat_ratio;
    if (s.a_hat) pol["a_hat"] = *s.a_hat;
    if (s.tau) pol["tau"] = *s.tau;
    if (s.penalty) pol["penalty"] = *s.penalty;
    if (!s.access.empty()) {
        ordered_json acc = ordered_json::array();
        for (Access a : s.access) acc.push_back(to_string(a));
        pol["access"] = std::move(acc);
    }
    doc["policy"] = std::move(pol);

    ordered_json em;
    switch (s.emissions.kind) {
        case EmissionSpec::Kind::deterministic: em["model"] = "deterministic"; break;
        case EmissionSpec::Kind::lognormal:
            em["model"] = "lognormal";
            em["sigma"] = s.emissions.sigma;
            break;
        case EmissionSpec::Kind::empirical:
            em["model"] = "empirical";
            em["draws"] = s.emissions.draws;
            break;
    }
    doc["emissions"] = std::move(em);

    if (s.oracle) {
        const auto& c = *s.oracle;
        doc["oracle"] = {{"grid_points", c.grid_points},
                         {"refinement_rounds", c.refinement_rounds},
                         {"price_grid_points", c.price_grid_points},
                         {"mc_paths", c.mc_paths},
                         {"mc_seed", c.mc_seed},
                         {"tolerance", c.tolerance},
                         {"threads", c.threads}};
    }
    return doc.dump(2) + "\n";
}

}  // namespace carbonprice
