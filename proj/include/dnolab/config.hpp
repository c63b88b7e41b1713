#pragma once
// Run configuration: INI-style sections of key = value pairs.
//
//   [domain]   name = ball | halfspace-flat | siegel | weak-q4 | polynomial
//              n = 2
//              point = 1, 0, 0, 0            (optional; defaults per domain)
//              terms = 1 : 0 0 1 0 ; 1 : 2 0 0 0   (polynomial only)
//   [run]      q = 1
//              suite = lambda0               (verify only)
//   [grid]     rays = 0, 0, -1 ; 0.1, 0, -1
//              magnitudes = 8, 16, 32, 64
//   [phi]      values = 0, 0.5, -1.3
//   [tolerances]  any key = number, overriding the defaults below
//   [output]   format = csv | json, jobs = N

#include "dnolab/domain.hpp"
#include "dnolab/forms.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnolab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string domain_name = "ball";
    int n = 2;
    std::optional<Vec> point;
    std::vector<PolyTerm> terms;
    int q = 1;
    std::string suite;
    std::vector<Vec> rays;
    std::vector<double> magnitudes{8, 16, 32, 64};
    std::vector<double> phi_values{0, 0.5, -1.3};
    std::map<std::string, double> tolerances;
    std::string format = "json";
    int jobs = 0;  // 0: unset
    std::string text;  // raw file contents, hashed into reports

    double tol(const std::string& key) const { return tolerances.at(key); }

    Domain make_domain() const {
        if (domain_name == "polynomial") return polynomial_domain(n, terms, "polynomial");
        return make_builtin(domain_name, n);
    }
    Vec chart_point(const Domain& d) const { return point ? *point : d.default_point; }
};

inline std::map<std::string, double> default_tolerances() {
    return {
        {"ode_rel", 1e-6},         {"ode_closed", 1e-8},       {"ratio_lo", 0.4},
        {"ratio_hi", 0.65},        {"cancel_ray", 1e-10},      {"crosscheck", 1e-4},
        {"s_offdiag", 1e-10},      {"closed_form", 1e-5},      {"kohn_ratio", 0.6},
        {"kohn_floor", 1e-8},      {"quad_rel", 1e-10},        {"sweep_exponent", 0.7},
        {"strip_gain", 2.0},       {"strip_slack", 0.1},       {"breakdown", 1e-12},
    };
}

namespace detail {
inline std::string trim(std::string s) {
    const char* ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    auto e = s.find_last_not_of(ws);
    s.erase(e == std::string::npos ? 0 : e + 1);
    return s;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& field) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("field '" + field + "': expected a number, got '" + s + "'");
    }
}

inline int parse_int(const std::string& s, const std::string& field) {
    double v = parse_double(s, field);
    if (v != double(int(v))) throw ConfigError("field '" + field + "': expected an integer, got '" + s + "'");
    return int(v);
}

inline std::vector<double> parse_list(const std::string& s, const std::string& field, char sep = ',') {
    std::vector<double> out;
    for (const auto& item : split(s, sep)) out.push_back(parse_double(item, field));
    return out;
}

inline Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), Eigen::Index(v.size())); }
}  // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
    }
    static const std::map<std::string, std::vector<std::string>> known = {
        {"domain", {"name", "n", "point", "terms"}},
        {"run", {"q", "suite"}},
        {"grid", {"rays", "magnitudes"}},
        {"phi", {"values"}},
        {"tolerances", {}},
        {"output", {"format", "jobs"}},
    };
    for (const auto& [section, body] : tree) {
        auto it = known.find(section);
        if (it == known.end() || body.data().size())
            throw ConfigError("unknown section or top-level key '" + section + "'");
        if (section == "tolerances") continue;
        for (const auto& [key, v] : body) {
            (void)v;
            bool ok = false;
            for (const auto& k : it->second) ok = ok || k == key;
            if (!ok) throw ConfigError("unknown field '" + section + "." + key + "'");
        }
    }
    RunConfig c;
    c.text = text;
    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return detail::trim(*v);
        return std::nullopt;
    };
    if (auto v = get("domain.name")) c.domain_name = *v;
    if (auto v = get("domain.n")) c.n = detail::parse_int(*v, "domain.n");
    if (c.n < 1 || c.n > 8) throw ConfigError("field 'domain.n': must lie in 1..8");
    if (c.domain_name != "polynomial") {
        bool found = false;
        for (const auto& b : builtin_domain_names()) found = found || b == c.domain_name;
        if (!found) throw ConfigError("field 'domain.name': unknown domain '" + c.domain_name + "'");
    }
    if (auto v = get("domain.point")) {
        auto p = detail::parse_list(*v, "domain.point");
        if (int(p.size()) != 2 * c.n) throw ConfigError("field 'domain.point': expected 2n coordinates");
        c.point = detail::to_vec(p);
    }
    if (auto v = get("domain.terms")) {
        for (const auto& term : detail::split(*v, ';')) {
            auto parts = detail::split(term, ':');
            if (parts.size() != 2) throw ConfigError("field 'domain.terms': expected 'coeff : exponents'");
            PolyTerm t;
            t.coeff = detail::parse_double(parts[0], "domain.terms");
            for (const auto& e : detail::split(parts[1], ' ')) t.exponents.push_back(detail::parse_int(e, "domain.terms"));
            if (int(t.exponents.size()) != 2 * c.n) throw ConfigError("field 'domain.terms': expected 2n exponents");
            c.terms.push_back(t);
        }
    }
    if (c.domain_name == "polynomial" && c.terms.empty()) throw ConfigError("field 'domain.terms': polynomial domain needs terms");
    if (auto v = get("run.q")) c.q = detail::parse_int(*v, "run.q");
    if (c.q < 1 || c.q > c.n) throw ConfigError("field 'run.q': must lie in 1..n");
    if (auto v = get("run.suite")) c.suite = *v;
    if (auto v = get("grid.rays")) {
        for (const auto& ray : detail::split(*v, ';')) {
            auto r = detail::parse_list(ray, "grid.rays");
            if (int(r.size()) != 2 * c.n - 1) throw ConfigError("field 'grid.rays': each ray needs 2n-1 components");
            Vec rv = detail::to_vec(r);
            if (rv.norm() == 0) throw ConfigError("field 'grid.rays': zero ray");
            c.rays.push_back(rv);
        }
    } else {
        Vec r = Vec::Zero(2 * c.n - 1);
        r[2 * c.n - 2] = -1;
        c.rays.push_back(r);
    }
    if (auto v = get("grid.magnitudes")) c.magnitudes = detail::parse_list(*v, "grid.magnitudes");
    if (c.magnitudes.empty()) throw ConfigError("field 'grid.magnitudes': empty");
    for (std::size_t i = 0; i < c.magnitudes.size(); ++i) {
        if (!(c.magnitudes[i] > 0)) throw ConfigError("field 'grid.magnitudes': magnitudes must be positive");
        if (i && !(c.magnitudes[i] > c.magnitudes[i - 1]))
            throw ConfigError("field 'grid.magnitudes': magnitudes must be increasing");
    }
    if (auto v = get("phi.values")) c.phi_values = detail::parse_list(*v, "phi.values");
    c.tolerances = default_tolerances();
    if (auto t = tree.get_child_optional("tolerances"))
        for (const auto& [key, v] : *t) c.tolerances[key] = detail::parse_double(detail::trim(v.data()), "tolerances." + key);
    if (auto v = get("output.format")) c.format = *v;
    if (c.format != "csv" && c.format != "json") throw ConfigError("field 'output.format': expected csv or json");
    if (auto v = get("output.jobs")) c.jobs = detail::parse_int(*v, "output.jobs");
    if (c.jobs < 0) throw ConfigError("field 'output.jobs': must be non-negative");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

// FNV-1a over the raw config bytes, rendered as 16 hex digits.
inline std::string config_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace dnolab
