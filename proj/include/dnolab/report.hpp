#pragma once
// Tabular reports rendered as CSV or JSON. Floats always print with 17
// significant digits; JSON mirrors the CSV columns exactly.

#include "dnolab/version.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dnolab {

using Cell = std::variant<std::string, double, long long, bool>;

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_escape(const std::string& s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += char(c);
                }
        }
    }
    return out + "\"";
}

inline std::string cell_json(const Cell& c) {
    struct V {
        std::string operator()(const std::string& s) const { return json_escape(s); }
        std::string operator()(double d) const {
            // JSON has no nan/inf literals
            return std::isfinite(d) ? format_double(d) : json_escape(format_double(d));
        }
        std::string operator()(long long k) const { return std::to_string(k); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(V{}, c);
}

inline std::string cell_csv(const Cell& c) {
    struct V {
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string q = "\"";
            for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            return q + "\"";
        }
        std::string operator()(double d) const { return format_double(d); }
        std::string operator()(long long k) const { return std::to_string(k); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(V{}, c);
}

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct Check {
    std::string suite;
    std::string name;
    bool passed = false;
    double measured = 0;
    double tolerance = 0;
    std::string claim;   // the property being checked
    std::string detail;  // free-form context
};

struct Report {
    std::string command;
    std::string config_hash;
    std::vector<std::pair<std::string, Cell>> meta;
    std::vector<Table> tables;
    std::vector<Check> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    Table checks_table() const {
        Table t{"checks", {"suite", "check", "status", "measured", "tolerance", "claim", "detail"}, {}};
        for (const auto& c : checks)
            t.rows.push_back({c.suite, c.name, std::string(c.passed ? "pass" : "fail"), c.measured, c.tolerance,
                              c.claim, c.detail});
        return t;
    }

    std::vector<Table> all_tables() const {
        std::vector<Table> out = tables;
        if (!checks.empty()) out.push_back(checks_table());
        return out;
    }

    void write_json(std::ostream& os) const {
        os << "{\n";
        os << "  \"version\": " << json_escape(kVersion) << ",\n";
        os << "  \"command\": " << json_escape(command) << ",\n";
        os << "  \"config_hash\": " << json_escape(config_hash) << ",\n";
        os << "  \"operator_convention\": " << json_escape(kOperatorConvention) << ",\n";
        os << "  \"meta\": {";
        for (std::size_t i = 0; i < meta.size(); ++i)
            os << (i ? ", " : "") << json_escape(meta[i].first) << ": " << cell_json(meta[i].second);
        os << "},\n";
        if (!checks.empty()) os << "  \"status\": " << json_escape(all_passed() ? "pass" : "fail") << ",\n";
        os << "  \"tables\": [";
        auto tabs = all_tables();
        for (std::size_t t = 0; t < tabs.size(); ++t) {
            const Table& tb = tabs[t];
            os << (t ? "," : "") << "\n    {\"name\": " << json_escape(tb.name) << ", \"columns\": [";
            for (std::size_t c = 0; c < tb.columns.size(); ++c) os << (c ? ", " : "") << json_escape(tb.columns[c]);
            os << "], \"rows\": [";
            for (std::size_t r = 0; r < tb.rows.size(); ++r) {
                os << (r ? "," : "") << "\n      {";
                for (std::size_t c = 0; c < tb.columns.size(); ++c)
                    os << (c ? ", " : "") << json_escape(tb.columns[c]) << ": " << cell_json(tb.rows[r][c]);
                os << "}";
            }
            os << (tb.rows.empty() ? "" : "\n    ") << "]}";
        }
        os << "\n  ]\n}\n";
    }

    // Header comment lines carry the metadata; each table follows its own column row.
    void write_csv(std::ostream& os) const {
        os << "# version=" << kVersion << "\n";
        os << "# command=" << command << "\n";
        os << "# config_hash=" << config_hash << "\n";
        os << "# operator_convention=" << kOperatorConvention << "\n";
        for (const auto& [k, v] : meta) os << "# " << k << "=" << cell_csv(v) << "\n";
        if (!checks.empty()) os << "# status=" << (all_passed() ? "pass" : "fail") << "\n";
        bool first = true;
        for (const auto& tb : all_tables()) {
            if (!first) os << "\n";
            first = false;
            os << "# table=" << tb.name << "\n";
            for (std::size_t c = 0; c < tb.columns.size(); ++c) os << (c ? "," : "") << tb.columns[c];
            os << "\n";
            for (const auto& row : tb.rows) {
                for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell_csv(row[c]);
                os << "\n";
            }
        }
    }

    std::string render(const std::string& format) const {
        std::ostringstream os;
        if (format == "csv")
            write_csv(os);
        else
            write_json(os);
        return os.str();
    }
};

}  // namespace dnolab
