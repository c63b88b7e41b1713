#include "catch_amalgamated.hpp"
#include "dnolab/config.hpp"
#include "dnolab/report.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>
#include <sys/wait.h>

using namespace dnolab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("dnolab_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    fs::path p = scratch_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Run {
    int code = -1;
    std::string out, err;
};

// Runs the binary with stdout and stderr captured to files.
Run run(const std::string& args, const std::string& env = "") {
    const char* bin = std::getenv("DNOLAB_BIN");
    REQUIRE(bin != nullptr);
    static int counter = 0;
    const std::string tag = std::to_string(counter++);
    fs::path out = scratch_dir() / ("out" + tag), err = scratch_dir() / ("err" + tag);
    std::string cmd = env + " '" + std::string(bin) + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

const char* kBall = "[domain]\nname = ball\nn = 2\n[run]\nq = 1\n"
                    "[grid]\nrays = 0, 0, -1 ; 0.3, -0.2, -1\nmagnitudes = 8, 16, 32\n";
const char* kFlat = "[domain]\nname = halfspace-flat\nn = 2\n[grid]\nrays = 0, 0, -1 ; 1, 1, 0.5\nmagnitudes = 4, 8, 16\n";

}  // namespace

// ---- configuration ----------------------------------------------------

TEST_CASE("config defaults and overrides") {
    RunConfig c = parse_config_text("");
    CHECK(c.domain_name == "ball");
    CHECK(c.n == 2);
    CHECK(c.q == 1);
    CHECK(c.rays.size() == 1);
    CHECK(c.rays[0][2] == -1);
    CHECK(c.tol("ode_rel") == 1e-6);
    RunConfig d = parse_config_text("[domain]\nname = siegel\nn = 3\n[run]\nq = 2\n[tolerances]\node_rel = 1e-4\n"
                                    "[phi]\nvalues = 0, 2\n[output]\nformat = csv\njobs = 3\n");
    CHECK(d.domain_name == "siegel");
    CHECK(d.n == 3);
    CHECK(d.q == 2);
    CHECK(d.tol("ode_rel") == 1e-4);
    CHECK(d.phi_values == std::vector<double>{0, 2});
    CHECK(d.format == "csv");
    CHECK(d.jobs == 3);
}

TEST_CASE("polynomial domains parse their terms") {
    RunConfig c = parse_config_text("[domain]\nname = polynomial\nn = 2\nterms = 1 : 0 0 1 0 ; 1 : 2 0 0 0 ; 1 : 0 2 0 0\n");
    REQUIRE(c.terms.size() == 3);
    CHECK(c.terms[1].exponents == std::vector<int>{2, 0, 0, 0});
    CHECK(c.make_domain().n == 2);
}

TEST_CASE("config errors name the offending field") {
    auto message = [](const std::string& text) {
        try {
            parse_config_text(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK_THAT(message("[domain]\ncolour = red\n"), Catch::Matchers::ContainsSubstring("domain.colour"));
    CHECK_THAT(message("[extra]\na = 1\n"), Catch::Matchers::ContainsSubstring("extra"));
    CHECK_THAT(message("[grid]\nmagnitudes = 8, 4\n"), Catch::Matchers::ContainsSubstring("increasing"));
    CHECK_THAT(message("[grid]\nmagnitudes = -1, 4\n"), Catch::Matchers::ContainsSubstring("positive"));
    CHECK_THAT(message("[run]\nq = 3\n"), Catch::Matchers::ContainsSubstring("run.q"));
    CHECK_THAT(message("[domain]\nn = two\n"), Catch::Matchers::ContainsSubstring("domain.n"));
    CHECK_THAT(message("[grid]\nrays = 1, 0\n"), Catch::Matchers::ContainsSubstring("grid.rays"));
    CHECK_THAT(message("[domain]\nname = torus\n"), Catch::Matchers::ContainsSubstring("torus"));
    CHECK_THAT(message("[output]\nformat = xml\n"), Catch::Matchers::ContainsSubstring("output.format"));
    CHECK_THAT(message("[domain\nname = ball\n"), Catch::Matchers::ContainsSubstring("line 1"));
    CHECK_THROWS_AS(load_config("/nonexistent/dnolab.ini"), ConfigError);
}

TEST_CASE("config hash is stable and content sensitive") {
    // FNV-1a 64 of the empty string is the offset basis
    CHECK(config_hash("") == "cbf29ce484222325");
    CHECK(config_hash("a") == "af63dc4c8601ec8c");
    CHECK(config_hash(kBall) != config_hash(kFlat));
}

// ---- report rendering -------------------------------------------------

TEST_CASE("floats print with 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("JSON and CSV carry the same table") {
    Report r;
    r.command = "symbol";
    r.config_hash = "00";
    r.meta = {{"domain", std::string("ball")}};
    r.tables.push_back({"t", {"name", "value", "count", "flag"}, {{std::string("a,\"b\""), 0.25, 3LL, true}}});
    r.checks.push_back({"s", "c", false, 1.5, 1.0, "claim", ""});
    json j = json::parse(r.render("json"));
    CHECK(j["version"] == kVersion);
    CHECK(j["operator_convention"] == "2box");
    CHECK(j["status"] == "fail");
    CHECK(j["tables"][0]["rows"][0]["name"] == "a,\"b\"");
    CHECK(j["tables"][0]["rows"][0]["value"] == 0.25);
    CHECK(j["tables"][1]["name"] == "checks");
    const std::string csv = r.render("csv");
    CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("name,value,count,flag\n\"a,\"\"b\"\"\",0.25,3,true\n"));
    CHECK(csv.find('\r') == std::string::npos);
}

// ---- command line -----------------------------------------------------

TEST_CASE("verify lambda0 passes all ten checks") {
    fs::path cfg = write_file("ball.ini", kBall);
    Run r = run("verify --suite lambda0 --config '" + cfg.string() + "'");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["command"] == "verify");
    CHECK(j["config_hash"] == config_hash(kBall));
    CHECK(j["operator_convention"] == "2box");
    CHECK(j["status"] == "pass");
    auto rows = j["tables"][0]["rows"];
    CHECK(rows.size() == 10);
    for (const auto& row : rows) CHECK(row["status"] == "pass");
}

TEST_CASE("verify forms reports exhaustive counts; verify ode passes on the flat model") {
    fs::path flat = write_file("flat.ini", kFlat);
    Run forms = run("verify --suite forms --config '" + flat.string() + "'");
    REQUIRE(forms.code == 0);
    CHECK_THAT(forms.out, Catch::Matchers::ContainsSubstring("cases=202"));
    Run ode = run("verify --suite ode --config '" + flat.string() + "'");
    CHECK(ode.code == 0);
}

TEST_CASE("run.suite selects the suite when --suite is absent") {
    fs::path cfg = write_file("suite.ini", std::string(kBall) + "suite = residues\n");
    // the appended key lands in [grid], where it is an unknown field
    Run dup = run("verify --config '" + cfg.string() + "'");
    CHECK(dup.code == 2);
    fs::path ok = write_file("suite_ok.ini", "[run]\nsuite = residues\n");
    Run r = run("verify --config '" + ok.string() + "'");
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["meta"]["suite"] == "residues");
}

TEST_CASE("symbol table: flat model has zero zero-order and output is deterministic") {
    fs::path flat = write_file("flat_sym.ini", kFlat);
    Run r = run("symbol --format csv --config '" + flat.string() + "'");
    REQUIRE(r.code == 0);
    CHECK(r.out.find('\r') == std::string::npos);
    json j = json::parse(run("symbol --config '" + flat.string() + "'").out);
    auto rows = j["tables"][0]["rows"];
    CHECK(rows.size() == 2 * 3 * 2);
    for (const auto& row : rows) {
        CHECK(std::abs(row["zero_re"].get<double>()) < 1e-12);
        CHECK(std::abs(row["zero_im"].get<double>()) < 1e-12);
    }
    fs::path ball = write_file("ball_sym.ini", kBall);
    Run a = run("symbol --jobs 1 --config '" + ball.string() + "'");
    Run b = run("symbol --jobs 3 --config '" + ball.string() + "'");
    Run c = run("symbol --config '" + ball.string() + "'", "DNOLAB_JOBS=2");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    json k = json::parse(a.out);
    for (const auto& row : k["tables"][0]["rows"]) CHECK(row["breakdown_deviation"].get<double>() <= 1e-12);
}

TEST_CASE("--out writes the report to a file") {
    fs::path ball = write_file("ball_out.ini", kBall);
    fs::path out = scratch_dir() / "chart.json";
    Run r = run("chart --out '" + out.string() + "' --config '" + ball.string() + "'");
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    json j = json::parse(read_file(out));
    CHECK(j["command"] == "chart");
    CHECK(j["tables"][1]["name"] == "levi");
}

TEST_CASE("sweep: flat model is exact, ball decays like 1/|xi|") {
    fs::path flat = write_file("flat_sweep.ini", std::string(kFlat) + "[phi]\nvalues = 0\n");
    Run f = run("sweep --config '" + flat.string() + "'");
    REQUIRE(f.code == 0);
    for (const auto& row : json::parse(f.out)["tables"][1]["rows"]) CHECK(row["exponent"] == "n/a");
    fs::path ball = write_file("ball_sweep.ini", kBall);
    Run b = run("sweep --config '" + ball.string() + "'");
    REQUIRE(b.code == 0);
    for (const auto& row : json::parse(b.out)["tables"][1]["rows"]) {
        CHECK(row["exponent"].get<double>() >= 0.7);
        CHECK(row["exponent"].get<double>() <= 1.2);
    }
    fs::path two = write_file("two.ini", "[grid]\nmagnitudes = 8, 16\n");
    CHECK(run("sweep --config '" + two.string() + "'").code == 2);
}

TEST_CASE("sweep isolates oracle failures and keeps the other rows") {
    // at |xi| = 4 the weight 1 + phi' rho degenerates inside the oracle's depth
    fs::path cfg = write_file("weak.ini", "[grid]\nmagnitudes = 4, 16, 32, 64\n[phi]\nvalues = 0, 0.5\n");
    Run r = run("sweep --config '" + cfg.string() + "'");
    CHECK(r.code == 1);
    json j = json::parse(r.out);
    int errors = 0, ok = 0;
    for (const auto& row : j["tables"][0]["rows"]) {
        const std::string status = row["status"];
        if (status.rfind("error:", 0) == 0) {
            ++errors;
            CHECK_THAT(status, Catch::Matchers::ContainsSubstring("magnitude 4"));
        } else {
            ++ok;
        }
    }
    CHECK(errors == 1);
    CHECK(ok == 7);
}

TEST_CASE("exit codes: config errors give 2, failing checks give 1") {
    fs::path bad = write_file("bad.ini", "[domain]\ncolour = red\n");
    Run r = run("symbol --config '" + bad.string() + "'");
    CHECK(r.code == 2);
    CHECK_THAT(r.err, Catch::Matchers::ContainsSubstring("domain.colour"));
    CHECK(run("symbol --config /nonexistent.ini").code == 2);
    fs::path ball = write_file("ball_codes.ini", kBall);
    CHECK(run("verify --suite nonsense --config '" + ball.string() + "'").code == 2);
    CHECK(run("verify --config '" + ball.string() + "'").code == 2);
    CHECK(run("frobnicate --config '" + ball.string() + "'").code == 2);
    CHECK(run("symbol --format xml --config '" + ball.string() + "'").code == 2);
    // a tolerance no computation can meet
    fs::path strict = write_file("strict.ini", "[tolerances]\node_closed = 0\n");
    CHECK(run("verify --suite ode --config '" + strict.string() + "'").code == 1);
}
