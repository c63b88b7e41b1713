// dnolab: symbol tables, verification suites, convergence sweeps and chart dumps.
//
// Exit status: 0 all checks pass, 1 a check failed, 2 configuration or usage error.

#include "CLI11.hpp"
#include "dnolab/config.hpp"
#include "dnolab/dno.hpp"
#include "dnolab/oracle.hpp"
#include "dnolab/parallel.hpp"
#include "dnolab/report.hpp"
#include "dnolab/verify.hpp"

#include <fstream>
#include <iostream>
#include <optional>

using namespace dnolab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Invocation {
    std::string command, config_path, out_path, format, suite;
    int jobs = 0;
};

std::string join(const Vec& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
    return s;
}

std::string phi_label(double phi) { return "phi=" + format_double(phi); }

Report base_report(const std::string& command, const RunConfig& cfg) {
    Report r;
    r.command = command;
    r.config_hash = config_hash(cfg.text);
    r.meta = {{"domain", cfg.domain_name}, {"n", (long long)cfg.n}, {"q", (long long)cfg.q}};
    return r;
}

struct GridPoint {
    std::size_t ray = 0;
    double magnitude = 0;
    Vec xi;
};

std::vector<GridPoint> frequency_grid(const RunConfig& cfg) {
    std::vector<GridPoint> out;
    for (std::size_t r = 0; r < cfg.rays.size(); ++r)
        for (double m : cfg.magnitudes) out.push_back({r, m, m * cfg.rays[r] / cfg.rays[r].norm()});
    return out;
}

// ---------------------------------------------------------------------------

Report cmd_symbol(const RunConfig& cfg, int jobs) {
    Report rep = base_report("symbol", cfg);
    BoundaryChart chart = detail::chart_from(cfg);
    LocalOperator op = assemble_square(chart, cfg.q);
    auto grid = frequency_grid(cfg);

    Table t{"symbol", {"ray", "magnitude", "xi", "row", "principal", "zero_re", "zero_im", "offdiag_max"}, {}};
    const char* terms[] = {"s-term", "a-term", "tau-term", "xx-term"};
    for (const char* name : terms) {
        t.columns.push_back(std::string(name) + "_re");
        t.columns.push_back(std::string(name) + "_im");
    }
    for (double phi : cfg.phi_values) {
        t.columns.push_back(phi_label(phi) + "_shift_re");
        t.columns.push_back(phi_label(phi) + "_shift_im");
    }
    t.columns.push_back("breakdown_deviation");
    t.columns.push_back("status");

    struct Task {
        std::vector<std::vector<Cell>> rows;
        double worst = 0;
        std::string error;
    };
    auto tasks = parallel_map<Task>(grid.size(), jobs, [&](std::size_t i) {
        const GridPoint& g = grid[i];
        Task out;
        std::vector<Cell> lead{(long long)g.ray, g.magnitude, join(g.xi)};
        try {
            DnoSymbol N = dno_symbol(op, chart, g.xi);
            CMat sum = CMat::Zero(N.zero_order.rows(), N.zero_order.cols());
            for (const auto& [name, M] : N.term_breakdown) sum += M;
            const double dev = (sum - N.zero_order).cwiseAbs().maxCoeff();
            out.worst = dev;
            std::vector<DnoSymbol> shifted;
            for (double phi : cfg.phi_values) shifted.push_back(dno_symbol_phi(op, chart, g.xi, phi));
            for (std::size_t J = 0; J < N.rows.size(); ++J) {
                std::vector<Cell> row = lead;
                row.push_back(to_string(N.rows[J]));
                row.push_back(N.principal);
                row.push_back(N.zero_order(J, J).real());
                row.push_back(N.zero_order(J, J).imag());
                double off = 0;
                for (Eigen::Index K = 0; K < N.zero_order.cols(); ++K)
                    if (K != Eigen::Index(J)) off = std::max(off, std::abs(N.zero_order(J, K)));
                row.push_back(off);
                for (const char* name : terms) {
                    cd v = N.term_breakdown.at(name)(J, J);
                    row.push_back(v.real());
                    row.push_back(v.imag());
                }
                for (const auto& S : shifted) {
                    cd v = S.zero_order(J, J) - N.zero_order(J, J);
                    row.push_back(v.real());
                    row.push_back(v.imag());
                }
                row.push_back(dev);
                row.push_back(std::string("ok"));
                out.rows.push_back(std::move(row));
            }
        } catch (const std::exception& e) {
            // isolate the failure to this frequency
            out.error = e.what();
            std::vector<Cell> row = lead;
            row.push_back(std::string(""));
            while (row.size() + 1 < t.columns.size()) row.push_back(std::nan(""));
            row.push_back("error: " + out.error);
            out.rows.push_back(std::move(row));
        }
        return out;
    });

    double worst = 0;
    int errors = 0;
    for (auto& task : tasks) {
        for (auto& row : task.rows) t.rows.push_back(std::move(row));
        worst = std::max(worst, task.worst);
        errors += !task.error.empty();
    }
    rep.tables.push_back(std::move(t));
    const double tol = cfg.tol("breakdown");
    rep.checks.push_back(detail::make_check("symbol", "breakdown_sum", worst <= tol, worst, tol,
                                            "term breakdown sums to the zero-order symbol"));
    rep.checks.push_back(detail::make_check("symbol", "evaluation_errors", errors == 0, errors, 0,
                                            "every grid frequency evaluated"));
    return rep;
}

// ---------------------------------------------------------------------------

Report cmd_verify(const RunConfig& cfg, const std::string& suite) {
    Report rep = base_report("verify", cfg);
    rep.meta.push_back({"suite", suite});
    rep.checks = run_suite(suite, cfg);
    return rep;
}

// ---------------------------------------------------------------------------
// Oracle ODE against the frozen-coefficient prediction principal + zero order.
// The xx-term comes from x-variation, which the frozen ODE does not see.

Report cmd_sweep(const RunConfig& cfg, int jobs) {
    if (cfg.magnitudes.size() < 3) throw ConfigError("field 'grid.magnitudes': sweep needs at least 3 magnitudes");
    Report rep = base_report("sweep", cfg);
    BoundaryChart chart = detail::chart_from(cfg);
    LocalOperator op = assemble_square(chart, cfg.q);
    const auto rows = op.boundary_rows();
    auto grid = frequency_grid(cfg);

    struct Job {
        std::size_t point = 0, phi = 0;
    };
    std::vector<Job> jobs_list;
    for (std::size_t f = 0; f < cfg.phi_values.size(); ++f)
        for (std::size_t g = 0; g < grid.size(); ++g) jobs_list.push_back({g, f});

    struct Result {
        std::vector<double> error;  // per boundary row
        std::vector<double> uncertainty;  // |coarse - fine| of the oracle
        std::vector<double> principal;
        std::string failure;
    };
    auto results = parallel_map<Result>(jobs_list.size(), jobs, [&](std::size_t i) {
        const GridPoint& g = grid[jobs_list[i].point];
        const double phi = cfg.phi_values[jobs_list[i].phi];
        Result out;
        try {
            DnoSymbol N = phi == 0 ? dno_symbol(op, chart, g.xi) : dno_symbol_phi(op, chart, g.xi, phi);
            const CMat xx = N.term_breakdown.at("xx-term");
            const CMat a = op.a_symbol(g.xi);
            for (int J : rows) {
                OdeProblem p;
                p.xi = g.xi;
                p.big_xi_sq = chart.xi_squared_value(op.x, g.xi).value;
                p.s0 = op.s(J, J);
                p.a0 = a(J, J);
                p.tau0 = op.tau_symbol(g.xi);
                p.phi_prime = phi;
                cd predicted = N.principal + N.zero_order(J, J) - xx(J, J);
                OdeResult r = ode_dno_detailed(p);
                out.error.push_back(std::abs(r.value - predicted));
                out.uncertainty.push_back(std::abs(r.fine - r.coarse));
                out.principal.push_back(N.principal);
            }
        } catch (const std::exception& e) {
            out.failure = "ray " + std::to_string(g.ray) + " magnitude " + format_double(g.magnitude) + " " +
                          phi_label(phi) + ": " + e.what();
        }
        return out;
    });

    Table pts{"sweep", {"ray", "magnitude", "xi", "phi_prime", "row", "error", "relative_error", "oracle_uncertainty", "status"}, {}};
    Table fits{"fit", {"ray", "phi_prime", "row", "exponent", "status"}, {}};
    const double threshold = cfg.tol("sweep_exponent");
    bool fits_ok = true;
    int failures = 0;
    double worst_exponent = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < cfg.phi_values.size(); ++f)
        for (std::size_t r = 0; r < cfg.rays.size(); ++r)
            for (std::size_t k = 0; k < rows.size(); ++k) {
                std::vector<double> mags, errs;
                bool complete = true, negligible = true;
                for (std::size_t i = 0; i < jobs_list.size(); ++i) {
                    const GridPoint& g = grid[jobs_list[i].point];
                    if (jobs_list[i].phi != f || g.ray != r) continue;
                    const Result& res = results[i];
                    std::vector<Cell> row{(long long)r, g.magnitude, join(g.xi), cfg.phi_values[f], to_string(op.rows[rows[k]])};
                    if (!res.failure.empty()) {
                        complete = false;
                        if (k == 0) ++failures;
                        row.insert(row.end(), {std::nan(""), std::nan(""), std::nan(""), "error: " + res.failure});
                    } else {
                        const double e = res.error[k];
                        row.insert(row.end(), {e, e / res.principal[k], res.uncertainty[k], std::string("ok")});
                        mags.push_back(g.magnitude);
                        errs.push_back(e);
                        // below the oracle's own resolution the error is noise
                        negligible = negligible && e <= std::max(1e-12 * res.principal[k], res.uncertainty[k]);
                    }
                    pts.rows.push_back(std::move(row));
                }
                std::vector<Cell> fit{(long long)r, cfg.phi_values[f], to_string(op.rows[rows[k]])};
                if (!complete) {
                    fit.insert(fit.end(), {std::nan(""), std::string("error")});
                } else if (negligible) {
                    // errors at the noise floor carry no decay information
                    fit.insert(fit.end(), {std::string("n/a"), std::string("negligible")});
                } else {
                    const double exponent = -detail::log_slope(mags, errs);
                    const bool ok = exponent >= threshold;
                    fits_ok = fits_ok && ok;
                    worst_exponent = std::min(worst_exponent, exponent);
                    fit.insert(fit.end(), {exponent, std::string(ok ? "ok" : "slow")});
                }
                fits.rows.push_back(std::move(fit));
            }
    rep.tables.push_back(std::move(pts));
    rep.tables.push_back(std::move(fits));
    rep.checks.push_back(detail::make_check("sweep", "decay_exponent", fits_ok,
                                            std::isfinite(worst_exponent) ? worst_exponent : std::nan(""), threshold,
                                            "oracle minus two-term prediction decays like 1/|xi|"));
    rep.checks.push_back(
        detail::make_check("sweep", "oracle_failures", failures == 0, failures, 0, "every oracle solve succeeded"));
    return rep;
}

// ---------------------------------------------------------------------------

Report cmd_chart(const RunConfig& cfg) {
    Report rep = base_report("chart", cfg);
    BoundaryChart chart = detail::chart_from(cfg);
    const int n = chart.n();
    Table g{"chart", {"quantity", "value"}, {}};
    auto put = [&](const std::string& k, Cell v) { g.rows.push_back({k, std::move(v)}); };
    put("point", join(chart.point()));
    put("radius", chart.radius());
    std::string piv;
    for (int p : chart.pivots()) piv += (piv.empty() ? "" : ";") + std::to_string(p);
    put("pivots", piv);
    put("normal", join(chart.domain().gradient(chart.point())));
    put("frame_residual", chart.frame_residual(chart.point()));
    auto tr = chart.transverse_expansion();
    put("T0", join(tr.T0));
    put("T1", join(tr.T1));
    put("T1_chart", join(tr.T1_chart));
    put("transverse_inner", tr.inner);
    put("tau_closed_form", t1t0_closed_form(chart));
    for (int j = 1; j <= n; ++j) {
        cd d = chart.d_coefficient(j);
        put("d_" + std::to_string(j) + "_re", d.real());
        put("d_" + std::to_string(j) + "_im", d.imag());
    }
    rep.tables.push_back(std::move(g));

    auto levi = chart.levi_data();
    Table lt{"levi", {"k", "l", "re", "im"}, {}};
    for (int k = 0; k < levi.matrix.rows(); ++k)
        for (int l = 0; l < levi.matrix.cols(); ++l)
            lt.rows.push_back({(long long)(k + 1), (long long)(l + 1), levi.matrix(k, l).real(), levi.matrix(k, l).imag()});
    rep.tables.push_back(std::move(lt));

    Table rt{"rows", {"row", "c_re", "c_im", "s_closed_re", "s_closed_im", "limit_re", "limit_im"}, {}};
    for (const auto& J : all_indices(n, cfg.q)) {
        if (contains(J, n)) continue;
        cd c = chart.c_coefficient(J, n);
        cd s = s_closed_form(chart, J);
        cd lim = dno_asymptotic(chart, J).limit;
        rt.rows.push_back({to_string(J), c.real(), c.imag(), s.real(), s.imag(), lim.real(), lim.imag()});
    }
    rep.tables.push_back(std::move(rt));
    return rep;
}

void emit(const Report& rep, const Invocation& inv) {
    const std::string text = rep.render(inv.format);
    if (inv.out_path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(inv.out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output '" + inv.out_path + "'");
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dnolab: two-term DNO symbols and their verification"};
    app.require_subcommand(1);
    Invocation inv;
    std::string format_flag;
    int jobs_flag = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", inv.config_path, "configuration file")->required();
        sub->add_option("--out", inv.out_path, "write the report here instead of stdout");
        sub->add_option("--format", format_flag, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--jobs", jobs_flag, "worker threads (default: DNOLAB_JOBS, then 1)")->check(CLI::PositiveNumber);
    };
    auto* symbol = app.add_subcommand("symbol", "zero-order symbol table over the frequency grid");
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    auto* sweep = app.add_subcommand("sweep", "oracle convergence study");
    auto* chart = app.add_subcommand("chart", "dump chart geometry");
    for (auto* s : {symbol, verify, sweep, chart}) add_common(s);
    verify->add_option("--suite", inv.suite, "suite name (overrides run.suite)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }
    inv.command = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_config(inv.config_path);
        inv.format = format_flag.empty() ? cfg.format : format_flag;
        const int jobs = resolve_jobs(jobs_flag > 0 ? jobs_flag : cfg.jobs);
        Report rep;
        if (inv.command == "symbol") {
            rep = cmd_symbol(cfg, jobs);
        } else if (inv.command == "verify") {
            const std::string suite = inv.suite.empty() ? cfg.suite : inv.suite;
            if (suite.empty()) throw ConfigError("verify: no suite given (use --suite or run.suite)");
            rep = cmd_verify(cfg, suite);
        } else if (inv.command == "sweep") {
            rep = cmd_sweep(cfg, jobs);
        } else {
            rep = cmd_chart(cfg);
        }
        emit(rep, inv);
        return rep.all_passed() ? kExitPass : kExitFail;
    } catch (const ConfigError& e) {
        std::cerr << "dnolab: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "dnolab: " << inv.command << " failed: " << e.what() << "\n";
        return kExitFail;
    }
}
