#pragma once
// Verification checks shared by `dnolab verify` and the acceptance runner.
// Each function returns named checks with measured values and tolerances.

#include "dnolab/config.hpp"
#include "dnolab/dno.hpp"
#include "dnolab/forms.hpp"
#include "dnolab/oracle.hpp"
#include "dnolab/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace dnolab {

namespace detail {
inline Check make_check(std::string suite, std::string name, bool passed, double measured, double tolerance,
                        std::string claim, std::string detail = "") {
    return Check{std::move(suite), std::move(name), passed, measured, tolerance, std::move(claim), std::move(detail)};
}

inline std::string fmt(double v) { return format_double(v); }

inline std::string fmt(cd v) { return fmt(v.real()) + (v.imag() < 0 ? "-" : "+") + fmt(std::abs(v.imag())) + "i"; }

// Least-squares slope of log(y) against log(x).
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t m = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

inline Vec transverse_ray(int n, double t) {
    Vec xi = Vec::Zero(2 * n - 1);
    xi[2 * n - 2] = t;
    return xi;
}

// Six fixed directions covering both transverse cones, the neutral cone and mixed directions.
inline std::vector<Vec> reference_rays(int n) {
    const int m = 2 * n - 1;
    std::vector<Vec> rays;
    rays.push_back(transverse_ray(n, -1));
    rays.push_back(transverse_ray(n, 1));
    Vec e = Vec::Zero(m);
    e[0] = 1;
    rays.push_back(e);
    Vec a = Vec::Constant(m, 1.0);
    a[m - 1] = -1;
    rays.push_back(a);
    Vec b(m);
    for (int i = 0; i < m; ++i) b[i] = (i % 2 ? -0.2 : 0.3);
    b[m - 1] = -1;
    rays.push_back(b);
    Vec c(m);
    for (int i = 0; i < m; ++i) c[i] = (i % 2 ? 0.7 : -0.5);
    c[m - 1] = 0.4;
    rays.push_back(c);
    for (auto& r : rays) r /= r.norm();
    return rays;
}

inline MultiIndex first_boundary_row(const LocalOperator& op) { return op.rows[op.boundary_rows().at(0)]; }

inline BoundaryChart chart_from(const RunConfig& cfg) {
    Domain d = cfg.make_domain();
    return build_chart(d, cfg.chart_point(d), {});
}
}  // namespace detail

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_forms(int max_n = 5, int max_q = 3) {
    long long cases = 0, bad = 0;
    for (int n = 1; n <= max_n; ++n)
        for (int q = 1; q <= std::min(n, max_q); ++q) {
            auto r = check_epsilon_identity_counted(n, q);
            cases += r.cases;
            bad += (long long)r.counterexamples.size();
        }
    return {detail::make_check("forms", "epsilon_identity", bad == 0, double(bad), 0,
                               "sign identity for inserting l and contracting k, exhaustive",
                               "n<=" + std::to_string(max_n) + " q<=" + std::to_string(max_q) + " cases=" +
                                   std::to_string(cases) + " counterexamples=" + std::to_string(bad))};
}

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_residue_constants() {
    using GR = GaussRational;
    const GR I = GR::unit_i();
    struct Case {
        const char* name;
        std::vector<long long> num;
        int up, down;
        GR scale, expected;
    };
    const std::vector<Case> cases = {
        {"S_int", {0, 1}, 1, 2, GR(1), GR(Rational(1, 4))},
        {"S_b", {1}, 1, 1, GR(1), GR(Rational(1, 2))},
        {"A", {1}, 1, 2, I, GR(Rational(1, 4))},
        {"rho_tau", {1}, 1, 3, GR(1), GR(Rational(-1, 8))},
        {"xx", {1}, 2, 3, GR(1), GR(Rational(0), Rational(-3, 16))},
        {"Lambda0", {1}, 1, 1, GR(1), GR(Rational(1, 2))},
    };
    std::vector<Check> out;
    for (const auto& c : cases) {
        auto r = detail::eta_rational(c.num, c.up, c.down, c.name, c.scale);
        GR v = eta_integral_over_2pi(r, EtaMode::RealLine);
        double dev = std::abs((v - c.expected).to_complex());
        out.push_back(detail::make_check("residues", std::string("constant_") + c.name, v == c.expected, dev, 0,
                                         "restriction constant reproduced exactly",
                                         "value=" + v.str() + " expected=" + c.expected.str()));
    }
    return out;
}

inline RationalEta<cd> random_rational_eta(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1, 1), Im(0.3, 2.0);
    std::uniform_int_distribution<int> npoles(2, 3), mult(1, 2);
    RationalEta<cd> r;
    int count = npoles(rng);
    // poles on both sides so the integral is generically nonzero
    for (int k = 0; k < count; ++k) {
        double s = (k == 0) ? 1.0 : (k == 1 ? -1.0 : (U(rng) > 0 ? 1.0 : -1.0));
        r.poles.push_back({cd(U(rng), s * Im(rng)), mult(rng)});
    }
    const int order = r.pole_order();
    std::uniform_int_distribution<int> deg(0, std::max(0, order - 2));
    const int d = deg(rng);
    std::vector<cd> coeffs;
    for (int k = 0; k <= d; ++k) coeffs.push_back(cd(U(rng), U(rng)));
    if (std::abs(coeffs.back()) < 0.1) coeffs.back() = 1.0;
    r.numerator = Polynomial<cd>(coeffs);
    r.label = "fuzz";
    return r;
}

inline std::vector<Check> verify_residue_fuzz(int cases = 20, double tol = 1e-10, unsigned seed = 2024) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    int done = 0;
    for (int k = 0; k < cases; ++k) {
        RationalEta<cd> r = random_rational_eta(rng);
        cd exact = eta_integral(r, EtaMode::RealLine);
        cd quad = quad_eta_integral(r);
        worst = std::max(worst, std::abs(exact - quad) / std::max(std::abs(exact), 1e-300));
        ++done;
    }
    return {detail::make_check("residues", "fuzz_vs_quadrature", worst <= tol, worst, tol,
                               "residue engine agrees with adaptive quadrature", std::to_string(done) + " cases")};
}

inline std::vector<Check> verify_residues(const RunConfig& cfg) {
    auto out = verify_residue_constants();
    auto f = verify_residue_fuzz(20, cfg.tol("quad_rel"));
    out.insert(out.end(), f.begin(), f.end());
    return out;
}

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_lambda0_coefficients(const Lambda0Table& t) {
    using GR = GaussRational;
    const Sqrt2Ext expected[4] = {
        Sqrt2Ext{GR(0), GR(Rational(1, 2))},
        Sqrt2Ext{GR(Rational(1, 2)), GR(0)},
        Sqrt2Ext{GR(Rational(-1, 4)), GR(0)},
        Sqrt2Ext{GR(Rational(0), Rational(3, 8)), GR(0)},
    };
    const Sqrt2Ext got[4] = {t.s_coeff, t.a_coeff, t.tau_coeff, t.xx_coeff};
    const char* names[4] = {"coefficient_s", "coefficient_a", "coefficient_tau", "coefficient_xx"};
    std::vector<Check> out;
    for (int i = 0; i < 4; ++i) {
        double dev = std::abs((got[i] - expected[i]).to_complex());
        out.push_back(detail::make_check("lambda0", names[i], got[i] == expected[i], dev, 0,
                                         "zero-order coefficient from the degree -1 balance, exact",
                                         "value=" + got[i].str() + " expected=" + expected[i].str()));
    }
    return out;
}

inline std::vector<Check> verify_lambda0() {
    std::vector<Check> out;
    Lambda0Table t;
    try {
        t = lambda0_from_residues();
    } catch (const ConventionDriftError& e) {
        out.push_back(detail::make_check("lambda0", "table", false, 1, 0, "restriction constants", e.what()));
        return out;
    }
    for (const auto& c : t.channels)
        out.push_back(detail::make_check("lambda0", "channel_" + c.name, c.value == c.expected,
                                         std::abs((c.value - c.expected).to_complex()), 0, "restriction constant",
                                         "value=" + c.value.str()));
    auto coeffs = verify_lambda0_coefficients(t);
    out.insert(out.end(), coeffs.begin(), coeffs.end());
    return out;
}

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_ode_closed_forms(double tol = 1e-8) {
    std::vector<Check> out;
    OdeProblem p;
    p.xi = Vec::Zero(1);
    p.big_xi_sq = 25;
    cd v = ode_dno(p);
    out.push_back(detail::make_check("ode", "pure_exponential", std::abs(v - 5.0) <= tol, std::abs(v - 5.0), tol,
                                     "v = e^{5 rho} gives v'(0) = 5"));
    p.big_xi_sq = 100;
    p.s0 = std::sqrt(2.0);
    v = ode_dno(p);
    const double root = 1 + std::sqrt(101.0);
    out.push_back(detail::make_check("ode", "quadratic_root", std::abs(v - root) <= tol, std::abs(v - root), tol,
                                     "constant s0 = sqrt2 at |Xi| = 10 gives 1 + sqrt(101)"));
    // grid self-validation: plain RK4 at N and 2N steps
    OdeProblem q;
    q.xi = Vec::Zero(1);
    q.big_xi_sq = 64;
    q.s0 = 0.7;
    q.a0 = cd(0, 4);
    q.tau0 = 80;
    OdeResult r = ode_dno_detailed(q);
    out.push_back(detail::make_check("ode", "grid_halving", r.step_ratio < 1e-7, r.step_ratio, 1e-7,
                                     "halving the step changes v'(0) by less than 1e-7 relative"));
    return out;
}

// Flat model: the oracle DNO is |Xi| for every frequency.
inline std::vector<Check> verify_ode_flat(int n, double tol = 1e-6) {
    Domain flat = halfspace_flat(n);
    BoundaryChart chart = build_chart(flat, flat.default_point, {});
    LocalOperator op = assemble_square(chart, 1);
    const int J = op.boundary_rows().at(0);
    double worst = 0;
    int count = 0;
    for (const Vec& ray : detail::reference_rays(n))
        for (double mag : {4.0, 8.0, 16.0, 32.0}) {
            Vec xi = mag * ray;
            OdeProblem p;
            p.xi = xi;
            p.big_xi_sq = chart.xi_squared_value(Vec::Zero(2 * n - 1), xi).value;
            p.s0 = op.s(J, J);
            p.a0 = op.a_symbol(xi)(J, J);
            p.tau0 = op.tau_symbol(xi);
            cd v = ode_dno(p);
            double X = std::sqrt(p.big_xi_sq);
            worst = std::max(worst, std::abs(v - X) / X);
            ++count;
        }
    return {detail::make_check("ode", "flat_dno_equals_xi", worst <= tol, worst, tol,
                               "flat model oracle DNO equals |Xi|", std::to_string(count) + " frequencies on 6 rays")};
}

// Constant-coefficient remainder: |oracle - (|Xi| + Lambda0)| decays like 1/|Xi|.
struct RemainderSweep {
    std::vector<double> magnitudes, residuals, ratios;
};

inline RemainderSweep ode_remainder_sweep(const std::vector<double>& mags, cd s0 = 0.7, cd a_rate = cd(0, 0.5),
                                          double tau_rate = 1.3) {
    const auto& k = dno_coefficients();
    RemainderSweep out;
    for (double X : mags) {
        OdeProblem p;
        p.xi = Vec::Zero(1);
        p.xi[0] = -X;
        p.big_xi_sq = X * X;
        p.s0 = s0;
        p.a0 = a_rate * X;
        p.tau0 = tau_rate * X * X;
        cd predicted = X + k.s * s0 + k.a * p.a0 / X + k.tau * p.tau0 / (X * X);
        out.magnitudes.push_back(X);
        out.residuals.push_back(std::abs(ode_dno(p) - predicted));
    }
    for (std::size_t i = 1; i < out.residuals.size(); ++i) out.ratios.push_back(out.residuals[i] / out.residuals[i - 1]);
    return out;
}

inline std::vector<Check> verify_ode_remainder(double lo = 0.4, double hi = 0.65) {
    RemainderSweep s = ode_remainder_sweep({16, 32, 64, 128, 256});
    std::vector<Check> out;
    std::string detail;
    bool ok = true;
    double worst = 0;
    for (std::size_t i = 0; i < s.ratios.size(); ++i) {
        ok = ok && s.ratios[i] >= lo && s.ratios[i] <= hi;
        worst = std::max(worst, std::max(lo - s.ratios[i], s.ratios[i] - hi));
        detail += (i ? " " : "") + detail::fmt(s.ratios[i]);
    }
    out.push_back(detail::make_check("ode", "remainder_ratio", ok, s.ratios.empty() ? 0 : s.ratios.back(), hi,
                                     "order -1 remainder halves under frequency doubling", "ratios=" + detail));
    return out;
}

inline std::vector<Check> verify_ode(const RunConfig& cfg) {
    auto out = verify_ode_closed_forms(cfg.tol("ode_closed"));
    auto f = verify_ode_flat(cfg.n, cfg.tol("ode_rel"));
    out.insert(out.end(), f.begin(), f.end());
    auto r = verify_ode_remainder(cfg.tol("ratio_lo"), cfg.tol("ratio_hi"));
    out.insert(out.end(), r.begin(), r.end());
    return out;
}

// ---------------------------------------------------------------------------

struct StripComparison {
    int xi1 = 0;
    double with_xx = 0, without_xx = 0, gain = 0;
    cd fitted;
};

inline StripComparison strip_ab(int xi1, double eps = 0.05) {
    const auto& k = dno_coefficients();
    StripProblem p;
    p.xi1 = xi1;
    p.epsilon = eps;
    StripResult r = strip_dno(p);
    StripComparison c;
    c.xi1 = xi1;
    c.without_xx = std::abs(r.value - r.principal);
    c.with_xx = std::abs(r.value - r.principal - k.xx * r.xx_unit);
    c.gain = c.without_xx / c.with_xx;
    c.fitted = r.fitted_coefficient;
    return c;
}

inline std::vector<Check> verify_strip_basics() {
    std::vector<Check> out;
    StripProblem p;
    p.epsilon = 0;
    StripResult r = strip_dno(p);
    OdeProblem o;
    o.xi = Vec::Zero(1);
    o.big_xi_sq = double(p.xi1) * p.xi1;
    double dev = std::abs(r.value - ode_dno(o)) / std::abs(r.value);
    out.push_back(detail::make_check("strip", "separable_matches_ode", dev <= 1e-6, dev, 1e-6,
                                     "unperturbed strip equals the half-line oracle"));
    p.epsilon = 0.05;
    StripResult a = strip_dno(p);
    p.epsilon = -0.05;
    StripResult b = strip_dno(p);
    double za = (a.value - a.principal).imag(), zb = (b.value - b.principal).imag();
    double sym = std::abs(za + zb) / std::abs(za);
    out.push_back(detail::make_check("strip", "epsilon_symmetry", sym <= 1e-3, sym, 1e-3,
                                     "eps -> -eps flips the x-dependent contribution"));
    return out;
}

inline std::vector<Check> verify_strip_gain(double gain = 2.0, double slack = 0.1) {
    std::vector<Check> out;
    for (int xi1 : {16, 32}) {
        StripComparison c = strip_ab(xi1);
        const double need = gain * (1 - slack);
        out.push_back(detail::make_check(
            "strip", "xx_term_gain_" + std::to_string(xi1), c.gain >= need, c.gain, need,
            "including the 3i/8 term reduces the strip residual at least twofold",
            "residual_with=" + detail::fmt(c.with_xx) + " residual_without=" + detail::fmt(c.without_xx) +
                " fitted_coefficient=" + detail::fmt(c.fitted)));
    }
    return out;
}

inline std::vector<Check> verify_strip(const RunConfig& cfg) {
    auto out = verify_strip_basics();
    auto g = verify_strip_gain(cfg.tol("strip_gain"), cfg.tol("strip_slack"));
    out.insert(out.end(), g.begin(), g.end());
    return out;
}

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_phi_shift_identity() {
    Lambda0Table t = lambda0_from_residues();
    // s-channel (-sqrt2 phi'), interior and boundary parts of rho d_rho^2 (-phi'),
    // and the transverse tau channel 2 phi' xi_T^2 / Xi^2 = phi' on the pure ray
    const Sqrt2Ext minus_sqrt2 = Sqrt2Ext{GaussRational(0), GaussRational(-1)};
    Sqrt2Ext s_part = t.s_coeff * minus_sqrt2;
    Sqrt2Ext rest = Sqrt2Ext(0) - (t.phi_interior + t.phi_boundary) * Sqrt2Ext(-1) + t.tau_coeff;
    Sqrt2Ext total = s_part + rest;
    bool ok = s_part == Sqrt2Ext(-1) && rest == Sqrt2Ext(0) && total == Sqrt2Ext(-1);
    return {detail::make_check("cancellation", "phi_shift_exact", ok, std::abs((total + Sqrt2Ext(1)).to_complex()), 0,
                               "weighted DNO shifts by exactly -phi' on the pure transverse ray",
                               "s_part=" + s_part.str() + " interior+boundary+tangential=" + rest.str())};
}

inline std::vector<Check> verify_cancellation_chart(const BoundaryChart& chart, int q, const std::vector<double>& mags,
                                                    const std::vector<double>& phis, double tol) {
    std::vector<Check> out;
    const int n = chart.n();
    LocalOperator op = assemble_square(chart, q);
    for (int row : op.boundary_rows()) {
        const MultiIndex J = op.rows[row];
        std::vector<Vec> pure;
        for (double m : mags) pure.push_back(detail::transverse_ray(n, -m));
        CancellationReport rep = cancellation_check(op, chart, pure, J, phis);
        out.push_back(detail::make_check("cancellation", "pure_ray_" + to_string(J), rep.max_deviation <= tol,
                                         rep.max_deviation, tol, "boundary zero-order symbol independent of phi'"));
        double shift = 0;
        for (const Vec& xi : pure)
            for (double p : phis) {
                DnoSymbol N = dno_symbol_phi(op, chart, xi, p);
                int r = N.row_index(J);
                shift = std::max(shift, std::abs(N.term_breakdown.at("phi-term")(r, r) + p));
            }
        out.push_back(detail::make_check("cancellation", "pure_ray_shift_" + to_string(J), shift <= tol, shift, tol,
                                         "phi part equals -phi' on the pure ray"));
        // oblique rays with |xi_L|/|xi_T| = kappa
        std::vector<double> kappas{0.1, 0.05, 0.025, 0.0125}, devs;
        for (double kappa : kappas) {
            Vec xi = detail::transverse_ray(n, -mags.back());
            Vec dir = Vec::Zero(2 * n - 1);
            for (int i = 0; i < 2 * n - 2; ++i) dir[i] = (i % 2 ? -0.6 : 0.8);
            if (2 * n - 2 > 0) xi.head(2 * n - 2) = kappa * mags.back() * dir.head(2 * n - 2) / dir.head(2 * n - 2).norm();
            devs.push_back(cancellation_check(op, chart, {xi}, J, phis).max_deviation);
        }
        if (2 * n - 2 == 0) continue;
        double C = 0;
        bool monotone = true;
        for (std::size_t i = 0; i < kappas.size(); ++i) {
            C = std::max(C, devs[i] / kappas[i]);
            if (i) monotone = monotone && devs[i] < devs[i - 1];
        }
        double slope = devs.front() > 1e-14 ? detail::log_slope(kappas, devs) : 0;
        bool ok = monotone || devs.front() <= tol;
        bool linear = devs.front() <= tol || slope >= 0.9;
        out.push_back(detail::make_check("cancellation", "oblique_bound_" + to_string(J), ok && linear, C, 0,
                                         "deviation bounded by C |xi_L|/|xi_T| and decreasing with the ratio",
                                         "C=" + detail::fmt(C) + " fitted_slope=" + detail::fmt(slope)));
    }
    return out;
}

inline std::vector<Check> verify_cancellation(const RunConfig& cfg) {
    auto out = verify_phi_shift_identity();
    BoundaryChart chart = detail::chart_from(cfg);
    auto c = verify_cancellation_chart(chart, cfg.q, cfg.magnitudes, cfg.phi_values, cfg.tol("cancel_ray"));
    out.insert(out.end(), c.begin(), c.end());
    return out;
}

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_crosscheck_chart(const BoundaryChart& chart, int q, int trials, double tol,
                                                  double offdiag_tol, double closed_tol) {
    CrosscheckReport r = square_crosscheck(chart, q, trials);
    const std::string tag = "modulo-frame tangential deviation " + detail::fmt(r.tangential_modulo);
    return {
        detail::make_check("crosscheck", "principal", r.principal < tol, r.principal, tol,
                           "assembled principal part matches the direct operator"),
        detail::make_check("crosscheck", "rho_coefficient", r.rho < tol, r.rho, tol,
                           "assembled normal-derivative coefficient matches the direct operator"),
        detail::make_check("crosscheck", "random_forms", r.random_forms < tol, r.random_forms, tol,
                           "random quadratic forms agree", std::to_string(trials) + " trials; " + tag),
        detail::make_check("crosscheck", "s_offdiagonal", r.s_offdiag < offdiag_tol, r.s_offdiag, offdiag_tol,
                           "S is diagonal"),
        detail::make_check("crosscheck", "s_closed_form", r.s_closed < closed_tol, r.s_closed, closed_tol,
                           "diagonal S matches the c/d closed form"),
        detail::make_check("crosscheck", "tau_transverse_closed_form", r.tau_closed < closed_tol, r.tau_closed,
                           closed_tol, "transverse tau coefficient matches -4 sqrt2 <T1, T0>"),
    };
}

inline std::vector<Check> verify_crosscheck(const RunConfig& cfg) {
    BoundaryChart chart = detail::chart_from(cfg);
    return verify_crosscheck_chart(chart, cfg.q, 5, cfg.tol("crosscheck"), cfg.tol("s_offdiag"),
                                   cfg.tol("closed_form"));
}

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_microlocal(int n = 2, int samples = 10000, unsigned seed = 99) {
    const MicrolocalCutoffs cut = microlocal_cutoffs();
    const int m = 2 * n - 1;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> G(0, 1);
    std::uniform_real_distribution<double> logmag(std::log(1e-2), std::log(1e3));
    long long sum_bad = 0, support_bad = 0, one_bad = 0, low_bad = 0;
    auto xi_l_norm = [m](const Vec& xi) { return xi.head(m - 1).norm(); };
    for (int s = 0; s < samples; ++s) {
        Vec xi(m);
        for (int i = 0; i < m; ++i) xi[i] = G(rng);
        xi *= std::exp(logmag(rng)) / xi.norm();
        const double pp = cut.psi_plus(xi), p0 = cut.psi_zero(xi), pm = cut.psi_minus(xi);
        if (pp + p0 + pm != 1.0) ++sum_bad;
        const double t = xi[m - 1], l = xi_l_norm(xi), r = xi.norm();
        if (pp > 0 && !(t > 0.5 * l && r > 0.5 * cut.radius)) ++support_bad;
        if (pm > 0 && !(-t > 0.5 * l && r > 0.5 * cut.radius)) ++support_bad;
        if (r >= cut.radius && t > 0.75 * l && pp != 1.0) ++one_bad;
        if (r >= cut.radius && -t > 0.75 * l && pm != 1.0) ++one_bad;
        if (r < 0.5 * cut.radius && p0 != 1.0) ++low_bad;
        if (r >= cut.radius && std::abs(t) < 0.5 * l && p0 != 1.0) ++low_bad;
    }
    std::vector<Check> out;
    out.push_back(detail::make_check("microlocal", "partition_exact", sum_bad == 0, double(sum_bad), 0,
                                     "psi+ + psi0 + psi- = 1 exactly", std::to_string(samples) + " samples"));
    out.push_back(detail::make_check("microlocal", "support", support_bad == 0, double(support_bad), 0,
                                     "psi+- supported in xi_T > |xi_L|/2 outside the low-frequency ball"));
    out.push_back(detail::make_check("microlocal", "identically_one", one_bad == 0, double(one_bad), 0,
                                     "psi+- = 1 where |xi_T| > 3|xi_L|/4 and |xi| >= radius"));
    out.push_back(detail::make_check("microlocal", "neutral_region", low_bad == 0, double(low_bad), 0,
                                     "psi0 = 1 near zero and in the neutral cone"));
    // |xi|^k |d^k psi| over dyadic scales: the scaled derivative must not grow
    double worst_growth = 0;
    std::string bounds;
    for (int k = 1; k <= 2; ++k) {
        double base = 0, top = 0;
        for (int j = 0; j <= 10; ++j) {
            const double scale = std::ldexp(1.0, j);
            double scale_max = 0;
            for (int d = 0; d < 64; ++d) {
                const double ang = 0.25 + 1.1 * d / 64.0;  // sweeps through the transition band
                Vec dir = Vec::Zero(m);
                dir[0] = std::cos(ang);
                dir[m - 1] = std::sin(ang);
                Vec xi = scale * dir;
                const double h = 1e-3 * scale;
                for (int axis = 0; axis < m; ++axis) {
                    auto f = [&](double s) {
                        Vec z = xi;
                        z[axis] += s;
                        return cut.psi_plus(z);
                    };
                    double der = (k == 1) ? (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)
                                          : (-f(-2 * h) + 16 * f(-h) - 30 * f(0) + 16 * f(h) - f(2 * h)) / (12 * h * h);
                    scale_max = std::max(scale_max, std::pow(scale, k) * std::abs(der));
                }
            }
            if (j == 0) base = scale_max;
            top = std::max(top, scale_max);
        }
        worst_growth = std::max(worst_growth, top / base);
        bounds += (k > 1 ? " " : "") + std::string("k=") + std::to_string(k) + ":" + detail::fmt(top);
    }
    out.push_back(detail::make_check("microlocal", "symbol_bounds", worst_growth <= 1.05, worst_growth, 1.05,
                                     "|xi|^k |d^k psi| bounded over dyadic scales, k <= 2", bounds));
    return out;
}

// ---------------------------------------------------------------------------

inline std::vector<Check> verify_nonelliptic(const BoundaryChart& chart, int q, const std::vector<double>& mags) {
    LocalOperator op = assemble_square(chart, q);
    const MultiIndex J = detail::first_boundary_row(op);
    const int n = chart.n();
    double worst_minus = 0, worst_plus = 0;
    std::vector<double> ts = mags;
    ts.push_back(3.7);
    ts.push_back(1e5);
    for (double t : ts) {
        worst_minus = std::max(worst_minus, std::abs(boundary_operator_symbol(op, chart, detail::transverse_ray(n, -t), J).first_order));
        worst_plus = std::max(worst_plus, std::abs(boundary_operator_symbol(op, chart, detail::transverse_ray(n, t), J).first_order - 2 * t));
    }
    return {
        detail::make_check("kohn", "first_order_vanishes_negative_ray", worst_minus == 0, worst_minus, 0,
                           "boundary first-order symbol is 0 on xi_L = 0, xi_T < 0"),
        detail::make_check("kohn", "first_order_positive_ray", worst_plus == 0, worst_plus, 0,
                           "boundary first-order symbol is 2|xi_T| on xi_L = 0, xi_T > 0"),
    };
}

struct KohnSweep {
    std::vector<double> t, normalized, ratios;
};

inline KohnSweep kohn_sweep(const BoundaryChart& chart, const MultiIndex& J, double c = 1.0) {
    KohnSweep s;
    const int n = chart.n();
    for (int e = 6; e <= 10; ++e) {
        const double t = std::ldexp(1.0, e);
        Vec xi = detail::transverse_ray(n, -t);
        if (n > 1) xi[0] = c;
        s.t.push_back(t);
        s.normalized.push_back(std::abs(kohn_comparison(chart, xi, J).residual) / t);
    }
    for (std::size_t i = 1; i < s.normalized.size(); ++i) s.ratios.push_back(s.normalized[i] / s.normalized[i - 1]);
    return s;
}

inline std::vector<Check> verify_kohn_chart(const BoundaryChart& chart, int q, double ratio_max, double floor) {
    std::vector<Check> out;
    const int n = chart.n();
    LocalOperator op = assemble_square(chart, q);
    for (int row : op.boundary_rows()) {
        const MultiIndex J = op.rows[row];
        KohnSweep s = kohn_sweep(chart, J);
        bool ok = true;
        std::string detail;
        for (std::size_t i = 0; i < s.ratios.size(); ++i) {
            // a residual already at rounding level has no ratio to test
            ok = ok && (s.ratios[i] <= ratio_max || s.normalized[i + 1] < floor);
            detail += (i ? " " : "") + detail::fmt(s.ratios[i]);
        }
        out.push_back(detail::make_check("kohn", "residual_decay_" + to_string(J), ok, s.normalized.back(), floor,
                                         "composed boundary symbol minus the Kohn form is O(|xi_L|) + O(1)",
                                         "ratios=" + detail + " ratio_max=" + detail::fmt(ratio_max)));
    }
    // levi correction of the field composition at the center
    auto levi = chart.levi_data();
    double worst = 0;
    for (int k = 1; k < n; ++k)
        for (double t : {-64.0, -256.0}) {
            Vec xi = detail::transverse_ray(n, t);
            cd comp = field_composition_symbol(chart, chart.field_Lbar(k), chart.field_L(k), xi);
            auto f = chart.tangential_frame(Vec::Zero(2 * n - 1));
            cd lam = (f.l[k - 1].transpose() * xi.cast<cd>())(0);
            cd first = comp + std::norm(lam);  // sigma(Lbar) sigma(L) = -|lambda|^2 for real xi
            worst = std::max(worst, std::abs(first - std::sqrt(2.0) * t * levi.norms[k - 1]) / std::abs(t));
        }
    if (n > 1)
        out.push_back(detail::make_check("kohn", "levi_correction", worst < 1e-6, worst, 1e-6,
                                         "sigma(Lbar L) - sigma(Lbar) sigma(L) = sqrt2 xi_T |L|^2 at the center"));
    return out;
}

inline std::vector<Check> verify_kohn_flat(int n) {
    Domain flat = halfspace_flat(n);
    BoundaryChart chart = build_chart(flat, flat.default_point, {});
    LocalOperator op = assemble_square(chart, 1);
    const MultiIndex J = detail::first_boundary_row(op);
    // the flat frame is constant, so the residual is zero up to rounding in the
    // differentiated chart frame; measured relative to Xi^2
    double worst = 0, lap = 0;
    for (const Vec& ray : detail::reference_rays(n))
        for (double t : {4.0, 64.0}) {
            Vec xi = t * ray;
            Vec pure = xi;
            pure.head(2 * n - 2).setZero();
            if (pure.norm() == 0) continue;
            const double xi2 = chart.xi_squared_value(Vec::Zero(2 * n - 1), pure).value;
            worst = std::max(worst, std::abs(kohn_comparison(chart, pure, J).residual) / xi2);
            auto b = boundary_operator_symbol(op, chart, xi, J);
            double xl2 = xi.head(2 * n - 2).squaredNorm();
            lap = std::max(lap, std::abs(b.composed.scalar(2) - 0.25 * xl2) / (t * t));
        }
    return {
        detail::make_check("kohn", "flat_residual", worst <= 1e-14, worst, 1e-14,
                           "flat model residual vanishes to rounding, relative to Xi^2"),
        detail::make_check("kohn", "flat_tangential_laplacian", lap < 1e-14, lap, 1e-14,
                           "composed second-order part equals |xi_L|^2/4 on the flat model"),
    };
}

inline std::vector<Check> verify_kohn(const RunConfig& cfg) {
    BoundaryChart chart = detail::chart_from(cfg);
    auto out = verify_kohn_flat(cfg.n);
    auto k = verify_kohn_chart(chart, cfg.q, cfg.tol("kohn_ratio"), cfg.tol("kohn_floor"));
    out.insert(out.end(), k.begin(), k.end());
    auto e = verify_nonelliptic(chart, cfg.q, cfg.magnitudes);
    out.insert(out.end(), e.begin(), e.end());
    return out;
}

// ---------------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"forms",        "residues",   "lambda0",    "ode",  "strip",
                                                   "cancellation", "crosscheck", "microlocal", "kohn"};
    return names;
}

inline std::vector<Check> run_suite(const std::string& suite, const RunConfig& cfg) {
    if (suite == "forms") return verify_forms();
    if (suite == "residues") return verify_residues(cfg);
    if (suite == "lambda0") return verify_lambda0();
    if (suite == "ode") return verify_ode(cfg);
    if (suite == "strip") return verify_strip(cfg);
    if (suite == "cancellation") return verify_cancellation(cfg);
    if (suite == "crosscheck") return verify_crosscheck(cfg);
    if (suite == "microlocal") return verify_microlocal(cfg.n);
    if (suite == "kohn") return verify_kohn(cfg);
    throw ConfigError("unknown suite '" + suite + "'");
}

}  // namespace dnolab
