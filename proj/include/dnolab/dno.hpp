#pragma once
// Two-term Dirichlet-to-Neumann symbol of 2□, its behaviour on the negative
// transverse ray, the microlocal partition, the boundary operator and the
// weighted (phi) variant.

#include "dnolab/exact.hpp"
#include "dnolab/geometry.hpp"
#include "dnolab/operator_assembly.hpp"
#include "dnolab/symbols.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnolab {

struct ConventionDriftError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateFrequencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Restriction constants. Every integrand is written with |Xi| = 1, so poles sit
// at +-i; the (1/2pi) eta-integral is the coefficient of 1/|Xi|^k in the
// restricted term.

struct ResidueChannel {
    std::string name;
    RationalEta<GaussRational> integrand;
    EtaMode mode = EtaMode::RealLine;
    GaussRational value;
    GaussRational expected;
};

struct Lambda0Table {
    std::vector<ResidueChannel> channels;
    std::vector<ResidueChannel> phi_channels;
    // coefficients of s0, a0/|Xi|, sigma(tau)/Xi^2 and the xx-term
    Sqrt2Ext s_coeff, a_coeff, tau_coeff, xx_coeff;
    // weighted variant: interior and boundary parts of rho d_rho^2
    Sqrt2Ext phi_interior, phi_boundary;

    const ResidueChannel& channel(const std::string& name) const {
        for (const auto& c : channels)
            if (c.name == name) return c;
        for (const auto& c : phi_channels)
            if (c.name == name) return c;
        throw LookupError("no channel " + name);
    }
};

namespace detail {
inline RationalEta<GaussRational> eta_rational(std::vector<long long> num, int up, int down, std::string label,
                                               GaussRational scale = GaussRational(1)) {
    std::vector<GaussRational> c;
    for (long long v : num) c.push_back(scale * GaussRational(v));
    RationalEta<GaussRational> r;
    r.numerator = Polynomial<GaussRational>(c);
    r.poles = {{GaussRational::unit_i(), up}, {-GaussRational::unit_i(), down}};
    r.label = std::move(label);
    return r;
}
}  // namespace detail

inline Lambda0Table lambda0_from_residues() {
    using GR = GaussRational;
    const GR I = GR::unit_i();
    Lambda0Table t;
    auto add = [](std::vector<ResidueChannel>& v, std::string name, RationalEta<GR> r, GR expected) {
        ResidueChannel c;
        c.name = std::move(name);
        c.integrand = std::move(r);
        c.expected = expected;
        c.value = eta_integral_over_2pi(c.integrand, c.mode);
        if (c.value != c.expected)
            throw ConventionDriftError("restriction constant for " + c.name + " is " + c.value.str() + ", expected " +
                                       c.expected.str());
        v.push_back(std::move(c));
    };
    // interior normal-derivative term: eta/((eta-i)(eta+i)^2)
    add(t.channels, "S_int", detail::eta_rational({0, 1}, 1, 2, "S_int"), GR(Rational(1, 4)));
    // boundary normal-derivative term: 1/((eta-i)(eta+i))
    add(t.channels, "S_b", detail::eta_rational({1}, 1, 1, "S_b"), GR(Rational(1, 2)));
    // tangential first order: i/((eta-i)(eta+i)^2)
    add(t.channels, "A", detail::eta_rational({1}, 1, 2, "A", I), GR(Rational(1, 4)));
    // rho tau: 1/((eta-i)(eta+i)^3)
    add(t.channels, "rho_tau", detail::eta_rational({1}, 1, 3, "rho_tau"), GR(Rational(-1, 8)));
    // x-dependence of Xi^2: 1/((eta-i)^2(eta+i)^3)
    add(t.channels, "xx", detail::eta_rational({1}, 2, 3, "xx"), GR(Rational(0), Rational(-3, 16)));
    // the unknown zero-order DNO term: 1/((eta-i)(eta+i))
    add(t.channels, "Lambda0", detail::eta_rational({1}, 1, 1, "Lambda0"), GR(Rational(1, 2)));

    // Degree -1 balance: Lambda0 * r_Lambda0 + sum_c w_c r_c = 0, weights per term.
    const Sqrt2Ext r2 = Sqrt2Ext::sqrt2();
    auto val = [&](const std::string& n) { return Sqrt2Ext(t.channel(n).value); };
    const Sqrt2Ext lam = val("Lambda0");
    auto solve = [&](Sqrt2Ext sum) { return Sqrt2Ext(0) - sum / lam; };
    t.s_coeff = solve(r2 * val("S_int") - r2 * val("S_b"));
    t.a_coeff = solve(Sqrt2Ext(-1) * val("A"));
    t.tau_coeff = solve(Sqrt2Ext(-1) * val("rho_tau"));
    t.xx_coeff = solve(val("xx"));

    // weighted operator: rho d_rho^2 acting on the Poisson extension
    add(t.phi_channels, "phi_eta2", detail::eta_rational({0, 0, 1}, 1, 3, "phi_eta2"), GR(Rational(1, 8)));
    add(t.phi_channels, "phi_2eta", detail::eta_rational({0, 2}, 1, 2, "phi_2eta"), GR(Rational(1, 2)));
    add(t.phi_channels, "phi_boundary", detail::eta_rational({0, 0, 2}, 2, 2, "phi_boundary"), GR(Rational(1, 2)));
    t.phi_interior = (val("phi_eta2") - val("phi_2eta")) / lam;
    t.phi_boundary = Sqrt2Ext(0) - (Sqrt2Ext(-1) * val("phi_boundary")) / lam;
    return t;
}

// Cached numeric copy of the table.
struct DnoCoefficients {
    cd s, a, tau, xx, phi_interior, phi_boundary;
};
inline const DnoCoefficients& dno_coefficients() {
    static const DnoCoefficients c = [] {
        Lambda0Table t = lambda0_from_residues();
        return DnoCoefficients{t.s_coeff.to_complex(),      t.a_coeff.to_complex(),
                               t.tau_coeff.to_complex(),    t.xx_coeff.to_complex(),
                               t.phi_interior.to_complex(), t.phi_boundary.to_complex()};
    }();
    return c;
}

// ---------------------------------------------------------------------------

struct DnoSymbol {
    Vec x, xi;
    double principal = 0;
    std::vector<MultiIndex> rows;
    CMat zero_order;
    std::map<std::string, CMat> term_breakdown;
    std::vector<std::string> tags;

    int row_index(const MultiIndex& J) const {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i] == J) return int(i);
        throw MembershipError("row " + to_string(J) + " not present");
    }
    std::vector<int> boundary_rows() const {
        std::vector<int> out;
        const int n = rows.empty() ? 0 : int(xi.size() + 1) / 2;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (!contains(rows[i], n)) out.push_back(int(i));
        return out;
    }
    CMat boundary_block() const {
        auto b = boundary_rows();
        CMat M(b.size(), b.size());
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) M(i, j) = zero_order(b[i], b[j]);
        return M;
    }
};

inline void check_frequency(double xi2, const Vec& xi) {
    if (!(std::sqrt(std::max(xi2, 0.0)) >= 1e-8 * xi.norm()) || xi.norm() == 0)
        throw DegenerateFrequencyError("dno: |Xi| below threshold");
}

// sigma(N^-) = |Xi| + (sqrt2/2) s0 + a0/(2|Xi|) - sigma(tau)/(4 Xi^2) + (3i/8) dxi Xi^2 . dx Xi^2 / |Xi|^3
inline DnoSymbol dno_symbol(const LocalOperator& op, const BoundaryChart& chart, const Vec& xi) {
    const auto& k = dno_coefficients();
    XiSquaredJet jet = chart.xi_squared(op.x, xi);
    check_frequency(jet.value, xi);
    const double X = std::sqrt(jet.value);
    const int m = int(op.rows.size());
    const CMat Id = CMat::Identity(m, m);
    DnoSymbol out;
    out.x = op.x;
    out.xi = xi;
    out.rows = op.rows;
    out.principal = X;
    out.term_breakdown["s-term"] = k.s * op.s;
    out.term_breakdown["a-term"] = k.a * op.a_symbol(xi) / X;
    out.term_breakdown["tau-term"] = k.tau * op.tau_symbol(xi) / jet.value * Id;
    out.term_breakdown["xx-term"] = k.xx * jet.grad_xi.dot(jet.grad_x) / (X * X * X) * Id;
    out.zero_order = CMat::Zero(m, m);
    for (const auto& [name, M] : out.term_breakdown) out.zero_order += M;
    if (m > 1) out.tags.push_back("off-diagonal entries unverified-off-center");
    return out;
}

inline DnoSymbol dno_symbol(const BoundaryChart& chart, const Vec& x, const Vec& xi, int q) {
    return dno_symbol(assemble_square(chart, q, x), chart, xi);
}

// Weighted variant: base symbol plus the channel response to (S, tau, rho_dd)
// changes produced by the weight, reported as a separate "phi-term".
inline DnoSymbol dno_symbol_phi(const LocalOperator& base, const BoundaryChart& chart, const Vec& xi, double phi_prime) {
    const auto& k = dno_coefficients();
    DnoSymbol out = dno_symbol(base, chart, xi);
    LocalOperator w = apply_phi(base, phi_prime);
    const int m = int(base.rows.size());
    const double xi2 = chart.xi_squared_value(base.x, xi).value;
    CMat term = k.s * (w.s - base.s);
    term += (k.tau * (w.tau_symbol(xi) - base.tau_symbol(xi)) / xi2) * CMat::Identity(m, m);
    term -= ((k.phi_interior + k.phi_boundary) * (w.rho_dd - base.rho_dd)) * CMat::Identity(m, m);
    out.term_breakdown["phi-term"] = term;
    out.zero_order += term;
    return out;
}

inline DnoSymbol dno_symbol_phi(const BoundaryChart& chart, const Vec& x, const Vec& xi, int q, double phi_prime) {
    return dno_symbol_phi(assemble_square(chart, q, x), chart, xi, phi_prime);
}

// ---------------------------------------------------------------------------
// Negative transverse ray at the chart center.

struct DnoAsymptotic {
    cd limit;          // -(-1)^{|J|} sqrt2 c + sum_{k in J}|L_k|^2 - sum_{k notin J}|L_k|^2
    cd s0;             // closed-form s_{0,J}
    cd t_coefficient;  // closed-form T coefficient of the first-order operator
    double tau_tt = 0; // closed-form symbol coefficient tau^{2n-1,2n-1}

    // zero-order symbol written through r = xi_{2n-1}/|Xi| and r2 = xi_{2n-1}^2/Xi^2
    cd finite(double r, double r2) const {
        const auto& k = dno_coefficients();
        return k.s * s0 + k.a * cd(0, 1) * t_coefficient * r + k.tau * tau_tt * r2;
    }
};

inline DnoAsymptotic dno_asymptotic(const BoundaryChart& chart, const MultiIndex& J) {
    const int n = chart.n();
    if (contains(J, n)) throw MembershipError("dno_asymptotic: row must not contain n");
    DnoAsymptotic a;
    cd c = chart.c_coefficient(J, n);
    auto levi = chart.levi_data();
    double sgn = (J.size() % 2) ? -1.0 : 1.0;
    double lsum = 0;
    for (int k = 1; k < n; ++k) lsum += (contains(J, k) ? 1.0 : -1.0) * levi.norms[k - 1];
    a.limit = -sgn * std::sqrt(2.0) * c + lsum;
    a.s0 = s_closed_form(chart, J);
    auto tr = chart.transverse_expansion();
    cd d = chart.d_coefficient(n);
    a.t_coefficient = cd(0, 2) * tr.inner + cd(0, 2 * std::sqrt(2.0)) * lsum - sgn * cd(0, 4) * c.real() - cd(0, 2) * d;
    a.tau_tt = 4 * std::sqrt(2.0) * tr.inner;
    return a;
}

// ---------------------------------------------------------------------------
// Microlocal partition of unity in the tangential frequency space.

struct MicrolocalCutoffs {
    double lo = 0.5, hi = 0.75;  // transition band in xi_{2n-1}/|xi_L|
    double radius = 1.0;         // low-frequency cutoff; psi0 = 1 on |xi| < radius/2

    static double smooth_step(double t) {
        if (t <= 0) return 0;
        if (t >= 1) return 1;
        double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
        return a / (a + b);
    }
    // angular factor in theta = xi_{2n-1}/|xi|, the band lo < ratio < hi mapped to theta
    double angular(double theta) const {
        const double tlo = lo / std::sqrt(1 + lo * lo), thi = hi / std::sqrt(1 + hi * hi);
        return smooth_step((theta - tlo) / (thi - tlo));
    }
    double radial(double r) const { return smooth_step((r - 0.5 * radius) / (0.5 * radius)); }

    double psi_plus(const Vec& xi) const {
        double r = xi.norm();
        if (r == 0) return 0;
        return radial(r) * angular(xi[xi.size() - 1] / r);
    }
    double psi_minus(const Vec& xi) const {
        double r = xi.norm();
        if (r == 0) return 0;
        return radial(r) * angular(-xi[xi.size() - 1] / r);
    }
    double psi_zero(const Vec& xi) const { return 1.0 - psi_plus(xi) - psi_minus(xi); }
};

inline MicrolocalCutoffs microlocal_cutoffs(double radius = 1.0) {
    MicrolocalCutoffs c;
    c.radius = radius;
    return c;
}

// ---------------------------------------------------------------------------
// Boundary operator (1/sqrt2 N1 - i T0) + Upsilon0 on the rows J not containing n.

inline cd upsilon_symbol(const DnoSymbol& N, const BoundaryChart& chart, const MultiIndex& J, const MultiIndex& K) {
    const int n = chart.n();
    if (contains(J, n) || contains(K, n)) throw MembershipError("upsilon_symbol: rows must not contain n");
    const int r = N.row_index(J), c = N.row_index(K);
    cd v = N.zero_order(r, c) / std::sqrt(2.0);
    if (J == K) {
        double sgn = (J.size() % 2) ? -1.0 : 1.0;
        v += sgn * chart.c_coefficient(J, n);
    }
    return v;
}

inline cd upsilon_symbol(const LocalOperator& op, const BoundaryChart& chart, const Vec& xi, const MultiIndex& J,
                         const MultiIndex& K) {
    return upsilon_symbol(dno_symbol(op, chart, xi), chart, J, K);
}

// Limit of the diagonal entry along xi_{2n-1} -> -infinity.
inline double upsilon_limit(const BoundaryChart& chart, const MultiIndex& J) {
    auto levi = chart.levi_data();
    double lsum = 0;
    for (int k = 1; k < chart.n(); ++k) lsum += (contains(J, k) ? 1.0 : -1.0) * levi.norms[k - 1];
    return lsum / std::sqrt(2.0);
}

// Scalar symbol evaluators built from the chart.
inline SymbolEvaluator n1_symbol(const BoundaryChart& chart) {
    SymbolEvaluator e;
    e.degree = 1;
    e.eval = [&chart](const Vec& x, const Vec& xi) {
        XiSquaredJet j = chart.xi_squared(x, xi);
        double X = std::sqrt(j.value);
        SymbolJet s;
        s.value = X;
        s.grad_xi = (j.grad_xi / (2 * X)).cast<cd>();
        s.grad_x = (j.grad_x / (2 * X)).cast<cd>();
        return s;
    };
    return e;
}

// sigma(T0) = i t(x).xi with t the tangential chart components of T.
inline SymbolEvaluator t0_symbol(const BoundaryChart& chart) {
    SymbolEvaluator e;
    e.degree = 1;
    e.eval = [&chart](const Vec& x, const Vec& xi) {
        auto t = chart.tangential_frame(x).t;
        SymbolJet s;
        s.value = cd(0, 1) * t.dot(xi);
        s.grad_xi = cd(0, 1) * t.cast<cd>();
        s.grad_x = CVec(x.size());
        for (int i = 0; i < x.size(); ++i) {
            Vec dt = central4(
                [&](double h) {
                    Vec z = x;
                    z[i] += h;
                    return Vec(chart.tangential_frame(z, false).t);
                },
                1e-3);
            s.grad_x[i] = cd(0, 1) * dt.dot(xi);
        }
        return s;
    };
    return e;
}

inline SymbolEvaluator linear_combination(const SymbolEvaluator& a, cd ca, const SymbolEvaluator& b, cd cb) {
    SymbolEvaluator e;
    e.degree = std::max(a.degree, b.degree);
    e.eval = [a, b, ca, cb](const Vec& x, const Vec& xi) {
        SymbolJet ja = a.eval(x, xi), jb = b.eval(x, xi);
        SymbolJet s;
        s.value = ca * ja.value + cb * jb.value;
        s.grad_xi = ca * ja.grad_xi + cb * jb.grad_xi;
        s.grad_x = ca * ja.grad_x + cb * jb.grad_x;
        return s;
    };
    return e;
}

struct BoundarySymbol {
    cd first_order;              // sigma(N1/sqrt2 - i T0) = |Xi|/sqrt2 + xi_{2n-1} at x = 0
    CVec zero_order;             // Upsilon0 row over boundary columns
    GradedSymbolValue composed;  // (N1/sqrt2 + i T0) o (N1/sqrt2 - i T0)
    cd commutator;               // sigma([T0, N1]) = d_{x_{2n-1}} |Xi|
};

inline BoundarySymbol boundary_operator_symbol(const LocalOperator& op, const BoundaryChart& chart, const Vec& xi,
                                               const MultiIndex& J) {
    const int n = chart.n();
    if (contains(J, n)) throw MembershipError("boundary_operator_symbol: row must not contain n");
    const Vec x = Vec::Zero(2 * n - 1);
    BoundarySymbol b;
    XiSquaredJet jet = chart.xi_squared(x, xi);
    check_frequency(jet.value, xi);
    // sqrt(Xi^2/2) keeps the xi_L = 0 ray exact
    b.first_order = std::sqrt(jet.value / 2) + xi[2 * n - 2];
    DnoSymbol N = dno_symbol(op, chart, xi);
    auto br = N.boundary_rows();
    b.zero_order = CVec(br.size());
    for (std::size_t k = 0; k < br.size(); ++k) b.zero_order[k] = upsilon_symbol(N, chart, J, N.rows[br[k]]);
    SymbolEvaluator n1 = n1_symbol(chart), t0 = t0_symbol(chart);
    const double s = 1 / std::sqrt(2.0);
    SymbolEvaluator left = linear_combination(n1, s, t0, cd(0, 1));
    SymbolEvaluator right = linear_combination(n1, s, t0, cd(0, -1));
    b.composed = compose_two_term(left, right, x, xi);
    b.commutator = n1.eval(x, xi).grad_x[2 * n - 2];
    return b;
}

// ---------------------------------------------------------------------------
// Comparison of the composed boundary symbol with the Kohn Laplacian form.

struct KohnComparison {
    cd composed;   // degree 2 + degree 1 of (1/2) N1 o N1 + T0 o T0
    cd rhs;        // Kohn form with the Levi correction
    cd residual;   // composed - rhs
    cd literal_residual;  // same with the Levi correction sign as printed
};

// sigma(V o W) two-term for tangential boundary fields at x = 0, from chart components.
inline cd field_composition_symbol(const BoundaryChart& chart, const ComplexField& V, const ComplexField& W,
                                   const Vec& xi) {
    const int n = chart.n();
    const Vec y0 = Vec::Zero(2 * n);
    CVec cV = chart.chart_components(V, y0).head(2 * n - 1);
    CVec cW = chart.chart_components(W, y0).head(2 * n - 1);
    CMat DW = chart.chart_component_derivatives(W, y0).topLeftCorner(2 * n - 1, 2 * n - 1);
    const CVec X = xi.cast<cd>();
    cd sv = cd(0, 1) * (cV.transpose() * X)(0), sw = cd(0, 1) * (cW.transpose() * X)(0);
    cd first = cd(0, 1) * ((DW * cV).transpose() * X)(0);
    return sv * sw + first;
}

inline KohnComparison kohn_comparison(const BoundaryChart& chart, const Vec& xi, const MultiIndex& J) {
    const int n = chart.n();
    const Vec x = Vec::Zero(2 * n - 1);
    KohnComparison k;
    SymbolEvaluator n1 = n1_symbol(chart), t0 = t0_symbol(chart);
    GradedSymbolValue nn = compose_two_term(n1, n1, x, xi);
    GradedSymbolValue tt = compose_two_term(t0, t0, x, xi);
    k.composed = 0.5 * (nn.scalar(2) + nn.scalar(1)) + tt.scalar(2) + tt.scalar(1);
    auto levi = chart.levi_data();
    cd rhs = 0, levi_term = 0;
    const double t = xi[2 * n - 2];
    for (int kk = 1; kk < n; ++kk) {
        if (contains(J, kk)) {
            rhs -= field_composition_symbol(chart, chart.field_L(kk), chart.field_Lbar(kk), xi);
            levi_term -= std::sqrt(2.0) * t * levi.norms[kk - 1];
        } else {
            rhs -= field_composition_symbol(chart, chart.field_Lbar(kk), chart.field_L(kk), xi);
            levi_term += std::sqrt(2.0) * t * levi.norms[kk - 1];
        }
    }
    k.rhs = rhs + levi_term;
    k.residual = k.composed - k.rhs;
    k.literal_residual = k.composed - (-rhs - levi_term);
    return k;
}

// ---------------------------------------------------------------------------
// phi-independence of the boundary zero-order symbol.

struct CancellationReport {
    double max_deviation = 0;
    std::vector<double> per_xi;  // max pairwise deviation at each frequency
    std::vector<std::vector<cd>> values;  // [xi][phi]
};

inline cd boundary_zero_order_phi(const LocalOperator& base, const BoundaryChart& chart, const Vec& xi,
                                  const MultiIndex& J, double phi_prime) {
    DnoSymbol N = dno_symbol_phi(base, chart, xi, phi_prime);
    const int r = N.row_index(J);
    double sgn = (J.size() % 2) ? -1.0 : 1.0;
    return N.zero_order(r, r) / std::sqrt(2.0) + phi_prime / std::sqrt(2.0) + sgn * chart.c_coefficient(J, chart.n());
}

inline CancellationReport cancellation_check(const LocalOperator& base, const BoundaryChart& chart,
                                             const std::vector<Vec>& xi_sweep, const MultiIndex& J,
                                             const std::vector<double>& phi_values) {
    CancellationReport rep;
    for (const auto& xi : xi_sweep) {
        std::vector<cd> vals;
        for (double p : phi_values) vals.push_back(boundary_zero_order_phi(base, chart, xi, J, p));
        double dev = 0;
        for (std::size_t a = 0; a < vals.size(); ++a)
            for (std::size_t b = a + 1; b < vals.size(); ++b) dev = std::max(dev, std::abs(vals[a] - vals[b]));
        rep.per_xi.push_back(dev);
        rep.values.push_back(vals);
        rep.max_deviation = std::max(rep.max_deviation, dev);
    }
    return rep;
}

}  // namespace dnolab
