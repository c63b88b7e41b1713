#pragma once
// Independent numerical ground truth. Nothing here reads the symbol tables;
// symbol values only appear as comparison targets in the callers.

#include "dnolab/geometry.hpp"
#include "dnolab/operator_assembly.hpp"
#include "dnolab/symbols.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace dnolab {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RefinementError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Half-line ODE: -(1 + phi' rho) v'' + (Xi^2 + 2 phi' rho xi_T^2) v + sqrt2 (s0 - sqrt2 phi') v'
//                + a0 v + rho tau0 v = 0 on [-L, 0], v(0) = 1, decaying at -L.

struct OdeProblem {
    Vec xi;
    double big_xi_sq = 0;
    cd s0{0}, a0{0}, tau0{0};
    double phi_prime = 0;
    double depth = 0;  // 0 selects 12/|Xi|
    int grid = 400;
    double richardson_tol = 1e-7;
};

struct OdeResult {
    cd value;         // Richardson-combined v'(0)
    cd coarse, fine;  // plain RK4 at N and 2N steps
    double depth = 0;
    int steps = 0;
    double step_ratio = 0;  // |coarse - fine| / |fine - richardson|-free estimate
};

namespace detail {
// Integrates (v, v') from -L to 0 with N RK4 steps; returns v'(0)/v(0).
inline cd ode_shoot(const OdeProblem& p, double L, int N) {
    const double X = std::sqrt(p.big_xi_sq);
    const double xt = p.xi.size() ? p.xi[p.xi.size() - 1] : 0.0;
    const cd s = p.s0 - std::sqrt(2.0) * p.phi_prime;
    auto rhs = [&](double r, const Eigen::Vector2cd& y) {
        const double lead = 1 + p.phi_prime * r;
        if (lead < 0.1) throw SolverError("ode_dno: weighted leading coefficient degenerates on the depth interval");
        cd zero = p.big_xi_sq + 2 * p.phi_prime * r * xt * xt + p.a0 + r * p.tau0;
        Eigen::Vector2cd d;
        d[0] = y[1];
        d[1] = (zero * y[0] + std::sqrt(2.0) * s * y[1]) / lead;
        return d;
    };
    Eigen::Vector2cd y(1.0, X);
    const double h = L / N;
    double r = -L;
    for (int k = 0; k < N; ++k) {
        Eigen::Vector2cd k1 = rhs(r, y);
        Eigen::Vector2cd k2 = rhs(r + h / 2, y + h / 2 * k1);
        Eigen::Vector2cd k3 = rhs(r + h / 2, y + h / 2 * k2);
        Eigen::Vector2cd k4 = rhs(r + h, y + h * k3);
        y += h / 6 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        r = -L + (k + 1) * h;
        // renormalize: only the ratio v'/v matters
        double m = std::abs(y[0]);
        if (!(m > 0) || !std::isfinite(m)) throw SolverError("ode_dno: scheme diverged");
        y /= m;
    }
    return y[1] / y[0];
}
}  // namespace detail

inline OdeResult ode_dno_detailed(const OdeProblem& p) {
    if (!(p.big_xi_sq > 0)) throw SolverError("ode_dno: Xi^2 must be positive");
    const double X = std::sqrt(p.big_xi_sq);
    const double L = p.depth > 0 ? p.depth : 12.0 / X;
    if (L < 8.0 / X) throw SolverError("ode_dno: depth below the decay-resolution bound 8/|Xi|");
    OdeResult out;
    out.depth = L;
    out.steps = std::max(p.grid, 16);
    out.coarse = detail::ode_shoot(p, L, out.steps);
    out.fine = detail::ode_shoot(p, L, 2 * out.steps);
    out.value = richardson4(out.coarse, out.fine);
    const double change = std::abs(out.fine - out.coarse) / std::abs(out.value);
    out.step_ratio = change;
    if (!std::isfinite(change) || change > std::max(p.richardson_tol, 1e-3))
        throw SolverError("ode_dno: grid refinement changed v'(0) by " + std::to_string(change));
    if (std::real(out.value) <= 0) throw SolverError("ode_dno: solution is not decaying");
    return out;
}

inline cd ode_dno(const OdeProblem& p) { return ode_dno_detailed(p).value; }

// ---------------------------------------------------------------------------
// Periodic strip: -d_rho^2 v - a(x) d_x^2 v = 0, a = 1 + eps cos x, on [-L, 0] x S^1,
// Dirichlet data e^{i xi1 x}. Fourier in x couples modes k and k +- 1; second-order
// differences in rho with a block tridiagonal solve.

struct StripProblem {
    int xi1 = 16;
    double epsilon = 0.05;
    double x0 = std::numbers::pi / 2;  // evaluation point, where a' is extremal
    int modes = 6;                     // Fourier modes -modes..modes around the carrier
    double depth_factor = 24;          // depth = depth_factor / |xi1|
    int resolution = 2000;             // rho intervals on the coarsest level
};

struct StripResult {
    cd value;              // e^{-i x0 xi1} N(e^{i x xi1})(x0)
    cd principal;          // sqrt(a(x0)) |xi1|
    cd xx_unit;            // dxi Xi^2 . dx Xi^2 / |Xi|^3 at (x0, xi1)
    cd fitted_coefficient; // (value - principal) / xx_unit
    double richardson_gap = 0;
};

namespace detail {
// Returns the carrier-projected DNO symbol at x0 for a given rho resolution.
inline cd strip_solve(const StripProblem& p, int N) {
    const int M = 2 * p.modes + 1;
    const double L = p.depth_factor / std::abs(double(p.xi1));
    const double h = L / N;
    // Tridiagonal in rho: (-v_{j-1} + 2 v_j - v_{j+1})/h^2 + A v_j = 0, A couples modes.
    CMat A = CMat::Zero(M, M);
    for (int k = 0; k < M; ++k) {
        double f = p.xi1 + (k - p.modes);
        A(k, k) = f * f;
        if (k > 0) A(k, k - 1) = 0.5 * p.epsilon * std::pow(p.xi1 + (k - 1 - p.modes), 2);
        if (k + 1 < M) A(k, k + 1) = 0.5 * p.epsilon * std::pow(p.xi1 + (k + 1 - p.modes), 2);
    }
    // unknowns v_1..v_{N-1} (rho_j = -L + j h); v_0 = 0 at depth, v_N = e_carrier
    const CMat D = CMat::Identity(M, M) * (2.0 / (h * h)) + A;
    const double off = -1.0 / (h * h);
    std::vector<CMat> C(N);  // block Thomas: modified diagonal inverses
    std::vector<CVec> d(N);
    CVec rhs_last = CVec::Zero(M);
    rhs_last[p.modes] = -off;  // boundary value moved to the right side
    Eigen::PartialPivLU<CMat> lu;
    for (int j = 1; j <= N - 1; ++j) {
        CMat Dj = D;
        CVec bj = (j == N - 1) ? rhs_last : CVec(CVec::Zero(M));
        if (j > 1) {
            Dj -= off * off * C[j - 1];
            bj -= off * d[j - 1];
        }
        lu.compute(Dj);
        C[j] = lu.inverse();
        d[j] = C[j] * bj;
    }
    std::vector<CVec> v(N + 1, CVec::Zero(M));
    v[N][p.modes] = 1;
    v[N - 1] = d[N - 1];
    for (int j = N - 2; j >= 1; --j) v[j] = d[j] - off * C[j] * v[j + 1];
    CVec dv = (3.0 * v[N] - 4.0 * v[N - 1] + v[N - 2]) / (2 * h);
    cd s = 0;
    for (int k = 0; k < M; ++k) s += dv[k] * std::exp(cd(0, (k - p.modes) * p.x0));
    return s;
}
}  // namespace detail

inline StripResult strip_dno(const StripProblem& p) {
    if (p.xi1 == 0) throw SolverError("strip_dno: carrier frequency must be nonzero");
    const cd w1 = detail::strip_solve(p, p.resolution);
    const cd w2 = detail::strip_solve(p, 2 * p.resolution);
    const cd w4 = detail::strip_solve(p, 4 * p.resolution);
    // second-order scheme: combine with factor 4
    const cd r1 = (4.0 * w2 - w1) / 3.0, r2 = (4.0 * w4 - w2) / 3.0;
    StripResult out;
    const double a = 1 + p.epsilon * std::cos(p.x0), da = -p.epsilon * std::sin(p.x0);
    const double xi = p.xi1, X = std::sqrt(a) * std::abs(xi);
    out.value = r2;
    out.principal = X;
    out.xx_unit = (2 * a * xi) * (da * xi * xi) / (X * X * X);
    const cd zero = r2 - out.principal;
    out.richardson_gap = std::abs(r1 - r2);
    // 10% of the zero-order part, floored at 1e-7 of the full value for the separable case
    if (out.richardson_gap > 0.1 * std::max(std::abs(zero), 1e-6 * X))
        throw RefinementError("strip_dno: Richardson disagreement " + std::to_string(out.richardson_gap));
    out.fitted_coefficient = std::abs(out.xx_unit) > 0 ? zero / out.xx_unit : cd(0);
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature for eta integrals: the bare integral of r(eta) e^{i rho eta} over R.

inline cd quad_eta_integral(const RationalEta<cd>& r, double damping = 0, double tol = 1e-12) {
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    const int gap = r.pole_order() - r.numerator.degree();
    for (const auto& pole : r.poles)
        if (std::abs(pole.location.imag()) < 1e-12) throw ContourError("quad_eta_integral: pole on the real axis");
    if (damping == 0) {
        if (gap < 2) throw DivergenceError("quad_eta_integral: undamped integral needs a decay gap of 2");
        double err_re = 0, err_im = 0, l1_re = 0, l1_im = 0;
        double re = gauss_kronrod<double, 61>::integrate([&](double t) { return r(cd(t)).real(); }, -inf, inf, 15,
                                                         tol, &err_re, &l1_re);
        double im = gauss_kronrod<double, 61>::integrate([&](double t) { return r(cd(t)).imag(); }, -inf, inf, 15,
                                                         tol, &err_im, &l1_im);
        cd v(re, im);
        // cancelling integrands are judged against their L1 mass
        if (std::hypot(err_re, err_im) > 1e-8 * std::max(std::abs(v), 1e-6 * (l1_re + l1_im)))
            throw TruncationError("quad_eta_integral: tail estimate above tolerance");
        return v;
    }
    if (gap < 1) throw DivergenceError("quad_eta_integral: damped integral needs a decay gap of 1");
    // split onto [0, inf): even part against cos, odd part against sin
    const double w = std::abs(damping), sg = damping > 0 ? 1.0 : -1.0;
    boost::math::quadrature::ooura_fourier_cos<double> qc(tol);
    boost::math::quadrature::ooura_fourier_sin<double> qs(tol);
    auto even = [&](double t) { return r(cd(t)) + r(cd(-t)); };
    auto odd = [&](double t) { return r(cd(t)) - r(cd(-t)); };
    auto c_re = qc.integrate([&](double t) { return even(t).real(); }, w);
    auto c_im = qc.integrate([&](double t) { return even(t).imag(); }, w);
    auto s_re = qs.integrate([&](double t) { return odd(t).real(); }, w);
    auto s_im = qs.integrate([&](double t) { return odd(t).imag(); }, w);
    cd cosint(c_re.first, c_im.first), sinint(s_re.first, s_im.first);
    cd v = cosint + cd(0, sg) * sinint;
    double err = std::abs(c_re.second) + std::abs(c_im.second) + std::abs(s_re.second) + std::abs(s_im.second);
    if (err > 1e-8 * std::max(std::abs(v), 1.0)) throw TruncationError("quad_eta_integral: oscillatory tail above tolerance");
    return v;
}

// ---------------------------------------------------------------------------
// Operator cross-check: assembled coefficients against 2(dbar dbar* + dbar* dbar)
// applied directly to polynomial forms in chart coordinates.

struct CrosscheckReport {
    int trials = 0;
    double principal = 0;      // monomials y_a y_b e_K
    double rho = 0;            // monomials y_rho e_K
    double random_forms = 0;   // y^T A_K y + b_K y_rho
    double s_offdiag = 0;
    double s_closed = 0;       // diagonal s vs closed form
    double tau_closed = 0;     // transverse tau vs closed form
    double tangential_modulo = 0;  // tangential first-order columns, reported only
};

inline CrosscheckReport square_crosscheck(const BoundaryChart& chart, int q, int trials, unsigned seed = 11) {
    const int n = chart.n();
    if (n < 2 || n > 3) throw ShapeError("square_crosscheck: n must be 2 or 3");
    const int D = 2 * n, m = component_count(n, q);
    const LocalOperator op = assemble_square(chart, q);
    const Vec P0 = chart.point();
    CrosscheckReport rep;
    rep.trials = trials;
    auto form = [&chart, m](std::function<CVec(const Vec&)> in_chart) {
        return FormField([&chart, m, in_chart](const Vec& P) {
            CVec u = in_chart(chart.to_chart(P));
            (void)m;
            return u;
        });
    };
    for (int K = 0; K < m; ++K) {
        for (int a = 0; a < D; ++a)
            for (int b = a; b < D; ++b) {
                CVec r = apply_twice_box(form([=](const Vec& y) {
                                             CVec u = CVec::Zero(m);
                                             u[K] = y[a] * y[b];
                                             return u;
                                         }),
                                         q, chart, P0);
                for (int J = 0; J < m; ++J) {
                    cd expect = (J == K) ? op.principal(a, b) : cd(0);
                    rep.principal = std::max(rep.principal, std::abs(r[J] / 2.0 - expect));
                }
            }
        for (int a = 0; a < D; ++a) {
            CVec r = apply_twice_box(form([=](const Vec& y) {
                                         CVec u = CVec::Zero(m);
                                         u[K] = y[a];
                                         return u;
                                     }),
                                     q, chart, P0);
            for (int J = 0; J < m; ++J) {
                double dev = std::abs(r[J] - op.first_order[J][K][a]);
                if (a == D - 1)
                    rep.rho = std::max(rep.rho, dev);
                else
                    rep.tangential_modulo = std::max(rep.tangential_modulo, dev);
            }
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int t = 0; t < trials; ++t) {
        std::vector<Mat> A(m);
        CVec b(m);
        for (int K = 0; K < m; ++K) {
            Mat R(D, D);
            for (int i = 0; i < D; ++i)
                for (int j = 0; j < D; ++j) R(i, j) = U(rng);
            A[K] = 0.5 * (R + R.transpose());
            b[K] = cd(U(rng), U(rng));
        }
        CVec r = apply_twice_box(form([=](const Vec& y) {
                                     CVec u(m);
                                     for (int K = 0; K < m; ++K) u[K] = y.dot(A[K] * y) + b[K] * y[D - 1];
                                     return u;
                                 }),
                                 q, chart, P0);
        for (int J = 0; J < m; ++J) {
            cd expect = 0;
            for (int a = 0; a < D; ++a)
                for (int c = 0; c < D; ++c) expect += op.principal(a, c) * 2.0 * A[J](a, c);
            for (int K = 0; K < m; ++K) expect += op.first_order[J][K][D - 1] * b[K];
            rep.random_forms = std::max(rep.random_forms, std::abs(r[J] - expect));
        }
    }
    for (int J = 0; J < m; ++J)
        for (int K = 0; K < m; ++K)
            if (J != K) rep.s_offdiag = std::max(rep.s_offdiag, std::abs(op.s(J, K)));
    for (int J = 0; J < m; ++J)
        if (!contains(op.rows[J], n))
            rep.s_closed = std::max(rep.s_closed, std::abs(op.s(J, J) - s_closed_form(chart, op.rows[J])));
    rep.tau_closed = std::abs(-op.tau(D - 2, D - 2) - t1t0_closed_form(chart));
    return rep;
}

}  // namespace dnolab
