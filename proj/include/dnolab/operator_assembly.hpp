#pragma once
// Chart-local form of 2□ on (0,q)-forms, and direct appliers of dbar and its
// formal adjoint used to cross-check the assembly.
//
// Operator convention: 2□ = sum P_ab d_a d_b + sum F_a d_a + (zero order),
// with chart coordinates y = (x_1..x_{2n-1}, rho). Symbols use sigma(d) = i xi,
// so Xi^2 = -P_tan(xi, xi) and the rho-linear part of P gives sigma(tau).

#include "dnolab/forms.hpp"
#include "dnolab/geometry.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace dnolab {

using FormField = std::function<CVec(const Vec&)>;  // components ordered as all_indices(n, q)

struct LocalOperator {
    int n = 0, q = 0;
    Vec x;                          // tangential base point
    std::vector<MultiIndex> rows;   // all J with |J| = q
    CMat principal;                 // P_ab, same for every row
    std::vector<std::vector<CVec>> first_order;  // F[J][K], length 2n
    CMat s;                         // F_rho / sqrt2
    Mat tau;                        // sigma(tau) = tau^{jk} xi_j xi_k, tau = -d_rho P_tan
    double rho_dd = 0;              // d_rho P_{rho rho}
    double phi_prime = 0;
    std::vector<cd> c_values;       // c^{J'}_{J' u n}, J' = J \ n, per row
    cd d_n = 0;

    int dim() const { return 2 * n; }
    int rho_index() const { return 2 * n - 1; }
    int t_index() const { return 2 * n - 2; }

    int row_index(const MultiIndex& J) const {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i] == J) return int(i);
        throw MembershipError("row " + to_string(J) + " not in operator");
    }
    std::vector<int> boundary_rows() const {
        std::vector<int> out;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (!contains(rows[i], n)) out.push_back(int(i));
        return out;
    }

    // sigma(A)(xi) = i sum_k F_k xi_k over tangential k
    CMat a_symbol(const Vec& xi) const {
        const int m = int(rows.size());
        CMat A(m, m);
        for (int J = 0; J < m; ++J)
            for (int K = 0; K < m; ++K) A(J, K) = cd(0, 1) * (first_order[J][K].head(2 * n - 1).transpose() * xi.cast<cd>())(0);
        return A;
    }
    double tau_symbol(const Vec& xi) const { return xi.dot(tau * xi); }
    // Xi^2 from the frozen principal part: -P_tan(xi, xi)
    double xi_squared(const Vec& xi) const {
        return -(xi.cast<cd>().transpose() * principal.topLeftCorner(2 * n - 1, 2 * n - 1) * xi.cast<cd>())(0).real();
    }
};

namespace detail {
inline CMat sym_outer(const CVec& a, const CVec& b) { return 0.5 * (a * b.transpose() + b * a.transpose()); }
}  // namespace detail

// P_ab of 2□ at a chart point: -2 sum_l sym(c^{L_l} (x) c^{Lbar_l}).
inline CMat principal_at(const BoundaryChart& chart, const Vec& y) {
    const int n = chart.n();
    CMat P = CMat::Zero(2 * n, 2 * n);
    for (int l = 1; l <= n; ++l)
        P -= 2.0 * detail::sym_outer(chart.chart_components(chart.field_L(l), y),
                                     chart.chart_components(chart.field_Lbar(l), y));
    return P;
}

// Structure matrix c^J_K (rows J of degree q, columns K of degree q+1) at P.
inline CMat structure_matrix(const BoundaryChart& chart, int q, const Vec& P) {
    const int n = chart.n();
    auto R = all_indices(n, q), C = all_indices(n, q + 1);
    CMat M = CMat::Zero(R.size(), C.size());
    if (C.empty()) return M;
    for (std::size_t i = 0; i < R.size(); ++i)
        for (std::size_t j = 0; j < C.size(); ++j) M(i, j) = chart.c_coefficient(R[i], C[j], P);
    return M;
}

// Assembly of the square of Prop-type formula at the chart point (x, 0).
inline LocalOperator assemble_square(const BoundaryChart& chart, int q, const Vec& x_in = Vec()) {
    const int n = chart.n();
    if (q < 0 || q > n) throw DomainError("assemble_square: q out of range");
    LocalOperator op;
    op.n = n;
    op.q = q;
    op.x = x_in.size() ? x_in : Vec(Vec::Zero(2 * n - 1));
    op.rows = all_indices(n, q);
    const Vec y0 = chart.boundary_point(op.x);
    const Vec P0 = chart.to_ambient(y0);
    const int m = int(op.rows.size());

    std::vector<CVec> cL(n + 1), cLb(n + 1);
    std::vector<CMat> DL(n + 1), DLb(n + 1);
    for (int l = 1; l <= n; ++l) {
        cL[l] = chart.chart_components(chart.field_L(l), y0);
        cLb[l] = chart.chart_components(chart.field_Lbar(l), y0);
        DL[l] = chart.chart_component_derivatives(chart.field_L(l), y0);
        DLb[l] = chart.chart_component_derivatives(chart.field_Lbar(l), y0);
    }
    op.principal = CMat::Zero(2 * n, 2 * n);
    for (int l = 1; l <= n; ++l) op.principal -= 2.0 * detail::sym_outer(cL[l], cLb[l]);

    op.d_n = chart.d_coefficient(n, P0);
    op.first_order.assign(m, std::vector<CVec>(m, CVec::Zero(2 * n)));
    op.c_values.assign(m, cd(0));
    for (int J = 0; J < m; ++J) {
        const MultiIndex& row = op.rows[J];
        CVec F = CVec::Zero(2 * n);
        // first-order part of V o W is D_W c^V
        for (int l = 1; l <= n; ++l) {
            if (contains(row, l))
                F -= 2.0 * DL[l] * cLb[l];
            else
                F -= 2.0 * DLb[l] * cL[l];
        }
        MultiIndex base = contains(row, n) ? remove_index(row, n) : row;
        MultiIndex top = insert_index(base, n, n).index;
        cd c = chart.c_coefficient(base, top, P0);
        op.c_values[J] = c;
        const double sgn = (top.size() % 2) ? -1.0 : 1.0;  // (-1)^{|J u n|}
        F += 2.0 * sgn * (c * cL[n] - std::conj(c) * cLb[n]);
        F += 2.0 * op.d_n * cLb[n];
        op.first_order[J][J] = F;
    }
    // off-diagonal: row J couples to K = J_k u {l} through -eps eps [Lbar_k, L_l]
    for (int J = 0; J < m; ++J) {
        const MultiIndex& row = op.rows[J];
        for (int k : row) {
            MultiIndex Jk = remove_index(row, k);
            const int e2 = insert_index(Jk, k).sign;  // eps^{k J_k}_J
            for (int l = 1; l <= n; ++l) {
                if (l == k || contains(row, l)) continue;
                SignedIndex K = insert_index(Jk, l, n);
                const int col = op.row_index(K.index);
                CVec comm = DL[l] * cLb[k] - DLb[k] * cL[l];
                op.first_order[J][col] += -2.0 * double(K.sign * e2) * comm;
            }
        }
    }
    op.s = CMat(m, m);
    for (int J = 0; J < m; ++J)
        for (int K = 0; K < m; ++K) op.s(J, K) = op.first_order[J][K][2 * n - 1] / std::sqrt(2.0);

    // tau from the rho-slope of the principal part
    const double h = chart.options().chart_step;
    CMat dP = central4(
        [&](double r) {
            Vec y = y0;
            y[2 * n - 1] += r;
            return principal_at(chart, y);
        },
        h);
    op.tau = -dP.topLeftCorner(2 * n - 1, 2 * n - 1).real();
    op.tau = 0.5 * (op.tau + op.tau.transpose()).eval();
    op.rho_dd = dP(2 * n - 1, 2 * n - 1).real();
    return op;
}

// The perturbed operator with weight (1 + phi(rho)), phi(rho) ~ phi' rho:
// S shifts by -sqrt2 phi', and -2 phi' rho L_n Lbar_n adds -phi' rho d_rho^2
// and -2 phi' rho T^2 (symbol +2 phi' xi_{2n-1}^2).
inline LocalOperator apply_phi(LocalOperator op, double phi_prime) {
    const int m = int(op.rows.size());
    const int n = op.n;
    op.phi_prime = phi_prime;
    for (int J = 0; J < m; ++J) {
        op.s(J, J) -= std::sqrt(2.0) * phi_prime;
        op.first_order[J][J][2 * n - 1] -= 2.0 * phi_prime;
    }
    op.tau(2 * n - 2, 2 * n - 2) += 2.0 * phi_prime;
    op.rho_dd -= phi_prime;
    return op;
}

inline LocalOperator assemble_square_phi(const BoundaryChart& chart, int q, double phi_prime, const Vec& x = Vec()) {
    return apply_phi(assemble_square(chart, q, x), phi_prime);
}

// Closed forms at the chart center.
inline cd s_closed_form(const BoundaryChart& chart, const MultiIndex& J) {
    const int n = chart.n();
    if (contains(J, n)) throw MembershipError("s_closed_form: row must not contain n");
    cd c = chart.c_coefficient(J, n);
    double sgn = (J.size() % 2) ? -1.0 : 1.0;
    return cd(0, -2) * sgn * c.imag() + chart.d_coefficient(n);
}

// Operator coefficient of rho d^2_{2n-1}: -4 sqrt2 <T1, T0/|T0|>.
inline double t1t0_closed_form(const BoundaryChart& chart) { return -4 * std::sqrt(2.0) * chart.transverse_expansion().inner; }

struct AZeroSymbol {
    cd value;                // a_0(0, xi) for the diagonal entry of row J
    cd t_coefficient;        // numeric coefficient F_{2n-1}
    cd t_closed;             // sum of the transverse, Levi and c/d contributions
    cd t_transverse, t_levi, t_cd;
};

inline AZeroSymbol a_zero_symbol(const LocalOperator& op, const BoundaryChart& chart, const Vec& xi, const MultiIndex& J) {
    const int n = op.n;
    if (contains(J, n)) throw MembershipError("a_zero_symbol: row must not contain n");
    const int r = op.row_index(J);
    AZeroSymbol out;
    out.value = op.a_symbol(xi)(r, r);
    out.t_coefficient = op.first_order[r][r][2 * n - 2];
    auto tr = chart.transverse_expansion();
    auto levi = chart.levi_data();
    out.t_transverse = cd(0, 2) * tr.inner;  // i sqrt2 * (sqrt2 <T1, T0/|T0|>)
    double lsum = 0;
    for (int k = 1; k < n; ++k) lsum += (contains(J, k) ? 1.0 : -1.0) * levi.norms[k - 1];
    out.t_levi = cd(0, 2 * std::sqrt(2.0)) * lsum;
    double sgn = (J.size() % 2) ? -1.0 : 1.0;
    cd c = chart.c_coefficient(J, n);
    out.t_cd = -sgn * cd(0, 4) * c.real() - cd(0, 2) * chart.d_coefficient(n);
    out.t_closed = out.t_transverse + out.t_levi + out.t_cd;
    return out;
}

// ---------------------------------------------------------------------------
// Direct appliers in ambient coordinates.

inline int component_count(int n, int q) { return int(all_indices(n, q).size()); }

// (dbar u)_K = sum eps^{lJ}_K Lbar_l u_J + sum_J c^J_K u_J
inline CVec apply_dbar(const FormField& u, int q, const BoundaryChart& chart, const Vec& P, double h = 2e-3) {
    const int n = chart.n();
    auto R = all_indices(n, q), C = all_indices(n, q + 1);
    CVec out = CVec::Zero(C.size());
    if (C.empty()) return out;
    const int d = 2 * n;
    CMat G(d, R.size());
    for (int a = 0; a < d; ++a) G.row(a) = partial4(u, P, a, h).transpose();
    CVec u0 = u(P);
    for (std::size_t j = 0; j < R.size(); ++j)
        for (int l = 1; l <= n; ++l) {
            if (contains(R[j], l)) continue;
            SignedIndex K = insert_index(R[j], l, n);
            int col = int(std::find(C.begin(), C.end(), K.index) - C.begin());
            out[col] += double(K.sign) * (chart.Lbar(l, P).transpose() * G.col(j))(0);
        }
    CMat c = structure_matrix(chart, q, P);
    out += c.transpose() * u0;
    return out;
}

// (dbar* v)_J = sum_l eps^{lJ}_{J u l} (-L_l + d_l) v_{J u l} + sum_K conj(c^J_K) v_K
inline CVec apply_dbar_star(const FormField& v, int q, const BoundaryChart& chart, const Vec& P, double h = 2e-3) {
    const int n = chart.n();
    auto R = all_indices(n, q), C = all_indices(n, q + 1);
    CVec out = CVec::Zero(R.size());
    if (C.empty()) return out;
    const int d = 2 * n;
    CMat G(d, C.size());
    for (int a = 0; a < d; ++a) G.row(a) = partial4(v, P, a, h).transpose();
    CVec v0 = v(P);
    std::vector<cd> dl(n + 1);
    for (int l = 1; l <= n; ++l) dl[l] = chart.d_coefficient(l, P);
    for (std::size_t j = 0; j < R.size(); ++j)
        for (int l = 1; l <= n; ++l) {
            if (contains(R[j], l)) continue;
            SignedIndex K = insert_index(R[j], l, n);
            int col = int(std::find(C.begin(), C.end(), K.index) - C.begin());
            cd Lv = (chart.L(l, P).transpose() * G.col(col))(0);
            out[j] += double(K.sign) * (-Lv + dl[l] * v0[col]);
        }
    CMat c = structure_matrix(chart, q, P);
    out += c.conjugate() * v0;
    return out;
}

// 2(dbar dbar* + dbar* dbar) u at P.
inline CVec apply_twice_box(const FormField& u, int q, const BoundaryChart& chart, const Vec& P, double h = 2e-3) {
    const int n = chart.n();
    CVec out = CVec::Zero(component_count(n, q));
    if (q >= 1) {
        FormField inner = [&](const Vec& Q) { return apply_dbar_star(u, q - 1, chart, Q, h); };
        out += apply_dbar(inner, q - 1, chart, P, h);
    }
    if (q + 1 <= n) {
        FormField inner = [&](const Vec& Q) { return apply_dbar(u, q, chart, Q, h); };
        out += apply_dbar_star(inner, q, chart, P, h);
    }
    return 2.0 * out;
}

}  // namespace dnolab
