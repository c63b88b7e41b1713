#pragma once
// Boundary chart at a point of a normalized defining function: orthonormal
// (1,0) frame, adapted coordinates (x_1..x_{2n-1}, rho), Levi data, the c/d
// structure coefficients, the transverse expansion of T, and Xi^2.
//
// Coordinates. A chart point y = (x', t, r) maps to the ambient point reached
// by (1) sliding p + sum x'_k W_k onto the boundary along the unit normal at p,
// (2) following the flow of T on the boundary for time t, (3) following
// grad rho / |grad rho|^2 for time r. So rho(Phi(y)) = r exactly, the
// coordinate field of t is T on the boundary, and d/dr is the normal flow.

#include "dnolab/domain.hpp"
#include "dnolab/forms.hpp"
#include "dnolab/numdiff.hpp"
#include "dnolab/symbols.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnolab {

struct FrameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ChartRadiusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConventionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ToleranceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using ComplexField = std::function<CVec(const Vec&)>;

inline CVec to_complex_coords(const Vec& v) {
    CVec z(v.size() / 2);
    for (int l = 0; l < z.size(); ++l) z[l] = cd(v[2 * l], v[2 * l + 1]);
    return z;
}
inline Vec to_real_coords(const CVec& z) {
    Vec v(2 * z.size());
    for (int l = 0; l < z.size(); ++l) {
        v[2 * l] = z[l].real();
        v[2 * l + 1] = z[l].imag();
    }
    return v;
}

// Apply a complex vector field to a scalar function by central differences.
template <class F>
cd apply_field(const CVec& V, const F& f, const Vec& P, double h) {
    cd s = 0;
    for (int m = 0; m < P.size(); ++m)
        if (V[m] != cd(0)) s += V[m] * cd(partial4(f, P, m, h));
    return s;
}

// Zero-order term of the formal adjoint of Lbar under Lebesgue measure:
// (phi, Lbar psi) = ((-L + d) phi, psi) with d = -div(conj(Lbar)).
inline cd adjoint_zero_order(const ComplexField& Lbar, const Vec& P, double h = 1e-3) {
    cd s = 0;
    for (int m = 0; m < P.size(); ++m) s += partial4([&](const Vec& Q) { return cd(std::conj(Lbar(Q)[m])); }, P, m, h);
    return -s;
}

// Tensor Gauss-Legendre nodes on [-1, 1].
inline std::vector<std::pair<double, double>> gauss_legendre_20() {
    using G = boost::math::quadrature::gauss<double, 20>;
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
        out.push_back({G::abscissa()[i], G::weights()[i]});
        out.push_back({-G::abscissa()[i], G::weights()[i]});
    }
    return out;
}

// Smooth compactly supported test function: prod (1 - s_i^2)^4 times an affine
// complex polynomial in s = (P - center)/width, with its ambient gradient.
struct BumpFunction {
    Vec center;
    double width = 0.05;
    cd a0;
    CVec a;

    cd value(const Vec& P) const {
        Vec s = (P - center) / width;
        double b = 1;
        for (int i = 0; i < s.size(); ++i) b *= std::pow(1 - s[i] * s[i], 4);
        cd poly = a0;
        for (int i = 0; i < s.size(); ++i) poly += a[i] * s[i];
        return b * poly;
    }
    CVec gradient(const Vec& P) const {
        Vec s = (P - center) / width;
        const int d = int(s.size());
        std::vector<double> f(d), df(d);
        for (int i = 0; i < d; ++i) {
            f[i] = std::pow(1 - s[i] * s[i], 4);
            df[i] = -8 * s[i] * std::pow(1 - s[i] * s[i], 3);
        }
        cd poly = a0;
        for (int i = 0; i < d; ++i) poly += a[i] * s[i];
        CVec g(d);
        for (int i = 0; i < d; ++i) {
            double prod_other = 1;
            for (int j = 0; j < d; ++j)
                if (j != i) prod_other *= f[j];
            g[i] = (df[i] * prod_other * poly + prod_other * f[i] * a[i]) / width;
        }
        return g;
    }
};

inline BumpFunction random_bump(const Vec& center, double width, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1, 1);
    BumpFunction b;
    b.center = center;
    b.width = width;
    b.a0 = cd(U(rng), U(rng));
    b.a = CVec(center.size());
    for (int i = 0; i < b.a.size(); ++i) b.a[i] = cd(U(rng), U(rng));
    return b;
}

// Relative residual of (phi, Lbar psi) = ((-L + d) phi, psi) over the cube
// [center - width, center + width]^{2n}, for `pairs` random bump pairs.
inline double adjoint_quadrature_residual(const ComplexField& Lbar, const std::function<cd(const Vec&)>& dfun,
                                          const Vec& center, double width, int pairs, unsigned seed) {
    const auto nodes = gauss_legendre_20();
    const int dim = int(center.size());
    std::mt19937_64 rng(seed);
    std::vector<BumpFunction> phis, psis;
    for (int k = 0; k < pairs; ++k) {
        phis.push_back(random_bump(center, width, rng));
        psis.push_back(random_bump(center, width, rng));
    }
    std::vector<cd> lhs(pairs, 0), rhs(pairs, 0);
    std::vector<int> idx(dim, 0);
    const int npts = int(nodes.size());
    while (true) {
        Vec P(dim);
        double w = 1;
        for (int i = 0; i < dim; ++i) {
            P[i] = center[i] + width * nodes[idx[i]].first;
            w *= width * nodes[idx[i]].second;
        }
        CVec Lb = Lbar(P);
        CVec L = Lb.conjugate();
        cd dval = dfun(P);
        for (int k = 0; k < pairs; ++k) {
            cd phi = phis[k].value(P), psi = psis[k].value(P);
            CVec gphi = phis[k].gradient(P), gpsi = psis[k].gradient(P);
            cd Lbpsi = (Lb.array() * gpsi.array()).sum();
            cd Lphi = (L.array() * gphi.array()).sum();
            lhs[k] += w * phi * std::conj(Lbpsi);
            rhs[k] += w * (-Lphi + dval * phi) * std::conj(psi);
        }
        int i = 0;
        while (i < dim && ++idx[i] == npts) idx[i++] = 0;
        if (i == dim) break;
    }
    double worst = 0;
    for (int k = 0; k < pairs; ++k) {
        double scale = std::max({std::abs(lhs[k]), std::abs(rhs[k]), 1e-300});
        worst = std::max(worst, std::abs(lhs[k] - rhs[k]) / scale);
    }
    return worst;
}

struct ChartOptions {
    double radius_fraction = 0.1;
    double ambient_step = 1e-3;  // frame derivatives
    double chart_step = 2e-3;    // derivatives of chart components
    double jacobian_step = 1e-3;
    int flow_steps = 16;
};

struct LeviData {
    CMat matrix;  // (n-1)x(n-1) Hermitian
    Vec norms;    // |L_k|^2 in the Levi metric
};

struct TransverseData {
    Vec T0;          // ambient T at p
    Vec T1;          // ambient [grad rho/|grad rho|^2, T] at p
    Vec T1_chart;    // d/drho of the chart components of T at the center
    double inner = 0;  // <T1, T0/|T0|>
};

class BoundaryChart {
public:
    BoundaryChart(Domain dom, Vec p, ChartOptions opt = {}) : dom_(std::move(dom)), p_(std::move(p)), opt_(opt) {
        n_ = dom_.n;
        if (p_.size() != 2 * n_) throw std::invalid_argument("chart point has wrong dimension");
        Vec g = dom_.gradient(p_);
        if (!(g.norm() > 1e-12)) throw DegenerateBoundaryError("gradient vanishes at the chart point");
        if (std::abs(dom_.value(p_)) > 1e-8) throw std::invalid_argument("chart point is not on the boundary");
        if (std::abs(g.norm() - 1.0) > 1e-9) throw std::invalid_argument("defining function is not normalized at p");
        choose_pivots();
        CMat G = gamma(p_);
        W_ = Mat::Zero(2 * n_, 2 * n_ - 1);
        for (int j = 0; j + 1 < n_; ++j) {
            CVec gb = G.row(j).conjugate().transpose();
            W_.col(2 * j) = to_real_coords(std::sqrt(2.0) * gb);
            W_.col(2 * j + 1) = to_real_coords(cd(0, std::sqrt(2.0)) * gb);
        }
        W_.col(2 * n_ - 2) = T(p_);
        nu_ = g / g.norm();
        J0_ = jacobian(Vec::Zero(2 * n_));
        J0lu_ = Eigen::PartialPivLU<Mat>(J0_);
    }

    int n() const { return n_; }
    int dim() const { return 2 * n_; }
    const Domain& domain() const { return dom_; }
    const Vec& point() const { return p_; }
    const ChartOptions& options() const { return opt_; }
    double radius() const { return opt_.radius_fraction * dom_.curvature_scale; }
    const std::vector<int>& pivots() const { return pivots_; }

    // ---- frame ---------------------------------------------------------
    // Row k-1 holds gamma^k; the last row is d rho / |d rho| in z-components.
    CMat gamma(const Vec& P) const {
        CVec rz = complex_gradient(P);
        double nr = rz.norm();
        if (!(nr > 1e-14)) throw FrameError("frame: d rho vanishes");
        CMat G(n_, n_);
        G.row(n_ - 1) = (rz / nr).transpose();
        std::vector<CVec> basis{rz / nr};
        for (int k = 0; k + 1 < n_; ++k) {
            CVec u = CVec::Zero(n_);
            u[pivots_[k]] = 1;
            for (const auto& b : basis) u -= b.dot(u) * b;
            double un = u.norm();
            if (!(un > 1e-8)) throw FrameError("frame: Gram-Schmidt breakdown");
            u /= un;
            basis.push_back(u);
            G.row(k) = u.transpose();
        }
        return G;
    }

    // L_k = sqrt2 sum conj(gamma^k_l) d/dz_l as an ambient complex vector.
    CVec L(int k, const Vec& P) const { return frame_field(gamma(P).row(k - 1).transpose(), false); }
    CVec Lbar(int k, const Vec& P) const { return frame_field(gamma(P).row(k - 1).transpose(), true); }
    // T = (L_n - Lbar_n)/2i
    Vec T(const Vec& P) const { return L(n_, P).imag(); }
    Vec normal_flow_field(const Vec& P) const {
        Vec g = dom_.gradient(P);
        return g / g.squaredNorm();
    }

    // max deviation of the frame invariants at P
    double frame_residual(const Vec& P) const {
        CMat G = gamma(P);
        double worst = (G * G.adjoint() - CMat::Identity(n_, n_)).cwiseAbs().maxCoeff();
        CVec rzb = complex_gradient(P).conjugate();
        for (int k = 0; k + 1 < n_; ++k) worst = std::max(worst, std::abs((G.row(k) * rzb)(0)));
        return worst;
    }

    // ---- coordinates ---------------------------------------------------
    Vec to_ambient(const Vec& y) const {
        const int d = 2 * n_;
        Vec Q = p_;
        for (int k = 0; k < d - 2; ++k) Q += y[k] * W_.col(k);
        double s = 0;
        for (int it = 0; it < 60; ++it) {
            Vec P = Q + s * nu_;
            double ds = -dom_.value(P) / dom_.gradient(P).dot(nu_);
            s += ds;
            if (std::abs(ds) < 1e-15) break;
        }
        Vec q = Q + s * nu_;
        q = flow([this](const Vec& P) { return T(P); }, q, y[d - 2]);
        for (int it = 0; it < 2; ++it) {
            Vec g = dom_.gradient(q);
            q -= dom_.value(q) * g / g.squaredNorm();
        }
        q = flow([this](const Vec& P) { return normal_flow_field(P); }, q, y[d - 1]);
        for (int it = 0; it < 2; ++it) {
            Vec g = dom_.gradient(q);
            q += (y[d - 1] - dom_.value(q)) * g / g.squaredNorm();
        }
        return q;
    }

    Mat jacobian(const Vec& y) const {
        return fd_jacobian([this](const Vec& z) { return to_ambient(z); }, y, opt_.jacobian_step);
    }

    // Chord iteration with the center Jacobian.
    Vec to_chart(const Vec& P) const {
        Vec y = J0lu_.solve(P - p_);
        y[2 * n_ - 1] = dom_.value(P);
        for (int it = 0; it < 200; ++it) {
            Vec r = P - to_ambient(y);
            Vec dy = J0lu_.solve(r);
            y += dy;
            if (dy.norm() < 1e-15 * (1 + y.norm())) return y;
        }
        throw ChartRadiusError("to_chart: point outside the chart's convergence region");
    }

    // Chart components of an ambient complex field at chart point y.
    // The rho component is V(rho), exact for this chart.
    CVec chart_components(const ComplexField& V, const Vec& y) const {
        Mat J = jacobian(y);
        Vec P = to_ambient(y);
        CVec v = V(P);
        Eigen::PartialPivLU<Mat> lu(J);
        Vec re = lu.solve(Vec(v.real())), im = lu.solve(Vec(v.imag()));
        CVec c(2 * n_);
        for (int i = 0; i < 2 * n_; ++i) c[i] = cd(re[i], im[i]);
        c[2 * n_ - 1] = (v.transpose() * dom_.gradient(P).cast<cd>())(0);
        return c;
    }

    ComplexField field_L(int k) const {
        return [this, k](const Vec& P) { return L(k, P); };
    }
    ComplexField field_Lbar(int k) const {
        return [this, k](const Vec& P) { return Lbar(k, P); };
    }
    ComplexField field_T() const {
        return [this](const Vec& P) { return CVec(T(P).cast<cd>()); };
    }

    // d/dy_beta of the chart components of V at y.
    CMat chart_component_derivatives(const ComplexField& V, const Vec& y) const {
        CMat D(2 * n_, 2 * n_);
        for (int b = 0; b < 2 * n_; ++b)
            D.col(b) = partial4([&](const Vec& z) { return chart_components(V, z); }, y, b, opt_.chart_step);
        return D;  // D(alpha, beta) = d c_alpha / d y_beta
    }

    // ell coefficients: chart components of Lbar_k at (x,0) minus the canonical part.
    CVec ell(int k, const Vec& x) const {
        CVec c = chart_components(field_Lbar(k), boundary_point(x));
        c[2 * k - 2] -= 0.5;
        c[2 * k - 1] -= cd(0, 0.5);
        return c.head(2 * n_ - 1);
    }

    Vec boundary_point(const Vec& x) const {
        Vec y = Vec::Zero(2 * n_);
        y.head(2 * n_ - 1) = x;
        return y;
    }

    // ---- structure coefficients ---------------------------------------
    // Coefficients of conj(omega)_J in the basis e_I, all I of length |J|.
    std::map<MultiIndex, cd> form_coefficients(const MultiIndex& J, const Vec& P, bool conjugate_frame = true) const {
        CMat G = gamma(P);
        if (conjugate_frame) G = G.conjugate().eval();
        std::map<MultiIndex, cd> out;
        const int q = int(J.size());
        for (const auto& I : all_indices(n_, q)) {
            CMat M(q, q);
            for (int a = 0; a < q; ++a)
                for (int b = 0; b < q; ++b) M(a, b) = G(J[a] - 1, I[b] - 1);
            out[I] = q == 0 ? cd(1) : M.determinant();
        }
        return out;
    }

    // c^J_K = <dbar(conj omega_J), conj omega_K>
    cd c_coefficient(const MultiIndex& J, const MultiIndex& K, const Vec& P, double h = 0) const {
        if (K.size() != J.size() + 1) throw ShapeError("c_coefficient: |K| must be |J|+1");
        if (h <= 0) h = opt_.ambient_step;
        auto dbar = dbar_frame_form(J, P, h, false);
        auto wK = form_coefficients(K, P);
        cd s = 0;
        for (const auto& [I, v] : dbar) s += v * std::conj(wK.at(I));
        return s;
    }
    // c^J_{J u {m}} at the chart point
    cd c_coefficient(const MultiIndex& J, int m, double h = 0) const {
        if (contains(J, m)) throw MembershipError("c_coefficient: m must not lie in J");
        return c_coefficient(J, insert_index(J, m, n_).index, p_, h);
    }
    // The conjugate computed independently through d(omega_J).
    cd c_bar_coefficient(const MultiIndex& J, const MultiIndex& K, const Vec& P, double h = 0) const {
        if (h <= 0) h = opt_.ambient_step;
        auto del = dbar_frame_form(J, P, h, true);
        auto wK = form_coefficients(K, P);
        cd s = 0;
        for (const auto& [I, v] : del) s += v * wK.at(I);
        return s;
    }

    cd d_coefficient(int j, const Vec& P) const { return adjoint_zero_order(field_Lbar(j), P, opt_.ambient_step); }
    cd d_coefficient(int j) const { return d_coefficient(j, p_); }

    // Integration-by-parts residual for d_j near p (interior cube).
    double d_quadrature_residual(int j, int pairs = 10, unsigned seed = 7) const {
        const double width = 0.2 * radius();
        Vec center = p_ - 1.5 * width * nu_;
        return adjoint_quadrature_residual(
            field_Lbar(j), [this, j](const Vec& P) { return d_coefficient(j, P); }, center, width, pairs, seed);
    }
    void verify_d_convention(int j, double tol = 1e-6) const {
        double r = d_quadrature_residual(j);
        if (r > tol) throw ConventionError("d_coefficient: quadrature identity residual " + std::to_string(r));
    }

    // ---- Levi data -----------------------------------------------------
    LeviData levi_data() const {
        Mat H = dom_.hessian(p_);
        // rho_{z_m zbar_j}
        CMat R(n_, n_);
        for (int m = 0; m < n_; ++m)
            for (int j = 0; j < n_; ++j) {
                int xm = 2 * m, ym = 2 * m + 1, xj = 2 * j, yj = 2 * j + 1;
                R(m, j) = 0.25 * cd(H(xm, xj) + H(ym, yj), H(xm, yj) - H(ym, xj));
            }
        CMat G = gamma(p_);
        LeviData out;
        out.matrix = CMat::Zero(n_ - 1, n_ - 1);
        for (int k = 0; k + 1 < n_; ++k)
            for (int l = 0; l + 1 < n_; ++l) {
                cd s = 0;
                for (int j = 0; j < n_; ++j)
                    for (int m = 0; m < n_; ++m) s += G(k, j) * std::conj(G(l, m)) * R(m, j);
                out.matrix(k, l) = 2.0 * s;
            }
        out.norms = out.matrix.diagonal().real();
        return out;
    }

    // ---- transverse expansion -----------------------------------------
    TransverseData transverse_expansion() const {
        TransverseData t;
        const double h = opt_.ambient_step;
        t.T0 = T(p_);
        Mat DT = fd_jacobian([this](const Vec& P) { return T(P); }, p_, h);
        Mat DN = fd_jacobian([this](const Vec& P) { return normal_flow_field(P); }, p_, h);
        Vec N = normal_flow_field(p_);
        t.T1 = DT * N - DN * t.T0;
        t.inner = t.T1.dot(t.T0) / t.T0.norm();
        CVec dT = partial4([this](const Vec& y) { return chart_components(field_T(), y); }, Vec::Zero(2 * n_),
                           2 * n_ - 1, opt_.chart_step);
        t.T1_chart = dT.real();
        return t;
    }

    // ---- Xi^2 ----------------------------------------------------------
    // Xi^2(x, xi) = 2 (T.xi)^2 + 2 sum_{k<n} |lambda_k|^2, lambda_k = L_k-components . xi
    XiSquaredJet xi_squared(const Vec& x, const Vec& xi) const {
        XiSquaredJet out = xi_squared_value(x, xi);
        const double h = 1e-3;
        out.grad_x = Vec(2 * n_ - 1);
        for (int i = 0; i < 2 * n_ - 1; ++i) {
            out.grad_x[i] = central4(
                [&](double s) {
                    Vec z = x;
                    z[i] += s;
                    return xi_squared_value(z, xi, /*canonical_at_zero=*/false).value;
                },
                h);
        }
        return out;
    }

    // Tangential components of T and of L_k (k<n) at (x, 0).
    struct TangentialFrame {
        Vec t;
        std::vector<CVec> l;
    };
    TangentialFrame tangential_frame(const Vec& x, bool canonical_at_zero = true) const {
        const int m = 2 * n_ - 1;
        TangentialFrame f;
        if (canonical_at_zero && x.isZero(0)) {
            f.t = Vec::Zero(m);
            f.t[m - 1] = 1;
            for (int k = 1; k < n_; ++k) {
                CVec c = CVec::Zero(m);
                c[2 * k - 2] = 0.5;
                c[2 * k - 1] = cd(0, -0.5);
                f.l.push_back(c);
            }
            return f;
        }
        Vec y = boundary_point(x);
        Mat J = jacobian(y);
        Eigen::PartialPivLU<Mat> lu(J);
        Vec P = to_ambient(y);
        f.t = lu.solve(T(P)).head(m);
        for (int k = 1; k < n_; ++k) {
            CVec v = L(k, P);
            Vec re = lu.solve(Vec(v.real())), im = lu.solve(Vec(v.imag()));
            CVec c(m);
            for (int i = 0; i < m; ++i) c[i] = cd(re[i], im[i]);
            f.l.push_back(c);
        }
        return f;
    }

    XiSquaredJet xi_squared_value(const Vec& x, const Vec& xi, bool canonical_at_zero = true) const {
        const int m = 2 * n_ - 1;
        if (x.size() != m || xi.size() != m) throw ShapeError("xi_squared: expected vectors of length 2n-1");
        TangentialFrame f = tangential_frame(x, canonical_at_zero);
        XiSquaredJet out;
        double tx = f.t.dot(xi);
        out.value = 2 * tx * tx;
        out.grad_xi = 4 * tx * f.t;
        for (const auto& c : f.l) {
            cd lam = (c.array() * xi.cast<cd>().array()).sum();
            out.value += 2 * std::norm(lam);
            out.grad_xi += 4 * (std::conj(lam) * c).real();
        }
        if (!(out.value > 0) && xi.norm() > 0)
            throw ChartRadiusError("xi_squared: non-positive value; chart radius too large");
        return out;
    }

private:
    CVec complex_gradient(const Vec& P) const {
        Vec g = dom_.gradient(P);
        CVec rz(n_);
        for (int l = 0; l < n_; ++l) rz[l] = 0.5 * cd(g[2 * l], -g[2 * l + 1]);
        return rz;
    }

    CVec frame_field(const CVec& g, bool barred) const {
        CVec v(2 * n_);
        const double s = 1.0 / std::sqrt(2.0);
        for (int l = 0; l < n_; ++l) {
            cd a = barred ? g[l] : std::conj(g[l]);
            v[2 * l] = s * a;
            v[2 * l + 1] = (barred ? cd(0, 1) : cd(0, -1)) * s * a;
        }
        return v;
    }

    void choose_pivots() {
        CVec rz = complex_gradient(p_);
        std::vector<CVec> basis{rz / rz.norm()};
        pivots_.clear();
        for (int k = 0; k + 1 < n_; ++k) {
            int best = -1;
            double bestn = -1;
            CVec bestu;
            for (int m = 0; m < n_; ++m) {
                if (std::find(pivots_.begin(), pivots_.end(), m) != pivots_.end()) continue;
                CVec u = CVec::Zero(n_);
                u[m] = 1;
                for (const auto& b : basis) u -= b.dot(u) * b;
                if (u.norm() > bestn + 1e-12) {
                    bestn = u.norm();
                    best = m;
                    bestu = u;
                }
            }
            if (bestn < 1e-8) throw FrameError("frame: no admissible pivot");
            pivots_.push_back(best);
            basis.push_back(bestu / bestn);
        }
    }

    template <class F>
    Vec flow(const F& field, Vec q, double t) const {
        if (t == 0) return q;
        const int N = opt_.flow_steps;
        const double h = t / N;
        for (int s = 0; s < N; ++s) {
            Vec k1 = field(q);
            Vec k2 = field(Vec(q + 0.5 * h * k1));
            Vec k3 = field(Vec(q + 0.5 * h * k2));
            Vec k4 = field(Vec(q + h * k3));
            q += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
        }
        return q;
    }

    // dbar (or, with holomorphic=true, d of the conjugate form) of the frame form
    // omega_J, returned in the e-basis of degree |J|+1.
    std::map<MultiIndex, cd> dbar_frame_form(const MultiIndex& J, const Vec& P, double h, bool holomorphic) const {
        const int q = int(J.size());
        std::map<MultiIndex, std::map<MultiIndex, cd>> grads_x, grads_y;
        std::map<MultiIndex, cd> out;
        for (const auto& K : all_indices(n_, q + 1)) out[K] = 0;
        auto coeffs = [&](const Vec& Q) { return form_coefficients(J, Q, !holomorphic); };
        for (int m = 1; m <= n_; ++m) {
            auto dx = [&](int dir) {
                std::map<MultiIndex, cd> r;
                auto fp2 = coeffs(shift(P, dir, 2 * h)), fp1 = coeffs(shift(P, dir, h));
                auto fm1 = coeffs(shift(P, dir, -h)), fm2 = coeffs(shift(P, dir, -2 * h));
                for (const auto& [I, v] : fp1) r[I] = (fm2[I] - 8.0 * fm1[I] + 8.0 * v - fp2[I]) / (12 * h);
                return r;
            };
            auto Dx = dx(2 * (m - 1)), Dy = dx(2 * (m - 1) + 1);
            for (const auto& [I, vx] : Dx) {
                if (contains(I, m)) continue;
                // dbar uses d/dzbar = (dx + i dy)/2; the conjugate side uses d/dz
                cd dz = 0.5 * (vx + (holomorphic ? cd(0, -1) : cd(0, 1)) * Dy[I]);
                SignedIndex Km = insert_index(I, m, n_);
                out[Km.index] += double(Km.sign) * std::sqrt(2.0) * dz;
            }
        }
        return out;
    }

    static Vec shift(const Vec& P, int dir, double h) {
        Vec Q = P;
        Q[dir] += h;
        return Q;
    }

    Domain dom_;
    Vec p_;
    ChartOptions opt_;
    int n_ = 0;
    std::vector<int> pivots_;
    Mat W_;
    Vec nu_;
    Mat J0_;
    Eigen::PartialPivLU<Mat> J0lu_;
};

inline BoundaryChart build_chart(const Domain& dom, const Vec& p, ChartOptions opt = {}) {
    Domain d = dom.normalized ? dom : normalize_defining(dom, p);
    return BoundaryChart(d, p, opt);
}

}  // namespace dnolab
