#pragma once
// Defining functions on C^n, stored over real coordinates ordered
// (x1, y1, x2, y2, ..., xn, yn). Built-ins carry analytic derivatives.

#include "dnolab/numdiff.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnolab {

struct DegenerateBoundaryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Domain {
    int n = 0;
    std::string name;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::function<Mat(const Vec&)> hessian;
    bool analytic_hessian = true;
    bool normalized = false;
    double curvature_scale = 1.0;
    Vec default_point;

    int dim() const { return 2 * n; }
};

// Real coordinate index of x_k / y_k (k is 1-based).
inline int xi_index(int k) { return 2 * (k - 1); }
inline int yi_index(int k) { return 2 * (k - 1) + 1; }

// A monomial c * prod x_i^{e_i} over the 2n real coordinates.
struct PolyTerm {
    double coeff = 0;
    std::vector<int> exponents;
};

inline Domain polynomial_domain(int n, std::vector<PolyTerm> terms, std::string name = "polynomial") {
    for (const auto& t : terms)
        if (int(t.exponents.size()) != 2 * n)
            throw std::invalid_argument("polynomial term needs " + std::to_string(2 * n) + " exponents");
    auto mono = [](const Vec& x, const std::vector<int>& e) {
        double v = 1;
        for (int i = 0; i < x.size(); ++i)
            if (e[i]) v *= std::pow(x[i], e[i]);
        return v;
    };
    Domain d;
    d.n = n;
    d.name = std::move(name);
    d.value = [terms, mono](const Vec& x) {
        double s = 0;
        for (const auto& t : terms) s += t.coeff * mono(x, t.exponents);
        return s;
    };
    d.gradient = [terms, mono](const Vec& x) {
        Vec g = Vec::Zero(x.size());
        for (const auto& t : terms)
            for (int i = 0; i < x.size(); ++i) {
                if (!t.exponents[i]) continue;
                auto e = t.exponents;
                double f = e[i]--;
                g[i] += t.coeff * f * mono(x, e);
            }
        return g;
    };
    d.hessian = [terms, mono](const Vec& x) {
        Mat H = Mat::Zero(x.size(), x.size());
        for (const auto& t : terms)
            for (int i = 0; i < x.size(); ++i) {
                if (!t.exponents[i]) continue;
                auto ei = t.exponents;
                double fi = ei[i]--;
                for (int j = 0; j < x.size(); ++j) {
                    if (!ei[j]) continue;
                    auto ej = ei;
                    double fj = ej[j]--;
                    H(i, j) += t.coeff * fi * fj * mono(x, ej);
                }
            }
        return H;
    };
    d.default_point = Vec::Zero(2 * n);
    return d;
}

// rho / |grad rho| evaluated pointwise; unit gradient on the boundary.
inline Domain normalize_defining(const Domain& raw, const Vec& p) {
    Vec g0 = raw.gradient(p);
    if (!(g0.norm() > 1e-12)) throw DegenerateBoundaryError("normalize_defining: gradient vanishes at the chart point");
    if (raw.normalized) return raw;
    Domain d = raw;
    auto val = raw.value;
    auto grad = raw.gradient;
    auto hess = raw.hessian;
    d.value = [val, grad](const Vec& x) { return val(x) / grad(x).norm(); };
    d.gradient = [val, grad, hess](const Vec& x) {
        Vec g = grad(x);
        double gn = g.norm();
        return Vec(g / gn - val(x) * (hess(x) * g) / (gn * gn * gn));
    };
    auto ngrad = d.gradient;
    d.hessian = [ngrad](const Vec& x) {
        Mat H = fd_jacobian(ngrad, x, 1e-4);
        return Mat(0.5 * (H + H.transpose()));
    };
    d.analytic_hessian = false;
    d.normalized = true;
    return d;
}

inline Domain halfspace_flat(int n) {
    Domain d;
    d.n = n;
    d.name = "halfspace-flat";
    const int k = xi_index(n);
    d.value = [k](const Vec& x) { return x[k]; };
    d.gradient = [k](const Vec& x) {
        Vec g = Vec::Zero(x.size());
        g[k] = 1;
        return g;
    };
    d.hessian = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
    d.normalized = true;
    d.curvature_scale = 1.0;
    d.default_point = Vec::Zero(2 * n);
    return d;
}

// Signed distance to the unit sphere, so |grad rho| = 1 identically.
inline Domain ball(int n) {
    Domain d;
    d.n = n;
    d.name = "ball";
    d.value = [](const Vec& x) { return x.norm() - 1.0; };
    d.gradient = [](const Vec& x) { return Vec(x / x.norm()); };
    d.hessian = [](const Vec& x) {
        double r = x.norm();
        Vec u = x / r;
        return Mat((Mat::Identity(x.size(), x.size()) - u * u.transpose()) / r);
    };
    d.normalized = true;
    d.curvature_scale = 1.0;
    d.default_point = Vec::Zero(2 * n);
    d.default_point[0] = 1.0;
    return d;
}

// Re z_n + sum_{k<n} |z_k|^{2m}
inline Domain model_domain(int n, int m, std::string name) {
    std::vector<PolyTerm> terms;
    std::vector<int> e(2 * n, 0);
    e[xi_index(n)] = 1;
    terms.push_back({1.0, e});
    // |z_k|^{2m} = (x^2 + y^2)^m expanded binomially
    for (int k = 1; k < n; ++k) {
        for (int a = 0; a <= m; ++a) {
            std::vector<int> f(2 * n, 0);
            f[xi_index(k)] = 2 * a;
            f[yi_index(k)] = 2 * (m - a);
            double binom = 1;
            for (int t = 0; t < a; ++t) binom = binom * (m - t) / (t + 1);
            terms.push_back({binom, f});
        }
    }
    Domain raw = polynomial_domain(n, terms, name);
    Domain d = normalize_defining(raw, Vec::Zero(2 * n));
    d.name = std::move(name);
    d.curvature_scale = 0.5;
    return d;
}

inline Domain siegel(int n) { return model_domain(n, 1, "siegel"); }
inline Domain weak_q4(int n) { return model_domain(n, 2, "weak-q4"); }

inline std::vector<std::string> builtin_domain_names() { return {"halfspace-flat", "siegel", "ball", "weak-q4"}; }

inline Domain make_builtin(const std::string& name, int n) {
    if (n < 1 || n > 8) throw UnknownDomainError("complex dimension must be in 1..8");
    if (name == "halfspace-flat") return halfspace_flat(n);
    if (name == "ball") return ball(n);
    if (n < 2 && (name == "siegel" || name == "weak-q4")) throw UnknownDomainError(name + " needs n >= 2");
    if (name == "siegel") return siegel(n);
    if (name == "weak-q4") return weak_q4(n);
    throw UnknownDomainError("unknown domain '" + name + "'");
}

}  // namespace dnolab
