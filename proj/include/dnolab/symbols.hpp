#pragma once
// Residue engine for rational functions of the dual-normal variable η and the
// two-term symbol calculus (composition, inversion of η² + Ξ²).

#include "dnolab/exact.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnolab {

using cd = std::complex<double>;

struct ContourError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dense polynomial, coefficients in ascending powers.
template <class T>
struct Polynomial {
    std::vector<T> c;

    Polynomial() = default;
    explicit Polynomial(std::vector<T> coeffs) : c(std::move(coeffs)) { trim(); }

    static Polynomial constant(const T& a) { return Polynomial(std::vector<T>{a}); }
    // (η - a)
    static Polynomial linear_root(const T& a) {
        return Polynomial(std::vector<T>{T() - a, ScalarTraits<T>::one()});
    }

    void trim() {
        while (!c.empty() && ScalarTraits<T>::is_zero(c.back())) c.pop_back();
    }
    int degree() const { return c.empty() ? -1 : int(c.size()) - 1; }

    T operator()(const T& x) const {
        T acc = ScalarTraits<T>::zero();
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.c.empty() || b.c.empty()) return {};
        std::vector<T> r(a.c.size() + b.c.size() - 1, ScalarTraits<T>::zero());
        for (std::size_t i = 0; i < a.c.size(); ++i)
            for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
        return Polynomial(std::move(r));
    }
    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<T> r(std::max(a.c.size(), b.c.size()), ScalarTraits<T>::zero());
        for (std::size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
        for (std::size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
        return Polynomial(std::move(r));
    }
    Polynomial pow(int m) const {
        Polynomial r = constant(ScalarTraits<T>::one());
        for (int k = 0; k < m; ++k) r = r * *this;
        return r;
    }
    // Coefficients of p(a + t) in powers of t (Taylor shift).
    Polynomial shifted(const T& a) const {
        Polynomial r;
        Polynomial base(std::vector<T>{a, ScalarTraits<T>::one()});  // a + t
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * base + constant(*it);
        return r;
    }
};

template <class T>
struct Pole {
    T location;
    int multiplicity = 1;
};

enum class EtaMode { RealLine, CloseUpper, CloseLower };

inline const char* to_string(EtaMode m) {
    switch (m) {
        case EtaMode::RealLine: return "real-line";
        case EtaMode::CloseUpper: return "close-upper";
        case EtaMode::CloseLower: return "close-lower";
    }
    return "?";
}

// numerator(η) / Π (η - pole)^mult
template <class T>
struct RationalEta {
    Polynomial<T> numerator;
    std::vector<Pole<T>> poles;
    std::string label;

    int pole_order() const {
        int s = 0;
        for (const auto& p : poles) s += p.multiplicity;
        return s;
    }
    Polynomial<T> denominator() const {
        Polynomial<T> d = Polynomial<T>::constant(ScalarTraits<T>::one());
        for (const auto& p : poles) d = d * Polynomial<T>::linear_root(p.location).pow(p.multiplicity);
        return d;
    }
    T operator()(const T& eta) const { return numerator(eta) / denominator()(eta); }
};

namespace detail {
inline int imag_sign(const cd& z) {
    double tol = 1e-13 * (1.0 + std::abs(z));
    if (z.imag() > tol) return 1;
    if (z.imag() < -tol) return -1;
    return 0;
}
inline int imag_sign(const GaussRational& z) { return z.im.numerator() > 0 ? 1 : (z.im.numerator() < 0 ? -1 : 0); }
inline bool same(const cd& a, const cd& b) { return std::abs(a - b) <= 1e-14 * (1.0 + std::abs(a)); }
inline bool same(const GaussRational& a, const GaussRational& b) { return a == b; }
}  // namespace detail

// Residue via the Taylor expansion of (η - a)^m r(η) about a.
template <class T>
T residue_at(const RationalEta<T>& r, const T& pole) {
    int idx = -1;
    for (std::size_t k = 0; k < r.poles.size(); ++k)
        if (detail::same(r.poles[k].location, pole)) idx = int(k);
    if (idx < 0) throw LookupError("residue_at: pole not listed");
    const int m = r.poles[idx].multiplicity;
    const T a = r.poles[idx].location;

    Polynomial<T> num = r.numerator.shifted(a);
    Polynomial<T> den = Polynomial<T>::constant(ScalarTraits<T>::one());
    for (std::size_t k = 0; k < r.poles.size(); ++k) {
        if (int(k) == idx) continue;
        // (a + t - b)
        Polynomial<T> f(std::vector<T>{a - r.poles[k].location, ScalarTraits<T>::one()});
        den = den * f.pow(r.poles[k].multiplicity);
    }
    auto coeff = [](const Polynomial<T>& p, int k) { return k < int(p.c.size()) ? p.c[k] : ScalarTraits<T>::zero(); };
    // series division q = num / den up to t^{m-1}
    std::vector<T> q(m, ScalarTraits<T>::zero());
    const T d0 = coeff(den, 0);
    for (int k = 0; k < m; ++k) {
        T acc = coeff(num, k);
        for (int j = 1; j <= k; ++j) acc -= coeff(den, j) * q[k - j];
        q[k] = acc / d0;
    }
    return q[m - 1];
}

// (1/2π) ∫ r(η) dη via one-sided contour closure. Exact for exact scalar types.
template <class T>
T eta_integral_over_2pi(const RationalEta<T>& r, EtaMode mode) {
    const int gap = r.pole_order() - r.numerator.degree();
    for (const auto& p : r.poles)
        if (detail::imag_sign(p.location) == 0) throw ContourError("eta_integral: pole on the real axis");
    if (mode == EtaMode::RealLine && gap < 2)
        throw DivergenceError("eta_integral: real-line mode needs deg(num) + 2 <= total pole order");
    if (gap < 1) throw DivergenceError("eta_integral: closure needs deg(num) + 1 <= total pole order");
    const int side = (mode == EtaMode::CloseLower) ? -1 : 1;
    T sum = ScalarTraits<T>::zero();
    for (const auto& p : r.poles)
        if (detail::imag_sign(p.location) == side) sum += residue_at(r, p.location);
    // upper: 2πi Σ res; lower: -2πi Σ res (clockwise)
    T val = ScalarTraits<T>::i() * sum;
    return side > 0 ? val : T() - val;
}

// Bare contour value ∫ r(η) dη (no 2π normalization).
inline cd eta_integral(const RationalEta<cd>& r, EtaMode mode) {
    return 2.0 * std::numbers::pi * eta_integral_over_2pi(r, mode);
}

// ---------------------------------------------------------------------------
// Graded symbol values and the two-term calculus.

struct GradedSymbolValue {
    std::map<int, Eigen::MatrixXcd, std::greater<int>> terms;

    cd scalar(int degree) const {
        auto it = terms.find(degree);
        return it == terms.end() ? cd(0) : it->second(0, 0);
    }
    void set_scalar(int degree, cd v) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = v;
        terms[degree] = m;
    }
};

// Value and first derivatives of a scalar symbol at (x, ξ).
struct SymbolJet {
    cd value{0};
    Eigen::VectorXcd grad_xi;
    Eigen::VectorXcd grad_x;
};

struct SymbolEvaluator {
    int degree = 0;
    std::function<SymbolJet(const Eigen::VectorXd& x, const Eigen::VectorXd& xi)> eval;
};

// {m+m': a·b, m+m'-1: -i ∂_ξa · ∂_x b}
inline GradedSymbolValue compose_two_term(const SymbolEvaluator& a, const SymbolEvaluator& b,
                                          const Eigen::VectorXd& x, const Eigen::VectorXd& xi) {
    if (!a.eval || !b.eval) throw CapabilityError("compose_two_term: missing evaluator");
    SymbolJet ja = a.eval(x, xi);
    SymbolJet jb = b.eval(x, xi);
    if (ja.grad_xi.size() != xi.size() || jb.grad_x.size() != x.size())
        throw CapabilityError("compose_two_term: gradient unavailable");
    GradedSymbolValue out;
    out.set_scalar(a.degree + b.degree, ja.value * jb.value);
    out.set_scalar(a.degree + b.degree - 1, cd(0, -1) * ja.grad_xi.cwiseProduct(jb.grad_x).sum());
    return out;
}

// Ξ² together with its gradients.
struct XiSquaredJet {
    double value = 0;
    Eigen::VectorXd grad_xi;
    Eigen::VectorXd grad_x;
};

// σ(Γ⁻¹) ≈ 1/(η²+Ξ²) + ∂_ξΞ²·D_xΞ²/(η²+Ξ²)³ with D_x = -i∂_x.
inline GradedSymbolValue invert_gamma_two_term(const XiSquaredJet& xs, double eta) {
    const double p = eta * eta + xs.value;
    GradedSymbolValue out;
    out.set_scalar(-2, cd(1.0 / p));
    out.set_scalar(-3, cd(0, -1) * xs.grad_xi.dot(xs.grad_x) / (p * p * p));
    return out;
}

template <class Chart>
GradedSymbolValue invert_gamma_two_term(const Chart& chart, const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                                        double eta) {
    return invert_gamma_two_term(chart.xi_squared(x, xi), eta);
}

}  // namespace dnolab
