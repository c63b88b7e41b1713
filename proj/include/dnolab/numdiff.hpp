#pragma once
// Finite-difference helpers shared by the geometry and operator code.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <type_traits>

namespace dnolab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Fourth-order central difference of t -> f(t) at t = 0.
// Values are materialized before combining so Eigen expressions never dangle.
template <class F>
auto central4(const F& f, double h) {
    using R = std::decay_t<decltype(f(0.0))>;
    const R a = f(-2 * h), b = f(-h), c = f(h), d = f(2 * h);
    return R((a - 8.0 * b + 8.0 * c - d) * (1.0 / (12.0 * h)));
}

// ∂f/∂x_dir at x with the fourth-order stencil.
template <class F>
auto partial4(const F& f, const Vec& x, int dir, double h) {
    return central4(
        [&](double t) {
            Vec y = x;
            y[dir] += t;
            return f(y);
        },
        h);
}

// Second-order central difference, used where the stencil must stay compact.
template <class F>
auto partial2(const F& f, const Vec& x, int dir, double h) {
    using R = std::decay_t<decltype(f(x))>;
    Vec a = x, b = x;
    a[dir] += h;
    b[dir] -= h;
    const R fa = f(a), fb = f(b);
    return R((fa - fb) * (1.0 / (2.0 * h)));
}

// Richardson combination of two fourth-order estimates at h and h/2.
template <class T>
T richardson4(const T& coarse, const T& fine) {
    return (16.0 * fine - coarse) * (1.0 / 15.0);
}

// Gradient of a real scalar function.
template <class F>
Vec fd_gradient(const F& f, const Vec& x, double h) {
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) g[i] = partial4(f, x, i, h);
    return g;
}

// Jacobian (columns = partials) of a vector-valued function.
template <class F>
Mat fd_jacobian(const F& f, const Vec& x, double h) {
    Vec f0 = f(x);
    Mat J(f0.size(), x.size());
    for (int i = 0; i < x.size(); ++i) J.col(i) = partial4(f, x, i, h);
    return J;
}

}  // namespace dnolab
