#include "catch_amalgamated.hpp"
#include "dnolab/symbols.hpp"

#include <random>

using namespace dnolab;
using Catch::Matchers::WithinAbs;
using GR = GaussRational;

namespace {

// Simpson's rule for the real-line integral after eta = tan(theta).
cd simpson_real_line(const RationalEta<cd>& r, int N = 200000) {
    const double a = -std::numbers::pi / 2, b = std::numbers::pi / 2, h = (b - a) / N;
    // at theta = +-pi/2 the integrand tends to lim eta^2 r(eta)
    const cd edge = r.pole_order() - r.numerator.degree() == 2 ? r.numerator.c.back() : cd(0);
    auto f = [&](double t) -> cd {
        if (std::abs(std::abs(t) - std::numbers::pi / 2) < 1e-15) return edge;
        const double c = std::cos(t);
        return r(cd(std::tan(t), 0)) / (c * c);
    };
    cd s = f(a) + f(b);
    for (int k = 1; k < N; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

RationalEta<GR> exact_rational(std::vector<long long> num, int up, int down) {
    RationalEta<GR> r;
    std::vector<GR> c(num.begin(), num.end());
    r.numerator = Polynomial<GR>(c);
    if (up) r.poles.push_back({GR::unit_i(), up});
    if (down) r.poles.push_back({-GR::unit_i(), down});
    return r;
}

}  // namespace

TEST_CASE("polynomial arithmetic and Taylor shift") {
    Polynomial<cd> p({cd(1, 0), cd(0, 2), cd(-3, 1)});
    Polynomial<cd> q({cd(0.5, 0), cd(1, -1)});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-2, 2);
    for (int k = 0; k < 20; ++k) {
        cd x(U(rng), U(rng)), a(U(rng), U(rng));
        CHECK(std::abs((p * q)(x) - p(x) * q(x)) < 1e-12);
        CHECK(std::abs((p + q)(x) - (p(x) + q(x))) < 1e-12);
        CHECK(std::abs(p.shifted(a)(x) - p(a + x)) < 1e-12);
        CHECK(std::abs(q.pow(3)(x) - q(x) * q(x) * q(x)) < 1e-12);
    }
    CHECK(Polynomial<cd>({cd(0), cd(0)}).degree() == -1);
}

TEST_CASE("residues at simple and double poles, exact") {
    // 1/((eta - i)^2 (eta + i)): residue at i is d/deta (eta + i)^-1 = -1/(2i)^2 = 1/4
    auto r = exact_rational({1}, 2, 1);
    CHECK(residue_at(r, GR::unit_i()) == GR(Rational(1, 4)));
    CHECK(residue_at(r, -GR::unit_i()) == GR(Rational(-1, 4)));
    // eta/((eta - i)(eta + i)): residue 1/2 at both poles
    auto s = exact_rational({0, 1}, 1, 1);
    CHECK(residue_at(s, GR::unit_i()) == GR(Rational(1, 2)));
    CHECK_THROWS_AS(residue_at(s, GR(3)), LookupError);
}

TEST_CASE("closing up or down gives the same integral when it converges") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-1, 1), Im(0.2, 2);
    for (int k = 0; k < 50; ++k) {
        RationalEta<cd> r;
        r.poles = {{cd(U(rng), Im(rng)), 1 + int(rng() % 2)}, {cd(U(rng), -Im(rng)), 1 + int(rng() % 2)}};
        r.numerator = Polynomial<cd>({cd(U(rng), U(rng))});
        cd up = eta_integral(r, EtaMode::CloseUpper), down = eta_integral(r, EtaMode::CloseLower);
        REQUIRE(std::abs(up - down) < 1e-12 * (1 + std::abs(up)));
    }
}

TEST_CASE("real-line integral agrees with Simpson after a tangent substitution") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1), Im(0.5, 2);
    for (int k = 0; k < 10; ++k) {
        RationalEta<cd> r;
        r.poles = {{cd(U(rng), Im(rng)), 1}, {cd(U(rng), -Im(rng)), 2}};
        r.numerator = Polynomial<cd>({cd(U(rng), U(rng)), cd(U(rng), U(rng))});
        cd exact = eta_integral(r, EtaMode::RealLine);
        cd quad = simpson_real_line(r);
        REQUIRE(std::abs(exact - quad) < 1e-9 * std::max(1.0, std::abs(exact)));
    }
    RationalEta<cd> lorentz;
    lorentz.poles = {{cd(0, 1), 1}, {cd(0, -1), 1}};
    lorentz.numerator = Polynomial<cd>::constant(1.0);
    CHECK_THAT(eta_integral(lorentz, EtaMode::RealLine).real(), WithinAbs(std::numbers::pi, 1e-14));
}

TEST_CASE("contour errors") {
    RationalEta<cd> r;
    r.poles = {{cd(0.5, 0), 2}};
    r.numerator = Polynomial<cd>::constant(1.0);
    CHECK_THROWS_AS(eta_integral(r, EtaMode::RealLine), ContourError);
    RationalEta<cd> slow;
    slow.poles = {{cd(0, 1), 1}};
    slow.numerator = Polynomial<cd>::constant(1.0);
    CHECK_THROWS_AS(eta_integral(slow, EtaMode::RealLine), DivergenceError);
    CHECK_NOTHROW(eta_integral(slow, EtaMode::CloseUpper));
}

TEST_CASE("two-term composition reproduces D_x o x") {
    // a = xi (degree 1), b = x (degree 0): sigma(D_x x) = x xi - i
    SymbolEvaluator a{1, [](const Eigen::VectorXd&, const Eigen::VectorXd& xi) {
                          SymbolJet j;
                          j.value = xi[0];
                          j.grad_xi = Eigen::VectorXcd::Ones(1);
                          j.grad_x = Eigen::VectorXcd::Zero(1);
                          return j;
                      }};
    SymbolEvaluator b{0, [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
                          SymbolJet j;
                          j.value = x[0];
                          j.grad_xi = Eigen::VectorXcd::Zero(1);
                          j.grad_x = Eigen::VectorXcd::Ones(1);
                          return j;
                      }};
    Eigen::VectorXd x(1), xi(1);
    x << 0.3;
    xi << 7;
    auto g = compose_two_term(a, b, x, xi);
    CHECK(std::abs(g.scalar(1) - cd(2.1)) < 1e-15);
    CHECK(std::abs(g.scalar(0) - cd(0, -1)) < 1e-15);
    // reversed order: x o D_x has no correction
    auto h = compose_two_term(b, a, x, xi);
    CHECK(std::abs(h.scalar(0)) == 0);
    CHECK_THROWS_AS(compose_two_term(SymbolEvaluator{}, b, x, xi), CapabilityError);
}

TEST_CASE("complex gradients enter the composition without conjugation") {
    SymbolEvaluator a{1, [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
                          SymbolJet j;
                          j.grad_xi = Eigen::VectorXcd::Constant(1, cd(0, 1));
                          j.grad_x = Eigen::VectorXcd::Zero(1);
                          return j;
                      }};
    SymbolEvaluator b{0, [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
                          SymbolJet j;
                          j.grad_xi = Eigen::VectorXcd::Zero(1);
                          j.grad_x = Eigen::VectorXcd::Constant(1, cd(0, 1));
                          return j;
                      }};
    Eigen::VectorXd x = Eigen::VectorXd::Zero(1), xi = Eigen::VectorXd::Ones(1);
    // -i * (i * i) = i
    CHECK(std::abs(compose_two_term(a, b, x, xi).scalar(0) - cd(0, 1)) < 1e-15);
}

TEST_CASE("two-term parametrix of eta^2 + Xi^2") {
    XiSquaredJet xs;
    xs.value = 4;
    xs.grad_xi = Eigen::VectorXd::Constant(1, 4);
    xs.grad_x = Eigen::VectorXd::Zero(1);
    auto g = invert_gamma_two_term(xs, 1.0);
    CHECK(std::abs(g.scalar(-2) - cd(0.2)) < 1e-15);
    CHECK(std::abs(g.scalar(-3)) == 0);
    xs.grad_x = Eigen::VectorXd::Constant(1, 0.5);
    // -i * 4 * 0.5 / 5^3
    CHECK(std::abs(invert_gamma_two_term(xs, 1.0).scalar(-3) - cd(0, -2.0 / 125)) < 1e-15);
}
