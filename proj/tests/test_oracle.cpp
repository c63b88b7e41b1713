#include "catch_amalgamated.hpp"
#include "dnolab/oracle.hpp"
#include "dnolab/parallel.hpp"

#include <cstdlib>
#include <random>

using namespace dnolab;

namespace {

// Decaying root of -l^2 + sqrt2 s l + (Xi^2 + a) = 0 with Re l > 0.
cd characteristic_root(double xi2, cd s, cd a) {
    const cd b = std::sqrt(2.0) * s;
    cd l = (b + std::sqrt(b * b + 4.0 * (xi2 + a))) / 2.0;
    if (l.real() < 0) l = (b - std::sqrt(b * b + 4.0 * (xi2 + a))) / 2.0;
    return l;
}

OdeProblem constant_problem(double X, cd s, cd a) {
    OdeProblem p;
    p.xi = Vec::Zero(1);
    p.xi[0] = -X;
    p.big_xi_sq = X * X;
    p.s0 = s;
    p.a0 = a;
    return p;
}

}  // namespace

TEST_CASE("ODE oracle solves constant coefficients in closed form") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int k = 0; k < 20; ++k) {
        const double X = 5 + 20 * std::abs(U(rng));
        cd s(U(rng), U(rng)), a(X * U(rng), X * U(rng));
        cd v = ode_dno(constant_problem(X, s, a));
        cd exact = characteristic_root(X * X, s, a);
        REQUIRE(std::abs(v - exact) < 1e-8 * std::abs(exact));
    }
}

TEST_CASE("ODE oracle quadratic-root case") {
    cd v = ode_dno(constant_problem(10, std::sqrt(2.0), 0));
    CHECK(std::abs(v - (1 + std::sqrt(101.0))) < 1e-8);
}

TEST_CASE("ODE oracle reports refinement and rejects bad input") {
    OdeResult r = ode_dno_detailed(constant_problem(8, 0.3, cd(0, 2)));
    CHECK(r.step_ratio < 1e-7);
    CHECK(r.depth == Catch::Approx(12.0 / 8));
    OdeProblem bad = constant_problem(8, 0, 0);
    bad.big_xi_sq = 0;
    CHECK_THROWS_AS(ode_dno(bad), SolverError);
    OdeProblem shallow = constant_problem(8, 0, 0);
    shallow.depth = 0.5;
    CHECK_THROWS_AS(ode_dno(shallow), SolverError);
    // weight 1 + phi' rho degenerates inside the depth interval
    OdeProblem weighted = constant_problem(2, 0, 0);
    weighted.phi_prime = 1.0;
    CHECK_THROWS_AS(ode_dno(weighted), SolverError);
}

TEST_CASE("strip oracle is exact for constant coefficients") {
    for (int xi1 : {4, -8, 16}) {
        StripProblem p;
        p.xi1 = xi1;
        p.epsilon = 0;
        StripResult r = strip_dno(p);
        CHECK(std::abs(r.value - cd(std::abs(xi1))) < 1e-7 * std::abs(xi1));
    }
    StripProblem zero;
    zero.xi1 = 0;
    CHECK_THROWS_AS(strip_dno(zero), SolverError);
}

TEST_CASE("strip oracle respects reality: N(-xi) = conj N(xi)") {
    StripProblem p;
    p.xi1 = 12;
    StripResult a = strip_dno(p);
    p.xi1 = -12;
    StripResult b = strip_dno(p);
    CHECK(std::abs(a.value - std::conj(b.value)) < 1e-9 * std::abs(a.value));
    // the zero-order part is odd in xi, so the two values do differ
    CHECK(std::abs(a.value - b.value) > 1e-3);
}

TEST_CASE("eta quadrature matches residues and the damped transform") {
    RationalEta<cd> r;
    r.poles = {{cd(0.2, 1.1), 1}, {cd(-0.4, -0.6), 2}};
    r.numerator = Polynomial<cd>({cd(0.3, -0.5)});
    CHECK(std::abs(quad_eta_integral(r) - eta_integral(r, EtaMode::RealLine)) < 1e-10);
    // int e^{i rho eta}/(eta^2 + 1) = pi e^{-|rho|}
    RationalEta<cd> lorentz;
    lorentz.poles = {{cd(0, 1), 1}, {cd(0, -1), 1}};
    lorentz.numerator = Polynomial<cd>::constant(1.0);
    CHECK(std::abs(quad_eta_integral(lorentz, 0.7) - std::numbers::pi * std::exp(-0.7)) < 1e-8);
}

TEST_CASE("parallel map keeps task order and reports the first failure") {
    std::function<long long(std::size_t)> square = [](std::size_t i) { return (long long)(i * i); };
    for (int jobs : {1, 2, 4}) {
        auto v = parallel_map<long long>(50, jobs, square);
        for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(v[i] == (long long)(i * i));
    }
    std::function<int(std::size_t)> failing = [](std::size_t i) -> int {
        if (i == 3 || i == 7) throw std::runtime_error("task " + std::to_string(i));
        return 0;
    };
    try {
        parallel_map<int>(10, 3, failing);
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "task 3");
    }
}

TEST_CASE("job count falls back to the environment") {
    ::setenv("DNOLAB_JOBS", "3", 1);
    CHECK(resolve_jobs(0) == 3);
    CHECK(resolve_jobs(2) == 2);
    ::setenv("DNOLAB_JOBS", "zero", 1);
    CHECK(resolve_jobs(0) == 1);
    ::unsetenv("DNOLAB_JOBS");
    CHECK(resolve_jobs(0) == 1);
}
