#include "catch_amalgamated.hpp"
#include "dnolab/operator_assembly.hpp"
#include "dnolab/oracle.hpp"

#include <random>

using namespace dnolab;

namespace {

BoundaryChart chart_for(const std::string& name, int n) {
    Domain d = make_builtin(name, n);
    return build_chart(d, d.default_point, {});
}

}  // namespace

TEST_CASE("flat model operator has no lower-order terms") {
    for (int n : {2, 3})
        for (int q = 1; q <= n; ++q) {
            BoundaryChart c = chart_for("halfspace-flat", n);
            LocalOperator op = assemble_square(c, q);
            CHECK(op.rows.size() == all_indices(n, q).size());
            CHECK(op.s.cwiseAbs().maxCoeff() < 1e-12);
            CHECK(op.tau.cwiseAbs().maxCoeff() < 1e-10);
            CHECK(std::abs(op.rho_dd) < 1e-10);
            for (const auto& row : op.first_order)
                for (const auto& F : row) CHECK(F.cwiseAbs().maxCoeff() < 1e-10);
        }
}

TEST_CASE("normal second derivative has coefficient -1 and the principal part matches Xi^2") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> N(0, 1);
    for (const char* name : {"ball", "siegel", "halfspace-flat"}) {
        BoundaryChart c = chart_for(name, 2);
        LocalOperator op = assemble_square(c, 1);
        CHECK(std::abs(op.principal(3, 3) + 1.0) < 1e-9);
        for (int a = 0; a < 3; ++a) CHECK(std::abs(op.principal(a, 3)) < 1e-9);
        for (int k = 0; k < 5; ++k) {
            Vec xi(3);
            for (int i = 0; i < 3; ++i) xi[i] = N(rng);
            double chart_value = c.xi_squared_value(Vec::Zero(3), xi).value;
            CHECK(std::abs(op.xi_squared(xi) - chart_value) < 1e-8 * chart_value);
        }
    }
}

TEST_CASE("assembled operator agrees with the directly applied square") {
    struct Case {
        const char* name;
        int n, q, trials;
    };
    for (const Case& cs : {Case{"ball", 2, 1, 3}, Case{"siegel", 2, 1, 2}, Case{"ball", 2, 2, 1}, Case{"halfspace-flat", 2, 1, 1}}) {
        INFO(cs.name << " q=" << cs.q);
        CrosscheckReport r = square_crosscheck(chart_for(cs.name, cs.n), cs.q, cs.trials);
        CHECK(r.principal < 1e-4);
        CHECK(r.rho < 1e-4);
        CHECK(r.random_forms < 1e-4);
        CHECK(r.s_offdiag < 1e-10);
        CHECK(r.s_closed < 1e-5);
        CHECK(r.tau_closed < 1e-5);
    }
}

TEST_CASE("S matches the closed form on boundary rows") {
    for (const char* name : {"ball", "siegel"})
        for (int n : {2, 3}) {
            BoundaryChart c = chart_for(name, n);
            LocalOperator op = assemble_square(c, 1);
            for (int r : op.boundary_rows()) CHECK(std::abs(op.s(r, r) - s_closed_form(c, op.rows[r])) < 1e-5);
            CHECK_THROWS_AS(s_closed_form(c, MultiIndex{n}), MembershipError);
        }
}

TEST_CASE("weight perturbation shifts exactly the documented coefficients") {
    BoundaryChart c = chart_for("ball", 2);
    LocalOperator base = assemble_square(c, 1);
    for (double phi : {0.5, -1.3}) {
        LocalOperator w = apply_phi(base, phi);
        CMat ds = w.s - base.s;
        CHECK((ds + std::sqrt(2.0) * phi * CMat::Identity(ds.rows(), ds.cols())).cwiseAbs().maxCoeff() < 1e-15);
        Mat dt = w.tau - base.tau;
        CHECK(std::abs(dt(2, 2) - 2 * phi) < 1e-15);
        dt(2, 2) = 0;
        CHECK(dt.cwiseAbs().maxCoeff() == 0);
        CHECK(std::abs(w.rho_dd - base.rho_dd + phi) < 1e-15);
        CHECK(w.phi_prime == phi);
    }
}

TEST_CASE("a0 T-coefficient matches its closed-form decomposition") {
    for (const char* name : {"ball", "siegel"}) {
        BoundaryChart c = chart_for(name, 2);
        LocalOperator op = assemble_square(c, 1);
        Vec xi = Vec::Zero(3);
        xi[2] = -1;
        AZeroSymbol a = a_zero_symbol(op, c, xi, MultiIndex{1});
        CHECK(std::abs(a.t_coefficient - a.t_closed) < 1e-5);
    }
}
