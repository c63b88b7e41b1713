#include "catch_amalgamated.hpp"
#include "dnolab/exact.hpp"
#include "dnolab/forms.hpp"

#include <algorithm>
#include <numeric>

using namespace dnolab;

namespace {

// Parity by counting inversions; independent of the bubble sort in the library.
int inversion_sign(const std::vector<int>& v) {
    int inv = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) inv += v[i] > v[j];
    return inv % 2 ? -1 : 1;
}

// Sign of inserting l in front of K and sorting: (-1)^{#{k in K : k < l}}.
int insertion_sign(int l, const MultiIndex& K) {
    if (contains(K, l)) return 0;
    return std::count_if(K.begin(), K.end(), [&](int k) { return k < l; }) % 2 ? -1 : 1;
}

long long binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST_CASE("normalize_index parity matches inversion count on all permutations") {
    for (int len = 0; len <= 6; ++len) {
        std::vector<int> p(len);
        std::iota(p.begin(), p.end(), 1);
        do {
            SignedIndex s = normalize_index(p);
            REQUIRE(s.sign == inversion_sign(p));
            REQUIRE(is_ordered(s.index));
        } while (std::next_permutation(p.begin(), p.end()));
    }
}

TEST_CASE("repeated entries give sign zero, out-of-range entries throw") {
    CHECK(normalize_index({2, 1, 2}).sign == 0);
    CHECK(insert_index({1, 3}, 3).sign == 0);
    CHECK_THROWS_AS(normalize_index({0, 1}, 3), DomainError);
    CHECK_THROWS_AS(normalize_index({4}, 3), DomainError);
    CHECK_THROWS_AS(remove_index({1, 2}, 3), MembershipError);
    CHECK_THROWS_AS(contraction_sign({1, 2}, {1}), ShapeError);
}

TEST_CASE("epsilon equals the count of smaller entries") {
    for (int n = 1; n <= 6; ++n)
        for (int q = 0; q <= n; ++q)
            for (const auto& K : all_indices(n, q))
                for (int m = 1; m <= n; ++m) REQUIRE(epsilon(m, K) == insertion_sign(m, K));
}

TEST_CASE("all_indices enumerates increasing tuples in lexicographic order") {
    for (int n = 1; n <= 7; ++n)
        for (int q = 0; q <= n; ++q) {
            auto all = all_indices(n, q);
            REQUIRE((long long)all.size() == binomial(n, q));
            for (const auto& J : all) REQUIRE(is_ordered(J));
            REQUIRE(std::is_sorted(all.begin(), all.end()));
        }
    CHECK(all_indices(3, 4).empty());
}

TEST_CASE("insert then remove is the identity") {
    for (int n = 1; n <= 5; ++n)
        for (int q = 0; q < n; ++q)
            for (const auto& K : all_indices(n, q))
                for (int l = 1; l <= n; ++l) {
                    if (contains(K, l)) continue;
                    SignedIndex s = insert_index(K, l, n);
                    REQUIRE(s.sign != 0);
                    REQUIRE(remove_index(s.index, l) == K);
                }
}

TEST_CASE("contraction_sign composes the parities of both orderings") {
    CHECK(contraction_sign({2, 1, 3}, {1, 2, 3}) == -1);
    CHECK(contraction_sign({2, 1, 3}, {2, 1, 3}) == 1);
    CHECK(contraction_sign({3, 1, 2}, {1, 3, 2}) == -1);
    CHECK(contraction_sign({1, 2}, {1, 3}) == 0);
}

TEST_CASE("epsilon identity holds exhaustively for n <= 5, q <= 3") {
    long long cases = 0;
    for (int n = 1; n <= 5; ++n)
        for (int q = 1; q <= std::min(n, 3); ++q) {
            auto r = check_epsilon_identity_counted(n, q);
            CHECK(r.counterexamples.empty());
            cases += r.cases;
        }
    CHECK(cases == 202);
}

TEST_CASE("epsilon identity through the independent sign rule") {
    // Both sides rewritten with insertion_sign: the product on the left is
    // eps(l,J) * eps(k, J_k u l) and on the right -eps(l, J_k) * eps(k, J_k).
    for (int n = 1; n <= 5; ++n)
        for (int q = 1; q <= std::min(n, 3); ++q)
            for (const auto& J : all_indices(n, q))
                for (int k : J)
                    for (int l = 1; l <= n; ++l) {
                        if (l == k || contains(J, l)) continue;
                        MultiIndex Jk;
                        for (int e : J)
                            if (e != k) Jk.push_back(e);
                        MultiIndex Jkl = Jk;
                        Jkl.push_back(l);
                        std::sort(Jkl.begin(), Jkl.end());
                        int lhs = insertion_sign(l, J) * insertion_sign(k, Jkl);
                        int rhs = -insertion_sign(l, Jk) * insertion_sign(k, Jk);
                        REQUIRE(lhs == rhs);
                    }
}

TEST_CASE("check_epsilon_identity rejects out-of-range sizes") {
    CHECK_THROWS_AS(check_epsilon_identity(3, 0), DomainError);
    CHECK_THROWS_AS(check_epsilon_identity(2, 3), DomainError);
}

TEST_CASE("Gaussian rationals are a field") {
    GaussRational a(Rational(1), Rational(2)), b(Rational(3), Rational(-1));
    GaussRational p = a * b;
    CHECK(p == GaussRational(Rational(5), Rational(5)));
    CHECK((p / b) == a);
    CHECK((a - a).is_zero());
    CHECK(a.conj() * a == GaussRational(a.norm2()));
    CHECK(GaussRational::unit_i() * GaussRational::unit_i() == GaussRational(-1));
    CHECK(GaussRational(Rational(1, 3)).str() == "1/3");
}

TEST_CASE("sqrt2 extension multiplies exactly") {
    Sqrt2Ext r = Sqrt2Ext::sqrt2();
    CHECK(r * r == Sqrt2Ext(2));
    Sqrt2Ext x(GaussRational(Rational(1, 2)), GaussRational(Rational(3, 4)));
    CHECK((x * r) / r == x);
    CHECK(std::abs(x.to_complex() - std::complex<double>(0.5 + 0.75 * std::sqrt(2.0), 0)) < 1e-15);
}
