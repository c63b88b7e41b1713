#pragma once
// Multi-index algebra for (0,q)-form components.
//
// A multi-index is a strictly increasing tuple of integers in 1..n. Signs are
// permutation parities: a sequence A carries sign +1/-1 relative to its sorted
// version, and 0 when it repeats an entry.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dnolab {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct MembershipError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using MultiIndex = std::vector<int>;

struct SignedIndex {
    MultiIndex index;
    int sign = 0;
};

inline bool is_ordered(const MultiIndex& J) {
    for (std::size_t i = 1; i < J.size(); ++i)
        if (J[i - 1] >= J[i]) return false;
    return true;
}

inline bool contains(const MultiIndex& J, int k) {
    return std::find(J.begin(), J.end(), k) != J.end();
}

inline std::string to_string(const MultiIndex& J) {
    std::string s = "(";
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(J[i]);
    }
    return s + ")";
}

// Sort by adjacent transpositions and count them. Quadratic, but indices are short.
inline SignedIndex normalize_index(const std::vector<int>& seq, int n = 0) {
    if (n > 0)
        for (int e : seq)
            if (e < 1 || e > n)
                throw DomainError("index entry " + std::to_string(e) + " outside 1.." + std::to_string(n));
    MultiIndex s = seq;
    int swaps = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j + 1 < s.size() - i; ++j)
            if (s[j] > s[j + 1]) {
                std::swap(s[j], s[j + 1]);
                ++swaps;
            }
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] == s[i - 1]) return {{}, 0};
    return {s, (swaps % 2) ? -1 : 1};
}

inline MultiIndex remove_index(const MultiIndex& J, int k) {
    MultiIndex out;
    bool found = false;
    for (int e : J) {
        if (e == k && !found) {
            found = true;
            continue;
        }
        out.push_back(e);
    }
    if (!found) throw MembershipError(std::to_string(k) + " not in " + to_string(J));
    return out;
}

// K ∪ {l} with the sign of moving l from the front into place.
inline SignedIndex insert_index(const MultiIndex& K, int l, int n = 0) {
    std::vector<int> seq;
    seq.reserve(K.size() + 1);
    seq.push_back(l);
    seq.insert(seq.end(), K.begin(), K.end());
    return normalize_index(seq, n);
}

// Sign of the permutation taking A to B, 0 if A is not a permutation of B.
inline int contraction_sign(const std::vector<int>& A, const MultiIndex& B) {
    if (A.size() != B.size()) throw ShapeError("contraction_sign: length mismatch");
    SignedIndex s = normalize_index(A);
    if (s.sign == 0) return 0;
    MultiIndex sortedB = B;
    std::sort(sortedB.begin(), sortedB.end());
    if (s.index != sortedB) return 0;
    // B itself may be unordered; compose with its own parity.
    return s.sign * normalize_index(B).sign;
}

// ε^{mK}_{K∪{m}}
inline int epsilon(int m, const MultiIndex& K) { return insert_index(K, m).sign; }

// All strictly increasing tuples of length q drawn from 1..n, lexicographic.
inline std::vector<MultiIndex> all_indices(int n, int q) {
    std::vector<MultiIndex> out;
    if (q < 0 || q > n) return out;
    MultiIndex cur(q);
    for (int i = 0; i < q; ++i) cur[i] = i + 1;
    while (true) {
        out.push_back(cur);
        int i = q - 1;
        while (i >= 0 && cur[i] == n - q + i + 1) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < q; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

struct EpsilonCounterexample {
    MultiIndex J;
    int k = 0;
    int l = 0;
    int lhs = 0;
    int rhs = 0;
};

struct EpsilonCheck {
    std::vector<EpsilonCounterexample> counterexamples;
    long long cases = 0;
};

// ε^{lJ}_{J∪l} ε^{k,J_k̂∪l}_{J∪l} = -ε^{l,J_k̂}_{J_k̂∪l} ε^{k,J_k̂}_{J}
inline EpsilonCheck check_epsilon_identity_counted(int n, int q) {
    EpsilonCheck out;
    for (const auto& J : all_indices(n, q)) {
        for (int k : J) {
            MultiIndex Jk = remove_index(J, k);
            for (int l = 1; l <= n; ++l) {
                if (l == k || contains(J, l)) continue;
                ++out.cases;
                SignedIndex Jl = insert_index(J, l);
                SignedIndex Jkl = insert_index(Jk, l);
                std::vector<int> kJkl{k};
                kJkl.insert(kJkl.end(), Jkl.index.begin(), Jkl.index.end());
                std::vector<int> kJk{k};
                kJk.insert(kJk.end(), Jk.begin(), Jk.end());
                int lhs = Jl.sign * contraction_sign(kJkl, Jl.index);
                int rhs = -Jkl.sign * contraction_sign(kJk, J);
                if (lhs != rhs) out.counterexamples.push_back({J, k, l, lhs, rhs});
            }
        }
    }
    return out;
}

inline std::vector<EpsilonCounterexample> check_epsilon_identity(int n, int q) {
    if (q < 1 || q > n || n > 8) throw DomainError("check_epsilon_identity requires 1 <= q <= n <= 8");
    return check_epsilon_identity_counted(n, q).counterexamples;
}

}  // namespace dnolab
