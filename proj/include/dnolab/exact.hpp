#pragma once
// Exact scalars: Gaussian rationals Q(i) and the extension Q(i)(√2).
// Used where constants must come out with zero deviation.

#include <boost/rational.hpp>

#include <complex>
#include <ostream>
#include <sstream>
#include <string>

namespace dnolab {

using Rational = boost::rational<long long>;

struct GaussRational {
    Rational re{0}, im{0};

    GaussRational() = default;
    GaussRational(long long r) : re(r) {}  // NOLINT(implicit)
    GaussRational(Rational r, Rational i = Rational(0)) : re(r), im(i) {}

    static GaussRational unit_i() { return {Rational(0), Rational(1)}; }

    GaussRational conj() const { return {re, -im}; }
    Rational norm2() const { return re * re + im * im; }
    bool is_zero() const { return re.numerator() == 0 && im.numerator() == 0; }

    friend GaussRational operator+(GaussRational a, const GaussRational& b) { return {a.re + b.re, a.im + b.im}; }
    friend GaussRational operator-(GaussRational a, const GaussRational& b) { return {a.re - b.re, a.im - b.im}; }
    friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
    friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussRational operator/(const GaussRational& a, const GaussRational& b) {
        Rational d = b.norm2();
        GaussRational num = a * b.conj();
        return {num.re / d, num.im / d};
    }
    GaussRational& operator+=(const GaussRational& b) { return *this = *this + b; }
    GaussRational& operator-=(const GaussRational& b) { return *this = *this - b; }
    GaussRational& operator*=(const GaussRational& b) { return *this = *this * b; }
    GaussRational& operator/=(const GaussRational& b) { return *this = *this / b; }
    friend bool operator==(const GaussRational& a, const GaussRational& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

    std::complex<double> to_complex() const {
        return {boost::rational_cast<double>(re), boost::rational_cast<double>(im)};
    }
    std::string str() const {
        std::ostringstream os;
        os << re;
        if (im.numerator() != 0) os << (im.numerator() > 0 ? "+" : "-") << (im.numerator() > 0 ? im : -im) << "i";
        return os.str();
    }
};

// a + b√2 with a, b ∈ Q(i).
struct Sqrt2Ext {
    GaussRational a, b;

    Sqrt2Ext() = default;
    Sqrt2Ext(long long r) : a(r) {}  // NOLINT(implicit)
    Sqrt2Ext(GaussRational x, GaussRational y = GaussRational()) : a(x), b(y) {}

    static Sqrt2Ext sqrt2() { return {GaussRational(), GaussRational(1)}; }
    static Sqrt2Ext unit_i() { return {GaussRational::unit_i(), GaussRational()}; }

    bool is_zero() const { return a.is_zero() && b.is_zero(); }

    friend Sqrt2Ext operator+(const Sqrt2Ext& x, const Sqrt2Ext& y) { return {x.a + y.a, x.b + y.b}; }
    friend Sqrt2Ext operator-(const Sqrt2Ext& x, const Sqrt2Ext& y) { return {x.a - y.a, x.b - y.b}; }
    friend Sqrt2Ext operator-(const Sqrt2Ext& x) { return {-x.a, -x.b}; }
    friend Sqrt2Ext operator*(const Sqrt2Ext& x, const Sqrt2Ext& y) {
        return {x.a * y.a + GaussRational(2) * x.b * y.b, x.a * y.b + x.b * y.a};
    }
    friend Sqrt2Ext operator/(const Sqrt2Ext& x, const Sqrt2Ext& y) {
        // multiply by the √2-conjugate of the denominator
        GaussRational d = y.a * y.a - GaussRational(2) * y.b * y.b;
        Sqrt2Ext num = x * Sqrt2Ext{y.a, -y.b};
        return {num.a / d, num.b / d};
    }
    Sqrt2Ext& operator+=(const Sqrt2Ext& y) { return *this = *this + y; }
    Sqrt2Ext& operator*=(const Sqrt2Ext& y) { return *this = *this * y; }
    friend bool operator==(const Sqrt2Ext& x, const Sqrt2Ext& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const Sqrt2Ext& x, const Sqrt2Ext& y) { return !(x == y); }

    std::complex<double> to_complex() const { return a.to_complex() + std::sqrt(2.0) * b.to_complex(); }
    std::string str() const {
        if (b.is_zero()) return a.str();
        std::string s = a.is_zero() ? "" : a.str() + " + ";
        return s + "(" + b.str() + ")*sqrt2";
    }
};

inline std::ostream& operator<<(std::ostream& os, const GaussRational& x) { return os << x.str(); }
inline std::ostream& operator<<(std::ostream& os, const Sqrt2Ext& x) { return os << x.str(); }

// Scalar traits used by the generic residue engine.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<std::complex<double>> {
    static std::complex<double> zero() { return {0, 0}; }
    static std::complex<double> one() { return {1, 0}; }
    static std::complex<double> i() { return {0, 1}; }
    static std::complex<double> from_int(long long k) { return {double(k), 0}; }
    static bool is_zero(const std::complex<double>& x) { return x == std::complex<double>(0, 0); }
};

template <>
struct ScalarTraits<GaussRational> {
    static GaussRational zero() { return {}; }
    static GaussRational one() { return GaussRational(1); }
    static GaussRational i() { return GaussRational::unit_i(); }
    static GaussRational from_int(long long k) { return GaussRational(k); }
    static bool is_zero(const GaussRational& x) { return x.is_zero(); }
};

}  // namespace dnolab
