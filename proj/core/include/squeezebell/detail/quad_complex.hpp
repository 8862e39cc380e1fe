#pragma once

// Minimal complex arithmetic over an arbitrary real type. std::complex is
// only specified for the built-in floating types.

#include <complex>

namespace squeezebell::detail {

template <class R>
struct Cx {
    R re{0};
    R im{0};

    Cx() = default;
    Cx(R r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
    Cx(R r, R i) : re(r), im(i) {}

    friend Cx operator+(const Cx& a, const Cx& b) { return {a.re + b.re, a.im + b.im}; }
    friend Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
    friend Cx operator-(const Cx& a) { return {-a.re, -a.im}; }
    friend Cx operator*(const Cx& a, const Cx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Cx operator*(const R& s, const Cx& a) { return {s * a.re, s * a.im}; }
    friend Cx operator/(const Cx& a, const Cx& b) {
        // Smith's algorithm keeps the quotient finite for badly scaled operands.
        using std::abs;
        if (abs(b.re) >= abs(b.im)) {
            const R q = b.im / b.re;
            const R d = b.re + b.im * q;
            return {(a.re + a.im * q) / d, (a.im - a.re * q) / d};
        }
        const R q = b.re / b.im;
        const R d = b.im + b.re * q;
        return {(a.re * q + a.im) / d, (a.im * q - a.re) / d};
    }
    Cx& operator+=(const Cx& o) { return *this = *this + o; }
    Cx& operator-=(const Cx& o) { return *this = *this - o; }
    Cx& operator*=(const Cx& o) { return *this = *this * o; }
    Cx& operator/=(const Cx& o) { return *this = *this / o; }

    Cx conj() const { return {re, -im}; }
    R norm() const { return re * re + im * im; }
    R abs() const {
        using std::sqrt;
        return sqrt(norm());
    }
    std::complex<double> to_double() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }
};

/// e^{iθ}
template <class R>
Cx<R> expi(const R& theta) {
    using std::cos;
    using std::sin;
    return {cos(theta), sin(theta)};
}

}  // namespace squeezebell::detail
