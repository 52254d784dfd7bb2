#pragma once

// Complex polynomials and rational functions with first and second
// derivatives, enough to code Weierstrass data on the plane exactly.

#include <algorithm>
#include <initializer_list>
#include <utility>
#include <vector>

#include "maxface/algebra.hpp"

namespace maxface {

/// Coefficients in ascending order: c[0] + c[1] z + ...
struct Poly {
    std::vector<Complex> c;

    Poly() = default;
    Poly(std::initializer_list<Complex> coeffs) : c(coeffs) {}
    explicit Poly(std::vector<Complex> coeffs) : c(std::move(coeffs)) {}

    int degree() const {
        int d = int(c.size()) - 1;
        while (d > 0 && c[d] == Complex{0.0}) --d;
        return d;
    }

    /// Value and the first two derivatives by Horner's scheme.
    void eval(Complex z, Complex& p, Complex& dp, Complex& d2p) const {
        p = dp = d2p = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) {
            d2p = d2p * z + 2.0 * dp;
            dp = dp * z + p;
            p = p * z + c[i];
        }
    }
    Complex operator()(Complex z) const {
        Complex p, dp, d2p;
        eval(z, p, dp, d2p);
        return p;
    }
};

inline Poly operator*(const Poly& a, const Poly& b) {
    if (a.c.empty() || b.c.empty()) return Poly{};
    std::vector<Complex> r(a.c.size() + b.c.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly(r);
}

inline Poly operator*(Complex s, Poly a) {
    for (auto& x : a.c) x *= s;
    return a;
}

inline Poly pow(const Poly& a, int n) {
    Poly r{1.0};
    for (int i = 0; i < n; ++i) r = r * a;
    return r;
}

struct RationalValue {
    Complex f, df, d2f;
};

struct Rational {
    Poly num{1.0};
    Poly den{1.0};

    RationalValue eval(Complex z) const {
        Complex n, dn, d2n, d, dd, d2d;
        num.eval(z, n, dn, d2n);
        den.eval(z, d, dd, d2d);
        const Complex q = (dn * d - n * dd);
        RationalValue v;
        v.f = n / d;
        v.df = q / (d * d);
        v.d2f = (d2n * d - n * d2d) / (d * d) - 2.0 * dd * q / (d * d * d);
        return v;
    }
    /// Degree as a map of the sphere, assuming num and den are coprime.
    int map_degree() const { return std::max(num.degree(), den.degree()); }
};

} // namespace maxface
