#pragma once

// Complex scalars, 2x2 complex matrices, Moebius actions and group-membership
// defects. Everything here is a pure value computation.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include "maxface/errors.hpp"

namespace maxface {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// A point of the Riemann sphere C u {inf}.
struct ExtComplex {
    Complex value{};
    bool infinite = false;

    ExtComplex() = default;
    ExtComplex(Complex v) : value(v) {}
    static ExtComplex infinity() {
        ExtComplex e;
        e.infinite = true;
        return e;
    }
    bool operator==(const ExtComplex&) const = default;
};

/// 2x2 complex matrix, row major.
struct Mat2 {
    Complex a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};

    static Mat2 identity() { return {}; }
    static Mat2 diag(Complex d1, Complex d2) { return {d1, 0.0, 0.0, d2}; }

    Complex det() const { return a11 * a22 - a12 * a21; }
    Complex trace() const { return a11 + a22; }

    /// Inverse via the adjugate; exact for unimodular input up to rounding.
    Mat2 inverse() const {
        const Complex d = det();
        if (std::abs(d) == 0.0) throw DegenerateError("Mat2::inverse: singular matrix");
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }
    /// Entrywise complex conjugate (written as a bar over the matrix).
    Mat2 conj() const { return {std::conj(a11), std::conj(a12), std::conj(a21), std::conj(a22)}; }
    /// Conjugate transpose.
    Mat2 adjoint() const { return {std::conj(a11), std::conj(a21), std::conj(a12), std::conj(a22)}; }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }

    Mat2& operator+=(const Mat2& o) {
        a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        a11 -= o.a11; a12 -= o.a12; a21 -= o.a21; a22 -= o.a22;
        return *this;
    }
    Mat2& operator*=(Complex s) {
        a11 *= s; a12 *= s; a21 *= s; a22 *= s;
        return *this;
    }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
}
inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator*(Complex s, Mat2 a) { return a *= s; }
inline Mat2 operator*(Mat2 a, Complex s) { return a *= s; }

inline std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.a11 << ", " << m.a12 << "], [" << m.a21 << ", " << m.a22 << "]]";
}

inline double frobenius(const Mat2& m) {
    return std::sqrt(std::norm(m.a11) + std::norm(m.a12) + std::norm(m.a21) + std::norm(m.a22));
}

inline double distance(const Mat2& a, const Mat2& b) { return frobenius(a - b); }

inline bool is_finite(const Mat2& m) {
    return is_finite(m.a11) && is_finite(m.a12) && is_finite(m.a21) && is_finite(m.a22);
}

/// Fixed matrices: e0 is the identity, e3 = diag(1, -1).
inline Mat2 e0() { return Mat2::identity(); }
inline Mat2 e3() { return Mat2::diag(1.0, -1.0); }

/// Moebius action a * h = (a11 h + a12) / (a21 h + a22), total on the sphere.
inline ExtComplex moebius_apply(const Mat2& a, const ExtComplex& h) {
    if (h.infinite) {
        if (a.a21 == Complex{0.0}) return ExtComplex::infinity();
        return ExtComplex{a.a11 / a.a21};
    }
    const Complex num = a.a11 * h.value + a.a12;
    const Complex den = a.a21 * h.value + a.a22;
    if (den == Complex{0.0}) return ExtComplex::infinity();
    return ExtComplex{num / den};
}

inline Complex moebius_apply(const Mat2& a, Complex h) {
    const ExtComplex r = moebius_apply(a, ExtComplex{h});
    if (r.infinite) throw DegenerateError("moebius_apply: image is the point at infinity");
    return r.value;
}

enum class GroupTag { SU11, SU2, Unimodular };

struct GroupDefect {
    GroupTag group = GroupTag::Unimodular;
    double defect = 0.0;
};

/// ||a^* J a - J||_F with J = diag(1, -1), plus |det a - 1|.
/// Zero exactly on SU(1,1).
inline GroupDefect su11_defect(const Mat2& a) {
    const Mat2 j = e3();
    const double form = frobenius(a.adjoint() * j * a - j);
    return {GroupTag::SU11, form + std::abs(a.det() - 1.0)};
}

/// ||a^* a - e0||_F + |det a - 1|; zero exactly on SU(2).
inline GroupDefect su2_defect(const Mat2& a) {
    return {GroupTag::SU2, frobenius(a.adjoint() * a - e0()) + std::abs(a.det() - 1.0)};
}

inline GroupDefect unimodular_defect(const Mat2& a) {
    return {GroupTag::Unimodular, std::abs(a.det() - 1.0)};
}

/// a^m for elliptic a (half trace cos(theta), 0 < theta < pi) via
/// a^m = sin(m theta)/sin(theta) a - sin((m-1) theta)/sin(theta) e0.
/// Requires a real half trace; a complex trace with |Re| < 2 uses the complex
/// angle, which still satisfies the same Chebyshev recursion.
inline Mat2 mat_power_trig(const Mat2& a, int m) {
    const Complex half_trace = a.trace() / 2.0;
    if (std::abs(half_trace.real()) >= 1.0)
        throw ValidationError("mat_power_trig: |trace| >= 2 (parabolic or hyperbolic element)");
    const Complex theta = std::acos(half_trace);
    const Complex s = std::sin(theta);
    const Complex cm = std::sin(static_cast<double>(m) * theta) / s;
    const Complex cm1 = std::sin(static_cast<double>(m - 1) * theta) / s;
    return cm * a - cm1 * e0();
}

/// Integer power by repeated squaring (negative powers via the inverse).
inline Mat2 mat_pow(Mat2 a, int m) {
    if (m < 0) {
        a = a.inverse();
        m = -m;
    }
    Mat2 r = e0();
    while (m > 0) {
        if (m & 1) r = r * a;
        a = a * a;
        m >>= 1;
    }
    return r;
}

} // namespace maxface
