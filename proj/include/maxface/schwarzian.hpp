#pragma once

// Schwarzian derivative S(h) = (h''/h')' - (1/2)(h''/h')^2 of a holomorphic
// function known only through point evaluations.

#include <cmath>
#include <functional>
#include <limits>

#include "maxface/algebra.hpp"

namespace maxface {

using HolomorphicFn = std::function<Complex(Complex)>;

/// Default step: eps^{1/5} scaled by |z| + 1.
inline double schwarzian_default_step(Complex z) {
    return std::pow(std::numeric_limits<double>::epsilon(), 0.2) * (std::abs(z) + 1.0);
}

namespace detail {

// One stencil evaluation of S with spacing e along the real direction.
inline Complex schwarzian_stencil(const HolomorphicFn& h, Complex z, double e) {
    const Complex hm2 = h(z - 2.0 * e), hm1 = h(z - e), h0 = h(z), hp1 = h(z + e), hp2 = h(z + 2.0 * e);
    const Complex d1 = (-hp2 + 8.0 * hp1 - 8.0 * hm1 + hm2) / (12.0 * e);
    const Complex d2 = (-hp2 + 16.0 * hp1 - 30.0 * h0 + 16.0 * hm1 - hm2) / (12.0 * e * e);
    const Complex d3 = (hp2 - 2.0 * hp1 + 2.0 * hm1 - hm2) / (2.0 * e * e * e);
    const double scale = std::abs(hp2 - hm2) + std::abs(hp1 - hm1);
    if (!(std::abs(d1) * e > 1e-13 * (scale + std::abs(h0))) || std::abs(d1) == 0.0)
        throw DegenerateError("schwarzian_fd: derivative vanishes near the evaluation point");
    const Complex r = d2 / d1;
    return d3 / d1 - 1.5 * r * r;
}

} // namespace detail

/// Finite-difference Schwarzian with one Richardson level on the O(step^2)
/// error of the third-derivative stencil. step <= 0 selects the default.
inline Complex schwarzian_fd(const HolomorphicFn& h, Complex z, double step = 0.0) {
    const double e = step > 0.0 ? step : schwarzian_default_step(z);
    const Complex coarse = detail::schwarzian_stencil(h, z, e);
    const Complex fine = detail::schwarzian_stencil(h, z, 0.5 * e);
    return (4.0 * fine - coarse) / 3.0;
}

} // namespace maxface
