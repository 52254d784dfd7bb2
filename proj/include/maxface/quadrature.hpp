#pragma once

// Quadrature engines: a double-exponential rule on (0,1) for integrands with
// algebraic endpoint singularities, and an adaptive Gauss-Kronrod rule for
// smooth complex-valued integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "maxface/algebra.hpp"

namespace maxface {

/// Declared endpoint behaviour f(t) ~ t^left near 0 and (1-t)^right near 1.
struct QuadratureSpec {
    double left_exponent = 0.0;
    double right_exponent = 0.0;
    double tolerance = 1e-12;
    int max_level = 12;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int level = 0;
    int evaluations = 0;
};

/// Integrand receives (t, 1 - t) so that factors like (1 - t) keep full
/// relative precision next to the right endpoint.
using EndpointIntegrand = std::function<double(double t, double one_minus_t)>;

/// Tanh-sinh quadrature on (0,1). Step halving from h = 1/2; the error
/// estimate is |I_h - I_{2h}|. Stops at the first level with estimate <= tol.
inline QuadratureResult quad_singular(const EndpointIntegrand& f, const QuadratureSpec& spec) {
    if (!(spec.left_exponent > -1.0) || !(spec.right_exponent > -1.0))
        throw ValidationError("quad_singular: endpoint exponents must exceed -1");
    if (!(spec.tolerance > 0.0)) throw ValidationError("quad_singular: tolerance must be positive");

    // x(u) = 1 / (1 + exp(-pi sinh u)); dx/du = pi cosh u e^{-s} / (1 + e^{-s})^2 with s = pi sinh u.
    auto node = [&](double u, double& sum, int& evals) {
        const double s = pi * std::sinh(u);
        if (std::abs(s) > 700.0) return false;
        const double e = std::exp(-std::abs(s));
        // the small one of x, 1-x is e/(1+e); the other is 1/(1+e)
        const double small = e / (1.0 + e);
        const double big = 1.0 / (1.0 + e);
        const double x = s >= 0 ? big : small;
        const double xc = s >= 0 ? small : big;
        if (x <= 0.0 || xc <= 0.0) return false;
        const double w = pi * std::cosh(u) * e / ((1.0 + e) * (1.0 + e));
        const double fx = f(x, xc);
        ++evals;
        if (!std::isfinite(fx)) return false;
        sum += w * fx;
        return true;
    };

    // Half-width of the u-range where the nodes stay representable.
    const double u_max = std::asinh(700.0 / pi);

    QuadratureResult out;
    double h = 0.5;
    double sum = 0.0;
    int evals = 0;
    node(0.0, sum, evals);
    for (int j = 1; j * h <= u_max; ++j) {
        node(j * h, sum, evals);
        node(-j * h, sum, evals);
    }
    double estimate = sum * h;
    double prev = estimate;
    double last_err = std::numeric_limits<double>::infinity();
    for (int level = 1; level <= spec.max_level; ++level) {
        h *= 0.5;
        // new nodes are the odd multiples of h
        for (int j = 1; j * h <= u_max; j += 2) {
            node(j * h, sum, evals);
            node(-j * h, sum, evals);
        }
        estimate = sum * h;
        last_err = std::abs(estimate - prev);
        if (last_err <= spec.tolerance) {
            out.value = estimate;
            out.error_estimate = last_err;
            out.level = level;
            out.evaluations = evals;
            return out;
        }
        prev = estimate;
    }
    throw QuadratureError("quad_singular: no convergence after " + std::to_string(spec.max_level) +
                              " levels",
                          estimate, last_err);
}

namespace detail {

// Gauss-Kronrod 7-15 nodes on [-1, 1] (non-negative half).
inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> g7_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class Value>
double magnitude(const Value& v) {
    if constexpr (std::is_arithmetic_v<Value>) {
        return std::abs(v);
    } else if constexpr (std::is_same_v<Value, Complex>) {
        return std::abs(v);
    } else {
        double m = 0.0;
        for (const auto& c : v) m = std::max(m, std::abs(c));
        return m;
    }
}

template <class Value>
Value scaled(const Value& v, double s) {
    if constexpr (std::is_arithmetic_v<Value> || std::is_same_v<Value, Complex>) {
        return v * s;
    } else {
        Value r = v;
        for (auto& c : r) c *= s;
        return r;
    }
}

template <class Value>
void accumulate(Value& acc, const Value& v, double w) {
    if constexpr (std::is_arithmetic_v<Value> || std::is_same_v<Value, Complex>) {
        acc += w * v;
    } else {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
    }
}

} // namespace detail

/// One GK15 panel on [a, b]. Returns the Kronrod value and |K - G|.
template <class Value, class F>
std::pair<Value, double> gk15_panel(F&& f, double a, double b, const Value& zero) {
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    Value k = zero, g = zero;
    const Value fc = f(c);
    detail::accumulate(k, fc, detail::gk15_wk[7]);
    detail::accumulate(g, fc, detail::g7_w[3]);
    for (int i = 0; i < 7; ++i) {
        const double dx = r * detail::gk15_x[i];
        const Value f1 = f(c - dx), f2 = f(c + dx);
        detail::accumulate(k, f1, detail::gk15_wk[i]);
        detail::accumulate(k, f2, detail::gk15_wk[i]);
        if (i % 2 == 1) {
            detail::accumulate(g, f1, detail::g7_w[i / 2]);
            detail::accumulate(g, f2, detail::g7_w[i / 2]);
        }
    }
    k = detail::scaled(k, r);
    g = detail::scaled(g, r);
    Value diff = k;
    detail::accumulate(diff, g, -1.0);
    return {k, detail::magnitude(diff)};
}

/// Adaptive bisection with GK15 panels. A panel is accepted when |K - G| is
/// below its share tol * |panel| / |b - a| of the absolute budget, so the sum
/// of accepted error estimates stays under tol. Works for double, Complex and
/// std::array<Complex, N>.
template <class Value, class F>
Value integrate_gk(F&& f, double a, double b, double tol, const Value& zero, int max_depth = 40) {
    struct Panel {
        double a, b;
        int depth;
    };
    Value total = zero;
    std::vector<Panel> stack{{a, b, 0}};
    const double length = std::abs(b - a);
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        auto [val, err] = gk15_panel<Value>(f, p.a, p.b, zero);
        const double share = length > 0.0 ? std::abs(p.b - p.a) / length : 1.0;
        const double allowed = std::max(tol * share, 4e-16 * detail::magnitude(val));
        if (err <= allowed) {
            detail::accumulate(total, val, 1.0);
            continue;
        }
        if (p.depth >= max_depth) throw NumericalError("integrate_gk: maximum subdivision depth reached");
        const double m = 0.5 * (p.a + p.b);
        stack.push_back({m, p.b, p.depth + 1});
        stack.push_back({p.a, m, p.depth + 1});
    }
    return total;
}

/// Complete Beta function via log-Gamma.
inline double beta_function(double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

} // namespace maxface
