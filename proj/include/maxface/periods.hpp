#pragma once

// Periods of Phi over closed loops, the symmetry reduction to the single
// loop gamma, and a root-finding oracle for the closing constant c_k.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "maxface/ck.hpp"
#include "maxface/weierstrass.hpp"

namespace maxface {

struct LoopPeriod {
    std::string label;
    CVec3 period{};
    /// max |Re period|
    double residual = 0.0;
};

struct PeriodReport {
    int k = 0;
    double c = 0.0;
    std::vector<LoopPeriod> loops;
    double max_residual() const {
        double m = 0.0;
        for (const auto& l : loops) m = std::max(m, l.residual);
        return m;
    }
};

/// Contour integral of Phi over a loop that closes on the cover.
inline CVec3 period_vector(const WeierstrassData& d, const SurfacePath& loop, double tol = 1e-11) {
    if (loop.z.empty()) throw ValidationError("period_vector: empty loop");
    if (std::abs(loop.front() - loop.back()) > 1e-12 * (1 + std::abs(loop.front())))
        throw ValidationError("period_vector: loop is not closed in z");
    if (d.cover.family != CoverFamily::Planar) {
        const SurfacePoint end = continue_path(d.cover, loop);
        if (std::abs(end.w - loop.w0) > 1e-8 * (1 + std::abs(loop.w0)))
            throw ValidationError("period_vector: loop does not close on the cover");
    }
    return integrate_phi(d, loop, tol);
}

inline double real_residual(const CVec3& p) {
    return std::max({std::abs(p[0].real()), std::abs(p[1].real()), std::abs(p[2].real())});
}

/// Periods over the 2(k+1) generator loops kappa_1^j gamma, kappa_1^j kappa_2 gamma.
inline PeriodReport closure_residuals(const WeierstrassData& d, int pieces = 160) {
    if (d.cover.family != CoverFamily::Full) throw ValidationError("closure_residuals: genus-k data required");
    PeriodReport rep;
    rep.k = d.cover.k;
    rep.c = d.params.count("c") ? d.params.at("c") : 0.0;
    const auto loops = generator_loops(d.cover, d.base, pieces);
    for (std::size_t i = 0; i < loops.size(); ++i) {
        LoopPeriod lp;
        const int j = int(i % (d.cover.k + 1));
        lp.label = (i <= std::size_t(d.cover.k) ? "kappa1^" + std::to_string(j) + " gamma"
                                                : "kappa1^" + std::to_string(j) + " kappa2 gamma");
        lp.period = period_vector(d, loops[i]);
        lp.residual = real_residual(lp.period);
        rep.loops.push_back(lp);
    }
    return rep;
}

/// Integrals of eta and G^2 eta over gamma.
struct GammaIntegrals {
    Complex eta{};
    Complex G2_eta{};
    Complex G_eta{};
    /// eta + conj(G^2 eta); gamma closes iff this vanishes.
    Complex condition() const { return eta + std::conj(G2_eta); }
};

inline GammaIntegrals gamma_integrals(const WeierstrassData& d, int pieces = 160, double tol = 1e-12) {
    const SurfacePath g = gamma_loop(d.cover, d.base, pieces);
    using V = std::array<Complex, 3>;
    const V r = integrate_along<V>(
        d.cover, g,
        [&](Complex z, Complex w) {
            const LocalData v = d.at(z, w);
            return V{v.eta, v.G * v.G * v.eta, v.G * v.eta};
        },
        tol, V{0.0, 0.0, 0.0});
    return {r[0], r[1], r[2]};
}

/// Signed scalar residual of the gamma condition as a function of c. The
/// real part of eta + conj(G^2 eta) vanishes for every c by the reflection
/// symmetry of gamma, so the imaginary part carries the condition.
inline double gamma_residual(int k, double c, int pieces = 160) {
    const GammaIntegrals gi = gamma_integrals(genus_k_data(k, c), pieces);
    return gi.condition().imag();
}

/// Independent oracle for c_k: bisection of gamma_residual on [lo, hi].
inline double solve_ck_by_root(int k, double lo = 0.2, double hi = 5.0, double tol = 1e-13) {
    double flo = gamma_residual(k, lo), fhi = gamma_residual(k, hi);
    if (!(flo * fhi < 0.0)) throw NumericalError("solve_ck_by_root: no sign change on the bracket");
    for (int it = 0; it < 200 && hi - lo > tol * (1 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = gamma_residual(k, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Rotation by `angle` of the (x1, x2) block.
inline CVec3 rotate12(const CVec3& v, double angle) {
    const double cs = std::cos(angle), sn = std::sin(angle);
    return {v[0], cs * v[1] - sn * v[2], sn * v[1] + cs * v[2]};
}

struct SymmetryCheck {
    /// max relative |kappa_1^* Phi - R(2k lambda) Phi|
    double kappa1_residual = 0.0;
    /// max relative |kappa_2^* Phi - R(k lambda) Phi|
    double kappa2_residual = 0.0;
    /// the same with R(-k lambda), the sign printed in the literature
    double kappa2_printed_residual = 0.0;
    /// max generator residual relative to the gamma residual
    double generator_spread = 0.0;
    bool holds = false;
};

/// Pullbacks of Phi by kappa_1 and kappa_2 at random points, and the
/// consequence that closing gamma closes every generator.
inline SymmetryCheck symmetry_reduction_check(int k, double c, int samples = 50, unsigned seed = 5) {
    const WeierstrassData d = genus_k_data(k, c);
    const CoverSpec& cov = d.cover;
    const double l = cov.lambda();
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, 1.5);
    SymmetryCheck s;
    auto rel = [](const CVec3& a, const CVec3& b) {
        double num = 0, den = 0;
        for (int i = 0; i < 3; ++i) {
            num += std::norm(a[i] - b[i]);
            den += std::norm(b[i]);
        }
        return std::sqrt(num / std::max(den, 1e-300));
    };
    for (int i = 0; i < samples; ++i) {
        Complex z;
        do z = {n(rng), n(rng)};
        while (std::abs(z) < 0.1 || std::abs(z - 1.0) < 0.1 || std::abs(z + 1.0) < 0.1);
        const SurfacePoint p{z, solve_fiber(cov, z)[i % cov.degree()]};
        const CVec3 phi = phi_form(d, p.z, p.w);
        const SurfacePoint q1 = kappa1(cov, p);
        const CVec3 pull1 = phi_form(d, q1.z, q1.w);  // dz is fixed
        const SurfacePoint q2 = kappa2(cov, p);
        CVec3 pull2 = phi_form(d, q2.z, q2.w);
        for (auto& x : pull2) x = -x;  // z -> -z
        s.kappa1_residual = std::max(s.kappa1_residual, rel(pull1, rotate12(phi, 2 * k * l)));
        s.kappa2_residual = std::max(s.kappa2_residual, rel(pull2, rotate12(phi, k * l)));
        s.kappa2_printed_residual = std::max(s.kappa2_printed_residual, rel(pull2, rotate12(phi, -k * l)));
    }
    const PeriodReport rep = closure_residuals(d);
    const double g = std::max(rep.loops.front().residual, 1e-300);
    for (const auto& lp : rep.loops) s.generator_spread = std::max(s.generator_spread, lp.residual / g);
    s.holds = s.kappa1_residual < 1e-10 && s.kappa2_residual < 1e-10;
    return s;
}

/// Exact-form identity G^2 eta + c^2 (k+1)/k d(w/z) = 2 c^2 w/(z^2-1) dz,
/// integrated over gamma: returns |oint G^2 eta - 2 c^2 oint w/(z^2-1) dz|.
inline double exact_form_defect(const WeierstrassData& d, int pieces = 160) {
    const double c = d.params.at("c");
    const SurfacePath g = gamma_loop(d.cover, d.base, pieces);
    const Complex lhs = integrate_along<Complex>(
        d.cover, g,
        [&](Complex z, Complex w) {
            const LocalData v = d.at(z, w);
            return v.G * v.G * v.eta;
        },
        1e-12, Complex{0.0});
    const Complex rhs = integrate_along<Complex>(
        d.cover, g, [&](Complex z, Complex w) { return 2.0 * c * c * w / (z * z - 1.0); }, 1e-12, Complex{0.0});
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

/// Least-squares line through (x_i, y_i) and its coefficient of determination.
struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    const double mean = sy / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace maxface
