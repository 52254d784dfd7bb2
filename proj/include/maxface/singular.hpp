#pragma once

// The singular set {|G| = 1}: tracing, the invariants alpha and beta, the
// classification of singular points and counting along components.

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "maxface/weierstrass.hpp"

namespace maxface {

enum class SingularClass { CuspidalEdge, Swallowtail, CuspidalCrossCap, ConeLikeComponent, FoldCandidate, Unclassified };

inline std::string to_string(SingularClass c) {
    switch (c) {
    case SingularClass::CuspidalEdge: return "cuspidal_edge";
    case SingularClass::Swallowtail: return "swallowtail";
    case SingularClass::CuspidalCrossCap: return "cuspidal_cross_cap";
    case SingularClass::ConeLikeComponent: return "cone_like";
    case SingularClass::FoldCandidate: return "fold_candidate";
    default: return "unclassified";
    }
}

struct AlphaBeta {
    Complex alpha{};
    Complex beta{};
    /// d alpha / dz, used by the zero polisher
    Complex dalpha{};
};

/// alpha = dG/(G^2 eta), beta = G d alpha / dG, from the coded derivatives.
inline AlphaBeta alpha_beta(const LocalData& v) {
    const Complex den = v.G * v.G * v.eta;
    if (std::abs(den) == 0.0 || !is_finite(den)) throw DegenerateError("alpha_beta: G^2 eta vanishes");
    AlphaBeta ab;
    ab.alpha = v.dG / den;
    const Complex dden = 2.0 * v.G * v.dG * v.eta + v.G * v.G * v.deta;
    ab.dalpha = (v.d2G * den - v.dG * dden) / (den * den);
    if (std::abs(v.dG) == 0.0) throw DegenerateError("alpha_beta: dG vanishes");
    ab.beta = v.G * ab.dalpha / v.dG;
    return ab;
}
inline AlphaBeta alpha_beta(const WeierstrassData& d, Complex z, Complex w) { return alpha_beta(d.at(z, w)); }

inline double classification_epsilon(const AlphaBeta& ab) {
    return 1e-7 * (1.0 + std::abs(ab.alpha) + std::abs(ab.beta));
}

struct SingularPointRecord {
    SurfacePoint p;
    AlphaBeta ab;
    SingularClass cls = SingularClass::Unclassified;
};

/// Pointwise criteria. CuspidalEdge also requires Re alpha != 0 (frontness).
inline SingularPointRecord classify_point(const WeierstrassData& d, const SurfacePoint& p) {
    SingularPointRecord r;
    r.p = p;
    r.ab = alpha_beta(d, p.z, p.w);
    const double eps = classification_epsilon(r.ab);
    const Complex a = r.ab.alpha, b = r.ab.beta;
    if (std::abs(a) <= eps)
        r.cls = SingularClass::Unclassified;
    else if (std::abs(a.imag()) < eps && std::abs(b.real()) > eps)
        r.cls = SingularClass::Swallowtail;
    else if (std::abs(a.real()) < eps && std::abs(b.imag()) > eps)
        r.cls = SingularClass::CuspidalCrossCap;
    else if (std::abs(a.imag()) > eps && std::abs(a.real()) > eps)
        r.cls = SingularClass::CuspidalEdge;
    return r;
}

// ---------------------------------------------------------------------------
// Tracing

/// Coordinate used for tracing: z = zeta, or z = center + 1/zeta so that a
/// component through z = inf becomes compact.
struct TraceChart {
    bool inverted = false;
    Complex center{};

    Complex z_of(Complex zeta) const { return inverted ? center + 1.0 / zeta : zeta; }
    Complex zeta_of(Complex z) const { return inverted ? 1.0 / (z - center) : z; }
    Complex dz_dzeta(Complex zeta) const { return inverted ? -1.0 / (zeta * zeta) : Complex{1.0}; }
};

struct TraceOptions {
    /// window |Re zeta|, |Im zeta| <= half_width
    double half_width = 3.0;
    double step = 0.01;
    int seed_lines = 61;
    int seed_points = 301;
    int max_steps = 400000;
    TraceChart chart;
};

struct SingularComponent {
    std::string label;
    /// vertices in the chart coordinate and on the surface; closed (last ~ first)
    std::vector<Complex> zeta;
    std::vector<SurfacePoint> points;
    bool closed = false;
    bool cone_like = false;
    bool generalized_cone_like = false;
    bool fold_candidate = false;
};

namespace detail {

struct TraceEval {
    double h = 0.0;        // log |G|
    Complex grad{};        // gradient of h in the zeta-plane, as x + i y
};

inline TraceEval trace_eval(const WeierstrassData& d, const TraceChart& ch, Complex zeta, Complex w) {
    const Complex z = ch.z_of(zeta);
    const LocalData v = d.at(z, w);
    const Complex g = v.dG / v.G * ch.dz_dzeta(zeta);
    return {std::log(std::abs(v.G)), std::conj(g)};
}

// w at the chart point zeta_b, continued from (zeta_a, w_a).
inline Complex carry_w(const WeierstrassData& d, const TraceChart& ch, Complex zeta_a, Complex wa, Complex zeta_b) {
    if (d.cover.family == CoverFamily::Planar) return wa;
    return segment_w(d.cover, ch.z_of(zeta_a), wa, ch.z_of(zeta_b));
}

// Newton along the gradient onto h = 0 starting from (zeta, w) near the
// curve; w is continued from (anchor, w_anchor).
inline std::optional<std::pair<Complex, Complex>> correct(const WeierstrassData& d, const TraceChart& ch, Complex zeta,
                                                          Complex anchor, Complex w_anchor, double max_move) {
    Complex w = carry_w(d, ch, anchor, w_anchor, zeta);
    const Complex start = zeta;
    for (int it = 0; it < 30; ++it) {
        const TraceEval e = trace_eval(d, ch, zeta, w);
        if (!std::isfinite(e.h) || std::abs(e.grad) == 0.0) return std::nullopt;
        if (std::abs(e.h) < 1e-15) return std::make_pair(zeta, w);
        zeta -= e.h * e.grad / std::norm(e.grad);
        if (std::abs(zeta - start) > max_move) return std::nullopt;
        w = carry_w(d, ch, anchor, w_anchor, zeta);
        if (it > 3 && std::abs(e.h) < 1e-13) {
            const TraceEval f = trace_eval(d, ch, zeta, w);
            if (std::abs(f.h) < 1e-13) return std::make_pair(zeta, w);
        }
    }
    return std::nullopt;
}

inline bool in_window(const TraceOptions& o, Complex zeta) {
    return std::abs(zeta.real()) <= o.half_width && std::abs(zeta.imag()) <= o.half_width;
}

} // namespace detail

/// Follows the level set |G| = 1 from a seed until it closes on the surface
/// (same zeta and same w) or leaves the window.
inline SingularComponent trace_component(const WeierstrassData& d, Complex zeta0, Complex w0, const TraceOptions& o) {
    SingularComponent c;
    auto first = detail::correct(d, o.chart, zeta0, zeta0, w0, 10 * o.step);
    if (!first) throw NumericalError("trace_component: seed does not converge to |G| = 1");
    Complex zeta = first->first, w = first->second;
    c.zeta.push_back(zeta);
    c.points.push_back({o.chart.z_of(zeta), w});
    Complex dir = 0.0;
    double h = o.step;
    double travelled = 0.0;
    for (int n = 0; n < o.max_steps; ++n) {
        const detail::TraceEval e = detail::trace_eval(d, o.chart, zeta, w);
        Complex t = I * e.grad / std::abs(e.grad);
        if (dir != Complex{0.0} && std::real(t * std::conj(dir)) < 0) t = -t;
        std::optional<std::pair<Complex, Complex>> next;
        while (true) {
            next = detail::correct(d, o.chart, zeta + h * t, zeta, w, 0.5 * h);
            if (next && std::abs(next->first - zeta) > 0.2 * h) break;
            h *= 0.5;
            if (h < 1e-9 * o.step) throw NumericalError("trace_component: step collapse");
        }
        dir = next->first - zeta;
        travelled += std::abs(dir);
        zeta = next->first;
        w = next->second;
        h = std::min(o.step, 1.5 * h);
        // closing: back at the start on the same sheet
        if (travelled > 3 * o.step && std::abs(zeta - c.zeta.front()) < 0.75 * o.step) {
            const Complex wf = detail::carry_w(d, o.chart, zeta, w, c.zeta.front());
            if (std::abs(wf - c.points.front().w) < 1e-6 * (1 + std::abs(wf))) {
                c.closed = true;
                c.zeta.push_back(c.zeta.front());
                c.points.push_back(c.points.front());
                return c;
            }
        }
        c.zeta.push_back(zeta);
        c.points.push_back({o.chart.z_of(zeta), w});
        if (!detail::in_window(o, zeta)) return c;
    }
    return c;
}

/// All components of |G| = 1 met by horizontal seed lines in the window, on
/// every sheet of the cover.
inline std::vector<SingularComponent> trace_singular_set(const WeierstrassData& d, const TraceOptions& o = {}) {
    if (o.chart.inverted && d.cover.family != CoverFamily::Planar)
        throw ValidationError("trace_singular_set: inverted charts need planar data");
    std::vector<SingularComponent> comps;
    const int sheets = d.cover.degree();
    auto known = [&](Complex zeta, Complex w) {
        for (const auto& c : comps)
            for (std::size_t i = 0; i < c.zeta.size(); ++i)
                if (std::abs(c.zeta[i] - zeta) < 2 * o.step &&
                    std::abs(detail::carry_w(d, o.chart, c.zeta[i], c.points[i].w, zeta) - w) <
                        1e-6 * (1 + std::abs(w)))
                    return true;
        return false;
    };
    for (int line = 0; line < o.seed_lines; ++line) {
        // offset keeps the lines off the real axis, where branch points sit
        const double y = -o.half_width + 2 * o.half_width * (line + 0.5 + 0.0137) / o.seed_lines;
        const Complex left{-o.half_width, y};
        std::vector<Complex> fiber = d.cover.family == CoverFamily::Planar
                                         ? std::vector<Complex>{1.0}
                                         : solve_fiber(d.cover, o.chart.z_of(left), 0.0);
        for (int s = 0; s < sheets; ++s) {
            Complex za = left, wa = fiber[s];
            double ha;
            try {
                ha = detail::trace_eval(d, o.chart, za, wa).h;
            } catch (const Error&) {
                continue;
            }
            for (int i = 1; i < o.seed_points; ++i) {
                const Complex zb{-o.half_width + 2 * o.half_width * i / (o.seed_points - 1), y};
                const Complex wb = detail::carry_w(d, o.chart, za, wa, zb);
                double hb;
                try {
                    hb = detail::trace_eval(d, o.chart, zb, wb).h;
                } catch (const Error&) {
                    hb = std::nan("");
                }
                if (std::isfinite(ha) && std::isfinite(hb) && (ha < 0) != (hb < 0)) {
                    // bisection on the segment, then a trace if the seed is new
                    Complex lo = za, hi = zb;
                    double hlo = ha;
                    for (int b = 0; b < 60; ++b) {
                        const Complex mid = 0.5 * (lo + hi);
                        const double hm =
                            detail::trace_eval(d, o.chart, mid, detail::carry_w(d, o.chart, za, wa, mid)).h;
                        if ((hm < 0) == (hlo < 0)) {
                            lo = mid;
                            hlo = hm;
                        } else {
                            hi = mid;
                        }
                    }
                    const Complex seed = 0.5 * (lo + hi);
                    const Complex wseed = detail::carry_w(d, o.chart, za, wa, seed);
                    if (!known(seed, wseed)) {
                        SingularComponent c = trace_component(d, seed, wseed, o);
                        c.label = "component_" + std::to_string(comps.size());
                        comps.push_back(std::move(c));
                    }
                }
                za = zb;
                wa = wb;
                ha = hb;
            }
        }
    }
    return comps;
}

// ---------------------------------------------------------------------------
// Component flags and counting

struct ConeLikeReport {
    double max_abs_im_alpha = 0.0;
    double max_abs_re_alpha = 0.0;
    double min_abs_alpha = 0.0;
    double min_abs_eta = 0.0;
    /// total turning of arg G along the component / 2 pi
    double G_winding = 0.0;
    bool generalized_cone_like = false;
    bool cone_like = false;
    bool fold_candidate = false;
};

/// eta-hat is measured in the chart coordinate.
inline ConeLikeReport detect_cone_like(const WeierstrassData& d, const SingularComponent& comp,
                                       const TraceChart& chart = {}, double eps = 1e-8) {
    ConeLikeReport r;
    r.min_abs_alpha = r.min_abs_eta = std::numeric_limits<double>::infinity();
    double turn = 0.0;
    Complex prevG{};
    for (std::size_t i = 0; i < comp.points.size(); ++i) {
        const auto& p = comp.points[i];
        const LocalData v = d.at(p.z, p.w);
        const AlphaBeta ab = alpha_beta(v);
        r.max_abs_im_alpha = std::max(r.max_abs_im_alpha, std::abs(ab.alpha.imag()));
        r.max_abs_re_alpha = std::max(r.max_abs_re_alpha, std::abs(ab.alpha.real()));
        r.min_abs_alpha = std::min(r.min_abs_alpha, std::abs(ab.alpha));
        r.min_abs_eta = std::min(r.min_abs_eta, std::abs(v.eta * chart.dz_dzeta(comp.zeta[i])));
        if (i > 0) turn += std::arg(v.G / prevG);
        prevG = v.G;
    }
    r.G_winding = turn / (2 * pi);
    const double scale = 1.0 + r.min_abs_alpha;
    r.generalized_cone_like = r.max_abs_im_alpha < eps * scale && r.min_abs_alpha > eps;
    r.cone_like = r.generalized_cone_like && comp.closed && std::abs(std::abs(r.G_winding) - 1.0) < 1e-6 &&
                  r.min_abs_eta > eps;
    r.fold_candidate = r.max_abs_re_alpha < eps * scale && r.min_abs_alpha > eps;
    return r;
}

struct SingularityCount {
    std::vector<SingularPointRecord> swallowtails;
    std::vector<SingularPointRecord> cross_caps;
    int cuspidal_edge_vertices = 0;
    int unclassified = 0;
    bool cone_like = false;
    bool fold_candidate = false;
};

namespace detail {

// 2D Newton on (log|G|, part of alpha) = 0, part = 0 for Im, 1 for Re.
inline std::optional<SurfacePoint> polish_zero(const WeierstrassData& d, Complex z, Complex w, int part) {
    const Complex z_anchor = z, w_anchor = w;
    for (int it = 0; it < 40; ++it) {
        const LocalData v = d.at(z, w);
        const AlphaBeta ab = alpha_beta(v);
        const double f1 = std::log(std::abs(v.G));
        const double f2 = part == 0 ? ab.alpha.imag() : ab.alpha.real();
        const Complex g = v.dG / v.G;
        // rows: d/dx, d/dy
        const double a11 = g.real(), a12 = -g.imag();
        const double a21 = part == 0 ? ab.dalpha.imag() : ab.dalpha.real();
        const double a22 = part == 0 ? ab.dalpha.real() : -ab.dalpha.imag();
        const double det = a11 * a22 - a12 * a21;
        if (std::abs(f1) < 1e-14 && std::abs(f2) < 1e-12 * (1 + std::abs(ab.alpha))) return SurfacePoint{z, w};
        if (det == 0.0) return std::nullopt;
        const double dx = (a22 * f1 - a12 * f2) / det, dy = (-a21 * f1 + a11 * f2) / det;
        z -= Complex{dx, dy};
        if (std::abs(z - z_anchor) > 0.5) return std::nullopt;
        w = d.cover.family == CoverFamily::Planar ? w : segment_w(d.cover, z_anchor, w_anchor, z);
    }
    return std::nullopt;
}

} // namespace detail

/// Transversal zeros of Im alpha (swallowtails, with Re beta != 0) and of
/// Re alpha (cross caps, with Im beta != 0) along a closed component.
inline SingularityCount count_singularities(const WeierstrassData& d, const SingularComponent& comp,
                                            const TraceChart& chart = {}) {
    SingularityCount out;
    const ConeLikeReport flags = detect_cone_like(d, comp, chart);
    out.cone_like = flags.cone_like || flags.generalized_cone_like;
    out.fold_candidate = flags.fold_candidate;
    const std::size_t n = comp.points.size();
    std::vector<AlphaBeta> ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        ab[i] = alpha_beta(d, comp.points[i].z, comp.points[i].w);
        const SingularPointRecord r = classify_point(d, comp.points[i]);
        if (r.cls == SingularClass::CuspidalEdge) ++out.cuspidal_edge_vertices;
        if (r.cls == SingularClass::Unclassified) ++out.unclassified;
    }
    auto add = [&](std::vector<SingularPointRecord>& list, const SurfacePoint& p, SingularClass want) {
        for (const auto& q : list)
            if (std::abs(q.p.z - p.z) < 1e-8 && std::abs(q.p.w - p.w) < 1e-8 * (1 + std::abs(p.w))) return;
        const SingularPointRecord r = classify_point(d, p);
        if (r.cls == want) list.push_back(r);
    };
    for (int part = 0; part < 2; ++part) {
        if (part == 0 && out.cone_like) continue;
        if (part == 1 && out.fold_candidate) continue;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double a = part == 0 ? ab[i].alpha.imag() : ab[i].alpha.real();
            const double b = part == 0 ? ab[i + 1].alpha.imag() : ab[i + 1].alpha.real();
            if (a == 0.0 || (a < 0) != (b < 0)) {
                // a pole of alpha also changes sign; skip jumps that are not small
                const double jump = std::abs(a - b);
                if (jump > 0.5 * (1 + std::abs(ab[i].alpha) + std::abs(ab[i + 1].alpha))) continue;
                const double s = a == b ? 0.0 : a / (a - b);
                const SurfacePoint& p = comp.points[i];
                const Complex zguess = p.z + s * (comp.points[i + 1].z - p.z);
                const Complex wguess =
                    d.cover.family == CoverFamily::Planar ? p.w : segment_w(d.cover, p.z, p.w, zguess);
                const auto q = detail::polish_zero(d, zguess, wguess, part);
                if (!q) throw NumericalError("count_singularities: zero polish failed");
                add(part == 0 ? out.swallowtails : out.cross_caps, *q,
                    part == 0 ? SingularClass::Swallowtail : SingularClass::CuspidalCrossCap);
            }
        }
    }
    return out;
}

/// One row per vertex: re_z, im_z, re_w, im_w, |G|, re_alpha, im_alpha.
inline void write_component_csv(std::ostream& os, const WeierstrassData& d, const SingularComponent& c) {
    os.precision(15);
    os << "re_z,im_z,re_w,im_w,abs_G,re_alpha,im_alpha\n";
    for (const auto& p : c.points) {
        const LocalData v = d.at(p.z, p.w);
        const AlphaBeta ab = alpha_beta(v);
        os << p.z.real() << "," << p.z.imag() << "," << p.w.real() << "," << p.w.imag() << "," << std::abs(v.G)
           << "," << ab.alpha.real() << "," << ab.alpha.imag() << "\n";
    }
}

/// Defaults per catalog surface: window and chart.
inline TraceOptions default_trace_options(const WeierstrassData& d) {
    TraceOptions o;
    if (d.name == "cone") {
        o.chart = {true, Complex{0.3, 0.2}};
        o.half_width = 12.0;
        o.step = 0.02;
        o.seed_lines = 121;
        o.seed_points = 601;
    } else if (d.name == "trinoid-1" || d.name == "trinoid-2") {
        o.half_width = 6.0;
        o.seed_lines = 121;
        o.seed_points = 601;
    }
    return o;
}

} // namespace maxface
