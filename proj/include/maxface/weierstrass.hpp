#pragma once

// Weierstrass data (G, eta) for maxfaces, the null form Phi, immersion by
// path integration, end diagnostics, Gauss-map degree and meshes.

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "maxface/ck.hpp"
#include "maxface/cover.hpp"
#include "maxface/poly.hpp"
#include "maxface/quadrature.hpp"

namespace maxface {

/// G, eta-hat and their z-derivatives at one point (eta = eta_hat dz).
struct LocalData {
    Complex G, dG, d2G, eta, deta;
};

struct Puncture {
    Complex z{};
    bool infinite = false;
    std::string label;
};

struct WeierstrassData {
    std::string name;
    CoverSpec cover = CoverSpec::planar();
    std::function<LocalData(Complex z, Complex w)> eval;
    std::vector<Puncture> punctures;
    std::map<std::string, double> params;
    SurfacePoint base;
    /// For rational data: G as a rational map (degree bookkeeping).
    std::optional<Rational> rational_G;

    LocalData at(Complex z, Complex w = 0.0) const { return eval(z, w); }
    LocalData at(const SurfacePoint& p) const { return eval(p.z, p.w); }
};

struct CatalogEntry {
    std::string name;
    std::map<std::string, double> defaults;
    std::string constraints;
    std::string anchor;
};

inline std::vector<CatalogEntry> catalog_list() {
    return {
        {"catenoid", {}, "none", "(G,eta)=(z, dz/z^2)"},
        {"helicoid", {}, "none", "(G,eta)=(z, i dz/z^2)"},
        {"associated", {{"theta", pi / 4}}, "theta real", "(G,eta)=(z, e^{i theta} z^{-2} dz)"},
        {"trinoid-1", {{"a", 3.67}}, "a>1/2", "G=(b-z^2)/z, eta=z^2 dz/(z^2-a^2)^2, b=-a^2+a sqrt(4a^2-1)"},
        {"trinoid-2", {{"c", 0.1}}, "c>0, c≠1", "G=c(z^2+3)/(z^2-1), eta=dz/c"},
        {"cone", {{"a", 2.5}}, "1<a<4, a≠2", "G=(z-1)(z^2+az+1)/((z+1)(z^2-az+1))"},
        {"genus_k", {{"k", 1}}, "k>=1 integer; c defaults to c_k", "G = c w/z, eta = dz/w on w^{k+1}=z(z^2-1)^k"},
        {"genus_k_reduced", {{"k", 2}}, "k>=2 even; c defaults to c_k", "G_1 = c W/Z, eta_1 = dZ/(2W)"},
    };
}

namespace detail {

inline WeierstrassData rational_data(std::string name, Rational G, Rational eta, std::vector<Puncture> punct,
                                     std::map<std::string, double> params, Complex base_z) {
    WeierstrassData d;
    d.name = std::move(name);
    d.cover = CoverSpec::planar();
    d.eval = [G, eta](Complex z, Complex) {
        const RationalValue g = G.eval(z), e = eta.eval(z);
        return LocalData{g.f, g.df, g.d2f, e.f, e.df};
    };
    d.punctures = std::move(punct);
    d.params = std::move(params);
    d.base = {base_z, 1.0};
    d.rational_G = G;
    return d;
}

inline int param_k(const std::map<std::string, double>& p, int fallback) {
    auto it = p.find("k");
    if (it == p.end()) return fallback;
    const double k = it->second;
    if (std::abs(k - std::round(k)) > 1e-12) throw ValidationError("k must be an integer");
    return int(std::round(k));
}

inline double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

} // namespace detail

/// Genus-k data G = c w/z, eta = dz/w on w^{k+1} = z (z^2-1)^k.
inline WeierstrassData genus_k_data(int k, std::optional<double> c_opt = std::nullopt) {
    if (k < 1) throw ValidationError("genus_k: requires k>=1");
    const double c = c_opt ? *c_opt : compute_ck(k).c;
    if (!(c > 0)) throw ValidationError("genus_k: c must be positive");
    WeierstrassData d;
    d.name = "genus_k";
    d.cover = CoverSpec::full(k);
    const CoverSpec cover = d.cover;
    d.eval = [cover, c](Complex z, Complex w) {
        const Complex L = cover.dlog_w(z), Lp = cover.dlog_w_prime(z);
        LocalData v;
        v.G = c * w / z;
        const Complex l = L - 1.0 / z;
        v.dG = v.G * l;
        v.d2G = v.dG * l + v.G * (Lp + 1.0 / (z * z));
        v.eta = 1.0 / w;
        v.deta = -L / w;
        return v;
    };
    d.punctures = {{0.0, false, "(0,0)"}, {0.0, true, "(inf,inf)"}};
    d.params = {{"k", double(k)}, {"c", c}};
    d.base = base_point(d.cover, 2.0);
    return d;
}

/// Reduced data G_1 = c W/Z, eta_1 = dZ/(2W) on W^{2m+1} = Z^{m+1}(Z-1)^{2m}.
inline WeierstrassData genus_k_reduced_data(int k, std::optional<double> c_opt = std::nullopt) {
    if (k < 2 || k % 2) throw ValidationError("genus_k_reduced: requires k>=2 even");
    const double c = c_opt ? *c_opt : compute_ck(k).c;
    WeierstrassData d;
    d.name = "genus_k_reduced";
    d.cover = CoverSpec::reduced(k);
    const CoverSpec cover = d.cover;
    d.eval = [cover, c](Complex Z, Complex W) {
        const Complex L = cover.dlog_w(Z), Lp = cover.dlog_w_prime(Z);
        LocalData v;
        v.G = c * W / Z;
        const Complex l = L - 1.0 / Z;
        v.dG = v.G * l;
        v.d2G = v.dG * l + v.G * (Lp + 1.0 / (Z * Z));
        v.eta = 0.5 / W;
        v.deta = -0.5 * L / W;
        return v;
    };
    d.punctures = {{0.0, false, "(0,0)"}, {0.0, true, "(inf,inf)"}};
    d.params = {{"k", double(k)}, {"c", c}};
    d.base = base_point(d.cover, 4.0);
    return d;
}

/// Catalog lookup with parameter validation.
inline WeierstrassData catalog_get(const std::string& name, const std::map<std::string, double>& params = {}) {
    using detail::param;
    const Poly z{0.0, 1.0};
    if (name == "catenoid" || name == "helicoid" || name == "associated") {
        double theta = 0.0;
        if (name == "helicoid") theta = pi / 2;
        if (name == "associated") theta = param(params, "theta", pi / 4);
        const Complex phase = std::polar(1.0, theta);
        auto d = detail::rational_data(name, Rational{z, Poly{1.0}}, Rational{Poly{phase}, z * z},
                                       {{0.0, false, "0"}, {0.0, true, "inf"}}, {{"theta", theta}}, 1.0);
        return d;
    }
    if (name == "trinoid-1") {
        const double a = param(params, "a", 3.67);
        if (!(a > 0.5)) throw ValidationError("trinoid-1: requires a>1/2");
        const double b = -a * a + a * std::sqrt(4 * a * a - 1);
        const Poly zz_a{-a * a, 0.0, 1.0};
        return detail::rational_data(name, Rational{Poly{b, 0.0, -1.0}, z}, Rational{z * z, zz_a * zz_a},
                                     {{a, false, "a"}, {-a, false, "-a"}, {0.0, true, "inf"}},
                                     {{"a", a}, {"b", b}}, Complex{0.0, 1.0});
    }
    if (name == "trinoid-2") {
        const double c = param(params, "c", 0.1);
        if (!(c > 0.0) || c == 1.0) throw ValidationError("trinoid-2: requires c>0, c≠1");
        return detail::rational_data(name, Rational{Complex(c) * Poly{3.0, 0.0, 1.0}, Poly{-1.0, 0.0, 1.0}},
                                     Rational{Poly{1.0 / c}, Poly{1.0}},
                                     {{1.0, false, "1"}, {-1.0, false, "-1"}, {0.0, true, "inf"}}, {{"c", c}},
                                     Complex{0.0, 1.0});
    }
    if (name == "cone") {
        const double a = param(params, "a", 2.5);
        if (!(a > 1.0 && a < 4.0) || a == 2.0) throw ValidationError("cone: requires 1<a<4, a≠2");
        const Poly zm1{-1.0, 1.0}, zp1{1.0, 1.0}, plus{1.0, a, 1.0}, minus{1.0, -a, 1.0};
        return detail::rational_data(name, Rational{zm1 * plus, zp1 * minus},
                                     Rational{minus * minus, pow(zm1, 4) * zp1 * zp1},
                                     {{1.0, false, "1"}, {-1.0, false, "-1"}}, {{"a", a}}, Complex{0.0, 1.0});
    }
    if (name == "genus_k") {
        const int k = detail::param_k(params, 1);
        auto it = params.find("c");
        return genus_k_data(k, it == params.end() ? std::nullopt : std::optional<double>(it->second));
    }
    if (name == "genus_k_reduced") {
        const int k = detail::param_k(params, 2);
        auto it = params.find("c");
        return genus_k_reduced_data(k, it == params.end() ? std::nullopt : std::optional<double>(it->second));
    }
    throw ValidationError("unknown surface '" + name + "'");
}

/// The same data with eta multiplied by e^{i phi}.
inline WeierstrassData rotate_eta(const WeierstrassData& d, double phi) {
    WeierstrassData r = d;
    const Complex phase = std::polar(1.0, phi);
    auto inner = d.eval;
    r.eval = [inner, phase](Complex z, Complex w) {
        LocalData v = inner(z, w);
        v.eta *= phase;
        v.deta *= phase;
        return v;
    };
    r.name = d.name + "*";
    return r;
}

// ---------------------------------------------------------------------------
// Phi, metric, Hopf differential

using Vec3 = std::array<double, 3>;
using CVec3 = std::array<Complex, 3>;

/// dz-coefficients of Phi = (-2G, 1 + G^2, i(1 - G^2)) eta.
inline CVec3 phi_form(const LocalData& v) {
    const Complex g2 = v.G * v.G;
    CVec3 out{-2.0 * v.G * v.eta, (1.0 + g2) * v.eta, I * (1.0 - g2) * v.eta};
    for (const auto& c : out)
        if (!is_finite(c)) throw DegenerateError("phi_form: pole of Phi at the evaluation point");
    return out;
}
inline CVec3 phi_form(const WeierstrassData& d, Complex z, Complex w) { return phi_form(d.at(z, w)); }

/// -Phi_0^2 + Phi_1^2 + Phi_2^2 relative to |Phi|^2.
inline double null_residual(const CVec3& p) {
    const Complex q = -p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    const double s = std::norm(p[0]) + std::norm(p[1]) + std::norm(p[2]);
    return s > 0 ? std::abs(q) / s : std::abs(q);
}

inline double metric_factor(const LocalData& v) {
    const double g = std::norm(v.G);
    return (1.0 - g) * (1.0 - g) * std::norm(v.eta);
}

inline Complex hopf_coefficient(const LocalData& v) { return v.eta * v.dG; }

struct ImmersionSample {
    SurfacePoint p;
    Vec3 f{0.0, 0.0, 0.0};
    double metric = 0.0;
    Complex hopf{};
};

// ---------------------------------------------------------------------------
// Path integration

/// Integrates form(z, w) dz along the lifted polyline. w inside each segment
/// comes from exact continuation; the vertex values are cross-checked
/// against nearest-root tracking.
template <class Value, class Form>
Value integrate_along(const CoverSpec& cover, const SurfacePath& path, Form&& form, double tol, const Value& zero,
                      std::vector<Complex>* vertex_w = nullptr) {
    Value total = zero;
    if (path.z.empty()) return total;
    const auto tracked = lift_path(cover, path);
    Complex wa = path.w0;
    const double budget = tol / std::max<std::size_t>(1, path.z.size() - 1);
    if (vertex_w) {
        vertex_w->clear();
        vertex_w->push_back(wa);
    }
    for (std::size_t i = 1; i < path.z.size(); ++i) {
        const Complex za = path.z[i - 1], zb = path.z[i];
        const Complex dz = zb - za;
        if (std::abs(dz) == 0.0) {
            if (vertex_w) vertex_w->push_back(wa);
            continue;
        }
        auto scaled_integrand = [&](double s) {
            const Complex z = za + s * dz;
            Value v = form(z, segment_w(cover, za, wa, z));
            if constexpr (std::is_same_v<Value, Complex>) {
                return Value(v * dz);
            } else {
                for (auto& x : v) x *= dz;
                return v;
            }
        };
        const Value seg = integrate_gk<Value>(scaled_integrand, 0.0, 1.0, budget, zero);
        detail::accumulate(total, seg, 1.0);
        const Complex wb = segment_w(cover, za, wa, zb);
        if (std::abs(wb - tracked[i]) > 1e-7 * (1.0 + std::abs(wb)))
            throw ContinuationError("integrate_along: exact continuation disagrees with root tracking");
        wa = tracked[i];
        if (vertex_w) vertex_w->push_back(wa);
    }
    return total;
}

/// Complex integral of Phi along the path.
inline CVec3 integrate_phi(const WeierstrassData& d, const SurfacePath& path, double tol = 1e-11) {
    return integrate_along<CVec3>(
        d.cover, path, [&](Complex z, Complex w) { return phi_form(d, z, w); }, tol, CVec3{0.0, 0.0, 0.0});
}

/// f at the end of the path, f = Re int Phi with f(start) = 0.
inline ImmersionSample integrate_immersion(const WeierstrassData& d, const SurfacePath& path, double tol = 1e-11) {
    std::vector<Complex> ws;
    const CVec3 I3 = integrate_along<CVec3>(
        d.cover, path, [&](Complex z, Complex w) { return phi_form(d, z, w); }, tol, CVec3{0.0, 0.0, 0.0}, &ws);
    ImmersionSample s;
    s.p = {path.z.back(), ws.back()};
    s.f = {I3[0].real(), I3[1].real(), I3[2].real()};
    const LocalData v = d.at(s.p);
    s.metric = metric_factor(v);
    s.hopf = hopf_coefficient(v);
    return s;
}

// ---------------------------------------------------------------------------
// Local charts, orders and ends

/// Local coordinate zeta at a special point: z = center + zeta^r, or
/// z = zeta^{-r} at infinity.
struct LocalChart {
    Complex center{};
    bool infinite = false;
    int ramification = 1;
    std::string label;

    Complex z_of(Complex zeta) const {
        const Complex p = std::pow(zeta, ramification);
        return infinite ? 1.0 / p : center + p;
    }
    Complex dz_dzeta(Complex zeta) const {
        const double r = ramification;
        return infinite ? -r * std::pow(zeta, -ramification - 1) : r * std::pow(zeta, ramification - 1);
    }
};

/// Charts over 0, 1, -1 and inf with the ramification of the cover.
inline LocalChart chart_at(const CoverSpec& cover, Complex center, bool infinite, std::string label) {
    const auto e = cover.exponents();
    const int n = cover.degree();
    int ex = 0;
    if (infinite)
        ex = e[0] + e[1] + e[2];
    else if (center == Complex{0.0})
        ex = e[0];
    else if (center == Complex{1.0})
        ex = e[1];
    else if (center == Complex{-1.0})
        ex = e[2];
    return {center, infinite, ex == 0 ? 1 : n / std::gcd(ex, n), std::move(label)};
}

/// Least-squares slope of log|f(zeta)| against log|zeta| on a geometric
/// sequence of |zeta| (direction fixed off every symmetry line).
struct OrderFit {
    double slope = 0.0;
    int order = 0;
    double residual = 0.0;
};

inline OrderFit fit_order(const std::function<Complex(Complex zeta)>& f, double r_max = 1e-3, int samples = 6) {
    const Complex dir = std::polar(1.0, 0.3718);
    std::vector<double> xs, ys;
    for (int i = 0; i < samples; ++i) {
        const double r = r_max * std::pow(0.5, i);
        const Complex v = f(r * dir);
        xs.push_back(std::log(r));
        ys.push_back(std::log(std::abs(v)));
    }
    const double n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    OrderFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.order = int(std::lround(fit.slope));
    fit.residual = std::abs(fit.slope - fit.order);
    if (!(fit.residual < 0.05)) throw NumericalError("fit_order: ambiguous slope " + std::to_string(fit.slope));
    return fit;
}

/// Quantities whose orders are tabulated, in a chart coordinate.
struct OrderRow {
    std::string label;
    int G = 0, eta = 0, G_eta = 0, G2_eta = 0, Q = 0;
};

inline OrderRow orders_at(const WeierstrassData& d, const LocalChart& chart) {
    auto local = [&](Complex zeta) {
        const Complex z = chart.z_of(zeta);
        const Complex w = solve_fiber(d.cover, z, 0.0).front();
        return std::make_pair(d.at(z, w), chart.dz_dzeta(zeta));
    };
    OrderRow row;
    row.label = chart.label;
    row.G = fit_order([&](Complex q) { return local(q).first.G; }).order;
    row.eta = fit_order([&](Complex q) {
                  auto [v, j] = local(q);
                  return v.eta * j;
              }).order;
    row.G_eta = fit_order([&](Complex q) {
                    auto [v, j] = local(q);
                    return v.G * v.eta * j;
                }).order;
    row.G2_eta = fit_order([&](Complex q) {
                     auto [v, j] = local(q);
                     return v.G * v.G * v.eta * j;
                 }).order;
    row.Q = fit_order([&](Complex q) {
                auto [v, j] = local(q);
                return v.eta * v.dG * j * j;
            }).order;
    return row;
}

/// Orders at (0,0), (inf,inf), (1,0), (-1,0) and (+-i, .) for the genus-k data.
inline std::vector<OrderRow> order_table(const WeierstrassData& d) {
    if (d.cover.family != CoverFamily::Full) throw ValidationError("order_table: genus-k data required");
    std::vector<OrderRow> rows;
    rows.push_back(orders_at(d, chart_at(d.cover, 0.0, false, "(0,0)")));
    rows.push_back(orders_at(d, chart_at(d.cover, 0.0, true, "(inf,inf)")));
    rows.push_back(orders_at(d, chart_at(d.cover, 1.0, false, "(1,0)")));
    rows.push_back(orders_at(d, chart_at(d.cover, -1.0, false, "(-1,0)")));
    rows.push_back(orders_at(d, LocalChart{I, false, 1, "(+-i,.)"}));
    return rows;
}

struct EndReport {
    std::string label;
    double G_abs_limit = 0.0;
    bool G_unbounded = false;
    bool complete = false;
    int order_eta = 0;
    int order_G2_eta = 0;
};

/// Per-puncture |G| limit and pole orders of eta and G^2 eta.
inline std::vector<EndReport> completeness_report(const WeierstrassData& d) {
    std::vector<EndReport> out;
    for (const auto& p : d.punctures) {
        const LocalChart chart = chart_at(d.cover, p.z, p.infinite, p.label);
        auto G_at = [&](double r) {
            const Complex z = chart.z_of(std::polar(r, 0.3718));
            const Complex w = solve_fiber(d.cover, z, 0.0).front();
            return std::abs(d.at(z, w).G);
        };
        EndReport e;
        e.label = p.label;
        const double g1 = G_at(1e-4), g2 = G_at(1e-6);
        e.G_unbounded = g2 > 1e3 && g2 > g1;
        e.G_abs_limit = g2;
        const bool near_one = !e.G_unbounded && std::abs(g2 - 1.0) < 1e-3;
        e.complete = !near_one;
        try {
            OrderRow r = orders_at(d, chart);
            e.order_eta = r.eta;
            e.order_G2_eta = r.G2_eta;
        } catch (const NumericalError&) {
        }
        out.push_back(e);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gauss map degree and the Osserman-type inequality

struct DegreeReport {
    int by_roots = 0;
    int by_poles = 0;
    Complex value{};
};

namespace detail {

// Newton on G(z, w(z)) = v with w carried by nearest-root tracking.
inline std::optional<SurfacePoint> newton_preimage(const WeierstrassData& d, Complex v, Complex z, Complex w) {
    for (int it = 0; it < 80; ++it) {
        LocalData l;
        try {
            l = d.at(z, w);
        } catch (...) {
            return std::nullopt;
        }
        const Complex r = l.G - v;
        if (!is_finite(r) || !is_finite(l.dG) || std::abs(l.dG) == 0.0) return std::nullopt;
        if (std::abs(r) < 1e-13 * (1.0 + std::abs(v))) return SurfacePoint{z, w};
        Complex step = -r / l.dG;
        const double cap = 0.25 * std::max(std::abs(z), 1e-3);
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        const Complex zn = z + step;
        try {
            w = d.cover.family == CoverFamily::Planar ? w : detail::track_segment(d.cover, z, w, zn, 0);
        } catch (...) {
            return std::nullopt;
        }
        z = zn;
        if (std::abs(z) > 1e8 || std::abs(z) < 1e-12) return std::nullopt;
    }
    return std::nullopt;
}

} // namespace detail

/// Number of preimages of a generic value, counted by multi-start Newton on
/// the cover, and cross-checked by pole orders.
inline DegreeReport gauss_degree(const WeierstrassData& d, Complex v = {0.3717, 0.6109}) {
    DegreeReport rep;
    rep.value = v;
    std::vector<SurfacePoint> found;
    const int sheets = d.cover.degree();
    for (int ir = 0; ir < 12; ++ir) {
        const double r = 0.05 * std::pow(2.0, 0.5 * ir);
        for (int ia = 0; ia < 16; ++ia) {
            const Complex z0 = std::polar(r, 2 * pi * (ia + 0.37) / 16);
            std::vector<Complex> fiber = d.cover.family == CoverFamily::Planar
                                             ? std::vector<Complex>{1.0}
                                             : solve_fiber(d.cover, z0, 1e-9);
            for (int s = 0; s < sheets; ++s) {
                auto sol = detail::newton_preimage(d, v, z0, fiber[s]);
                if (!sol) continue;
                bool dup = false;
                for (const auto& f : found)
                    if (std::abs(f.z - sol->z) < 1e-7 * (1 + std::abs(f.z)) &&
                        std::abs(f.w - sol->w) < 1e-7 * (1 + std::abs(f.w)))
                        dup = true;
                if (!dup) found.push_back(*sol);
            }
        }
    }
    rep.by_roots = int(found.size());
    if (d.rational_G) {
        rep.by_poles = d.rational_G->map_degree();
    } else {
        int poles = 0;
        const std::array<std::pair<Complex, bool>, 4> pts = {
            std::pair<Complex, bool>{0.0, false}, {1.0, false}, {-1.0, false}, {0.0, true}};
        for (auto [c, inf] : pts) {
            const LocalChart ch = chart_at(d.cover, c, inf, "");
            // number of points over c is n / ramification
            const int count = d.cover.degree() / ch.ramification;
            const int ord = fit_order([&](Complex q) {
                                const Complex z = ch.z_of(q);
                                return d.at(z, solve_fiber(d.cover, z, 0.0).front()).G;
                            }).order;
            if (ord < 0) poles += -ord * count;
        }
        rep.by_poles = poles;
    }
    return rep;
}

struct OssermanCheck {
    int degree = 0;
    int genus = 0;
    int ends = 0;
    int lhs = 0;
    int rhs = 0;
    bool holds = false;
    bool equality = false;
};

/// 2 deg G >= -chi + #ends with chi = 2 - 2g - #ends.
inline OssermanCheck osserman_check(const WeierstrassData& d, int degree) {
    OssermanCheck o;
    o.degree = degree;
    o.genus = genus_check(d.cover);
    o.ends = int(d.punctures.size());
    const int chi = 2 - 2 * o.genus - o.ends;
    o.lhs = 2 * degree;
    o.rhs = -chi + o.ends;
    o.holds = o.lhs >= o.rhs;
    o.equality = o.lhs == o.rhs;
    return o;
}

// ---------------------------------------------------------------------------
// Meshes

struct GridSpec {
    enum class Kind { Rect, Polar } kind = Kind::Polar;
    // Rect: [u0,u1] x [v0,v1] in z = u + i v. Polar: r in [u0,u1], angle in [v0,v1].
    double u0 = 0.5, u1 = 2.0, v0 = 0.0, v1 = 2 * pi;
    int nu = 10, nv = 10;
    /// w at the base point (selects the sheet); defaults to the data's base.
    std::optional<Complex> base_w;
    int jobs = 1;
};

struct Mesh {
    int nu = 0, nv = 0;
    std::vector<ImmersionSample> vertices;  // index i * nv + j
    std::vector<std::array<int, 4>> quads;
};

namespace detail {

inline Complex grid_point(const GridSpec& g, int i, int j) {
    const double u = g.nu > 1 ? g.u0 + (g.u1 - g.u0) * i / (g.nu - 1) : g.u0;
    const double v = g.nv > 1 ? g.v0 + (g.v1 - g.v0) * j / (g.nv - 1) : g.v0;
    return g.kind == GridSpec::Kind::Rect ? Complex{u, v} : std::polar(u, v);
}

// Straight chords, refined so each piece subtends at most `max_len`.
inline void append_refined(std::vector<Complex>& pts, Complex to, double max_len) {
    const Complex from = pts.back();
    const int pieces = std::max(1, int(std::ceil(std::abs(to - from) / max_len)));
    for (int s = 1; s <= pieces; ++s) pts.push_back(from + (to - from) * (double(s) / pieces));
}

/// Polyline from the base point to grid vertex (0, 0). On polar grids a base
/// off the real axis moves radially to the inner radius and then along its
/// arc; a base on the axis turns first, along its own circle, so that the
/// radial leg cannot cross the branch points and ends that sit on the axis.
inline std::vector<Complex> grid_lead(Complex base, const GridSpec& g, double piece) {
    std::vector<Complex> lead{base};
    auto arc = [&](double r, double from, double to) {
        const int steps = std::max(2, int(std::ceil(std::abs(to - from) * r / piece)));
        for (int s = 1; s <= steps; ++s) lead.push_back(std::polar(r, from + (to - from) * s / steps));
    };
    if (g.kind == GridSpec::Kind::Polar) {
        const double rb = std::abs(base), ab = std::arg(base);
        if (std::abs(base.imag()) > 1e-9 * rb) {
            if (std::abs(rb - g.u0) > 1e-14) append_refined(lead, std::polar(g.u0, ab), piece);
            arc(g.u0, ab, g.v0);
        } else {
            arc(rb, ab, g.v0);
        }
    }
    if (std::abs(lead.back() - grid_point(g, 0, 0)) > 1e-14) append_refined(lead, grid_point(g, 0, 0), piece);
    return lead;
}

} // namespace detail

/// Vertex (i, j): integrate from the base to grid (0, 0), along the row
/// i = 0 to (0, j), then along column j.
inline Mesh mesh_sample(const WeierstrassData& d, const GridSpec& g, double tol = 1e-10) {
    if (g.nu < 2 || g.nv < 2) throw ValidationError("mesh_sample: need at least a 2x2 grid");
    Mesh mesh;
    mesh.nu = g.nu;
    mesh.nv = g.nv;
    mesh.vertices.resize(std::size_t(g.nu) * g.nv);
    const Complex w_base = g.base_w ? *g.base_w : d.base.w;
    const double piece = 0.05;

    const std::vector<Complex> lead = detail::grid_lead(d.base.z, g, piece);
    std::vector<Complex> lead_w;
    const CVec3 zero{0.0, 0.0, 0.0};
    auto phi = [&](Complex z, Complex w) { return phi_form(d, z, w); };
    CVec3 acc = integrate_along<CVec3>(d.cover, SurfacePath{lead, w_base, 0}, phi, tol, zero, &lead_w);

    // row i = 0 with the arc/edge between consecutive vertices
    std::vector<CVec3> row_val(g.nv);
    std::vector<Complex> row_w(g.nv);
    row_val[0] = acc;
    row_w[0] = lead_w.back();
    for (int j = 1; j < g.nv; ++j) {
        std::vector<Complex> pts{detail::grid_point(g, 0, j - 1)};
        if (g.kind == GridSpec::Kind::Polar) {
            const double r = g.u0;
            const double a0 = std::arg(pts[0]);
            const double da = (g.v1 - g.v0) / (g.nv - 1);
            const int steps = std::max(1, int(std::ceil(std::abs(da) * r / piece)));
            for (int s = 1; s <= steps; ++s) pts.push_back(std::polar(r, a0 + da * s / steps));
        } else {
            detail::append_refined(pts, detail::grid_point(g, 0, j), piece);
        }
        std::vector<Complex> ws;
        const CVec3 seg = integrate_along<CVec3>(d.cover, SurfacePath{pts, row_w[j - 1], 0}, phi, tol, zero, &ws);
        for (int c = 0; c < 3; ++c) row_val[j][c] = row_val[j - 1][c] + seg[c];
        row_w[j] = ws.back();
    }

    auto column = [&](int j) {
        CVec3 val = row_val[j];
        Complex w = row_w[j];
        auto store = [&](int i, Complex z) {
            ImmersionSample s;
            s.p = {z, w};
            s.f = {val[0].real(), val[1].real(), val[2].real()};
            const LocalData v = d.at(z, w);
            s.metric = metric_factor(v);
            s.hopf = hopf_coefficient(v);
            mesh.vertices[std::size_t(i) * g.nv + j] = s;
        };
        store(0, detail::grid_point(g, 0, j));
        for (int i = 1; i < g.nu; ++i) {
            std::vector<Complex> pts{detail::grid_point(g, i - 1, j)};
            detail::append_refined(pts, detail::grid_point(g, i, j), piece);
            std::vector<Complex> ws;
            const CVec3 seg = integrate_along<CVec3>(d.cover, SurfacePath{pts, w, 0}, phi, tol, zero, &ws);
            for (int c = 0; c < 3; ++c) val[c] += seg[c];
            w = ws.back();
            store(i, pts.back());
        }
    };

    const int jobs = std::max(1, std::min(g.jobs, g.nv));
    if (jobs == 1) {
        for (int j = 0; j < g.nv; ++j) column(j);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (int j = t; j < g.nv; j += jobs) column(j);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (int i = 0; i + 1 < g.nu; ++i)
        for (int j = 0; j + 1 < g.nv; ++j)
            mesh.quads.push_back({i * g.nv + j, (i + 1) * g.nv + j, (i + 1) * g.nv + j + 1, i * g.nv + j + 1});
    return mesh;
}

inline void write_obj(std::ostream& os, const Mesh& m, const std::string& title = "maxface") {
    os.precision(12);
    os << "# " << title << "\n";
    os << "# vertices: v x1 x2 x0 (the time-like coordinate x0 is written last, as the height)\n";
    for (const auto& v : m.vertices) os << "v " << v.f[1] << " " << v.f[2] << " " << v.f[0] << "\n";
    for (const auto& q : m.quads) os << "f " << q[0] + 1 << " " << q[1] + 1 << " " << q[2] + 1 << " " << q[3] + 1 << "\n";
}

inline void write_ply(std::ostream& os, const Mesh& m) {
    os.precision(12);
    os << "ply\nformat ascii 1.0\n";
    os << "comment coordinates x1 x2 x0 of Minkowski 3-space, metric_factor vanishes on the singular set\n";
    os << "element vertex " << m.vertices.size() << "\n";
    os << "property double x\nproperty double y\nproperty double z\nproperty double metric_factor\n";
    os << "element face " << m.quads.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (const auto& v : m.vertices) os << v.f[1] << " " << v.f[2] << " " << v.f[0] << " " << v.metric << "\n";
    for (const auto& q : m.quads) os << "4 " << q[0] << " " << q[1] << " " << q[2] << " " << q[3] << "\n";
}

} // namespace maxface
