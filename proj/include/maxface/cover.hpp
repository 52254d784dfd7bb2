#pragma once

// Cyclic branched covers w^n = z^e0 (z-1)^e1 (z+1)^em1 of the sphere:
// the genus-k surface M_k, its quotient M'_k for even k, and the plane.
// Paths are polylines in z with a starting w; lifting is analytic
// continuation by nearest-root tracking.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "maxface/algebra.hpp"

namespace maxface {

enum class CoverFamily { Full, Reduced, Planar };

struct CoverSpec {
    int k = 1;
    CoverFamily family = CoverFamily::Full;

    /// w^{k+1} = z (z^2 - 1)^k.
    static CoverSpec full(int k) {
        if (k < 1) throw ValidationError("cover: k must be >= 1");
        return {k, CoverFamily::Full};
    }
    /// W^{2m+1} = Z^{m+1} (Z - 1)^{2m} with k = 2m.
    static CoverSpec reduced(int k) {
        if (k < 2 || k % 2 != 0) throw ValidationError("cover: the reduced surface needs an even k >= 2");
        return {k, CoverFamily::Reduced};
    }
    static CoverSpec planar() { return {0, CoverFamily::Planar}; }

    int m() const { return k / 2; }
    int degree() const {
        switch (family) {
        case CoverFamily::Full: return k + 1;
        case CoverFamily::Reduced: return k + 1;
        default: return 1;
        }
    }
    /// Exponents of z, z - 1, z + 1 on the right-hand side.
    std::array<int, 3> exponents() const {
        switch (family) {
        case CoverFamily::Full: return {1, k, k};
        case CoverFamily::Reduced: return {m() + 1, 2 * m(), 0};
        default: return {0, 0, 0};
        }
    }
    double lambda() const { return pi / (k + 1); }
    Complex psi() const { return std::polar(1.0, k * lambda() / 2.0); }

    /// Finite branch points of the projection to z.
    std::vector<Complex> branch_points() const {
        const auto e = exponents();
        std::vector<Complex> out;
        const int n = degree();
        if (e[0] % n != 0) out.push_back(0.0);
        if (e[1] % n != 0) out.push_back(1.0);
        if (e[2] % n != 0) out.push_back(-1.0);
        return out;
    }

    /// Right-hand side of the defining equation.
    Complex rhs(Complex z) const {
        const auto e = exponents();
        Complex r = 1.0;
        for (int i = 0; i < e[0]; ++i) r *= z;
        for (int i = 0; i < e[1]; ++i) r *= z - 1.0;
        for (int i = 0; i < e[2]; ++i) r *= z + 1.0;
        return r;
    }

    /// d log w / dz.
    Complex dlog_w(Complex z) const {
        const auto e = exponents();
        Complex s = 0.0;
        if (e[0]) s += double(e[0]) / z;
        if (e[1]) s += double(e[1]) / (z - 1.0);
        if (e[2]) s += double(e[2]) / (z + 1.0);
        return s / double(degree());
    }
    /// d^2 log w / dz^2.
    Complex dlog_w_prime(Complex z) const {
        const auto e = exponents();
        Complex s = 0.0;
        if (e[0]) s -= double(e[0]) / (z * z);
        if (e[1]) s -= double(e[1]) / ((z - 1.0) * (z - 1.0));
        if (e[2]) s -= double(e[2]) / ((z + 1.0) * (z + 1.0));
        return s / double(degree());
    }

    /// |w^n - rhs| relative to (1 + |z|)^{deg rhs}.
    double residual(Complex z, Complex w) const {
        const auto e = exponents();
        const Complex wn = std::pow(w, degree());
        return std::abs(wn - rhs(z)) / std::pow(1.0 + std::abs(z), e[0] + e[1] + e[2]);
    }

    /// Minimal distance between finite branch points (1 for the plane).
    double branch_separation() const {
        const auto b = branch_points();
        double d = 1.0;
        bool any = false;
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = i + 1; j < b.size(); ++j) {
                d = any ? std::min(d, std::abs(b[i] - b[j])) : std::abs(b[i] - b[j]);
                any = true;
            }
        return d;
    }
    double clearance() const { return 0.05 * branch_separation(); }
};

/// A point (z, w) of a cover. Punctures over z = 0 and z = inf are flagged.
struct SurfacePoint {
    Complex z{};
    Complex w{};
    bool at_infinity = false;
    bool puncture = false;
};

/// Polyline in the z-plane with the w-value at its first vertex.
struct SurfacePath {
    std::vector<Complex> z;
    Complex w0{};
    int resolution = 0;

    bool empty() const { return z.empty(); }
    Complex front() const { return z.front(); }
    Complex back() const { return z.back(); }
};

// ---------------------------------------------------------------------------
// Fibers and continuation

/// All w over z. Throws BranchPointError within tol of a finite branch point.
inline std::vector<Complex> solve_fiber(const CoverSpec& spec, Complex z, double tol = 1e-10) {
    for (Complex b : spec.branch_points())
        if (std::abs(z - b) < tol) throw BranchPointError("solve_fiber: z is a branch point");
    const int n = spec.degree();
    const Complex r = spec.rhs(z);
    const double mod = std::pow(std::abs(r), 1.0 / n);
    const double arg = std::arg(r);
    std::vector<Complex> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) out.push_back(std::polar(mod, (arg + 2.0 * pi * j) / n));
    return out;
}

/// The fiber point nearest to `guess`.
inline Complex nearest_root(const CoverSpec& spec, Complex z, Complex guess) {
    const auto roots = solve_fiber(spec, z, 0.0);
    Complex best = roots.front();
    for (Complex r : roots)
        if (std::abs(r - guess) < std::abs(best - guess)) best = r;
    return best;
}

/// Exact continuation of w along the straight segment from za to z:
/// w(z) = wa * prod ((z - b)/(za - b))^{e_b / n} with principal powers. The
/// ratio runs along a ray from 1 that cannot cross the negative axis unless
/// the segment meets b, so the principal branch is the continuous one.
inline Complex segment_w(const CoverSpec& spec, Complex za, Complex wa, Complex z) {
    if (spec.family == CoverFamily::Planar) return wa;
    const auto e = spec.exponents();
    const double n = spec.degree();
    Complex log_ratio = 0.0;
    const std::array<Complex, 3> b = {0.0, 1.0, -1.0};
    for (int i = 0; i < 3; ++i)
        if (e[i]) log_ratio += (double(e[i]) / n) * std::log((z - b[i]) / (za - b[i]));
    return wa * std::exp(log_ratio);
}

namespace detail {

// One tracking step za -> zb; subdivides until the choice is unambiguous.
inline Complex track_segment(const CoverSpec& spec, Complex za, Complex wa, Complex zb, int depth) {
    if (spec.family == CoverFamily::Planar) return wa;
    const Complex guess = wa * std::exp(spec.dlog_w(za) * (zb - za));
    const auto roots = solve_fiber(spec, zb, 0.0);
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    Complex best = roots.front();
    for (Complex r : roots) {
        const double d = std::abs(r - guess);
        if (d < d1) {
            d2 = d1;
            d1 = d;
            best = r;
        } else if (d < d2) {
            d2 = d;
        }
    }
    if (d2 > 2.0 * d1) return best;
    if (depth >= 40) throw ContinuationError("continue_path: ambiguous root after maximal subdivision");
    const Complex zm = 0.5 * (za + zb);
    const Complex wm = track_segment(spec, za, wa, zm, depth + 1);
    return track_segment(spec, zm, wm, zb, depth + 1);
}

inline double point_segment_distance(Complex p, Complex a, Complex b, double* param = nullptr) {
    const Complex d = b - a;
    const double len2 = std::norm(d);
    double s = len2 > 0 ? std::real((p - a) * std::conj(d)) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    if (param) *param = s;
    return std::abs(a + s * d - p);
}

} // namespace detail

/// Inserts semicircular detours wherever a segment passes within the
/// clearance radius of a branch point. The detour keeps the side of the
/// closest approach; a segment through the point itself goes to its left.
inline SurfacePath reroute(const CoverSpec& spec, const SurfacePath& path) {
    const double r = spec.clearance();
    const auto branch = spec.branch_points();
    for (Complex v : path.z)
        for (Complex b : branch)
            if (std::abs(v - b) < r) throw BranchPointError("path vertex within clearance of a branch point");
    SurfacePath out{{}, path.w0, path.resolution};
    if (path.z.empty()) return out;
    out.z.push_back(path.z.front());
    for (std::size_t i = 1; i < path.z.size(); ++i) {
        const Complex a = path.z[i - 1], c = path.z[i];
        for (Complex b : branch) {
            double s = 0.0;
            const double d = detail::point_segment_distance(b, a, c, &s);
            if (d >= r || s <= 0.0 || s >= 1.0) continue;
            const Complex dir = (c - a) / std::abs(c - a);
            const double half = std::sqrt(r * r - d * d) + 1e-3 * r;
            const Complex foot = a + s * (c - a);
            const Complex entry = foot - half * dir, exit = foot + half * dir;
            // side of the closest approach: sign of cross(dir, foot - b)
            double side = std::imag(std::conj(dir) * (foot - b));
            if (side == 0.0) side = 1.0;
            const double a0 = std::arg(entry - b), a1 = std::arg(exit - b);
            double sweep = a1 - a0;
            const double rad = std::abs(entry - b);
            // travel through the half plane on the `side` of the path
            if (side > 0) {
                while (sweep > 0) sweep -= 2 * pi;
            } else {
                while (sweep < 0) sweep += 2 * pi;
            }
            out.z.push_back(entry);
            const int pieces = 16;
            for (int j = 1; j < pieces; ++j) out.z.push_back(b + std::polar(rad, a0 + sweep * j / pieces));
            out.z.push_back(exit);
            break;
        }
        out.z.push_back(c);
    }
    return out;
}

/// w-values at every vertex of the path (after rerouting the caller's path
/// must already be clear of branch points).
inline std::vector<Complex> lift_path(const CoverSpec& spec, const SurfacePath& path) {
    std::vector<Complex> ws;
    if (path.z.empty()) return ws;
    if (spec.residual(path.z.front(), path.w0) > 1e-9 * (1.0 + std::abs(path.w0)))
        throw ValidationError("path start is not on the cover");
    ws.reserve(path.z.size());
    ws.push_back(path.w0);
    for (std::size_t i = 1; i < path.z.size(); ++i)
        ws.push_back(detail::track_segment(spec, path.z[i - 1], ws.back(), path.z[i], 0));
    return ws;
}

/// Endpoint of the analytic continuation along the path.
inline SurfacePoint continue_path(const CoverSpec& spec, const SurfacePath& path) {
    if (path.z.empty()) throw ValidationError("continue_path: empty path");
    const auto ws = lift_path(spec, path);
    return {path.z.back(), ws.back()};
}

// ---------------------------------------------------------------------------
// Concrete paths

/// Circle polyline from `start`, centred at `center`, counter-clockwise for
/// turns > 0. `pieces` chords per full turn.
inline std::vector<Complex> circle_polyline(Complex center, Complex start, double turns, int pieces = 128) {
    const double r = std::abs(start - center);
    const double a0 = std::arg(start - center);
    const int count = std::max(1, int(std::ceil(std::abs(turns) * pieces)));
    std::vector<Complex> pts;
    pts.reserve(count + 1);
    for (int j = 0; j <= count; ++j) pts.push_back(center + std::polar(r, a0 + 2 * pi * turns * j / count));
    pts.back() = center + std::polar(r, a0 + 2 * pi * turns);
    if (std::abs(std::fmod(std::abs(turns), 1.0)) < 1e-15) pts.back() = start;
    return pts;
}

/// Winding number of a closed polyline around p.
inline double winding_number(const std::vector<Complex>& z, Complex p) {
    double total = 0.0;
    for (std::size_t i = 1; i < z.size(); ++i) total += std::arg((z[i] - p) / (z[i - 1] - p));
    return total / (2 * pi);
}

/// The base point o = (t, w) with w > 0 on the full cover, t > 1.
inline SurfacePoint base_point(const CoverSpec& spec, double t = 2.0) {
    if (!(t > 1.0)) throw ValidationError("base point must lie on the ray z > 1");
    const double w = std::pow(std::abs(spec.rhs(t)), 1.0 / spec.degree());
    return {t, w};
}

inline void require_base_ray(const CoverSpec& spec, const SurfacePoint& o) {
    if (spec.family != CoverFamily::Full) throw ValidationError("generator loops are defined on the full cover");
    if (std::abs(o.z.imag()) > 1e-12 || !(o.z.real() > 1.0) || std::abs(std::arg(o.w)) > 1e-12 ||
        spec.residual(o.z, o.w) > 1e-10)
        throw ValidationError("base point must be (t, w) with t > 1 and arg w = 0");
}

/// Reflections mu_1..mu_4 of M_k.
inline SurfacePoint reflection_apply(const CoverSpec& spec, int j, const SurfacePoint& p) {
    const double l = spec.lambda();
    const int k = spec.k;
    const Complex zc = std::conj(p.z), wc = std::conj(p.w);
    switch (j) {
    case 1: return {zc, wc};
    case 2: return {zc, std::polar(1.0, 2.0 * k * l) * wc};
    case 3: return {-zc, std::polar(1.0, -l) * wc};
    case 4: return {1.0 / zc, std::polar(1.0, k * l) * wc / (zc * zc)};
    default: throw ValidationError("reflection index must be 1..4");
    }
}

/// z-part of a reflection, used to map path polylines.
inline Complex reflection_z(int j, Complex z) {
    switch (j) {
    case 1:
    case 2: return std::conj(z);
    case 3: return -std::conj(z);
    case 4: return 1.0 / std::conj(z);
    default: throw ValidationError("reflection index must be 1..4");
    }
}

/// kappa_1 = mu_2 o mu_1 : (z, w) -> (z, e^{2ik lambda} w).
inline SurfacePoint kappa1(const CoverSpec& spec, const SurfacePoint& p, int power = 1) {
    const double a = 2.0 * spec.k * spec.lambda() * power;
    return {p.z, std::polar(1.0, a) * p.w};
}
/// kappa_2 = mu_3 o mu_1 : (z, w) -> (-z, e^{-i lambda} w).
inline SurfacePoint kappa2(const CoverSpec& spec, const SurfacePoint& p) {
    return {-p.z, std::polar(1.0, -spec.lambda()) * p.w};
}

/// The loop gamma: counter-clockwise circle through t and -1/2, enclosing
/// z = 0 and z = 1 but not z = -1.
inline SurfacePath gamma_loop(const CoverSpec& spec, const SurfacePoint& o, int pieces = 160) {
    require_base_ray(spec, o);
    const double t = o.z.real();
    const Complex center = 0.5 * (t - 0.5);
    return {circle_polyline(center, o.z, 1.0, pieces), o.w, pieces};
}

/// 2(k+1) free loops kappa_1^j o gamma and kappa_1^j o kappa_2 o gamma.
inline std::vector<SurfacePath> generator_loops(const CoverSpec& spec, const SurfacePoint& o, int pieces = 160) {
    const SurfacePath g = gamma_loop(spec, o, pieces);
    std::vector<SurfacePath> loops;
    for (int j = 0; j <= spec.k; ++j) {
        const SurfacePoint s = kappa1(spec, o, j);
        loops.push_back({g.z, s.w, pieces});
    }
    for (int j = 0; j <= spec.k; ++j) {
        const SurfacePoint s = kappa1(spec, kappa2(spec, o), j);
        SurfacePath p{{}, s.w, pieces};
        for (Complex z : g.z) p.z.push_back(-z);
        loops.push_back(p);
    }
    return loops;
}

/// Base paths P_{mu_j} from o to mu_j(o), each mu_j-invariant up to reversal.
/// P_1 is constant; P_2 circles z = 1 once through the slit (0, 1);
/// P_3 is the upper half of |z| = t.
inline SurfacePath reflection_base_path(const CoverSpec& spec, int j, const SurfacePoint& o, int pieces = 160) {
    require_base_ray(spec, o);
    const double t = o.z.real();
    switch (j) {
    case 1: return {{o.z}, o.w, 1};
    case 2: return {circle_polyline(0.5 * (t + 0.5), o.z, 1.0, pieces), o.w, pieces};
    case 3: return {circle_polyline(0.0, o.z, 0.5, pieces), o.w, pieces};
    default: throw ValidationError("base paths exist for reflections 1..3");
    }
}

/// Even word of reflection indices (i_1, ..., i_2r).
struct DeckWord {
    std::vector<int> letters;

    static DeckWord repeat(std::vector<int> unit, int times) {
        DeckWord w;
        for (int i = 0; i < times; ++i) w.letters.insert(w.letters.end(), unit.begin(), unit.end());
        return w;
    }
};

/// Applies mu_{i_1} o ... o mu_{i_r} (innermost last) to a point.
inline SurfacePoint apply_word(const CoverSpec& spec, const std::vector<int>& letters, std::size_t count,
                               SurfacePoint p) {
    for (std::size_t i = count; i-- > 0;) p = reflection_apply(spec, letters[i], p);
    return p;
}

/// The loop P_{i1} * (mu_{i1} o P_{i2}) * (mu_{i1} mu_{i2} o P_{i3}) * ...
inline SurfacePath deck_word_path(const CoverSpec& spec, const DeckWord& word, const SurfacePoint& o,
                                  int pieces = 160) {
    if (word.letters.size() % 2 != 0) throw ValidationError("deck word must have even length");
    for (int l : word.letters)
        if (l < 1 || l > 3) throw ValidationError("deck word letters must be 1, 2 or 3");
    require_base_ray(spec, o);
    SurfacePath out{{o.z}, o.w, pieces};
    for (std::size_t i = 0; i < word.letters.size(); ++i) {
        const SurfacePath base = reflection_base_path(spec, word.letters[i], o, pieces);
        for (std::size_t v = 1; v < base.z.size(); ++v) {
            Complex z = base.z[v];
            for (std::size_t q = i; q-- > 0;) z = reflection_z(word.letters[q], z);
            out.z.push_back(z);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Quotient and genus

/// (z, w) -> (z^2, z w) from M_k to M'_k, k even.
inline SurfacePoint double_cover_project(const CoverSpec& spec, const SurfacePoint& p) {
    if (spec.k % 2 != 0) throw ValidationError("double_cover_project: k must be even");
    return {p.z * p.z, p.z * p.w};
}

/// Riemann-Hurwitz genus from the branching data.
inline int genus_check(const CoverSpec& spec) {
    const int n = spec.degree();
    if (n == 1) return 0;
    const auto e = spec.exponents();
    int branching = 0;
    for (int x : e)
        if (x) branching += n - std::gcd(x, n);
    const int e_inf = e[0] + e[1] + e[2];
    branching += n - std::gcd(e_inf, n);
    // 2g - 2 = -2n + branching
    return (branching - 2 * n + 2) / 2;
}

// ---------------------------------------------------------------------------
// CSV exchange: header line "w0,<re>,<im>", then "re_z,im_z" rows.

inline void write_path_csv(std::ostream& os, const SurfacePath& path) {
    os.precision(17);
    os << "w0," << path.w0.real() << "," << path.w0.imag() << "\n";
    os << "re_z,im_z\n";
    for (Complex z : path.z) os << z.real() << "," << z.imag() << "\n";
}

inline SurfacePath read_path_csv(std::istream& is) {
    SurfacePath p;
    std::string line;
    if (!std::getline(is, line) || line.rfind("w0,", 0) != 0) throw ValidationError("path csv: missing w0 header");
    {
        std::stringstream ss(line.substr(3));
        double re = 0, im = 0;
        char comma = 0;
        ss >> re >> comma >> im;
        p.w0 = {re, im};
    }
    std::getline(is, line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        double re = 0, im = 0;
        char comma = 0;
        if (!(ss >> re >> comma >> im)) throw ValidationError("path csv: malformed row");
        p.z.emplace_back(re, im);
    }
    p.resolution = int(p.z.size());
    return p;
}

} // namespace maxface
