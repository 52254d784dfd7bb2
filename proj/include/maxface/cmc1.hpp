#pragma once

// Deformation of the genus-k maxfaces into CMC-1 faces of de Sitter space.
// The null lift F solves dF = t Psi0 F along paths of the cover; reflection
// and loop monodromies of F decide whether f = F e3 F* is single valued.

#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "maxface/periods.hpp"
#include "maxface/schwarzian.hpp"

namespace maxface {

/// Weierstrass data of a genus-k maxface together with the deformation
/// parameter t. Psi0 = (1/c) [[G, -G^2], [1, -G]] eta.
struct AdmissiblePair {
    WeierstrassData data;
    double c = 0.0;
    double t = 0.0;
    int k = 0;

    Mat2 psi0(Complex z, Complex w) const {
        const LocalData v = data.at(z, w);
        const Complex s = v.eta / c;
        return {v.G * s, -v.G * v.G * s, s, -v.G * s};
    }
    /// Coefficient of Q_t = (t/c) eta dG.
    Complex hopf_t(Complex z, Complex w) const {
        const LocalData v = data.at(z, w);
        return (t / c) * v.eta * v.dG;
    }
    /// (1 + |G|^2)^2 |eta|^2, the lifted metric factor.
    double lifted_metric(Complex z, Complex w) const {
        const LocalData v = data.at(z, w);
        const double a = 1.0 + std::norm(v.G);
        return a * a * std::norm(v.eta);
    }
};

inline AdmissiblePair admissible_pair(int k, double t, std::optional<double> c = std::nullopt) {
    AdmissiblePair p;
    p.data = genus_k_data(k, c);
    p.c = p.data.params.at("c");
    p.t = t;
    p.k = k;
    return p;
}

struct LiftState {
    Mat2 F;
    SurfacePoint p;
    /// max |det F - det F(start)| / |det F(start)| along the path
    double det_drift = 0.0;
    int steps = 0;
};

namespace detail {

inline std::string point_string(Complex z) {
    return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

// Dormand-Prince 5(4) over s in [0, 1] for dF/ds = rhs(s) F.
template <class Rhs>
Mat2 dopri_unit(const Rhs& rhs, Mat2 F, double tol, int& steps, Complex where) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                            e5 = b5 + 92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

    double s = 0.0, h = 0.25;
    Mat2 k1 = rhs(0.0) * F;
    while (s < 1.0) {
        if (s + h > 1.0) h = 1.0 - s;
        const Mat2 k2 = rhs(s + c2 * h) * (F + (h * a21) * k1);
        const Mat2 k3 = rhs(s + c3 * h) * (F + (h * a31) * k1 + (h * a32) * k2);
        const Mat2 k4 = rhs(s + c4 * h) * (F + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3);
        const Mat2 k5 = rhs(s + c5 * h) * (F + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4);
        const Mat2 k6 =
            rhs(s + h) * (F + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 + (h * a64) * k4 + (h * a65) * k5);
        const Mat2 next = F + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 + (h * b6) * k6;
        const Mat2 k7 = rhs(s + h) * next;
        const Mat2 err = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 + (h * e6) * k6 + (h * e7) * k7;
        if (!is_finite(next)) throw NumericalError("integrate_lift: non-finite state near z = " + point_string(where));
        const double scale = tol * (1.0 + frobenius(F));
        const double en = frobenius(err);
        if (en <= scale) {
            s += h;
            F = next;
            k1 = k7;
            ++steps;
        }
        const double fac = en > 0.0 ? 0.9 * std::pow(scale / en, 0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, fac));
        if (h < 1e-12 && s < 1.0)
            throw NumericalError("integrate_lift: step size collapsed near z = " + point_string(where));
        if (steps > 200000) throw NumericalError("integrate_lift: step budget exhausted near z = " + point_string(where));
    }
    return F;
}

} // namespace detail

/// Integrates dF = t Psi0 F along the lifted polyline starting from F0.
/// det F is monitored but never renormalized.
inline LiftState integrate_lift(const AdmissiblePair& pr, const SurfacePath& path, const Mat2& F0,
                                double tol = 1e-12) {
    LiftState st;
    st.F = F0;
    if (path.z.empty()) throw ValidationError("integrate_lift: empty path");
    const CoverSpec& cov = pr.data.cover;
    if (cov.residual(path.front(), path.w0) > 1e-8) throw ValidationError("integrate_lift: path start is not on the cover");
    const auto tracked = lift_path(cov, path);
    const Complex det0 = F0.det();
    Complex wa = path.w0;
    for (std::size_t i = 1; i < path.z.size(); ++i) {
        const Complex za = path.z[i - 1], zb = path.z[i], dz = zb - za;
        if (std::abs(dz) == 0.0) continue;
        if (pr.t != 0.0) {
            auto rhs = [&](double s) {
                const Complex z = za + s * dz;
                return pr.psi0(z, segment_w(cov, za, wa, z)) * (pr.t * dz);
            };
            st.F = detail::dopri_unit(rhs, st.F, tol, st.steps, za);
        }
        const Complex wb = segment_w(cov, za, wa, zb);
        if (std::abs(wb - tracked[i]) > 1e-7 * (1.0 + std::abs(wb)))
            throw ContinuationError("integrate_lift: exact continuation disagrees with root tracking");
        wa = tracked[i];
        st.det_drift = std::max(st.det_drift, std::abs(st.F.det() - det0) / std::abs(det0));
    }
    st.p = {path.back(), wa};
    return st;
}

/// sigma_1 = e0, sigma_2 = diag(psi^-2, psi^2), sigma_3 = diag(psi^-1, psi).
inline std::array<Mat2, 3> sigma_matrices(int k) {
    if (k < 1) throw ValidationError("sigma_matrices: k must be positive");
    const CoverSpec cov = CoverSpec::full(k);
    const Complex psi = cov.psi();
    return {e0(), Mat2::diag(1.0 / (psi * psi), psi * psi), Mat2::diag(1.0 / psi, psi)};
}

/// max over samples of |conj(G o mu_j) - sigma_j * G| / (1 + |G|) for
/// j = 1..3, and the same for conj(Q o mu_4) = -Q.
struct ReflectionSymmetry {
    std::array<double, 3> gauss_residual{};
    double hopf_mu4_residual = 0.0;
    /// the same with +Q, which must fail
    double hopf_mu4_plus = 0.0;
};

inline ReflectionSymmetry reflection_symmetry_check(int k, int samples = 50, unsigned seed = 11) {
    const WeierstrassData d = genus_k_data(k);
    const auto sig = sigma_matrices(k);
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, 1.5);
    ReflectionSymmetry r;
    for (int i = 0; i < samples; ++i) {
        Complex z;
        do z = {n(rng), n(rng)};
        while (std::abs(z) < 0.1 || std::abs(z - 1.0) < 0.1 || std::abs(z + 1.0) < 0.1);
        const SurfacePoint p{z, solve_fiber(d.cover, z)[i % d.cover.degree()]};
        const LocalData v = d.at(p);
        for (int j = 1; j <= 3; ++j) {
            const SurfacePoint q = reflection_apply(d.cover, j, p);
            const Complex lhs = std::conj(d.at(q).G);
            const Complex rhs = moebius_apply(sig[j - 1], v.G);
            r.gauss_residual[j - 1] = std::max(r.gauss_residual[j - 1], std::abs(lhs - rhs) / (1 + std::abs(v.G)));
        }
        // Q = q dz^2; pulled back by z -> 1/conj(z) and conjugated: conj(q(mu4 p)) z^-4
        const SurfacePoint q4 = reflection_apply(d.cover, 4, p);
        const LocalData u = d.at(q4);
        const Complex hopf = v.eta * v.dG;
        const Complex pulled = std::conj(u.eta * u.dG) / std::pow(z, 4);
        const double scale = 1.0 + std::abs(hopf);
        r.hopf_mu4_residual = std::max(r.hopf_mu4_residual, std::abs(pulled + hopf) / scale);
        r.hopf_mu4_plus = std::max(r.hopf_mu4_plus, std::abs(pulled - hopf) / scale);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Reflection and loop monodromy

struct ReflectionMonodromy {
    Mat2 rho;
    /// max distance between the base extraction and the probe extractions
    double probe_spread = 0.0;
    double det_drift = 0.0;
};

inline std::vector<Complex> default_probes() { return {{2.5, 0.8}, {1.5, -0.6}, {3.0, 0.1}}; }

namespace detail {

inline std::vector<Complex> straight_polyline(Complex a, Complex b, double piece = 0.1) {
    std::vector<Complex> pts{a};
    append_refined(pts, b, piece);
    return pts;
}

inline SurfacePath concatenate(const SurfacePath& a, const std::vector<Complex>& tail) {
    SurfacePath out = a;
    for (std::size_t i = 1; i < tail.size(); ++i) out.z.push_back(tail[i]);
    return out;
}

} // namespace detail

/// rho~_j at the initial value b: conj(F o mu~_j) = sigma_j F rho~^-1. At a
/// point p reached by the probe path from o, rho~ = conj(F(mu_j p))^-1 sigma_j F(p)
/// where mu_j p is reached along P_j followed by the mirrored probe path.
/// The base extraction (p = o) is returned; probes only measure the spread.
inline ReflectionMonodromy reflection_monodromy(const AdmissiblePair& pr, const Mat2& b, int j,
                                                const std::vector<Complex>& probes = default_probes(),
                                                double probe_tolerance = 1e-8, int pieces = 160) {
    if (j < 1 || j > 3) throw ValidationError("reflection_monodromy: j must be 1, 2 or 3");
    const CoverSpec& cov = pr.data.cover;
    const SurfacePoint o = pr.data.base;
    const Mat2 sig = sigma_matrices(pr.k)[j - 1];
    const SurfacePath base_path = reflection_base_path(cov, j, o, pieces);
    const SurfacePoint target = reflection_apply(cov, j, o);
    const LiftState at_image = integrate_lift(pr, base_path, b);
    if (std::abs(at_image.p.z - target.z) > 1e-10 || std::abs(at_image.p.w - target.w) > 1e-8 * (1 + std::abs(target.w)))
        throw ContinuationError("reflection_monodromy: base path does not end at the mirrored base point");
    ReflectionMonodromy r;
    r.rho = at_image.F.conj().inverse() * sig * b;
    r.det_drift = at_image.det_drift;
    for (Complex p : probes) {
        const auto probe = detail::straight_polyline(o.z, p);
        const LiftState there = integrate_lift(pr, {probe, o.w, 0}, b);
        std::vector<Complex> mirrored;
        for (Complex z : probe) mirrored.push_back(reflection_z(j, z));
        const LiftState image = integrate_lift(pr, detail::concatenate(base_path, mirrored), b);
        const Mat2 rp = image.F.conj().inverse() * sig * there.F;
        r.probe_spread = std::max(r.probe_spread, distance(rp, r.rho));
        r.det_drift = std::max({r.det_drift, there.det_drift, image.det_drift});
    }
    if (probe_tolerance > 0.0 && r.probe_spread > probe_tolerance)
        throw NumericalError("reflection_monodromy: probes disagree by " + std::to_string(r.probe_spread));
    return r;
}

/// rho_F(tau) from continuing F once around a loop based at o: F_end = b rho^-1.
inline Mat2 loop_monodromy(const AdmissiblePair& pr, const Mat2& b, const SurfacePath& loop, double* det_drift = nullptr) {
    const SurfacePoint o = pr.data.base;
    if (std::abs(loop.front() - o.z) > 1e-12 || std::abs(loop.w0 - o.w) > 1e-10 * (1 + std::abs(o.w)))
        throw ValidationError("loop_monodromy: loop must start at the base point");
    const LiftState st = integrate_lift(pr, loop, b);
    if (std::abs(st.p.z - o.z) > 1e-10 || std::abs(st.p.w - o.w) > 1e-8 * (1 + std::abs(o.w)))
        throw ValidationError("loop_monodromy: loop does not close on the cover");
    if (det_drift) *det_drift = st.det_drift;
    return st.F.inverse() * b;
}

struct WordMonodromy {
    Mat2 direct;
    Mat2 composed;
    /// product of conj(sigma_odd) sigma_even, a multiple of e0
    Mat2 sigma_product;
    double discrepancy = 0.0;
};

/// Monodromy along a deck word by two routes: direct integration around the
/// word path, and the product of reflection monodromies
/// (conj(S_{i1}) S_{i2} ...) (conj(rho~_{i1}) rho~_{i2} ...).
inline WordMonodromy loop_monodromy(const AdmissiblePair& pr, const Mat2& b, const DeckWord& word,
                                    double tolerance = 0.0, int pieces = 160) {
    WordMonodromy m;
    m.direct = loop_monodromy(pr, b, deck_word_path(pr.data.cover, word, pr.data.base, pieces));
    const auto sig = sigma_matrices(pr.k);
    std::array<std::optional<Mat2>, 3> rt;
    Mat2 R = e0(), S = e0();
    for (std::size_t i = 0; i < word.letters.size(); ++i) {
        const int l = word.letters[i];
        if (!rt[l - 1]) rt[l - 1] = reflection_monodromy(pr, b, l, {}, 0.0, pieces).rho;
        const bool odd = i % 2 == 0;  // letters i_1, i_3, ... are conjugated
        R = R * (odd ? rt[l - 1]->conj() : *rt[l - 1]);
        S = S * (odd ? sig[l - 1].conj() : sig[l - 1]);
    }
    if (distance(S, e0()) > 1e-12 && distance(S, -1.0 * e0()) > 1e-12)
        throw NumericalError("loop_monodromy: sigma product is not +-e0");
    m.sigma_product = S;
    m.composed = S.a11 * R;
    m.discrepancy = distance(m.direct, m.composed);
    if (tolerance > 0.0 && m.discrepancy > tolerance)
        throw NumericalError("loop_monodromy: direct and composed routes disagree by " + std::to_string(m.discrepancy));
    return m;
}

/// tau_0 = (mu3 mu2)^{2(k+1)} around z = 0, tau_inf = (mu1 mu3)^{2(k+1)} around z = inf.
inline DeckWord tau_zero(int k) { return DeckWord::repeat({3, 2}, 2 * (k + 1)); }
inline DeckWord tau_infinity(int k) { return DeckWord::repeat({1, 3}, 2 * (k + 1)); }

// ---------------------------------------------------------------------------
// Exponents and trace identities

struct NuExponents {
    double zero = 0.0, infinity = 0.0;
};

inline double max_admissible_t(int k) { return k / (4.0 * (k + 1)); }

inline NuExponents nu_exponents(int k, double t) {
    if (k < 1) throw ValidationError("nu_exponents: k must be positive");
    if (!(std::abs(t) < max_admissible_t(k)))
        throw ValidationError("nu_exponents: |t| must be below k/(4(k+1))");
    const double x = 4.0 * t * (k + 1) / k;
    return {k * std::sqrt(1 + x), k * std::sqrt(1 - x)};
}

struct TraceIdentity {
    Complex trace_zero{}, trace_infinity{};
    double expected_zero = 0.0, expected_infinity = 0.0;
    double residual_zero = 0.0, residual_infinity = 0.0;
};

inline TraceIdentity trace_identity_check(const AdmissiblePair& pr, const Mat2& b = e0()) {
    const NuExponents nu = nu_exponents(pr.k, pr.t);
    const double sign = pr.k % 2 ? -1.0 : 1.0;
    TraceIdentity r;
    r.trace_zero = loop_monodromy(pr, b, deck_word_path(pr.data.cover, tau_zero(pr.k), pr.data.base)).trace();
    r.trace_infinity = loop_monodromy(pr, b, deck_word_path(pr.data.cover, tau_infinity(pr.k), pr.data.base)).trace();
    r.expected_zero = sign * 2 * std::cos(pi * nu.zero);
    r.expected_infinity = sign * 2 * std::cos(pi * nu.infinity);
    r.residual_zero = std::abs(r.trace_zero - r.expected_zero);
    r.residual_infinity = std::abs(r.trace_infinity - r.expected_infinity);
    return r;
}

struct ResidueDerivative {
    /// contour integral of Psi0 over k+1 turns of |z| = 1/2
    Mat2 contour;
    /// the same along the word path of tau_0
    Mat2 along_word;
    /// 2 pi i diag(k+1, -(k+1))
    Mat2 residue;
    double defect = 0.0;
};

inline ResidueDerivative residue_derivative(int k) {
    const AdmissiblePair pr = admissible_pair(k, 0.0);
    using V = std::array<Complex, 4>;
    auto form = [&](Complex z, Complex w) {
        const Mat2 m = pr.psi0(z, w);
        return V{m.a11, m.a12, m.a21, m.a22};
    };
    auto as_mat = [](const V& v) { return Mat2{v[0], v[1], v[2], v[3]}; };
    const Complex z0 = 0.5;
    const SurfacePath small{circle_polyline(0.0, z0, double(k + 1), 64 * (k + 1)), solve_fiber(pr.data.cover, z0)[0]};
    if (std::abs(continue_path(pr.data.cover, small).w - small.w0) > 1e-10)
        throw NumericalError("residue_derivative: small loop does not close");
    ResidueDerivative r;
    r.contour = as_mat(integrate_along<V>(pr.data.cover, small, form, 1e-12, V{}));
    r.along_word = as_mat(integrate_along<V>(pr.data.cover, deck_word_path(pr.data.cover, tau_zero(k), pr.data.base),
                                             form, 1e-12, V{}));
    r.residue = Mat2::diag(2.0 * pi * I * double(k + 1), -2.0 * pi * I * double(k + 1));
    r.defect = distance(r.contour, r.residue);
    return r;
}

/// Centred difference of rho_F(tau_0)^-1 in t at t = 0 (initial value e0).
/// Five-point centred difference at t = 0. The three-point rule leaves a
/// truncation error of about (2(k+1)pi)^3 step^2 / 6.
inline Mat2 monodromy_t_derivative(int k, double step = 1e-3) {
    auto inv_rho = [&](double t) {
        const AdmissiblePair pr = admissible_pair(k, t);
        return loop_monodromy(pr, e0(), deck_word_path(pr.data.cover, tau_zero(k), pr.data.base)).inverse();
    };
    const Mat2 near = inv_rho(step) - inv_rho(-step), far = inv_rho(2 * step) - inv_rho(-2 * step);
    return (1.0 / (12 * step)) * (8.0 * near - far);
}

inline double max_entry_gap(const Mat2& a, const Mat2& b) {
    return std::max({std::abs(a.a11 - b.a11), std::abs(a.a12 - b.a12), std::abs(a.a21 - b.a21), std::abs(a.a22 - b.a22)});
}

// ---------------------------------------------------------------------------
// The initial values iota(t) and iota_1(t)

struct IotaConstruction {
    int k = 0;
    double t = 0.0;
    double u = 0.0, s1 = 0.0, s2 = 0.0;
    Mat2 iota;
    Mat2 rho2;  // at e0
    /// |iota^-1 rho~_2 iota - sigma_2|
    double sigma2_residual = 0.0;
    /// |cos^2 + u^2 + s1 s2 - 1|
    double parametrization_residual = 0.0;
    Mat2 rho3;  // at iota
    Complex q{};
    double r1 = 0.0, r2 = 0.0;
    double s = 1.0;
    int epsilon = 0;
    Mat2 iota1;
};

inline IotaConstruction construct_iota(int k, double t, std::optional<double> c = std::nullopt) {
    const AdmissiblePair pr = admissible_pair(k, t, c);
    IotaConstruction r;
    r.k = k;
    r.t = t;
    const double kl = k * pr.data.cover.lambda();
    const double S = std::sin(kl);
    r.rho2 = reflection_monodromy(pr, e0(), 2).rho;
    r.u = 0.5 * (r.rho2.a22.imag() - r.rho2.a11.imag());
    r.s1 = r.rho2.a12.imag();
    r.s2 = r.rho2.a21.imag();
    r.parametrization_residual = std::abs(std::cos(kl) * std::cos(kl) + r.u * r.u + r.s1 * r.s2 - 1.0);
    const double den = 2.0 * (S * S + r.u * S);
    if (!(den > 0.0)) throw NumericalError("construct_iota: sin^2 + u sin is not positive, t too large");
    const double nrm = 1.0 / std::sqrt(den);
    r.iota = {(r.u + S) * nrm, r.s1 * nrm, -r.s2 * nrm, (r.u + S) * nrm};
    r.sigma2_residual = distance(r.iota.inverse() * r.rho2 * r.iota, sigma_matrices(k)[1]);

    r.rho3 = reflection_monodromy(pr, r.iota, 3).rho;
    r.q = r.rho3.a11;
    r.r1 = r.rho3.a12.imag();
    r.r2 = r.rho3.a21.imag();
    if (t == 0.0) {
        r.iota1 = r.iota;
        return r;
    }
    if (!(r.r1 * r.r2 < 0.0)) throw NumericalError("construct_iota: r1 r2 is not negative, deformation fails");
    r.s = std::pow(-r.r1 / r.r2, 0.25);
    r.epsilon = r.r1 > 0 ? 1 : -1;
    r.iota1 = r.iota * Mat2::diag(r.s, 1.0 / r.s);
    return r;
}

/// Based loops o -> kappa-image of o -> generator -> back, one per generator.
inline std::vector<SurfacePath> based_generator_loops(const CoverSpec& cov, const SurfacePoint& o, int pieces = 160) {
    const auto free = generator_loops(cov, o, pieces);
    std::vector<SurfacePath> out;
    for (std::size_t i = 0; i < free.size(); ++i) {
        const int j = int(i % (cov.k + 1));
        DeckWord w = DeckWord::repeat({2, 1}, j);
        if (i > std::size_t(cov.k)) w.letters.insert(w.letters.end(), {3, 1});
        const SurfacePath lead = deck_word_path(cov, w, o, pieces);
        SurfacePath loop = detail::concatenate(lead, free[i].z);
        for (std::size_t v = lead.z.size() - 1; v-- > 0;) loop.z.push_back(lead.z[v]);
        out.push_back(loop);
    }
    return out;
}

struct Su11Certificate {
    IotaConstruction iota;
    std::array<Mat2, 3> rho_tilde{};
    std::array<double, 3> defects{};
    std::vector<double> generator_defects;
    double max_defect = 0.0;
    bool certified = false;
};

inline Su11Certificate su11_certify(int k, double t, double threshold = 1e-8) {
    Su11Certificate cert;
    cert.iota = construct_iota(k, t);
    const AdmissiblePair pr = admissible_pair(k, t);
    for (int j = 1; j <= 3; ++j) {
        cert.rho_tilde[j - 1] = reflection_monodromy(pr, cert.iota.iota1, j).rho;
        cert.defects[j - 1] = su11_defect(cert.rho_tilde[j - 1]).defect;
        cert.max_defect = std::max(cert.max_defect, cert.defects[j - 1]);
    }
    for (const auto& loop : based_generator_loops(pr.data.cover, pr.data.base)) {
        const double d = su11_defect(loop_monodromy(pr, cert.iota.iota1, loop)).defect;
        cert.generator_defects.push_back(d);
        cert.max_defect = std::max(cert.max_defect, d);
    }
    cert.certified = cert.max_defect < threshold;
    return cert;
}

// ---------------------------------------------------------------------------
// de Sitter immersion

struct DeSitterPoint {
    Mat2 f;
    std::array<double, 4> x{};
    /// -x0^2 + x1^2 + x2^2 + x3^2
    double lorentz_norm = 0.0;
};

/// f = F e3 F*, f = [[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]].
inline DeSitterPoint desitter_sample(const Mat2& F) {
    DeSitterPoint s;
    s.f = F * e3() * F.adjoint();
    const double f11 = s.f.a11.real(), f22 = s.f.a22.real();
    s.x = {0.5 * (f11 + f22), s.f.a12.real(), s.f.a12.imag(), 0.5 * (f11 - f22)};
    s.lorentz_norm = -s.x[0] * s.x[0] + s.x[1] * s.x[1] + s.x[2] * s.x[2] + s.x[3] * s.x[3];
    return s;
}

struct SchwarzCheck {
    Complex g_first{}, g_second{};
    double definition_gap = 0.0;
    Complex S_g{}, S_G{}, two_Q{};
    /// |S(g) - S(G) - 2 Q_t| / |2 Q_t|
    double residual = 0.0;
};

/// Secondary Gauss map g = -dF12/dF11 = -dF22/dF21 at the end of `at`, and
/// the Schwarzian relation S(g) - S(G) = 2 Q_t. Near p, F is propagated
/// along straight chords from p; dF comes from the ODE right-hand side.
inline SchwarzCheck secondary_gauss_and_schwarz(const AdmissiblePair& pr, const LiftState& at, double step = 0.0,
                                               double local_tol = 1e-12) {
    const CoverSpec& cov = pr.data.cover;
    const Complex zp = at.p.z, wp = at.p.w;
    SchwarzCheck r;
    const Mat2 dF = pr.psi0(zp, wp) * pr.t * at.F;
    if (std::abs(dF.a11) == 0.0 && std::abs(dF.a21) == 0.0)
        throw DegenerateError("secondary_gauss_and_schwarz: dF11 and dF21 both vanish");
    r.g_first = -dF.a12 / dF.a11;
    r.g_second = -dF.a22 / dF.a21;
    r.definition_gap = std::abs(r.g_first - r.g_second) / (1.0 + std::abs(r.g_first));
    auto local_G = [&](Complex z) { return pr.data.at(z, segment_w(cov, zp, wp, z)).G; };
    auto local_g = [&](Complex z) {
        const Mat2 F = integrate_lift(pr, {{zp, z}, wp, 0}, e0(), local_tol).F * at.F;
        const Complex G = local_G(z);
        return -(F.a12 - G * F.a22) / (F.a11 - G * F.a21);
    };
    // truncation error scales with the distance to the branch points, rounding with step^-3
    const double clearance = std::min({std::abs(zp), std::abs(zp - 1.0), std::abs(zp + 1.0)});
    const double e = step > 0.0 ? step : 1e-2 * clearance;
    r.S_g = schwarzian_fd(local_g, zp, e);
    r.S_G = schwarzian_fd(local_G, zp, e);
    r.two_Q = 2.0 * pr.hopf_t(zp, wp);
    r.residual = std::abs(r.S_g - r.S_G - r.two_Q) / std::abs(r.two_Q);
    return r;
}

enum class EndKind { Zero, Infinity };

struct EndFit {
    EndKind end = EndKind::Zero;
    double slope = 0.0, target = 0.0, r2 = 0.0;
    double relative_error = 0.0;
    /// x3/x0 at the deepest sample
    double x3_over_x0 = 0.0;
    bool inconclusive = false;
    std::vector<std::array<double, 4>> samples;
};

/// Log-log fit of |x1 + i x2| against |x0| along the imaginary axis into an
/// end, with F starting at b. Samples at |z| = 10^{-e} (or 10^{e}) for
/// e in [e_first, e_last].
inline EndFit end_asymptotics(int k, double t, EndKind end, std::optional<Mat2> b = std::nullopt,
                              double e_first = 6.0, double e_last = 12.0, int samples = 13) {
    const NuExponents nu = nu_exponents(k, t);
    const AdmissiblePair pr = admissible_pair(k, t);
    const Mat2 b0 = b ? *b : construct_iota(k, t).iota1;
    const SurfacePoint o = pr.data.base;
    const double r0 = o.z.real();
    // quarter arc to i r0
    SurfacePath lead{circle_polyline(0.0, o.z, 0.25, 64), o.w, 0};
    LiftState st = integrate_lift(pr, lead, b0);
    EndFit fit;
    fit.end = end;
    const double n = end == EndKind::Zero ? nu.zero : nu.infinity;
    fit.target = n / (k + n);
    std::vector<double> lx, ly;
    double radius = r0;
    for (int i = 0; i < samples; ++i) {
        const double ex = e_first + (e_last - e_first) * i / std::max(1, samples - 1);
        const double target_r = end == EndKind::Zero ? std::pow(10.0, -ex) : std::pow(10.0, ex);
        std::vector<Complex> pts{I * radius};
        const int pieces = std::max(1, int(std::ceil(std::abs(std::log(target_r / radius)) / std::log(1.5))));
        for (int s = 1; s <= pieces; ++s) pts.push_back(I * (radius * std::pow(target_r / radius, double(s) / pieces)));
        st = integrate_lift(pr, {pts, st.p.w, 0}, st.F);
        radius = target_r;
        const DeSitterPoint x = desitter_sample(st.F);
        fit.samples.push_back(x.x);
        lx.push_back(std::log(std::abs(x.x[0])));
        ly.push_back(std::log(std::hypot(x.x[1], x.x[2])));
        fit.x3_over_x0 = x.x[3] / x.x[0];
    }
    const LineFit lf = fit_line(lx, ly);
    fit.slope = lf.slope;
    fit.r2 = lf.r2;
    fit.relative_error = std::abs(fit.slope - fit.target) / fit.target;
    fit.inconclusive = lf.r2 < 0.999;
    return fit;
}

// ---------------------------------------------------------------------------
// de Sitter meshes

struct DeSitterMesh {
    int nu = 0, nv = 0;
    std::vector<DeSitterPoint> vertices;
    std::vector<std::array<int, 4>> quads;
    double max_norm_defect = 0.0;
};

/// Same path scheme as the maxface mesh: base -> grid(0,0) -> along the
/// first row -> down each column, carrying F instead of the integral of Phi.
inline DeSitterMesh desitter_mesh(const AdmissiblePair& pr, const Mat2& b, const GridSpec& g) {
    if (g.nu < 2 || g.nv < 2) throw ValidationError("desitter_mesh: need at least a 2x2 grid");
    DeSitterMesh mesh;
    mesh.nu = g.nu;
    mesh.nv = g.nv;
    mesh.vertices.resize(std::size_t(g.nu) * g.nv);
    const SurfacePoint o = pr.data.base;
    const double piece = 0.05;
    const std::vector<Complex> lead = detail::grid_lead(o.z, g, piece);
    std::vector<LiftState> row(g.nv);
    row[0] = integrate_lift(pr, {lead, g.base_w ? *g.base_w : o.w, 0}, b);
    for (int j = 1; j < g.nv; ++j) {
        std::vector<Complex> pts{detail::grid_point(g, 0, j - 1)};
        if (g.kind == GridSpec::Kind::Polar) {
            const double da = (g.v1 - g.v0) / (g.nv - 1), a0 = std::arg(pts[0]);
            const int steps = std::max(1, int(std::ceil(std::abs(da) * g.u0 / piece)));
            for (int s = 1; s <= steps; ++s) pts.push_back(std::polar(g.u0, a0 + da * s / steps));
        } else {
            detail::append_refined(pts, detail::grid_point(g, 0, j), piece);
        }
        row[j] = integrate_lift(pr, {pts, row[j - 1].p.w, 0}, row[j - 1].F);
    }
    auto column = [&](int j) {
        LiftState st = row[j];
        mesh.vertices[j] = desitter_sample(st.F);
        for (int i = 1; i < g.nu; ++i) {
            std::vector<Complex> pts{detail::grid_point(g, i - 1, j)};
            detail::append_refined(pts, detail::grid_point(g, i, j), piece);
            st = integrate_lift(pr, {pts, st.p.w, 0}, st.F);
            mesh.vertices[std::size_t(i) * g.nv + j] = desitter_sample(st.F);
        }
    };
    const int jobs = std::max(1, std::min(g.jobs, g.nv));
    if (jobs == 1) {
        for (int j = 0; j < g.nv; ++j) column(j);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (int th = 0; th < jobs; ++th)
            pool.emplace_back([&, th] {
                try {
                    for (int j = th; j < g.nv; j += jobs) column(j);
                } catch (...) {
                    errors[th] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    for (const auto& v : mesh.vertices) mesh.max_norm_defect = std::max(mesh.max_norm_defect, std::abs(v.lorentz_norm - 1));
    for (int i = 0; i + 1 < g.nu; ++i)
        for (int j = 0; j + 1 < g.nv; ++j)
            mesh.quads.push_back({i * g.nv + j, (i + 1) * g.nv + j, (i + 1) * g.nv + j + 1, i * g.nv + j + 1});
    return mesh;
}

/// PLY with x0..x3 and a preview position (x1, x2, x3) / (1 + x0 - min x0).
inline void write_desitter_ply(std::ostream& os, const DeSitterMesh& m) {
    double shift = 0.0;
    if (!m.vertices.empty()) {
        shift = m.vertices.front().x[0];
        for (const auto& v : m.vertices) shift = std::min(shift, v.x[0]);
    }
    os.precision(12);
    os << "ply\nformat ascii 1.0\n";
    os << "comment de Sitter coordinates x0 x1 x2 x3 with -x0^2+x1^2+x2^2+x3^2 = 1\n";
    os << "comment preview x y z = (x1, x2, x3) / (1 + x0 - m), m = min x0 = " << shift << "\n";
    os << "element vertex " << m.vertices.size() << "\n";
    os << "property double x\nproperty double y\nproperty double z\n";
    os << "property double x0\nproperty double x1\nproperty double x2\nproperty double x3\n";
    os << "element face " << m.quads.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (const auto& v : m.vertices) {
        const double s = 1.0 / (1.0 + v.x[0] - shift);
        os << v.x[1] * s << " " << v.x[2] * s << " " << v.x[3] * s << " " << v.x[0] << " " << v.x[1] << " " << v.x[2]
           << " " << v.x[3] << "\n";
    }
    for (const auto& q : m.quads) os << "4 " << q[0] << " " << q[1] << " " << q[2] << " " << q[3] << "\n";
}

} // namespace maxface
