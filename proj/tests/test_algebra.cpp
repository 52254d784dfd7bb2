#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "maxface/algebra.hpp"
#include "maxface/quadrature.hpp"
#include "maxface/schwarzian.hpp"

using namespace maxface;

namespace {

Mat2 random_sl2(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat2 a{{n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}};
    return a * (1.0 / std::sqrt(a.det()));
}

Mat2 random_su11(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-pi, pi);
    std::uniform_real_distribution<double> s(0.0, 1.5);
    // exp of a boost times a rotation
    const double r = s(rng);
    const Complex q = std::cosh(r) * std::polar(1.0, u(rng));
    const Complex p = std::sinh(r) * std::polar(1.0, u(rng));
    return {q, p, std::conj(p), std::conj(q)};
}

Mat2 random_su2(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    double v[4] = {n(rng), n(rng), n(rng), n(rng)};
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
    const Complex a{v[0] / len, v[1] / len}, b{v[2] / len, v[3] / len};
    return {a, -std::conj(b), b, std::conj(a)};
}

} // namespace

TEST(Moebius, IdentityFixesEveryPoint) {
    EXPECT_EQ(moebius_apply(e0(), Complex(5, 2)), Complex(5, 2));
}

TEST(Moebius, InversionSendsOneToMinusOne) {
    const Mat2 a{0.0, -1.0, 1.0, 0.0};
    EXPECT_NEAR(std::abs(moebius_apply(a, Complex(1.0)) - Complex(-1.0)), 0.0, 1e-15);
}

TEST(Moebius, DiagonalPhaseActsByRotation) {
    const Complex psi = std::polar(1.0, pi / 4);
    const Mat2 s2 = Mat2::diag(std::pow(psi, -2), std::pow(psi, 2));
    for (Complex h : {Complex(0.3, 0.2), Complex(-2, 1), Complex(7, -3)})
        EXPECT_NEAR(std::abs(moebius_apply(s2, h) + h), 0.0, 1e-14);
}

TEST(Moebius, InfinityIsHandledProjectively) {
    const Mat2 a{2.0, 1.0, 1.0, 1.0};
    const ExtComplex img = moebius_apply(a, ExtComplex::infinity());
    EXPECT_FALSE(img.infinite);
    EXPECT_NEAR(std::abs(img.value - 2.0), 0.0, 1e-15);
    EXPECT_TRUE(moebius_apply(a, ExtComplex{Complex(-1.0)}).infinite);
    EXPECT_THROW(moebius_apply(a, Complex(-1.0)), DegenerateError);
}

TEST(Moebius, ActionIsAHomomorphism) {
    std::mt19937 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Mat2 a = random_sl2(rng), b = random_sl2(rng);
        const Complex h{n(rng), n(rng)};
        const Complex lhs = moebius_apply(a * b, h);
        const Complex rhs = moebius_apply(a, moebius_apply(b, h));
        EXPECT_LT(std::abs(lhs - rhs), 1e-9 * (1 + std::abs(lhs)));
    }
}

TEST(GroupDefect, IdentityAndDiagonalPhasesAreMembers) {
    EXPECT_EQ(su11_defect(e0()).defect, 0.0);
    for (double t : {0.1, 1.3, -2.7}) EXPECT_LT(su11_defect(Mat2::diag(std::polar(1.0, t), std::polar(1.0, -t))).defect, 1e-15);
}

TEST(GroupDefect, OffDiagonalSignDecidesMembership) {
    const double q = std::sqrt(2.0), s = 1.0;
    const Mat2 member{q, I * s, -I * s, q};
    const Mat2 flipped{q, I * s, I * s, q};
    EXPECT_LT(su11_defect(member).defect, 1e-14);
    EXPECT_GT(su11_defect(flipped).defect, 1.0);
}

TEST(GroupDefect, MembershipSurvivesConjugationBySU11) {
    std::mt19937 rng(11);
    for (int i = 0; i < 100; ++i) {
        const Mat2 a = random_su11(rng), h = random_su11(rng);
        EXPECT_LT(su11_defect(a).defect, 1e-13);
        EXPECT_LT(su11_defect(h * a * h.inverse()).defect, 1e-9);
    }
}

TEST(GroupDefect, DefectIsInvariantUnderUnitarySU11Conjugation) {
    // the compact part of SU(1,1) (diagonal phases) preserves the Frobenius defect exactly
    std::mt19937 rng(12);
    for (int i = 0; i < 100; ++i) {
        const Mat2 a = random_sl2(rng);
        const double t = 0.37 * i;
        const Mat2 h = Mat2::diag(std::polar(1.0, t), std::polar(1.0, -t));
        EXPECT_NEAR(su11_defect(h * a * h.inverse()).defect, su11_defect(a).defect, 1e-10);
    }
}

TEST(GroupDefect, SU2AndUnimodular) {
    std::mt19937 rng(3);
    EXPECT_LT(su2_defect(random_su2(rng)).defect, 1e-14);
    EXPECT_GT(su2_defect(random_su11(rng) * random_su11(rng)).defect, 0.0);
    EXPECT_LT(unimodular_defect(random_sl2(rng)).defect, 1e-13);
}

TEST(MatPower, FirstPowerIsTheMatrix) {
    const Mat2 a = Mat2::diag(std::polar(1.0, 0.4), std::polar(1.0, -0.4));
    EXPECT_LT(distance(mat_power_trig(a, 1), a), 1e-15);
}

TEST(MatPower, DiagonalRotationCubed) {
    const double t = 0.7;
    const Mat2 a = Mat2::diag(std::polar(1.0, t), std::polar(1.0, -t));
    EXPECT_LT(distance(mat_power_trig(a, 3), Mat2::diag(std::polar(1.0, 3 * t), std::polar(1.0, -3 * t))), 1e-14);
}

TEST(MatPower, RandomSU2SeventhPowerMatchesProduct) {
    std::mt19937 rng(5);
    const Mat2 a = random_su2(rng);
    Mat2 p = e0();
    for (int i = 0; i < 7; ++i) p = p * a;
    EXPECT_LT(distance(mat_power_trig(a, 7), p), 1e-12);
}

TEST(MatPower, HundredRandomEllipticElements) {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> m(1, 20);
    for (int i = 0; i < 100; ++i) {
        const Mat2 h = random_sl2(rng);
        const double t = 0.2 + 2.7 * (i / 100.0);
        const Mat2 a = h * Mat2::diag(std::polar(1.0, t), std::polar(1.0, -t)) * h.inverse();
        const int mm = m(rng);
        EXPECT_LT(distance(mat_power_trig(a, mm), mat_pow(a, mm)), 1e-10 * (1 + frobenius(mat_pow(a, mm))));
    }
}

TEST(MatPower, HyperbolicElementsAreRejected) {
    EXPECT_THROW(mat_power_trig(Mat2::diag(2.0, 0.5), 3), ValidationError);
    EXPECT_THROW(mat_power_trig(e0(), 3), ValidationError);
}

TEST(Quadrature, ConstantIntegrand) {
    const auto r = quad_singular([](double, double) { return 1.0; }, {0, 0, 1e-13, 12});
    EXPECT_NEAR(r.value, 1.0, 1e-13);
}

TEST(Quadrature, InverseSquareRoot) {
    const auto r = quad_singular([](double t, double) { return 1.0 / std::sqrt(t); }, {-0.5, 0, 1e-12, 12});
    EXPECT_NEAR(r.value, 2.0, 1e-11);
}

TEST(Quadrature, BetaOracleViaLogGamma) {
    // int t^{-1/2} (1 - t^2)^{-1/2} = (1/2) B(1/4, 1/2)
    const double oracle = 0.5 * std::exp(std::lgamma(0.25) + std::lgamma(0.5) - std::lgamma(0.75));
    EXPECT_NEAR(oracle, 2.62205755, 1e-8);
    const auto r = quad_singular([](double t, double u) { return 1.0 / std::sqrt(t * u * (1.0 + t)); },
                                 {-0.5, -0.5, 1e-12, 12});
    EXPECT_NEAR(r.value, oracle, 1e-10);
}

TEST(Quadrature, HalvingToleranceNeverIncreasesTheEstimate) {
    auto f = [](double t, double u) { return std::pow(t, -0.75) * std::pow(u, -0.3); };
    double last = 1e300;
    for (double tol = 1e-4; tol > 1e-12; tol *= 0.5) {
        const auto r = quad_singular(f, {-0.75, -0.3, tol, 14});
        EXPECT_LE(r.error_estimate, last);
        EXPECT_LE(r.error_estimate, tol);
        last = r.error_estimate;
    }
}

TEST(Quadrature, NonConvergenceCarriesTheLastEstimate) {
    try {
        quad_singular([](double t, double) { return std::sin(1.0 / t) / t; }, {-0.99, 0, 1e-14, 3});
        FAIL() << "expected QuadratureError";
    } catch (const QuadratureError& e) {
        EXPECT_TRUE(std::isfinite(e.estimate));
    }
}

TEST(Quadrature, RejectsNonIntegrableExponents) {
    EXPECT_THROW(quad_singular([](double, double) { return 1.0; }, {-1.0, 0, 1e-10, 5}), ValidationError);
}

TEST(Quadrature, GaussKronrodComplexExponential) {
    const Complex v = integrate_gk<Complex>([](double s) { return std::exp(Complex(0, s)); }, 0.0, pi, 1e-13, 0.0);
    EXPECT_LT(std::abs(v - Complex(0, 2)), 1e-13);
}

TEST(Schwarzian, MoebiusMapsHaveZeroSchwarzian) {
    std::mt19937 rng(2);
    for (int i = 0; i < 10; ++i) {
        const Mat2 a = random_sl2(rng);
        const Complex z{0.3, 0.4};
        if (std::abs(a.a21 * z + a.a22) < 0.5) continue;
        const Complex s = schwarzian_fd([&](Complex x) { return moebius_apply(a, x); }, z);
        EXPECT_LT(std::abs(s), 1e-5);
    }
}

TEST(Schwarzian, SquareMap) {
    const Complex s = schwarzian_fd([](Complex z) { return z * z; }, 1.0);
    EXPECT_NEAR(s.real(), -1.5, 1e-6);
    EXPECT_NEAR(s.imag(), 0.0, 1e-6);
}

TEST(Schwarzian, PowerMapMatchesLocalModel) {
    for (double nu : {0.5, 1.07703, 2.5}) {
        const Complex s = schwarzian_fd([nu](Complex z) { return std::pow(z, nu); }, 1.0, 1e-2);
        EXPECT_NEAR(s.real(), (1 - nu * nu) / 2, 1e-7);
    }
}

TEST(Schwarzian, VanishingDerivativeIsDegenerate) {
    EXPECT_THROW(schwarzian_fd([](Complex) { return Complex(3.0); }, 0.5), DegenerateError);
}
