#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "maxface/cover.hpp"

using namespace maxface;

namespace {

SurfacePoint random_point(const CoverSpec& spec, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.5);
    std::uniform_int_distribution<int> sheet(0, spec.degree() - 1);
    Complex z;
    do z = {n(rng), n(rng)};
    while (std::abs(z) < 0.1 || std::abs(z - 1.0) < 0.1 || std::abs(z + 1.0) < 0.1);
    const auto fiber = solve_fiber(spec, z);
    return {z, fiber[sheet(rng)]};
}

} // namespace

TEST(Fiber, GenusOneOverTwo) {
    // w^2 = 2 (2^2 - 1) = 6
    const auto f = solve_fiber(CoverSpec::full(1), 2.0);
    ASSERT_EQ(f.size(), 2u);
    for (Complex w : f) EXPECT_NEAR(std::abs(w), std::sqrt(6.0), 1e-12);
    EXPECT_NEAR(std::abs(f[0] + f[1]), 0.0, 1e-12);
}

TEST(Fiber, RealRootOverTwoForEveryGenus) {
    for (int k = 1; k <= 6; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        const auto f = solve_fiber(spec, 2.0);
        ASSERT_EQ(f.size(), std::size_t(k + 1));
        const double oracle = std::exp((std::log(2.0) + k * std::log(3.0)) / (k + 1));
        EXPECT_NEAR(std::abs(f[0] - oracle), 0.0, 1e-12 * oracle);
        for (Complex w : f) EXPECT_LT(spec.residual(2.0, w), 1e-14);
    }
    EXPECT_NEAR(solve_fiber(CoverSpec::full(2), 2.0)[0].real(), std::cbrt(18.0), 1e-12);
}

TEST(Fiber, DegeneratesTowardZero) {
    for (int k = 1; k <= 4; ++k)
        for (Complex w : solve_fiber(CoverSpec::full(k), 1e-8)) EXPECT_LT(std::abs(w), 1.01 * std::pow(1e-8, 1.0 / (k + 1)));
}

TEST(Fiber, BranchPointIsRejected) {
    EXPECT_THROW(solve_fiber(CoverSpec::full(1), 1.0), BranchPointError);
    EXPECT_THROW(CoverSpec::reduced(3), ValidationError);
    EXPECT_THROW(CoverSpec::full(0), ValidationError);
}

TEST(Continuation, LoopAroundOneMultipliesByRootOfUnity) {
    for (int k = 1; k <= 4; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        const SurfacePoint o = base_point(spec);
        const SurfacePath loop{circle_polyline(1.0, 1.5, 1.0), nearest_root(spec, 1.5, o.w)};
        const SurfacePoint end = continue_path(spec, loop);
        const Complex expected = loop.w0 * std::polar(1.0, 2 * pi * k / (k + 1.0));
        EXPECT_LT(std::abs(end.w - expected), 1e-9 * std::abs(loop.w0)) << "k=" << k;
    }
}

TEST(Continuation, LoopAroundZeroMultipliesByRootOfUnity) {
    for (int k = 1; k <= 4; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        const Complex z0{0.4, 0.0};
        const Complex w0 = solve_fiber(spec, z0)[0];
        const SurfacePoint end = continue_path(spec, {circle_polyline(0.0, z0, 1.0), w0});
        EXPECT_LT(std::abs(end.w - w0 * std::polar(1.0, 2 * pi / (k + 1.0))), 1e-9 * std::abs(w0));
    }
}

TEST(Continuation, ExactSegmentFormulaAgreesWithTracking) {
    const CoverSpec spec = CoverSpec::full(3);
    const SurfacePoint o = base_point(spec);
    const SurfacePath g = gamma_loop(spec, o);
    const auto ws = lift_path(spec, g);
    for (std::size_t i = 1; i < g.z.size(); ++i) {
        const Complex exact = segment_w(spec, g.z[i - 1], ws[i - 1], g.z[i]);
        EXPECT_LT(std::abs(exact - ws[i]), 1e-9 * (1 + std::abs(ws[i])));
    }
}

TEST(Continuation, PathFollowedByReverseReturnsToStart) {
    const CoverSpec spec = CoverSpec::full(2);
    const SurfacePoint o = base_point(spec);
    SurfacePath g = gamma_loop(spec, o);
    const std::vector<Complex> half(g.z.begin(), g.z.begin() + 81);
    SurfacePath there_and_back{half, o.w};
    for (auto it = half.rbegin() + 1; it != half.rend(); ++it) there_and_back.z.push_back(*it);
    EXPECT_LT(std::abs(continue_path(spec, there_and_back).w - o.w), 1e-10);
}

TEST(Continuation, RerouteAvoidsBranchPoints) {
    const CoverSpec spec = CoverSpec::full(1);
    const SurfacePath straight{{Complex(0.5, 0.0), Complex(1.5, 0.0)}, solve_fiber(spec, 0.5)[0]};
    const SurfacePath detoured = reroute(spec, straight);
    EXPECT_GT(detoured.z.size(), 2u);
    for (std::size_t i = 1; i < detoured.z.size(); ++i)
        EXPECT_GE(detail::point_segment_distance(1.0, detoured.z[i - 1], detoured.z[i]), 0.99 * spec.clearance());
    EXPECT_NO_THROW(continue_path(spec, detoured));
    EXPECT_THROW(reroute(spec, {{Complex(1.01, 0.0), 2.0}, 1.0}), BranchPointError);
}

TEST(Generators, GenusOneHasFourClosedLoops) {
    const CoverSpec spec = CoverSpec::full(1);
    const auto loops = generator_loops(spec, base_point(spec));
    ASSERT_EQ(loops.size(), 4u);
    for (const auto& l : loops) {
        EXPECT_LT(std::abs(l.front() - l.back()), 1e-14);
        EXPECT_LT(std::abs(continue_path(spec, l).w - l.w0), 1e-9 * std::abs(l.w0));
    }
}

TEST(Generators, LoopsCloseForHigherGenus) {
    for (int k = 2; k <= 5; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        const auto loops = generator_loops(spec, base_point(spec));
        ASSERT_EQ(loops.size(), std::size_t(2 * (k + 1)));
        for (const auto& l : loops) EXPECT_LT(std::abs(continue_path(spec, l).w - l.w0), 1e-9 * std::abs(l.w0));
    }
}

TEST(Generators, GammaEnclosesZeroAndOneOnly) {
    const CoverSpec spec = CoverSpec::full(1);
    const SurfacePath g = gamma_loop(spec, base_point(spec));
    EXPECT_NEAR(winding_number(g.z, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(winding_number(g.z, 1.0), 1.0, 1e-12);
    EXPECT_NEAR(winding_number(g.z, -1.0), 0.0, 1e-12);
}

TEST(Generators, KappaTwoImageIsOnTheCover) {
    const CoverSpec spec = CoverSpec::full(3);
    const SurfacePoint o = base_point(spec);
    const SurfacePoint q = kappa2(spec, o);
    EXPECT_EQ(q.z, Complex(-2.0));
    EXPECT_LT(spec.residual(q.z, q.w), 1e-13);
}

TEST(Generators, BasePointMustSitOnThePositiveRay) {
    const CoverSpec spec = CoverSpec::full(1);
    EXPECT_THROW(base_point(spec, 0.5), ValidationError);
    SurfacePoint o = base_point(spec);
    o.w = -o.w;
    EXPECT_THROW(gamma_loop(spec, o), ValidationError);
    EXPECT_THROW(gamma_loop(CoverSpec::reduced(2), base_point(CoverSpec::reduced(2))), ValidationError);
}

TEST(Reflections, AreInvolutionsPreservingTheCover) {
    std::mt19937 rng(4);
    for (int k = 1; k <= 4; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        for (int i = 0; i < 50; ++i) {
            const SurfacePoint p = random_point(spec, rng);
            for (int j = 1; j <= 4; ++j) {
                const SurfacePoint q = reflection_apply(spec, j, p);
                EXPECT_LT(spec.residual(q.z, q.w), 1e-10) << "k=" << k << " mu" << j;
                const SurfacePoint back = reflection_apply(spec, j, q);
                EXPECT_LT(std::abs(back.z - p.z) + std::abs(back.w - p.w), 1e-10 * (1 + std::abs(p.w)));
                EXPECT_LT(std::abs(reflection_z(j, p.z) - q.z), 1e-14 * (1 + std::abs(q.z)));
            }
        }
    }
}

TEST(Reflections, KappaRelations) {
    std::mt19937 rng(9);
    for (int k = 1; k <= 5; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        for (int i = 0; i < 50; ++i) {
            const SurfacePoint p = random_point(spec, rng);
            const SurfacePoint a = kappa1(spec, p, k + 1);
            EXPECT_LT(std::abs(a.w - p.w), 1e-12 * std::abs(p.w));
            const SurfacePoint b = kappa1(spec, p);
            const SurfacePoint b2 = reflection_apply(spec, 2, reflection_apply(spec, 1, p));
            EXPECT_LT(std::abs(b.w - b2.w) + std::abs(b.z - b2.z), 1e-12 * std::abs(p.w));
            const SurfacePoint c = kappa2(spec, p);
            const SurfacePoint c2 = reflection_apply(spec, 3, reflection_apply(spec, 1, p));
            EXPECT_LT(std::abs(c.w - c2.w) + std::abs(c.z - c2.z), 1e-12 * std::abs(p.w));
            // kappa_2 squared is kappa_1
            const SurfacePoint cc = kappa2(spec, c);
            EXPECT_LT(std::abs(cc.w - b.w) + std::abs(cc.z - b.z), 1e-12 * std::abs(p.w));
        }
    }
}

TEST(DeckWords, BasePathsEndAtTheReflectedBasePoint) {
    for (int k = 1; k <= 4; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        const SurfacePoint o = base_point(spec);
        for (int j = 1; j <= 3; ++j) {
            const SurfacePath p = reflection_base_path(spec, j, o);
            const SurfacePoint target = reflection_apply(spec, j, o);
            EXPECT_LT(std::abs(p.back() - target.z), 1e-12);
            // mu_j maps the path onto itself traversed backwards
            for (std::size_t v = 0; v < p.z.size(); ++v)
                EXPECT_LT(std::abs(reflection_z(j, p.z[v]) - p.z[p.z.size() - 1 - v]), 1e-12);
        }
    }
}

TEST(DeckWords, ContinuationRealisesTheWord) {
    for (int k = 1; k <= 4; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        const SurfacePoint o = base_point(spec);
        for (std::vector<int> letters : {std::vector<int>{2, 1}, {1, 2}, {3, 1}, {1, 3}, {3, 2}, {2, 3},
                                          {2, 1, 3, 1}, {3, 2, 1, 3}}) {
            const DeckWord word{letters};
            const SurfacePoint end = continue_path(spec, deck_word_path(spec, word, o));
            const SurfacePoint image = apply_word(spec, letters, letters.size(), o);
            EXPECT_LT(std::abs(end.z - image.z) + std::abs(end.w - image.w), 1e-8 * std::abs(o.w))
                << "k=" << k << " word starting " << letters[0] << letters[1];
        }
    }
}

TEST(DeckWords, RelatorsGiveClosedLoopsWithTheExpectedWinding) {
    for (int k = 1; k <= 3; ++k) {
        const CoverSpec spec = CoverSpec::full(k);
        const SurfacePoint o = base_point(spec);
        const SurfacePath r21 = deck_word_path(spec, DeckWord::repeat({2, 1}, k + 1), o);
        EXPECT_NEAR(winding_number(r21.z, 1.0), k + 1.0, 1e-9);
        EXPECT_LT(std::abs(continue_path(spec, r21).w - o.w), 1e-8 * std::abs(o.w));

        const SurfacePath tau0 = deck_word_path(spec, DeckWord::repeat({3, 2}, 2 * (k + 1)), o);
        EXPECT_NEAR(winding_number(tau0.z, 0.0), k + 1.0, 1e-9);
        EXPECT_NEAR(winding_number(tau0.z, 1.0), 0.0, 1e-9);
        EXPECT_NEAR(winding_number(tau0.z, -1.0), 0.0, 1e-9);
        EXPECT_LT(std::abs(continue_path(spec, tau0).w - o.w), 1e-8 * std::abs(o.w));

        const SurfacePath tauinf = deck_word_path(spec, DeckWord::repeat({1, 3}, 2 * (k + 1)), o);
        EXPECT_NEAR(winding_number(tauinf.z, 0.0), -(k + 1.0), 1e-9);
        EXPECT_LT(std::abs(continue_path(spec, tauinf).w - o.w), 1e-8 * std::abs(o.w));
    }
}

TEST(DeckWords, EmptyAndOddWords) {
    const CoverSpec spec = CoverSpec::full(1);
    const SurfacePoint o = base_point(spec);
    const SurfacePath empty = deck_word_path(spec, DeckWord{}, o);
    EXPECT_EQ(empty.z.size(), 1u);
    EXPECT_EQ(continue_path(spec, empty).w, o.w);
    EXPECT_THROW(deck_word_path(spec, DeckWord{{1, 2, 3}}, o), ValidationError);
    EXPECT_THROW(deck_word_path(spec, DeckWord{{1, 4}}, o), ValidationError);
}

TEST(Quotient, ProjectionLandsOnTheReducedCover) {
    std::mt19937 rng(21);
    for (int k : {2, 4, 6}) {
        const CoverSpec full = CoverSpec::full(k), red = CoverSpec::reduced(k);
        for (int i = 0; i < 30; ++i) {
            const SurfacePoint p = random_point(full, rng);
            const SurfacePoint q = double_cover_project(full, p);
            EXPECT_LT(red.residual(q.z, q.w), 1e-10);
            // (z, w) and (-z, -w) have the same image
            const SurfacePoint anti = double_cover_project(full, {-p.z, -p.w});
            EXPECT_LT(std::abs(anti.z - q.z) + std::abs(anti.w - q.w), 1e-12 * (1 + std::abs(q.w)));
        }
    }
    EXPECT_THROW(double_cover_project(CoverSpec::full(3), {2.0, 1.0}), ValidationError);
}

TEST(Genus, RiemannHurwitz) {
    EXPECT_EQ(genus_check(CoverSpec::full(1)), 1);
    EXPECT_EQ(genus_check(CoverSpec::full(3)), 3);
    for (int k = 1; k <= 8; ++k) EXPECT_EQ(genus_check(CoverSpec::full(k)), k);
    EXPECT_EQ(genus_check(CoverSpec::reduced(4)), 2);
    EXPECT_EQ(genus_check(CoverSpec::reduced(2)), 1);
    EXPECT_EQ(genus_check(CoverSpec::planar()), 0);
}

TEST(PathCsv, RoundTrip) {
    const CoverSpec spec = CoverSpec::full(2);
    const SurfacePath g = gamma_loop(spec, base_point(spec), 40);
    std::stringstream ss;
    write_path_csv(ss, g);
    const SurfacePath back = read_path_csv(ss);
    ASSERT_EQ(back.z.size(), g.z.size());
    EXPECT_EQ(back.w0, g.w0);
    for (std::size_t i = 0; i < g.z.size(); ++i) EXPECT_EQ(back.z[i], g.z[i]);
    std::stringstream bad("nope\n");
    EXPECT_THROW(read_path_csv(bad), ValidationError);
}
