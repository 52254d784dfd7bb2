#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "maxface/weierstrass.hpp"

using namespace maxface;

namespace {

SurfacePoint random_point(const WeierstrassData& d, std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.5);
    Complex z;
    bool near = true;
    while (near) {
        z = {n(rng), n(rng)};
        near = std::abs(z) < 0.1;
        for (const auto& p : d.punctures)
            if (!p.infinite && std::abs(z - p.z) < 0.1) near = true;
        for (Complex b : d.cover.branch_points())
            if (std::abs(z - b) < 0.1) near = true;
    }
    if (d.cover.family == CoverFamily::Planar) return {z, 1.0};
    const auto fiber = solve_fiber(d.cover, z);
    return {z, fiber[std::uniform_int_distribution<int>(0, d.cover.degree() - 1)(rng)]};
}

std::vector<WeierstrassData> whole_catalog() {
    std::vector<WeierstrassData> all;
    for (const auto& e : catalog_list()) all.push_back(catalog_get(e.name));
    all.push_back(catalog_get("genus_k", {{"k", 3}}));
    all.push_back(catalog_get("genus_k_reduced", {{"k", 4}}));
    return all;
}

} // namespace

TEST(Catalog, EveryListedEntryResolves) {
    const auto list = catalog_list();
    EXPECT_EQ(list.size(), 8u);
    for (const auto& e : list) {
        const WeierstrassData d = catalog_get(e.name, e.defaults);
        EXPECT_EQ(d.name, e.name);
        EXPECT_FALSE(e.constraints.empty());
    }
}

TEST(Catalog, ParameterRangesAreEnforced) {
    EXPECT_THROW(catalog_get("trinoid-1", {{"a", 0.4}}), ValidationError);
    EXPECT_THROW(catalog_get("trinoid-2", {{"c", 1.0}}), ValidationError);
    EXPECT_THROW(catalog_get("trinoid-2", {{"c", -0.5}}), ValidationError);
    EXPECT_THROW(catalog_get("cone", {{"a", 2.0}}), ValidationError);
    EXPECT_THROW(catalog_get("cone", {{"a", 4.5}}), ValidationError);
    EXPECT_THROW(catalog_get("genus_k", {{"k", 0}}), ValidationError);
    EXPECT_THROW(catalog_get("genus_k", {{"k", 1.5}}), ValidationError);
    EXPECT_THROW(catalog_get("genus_k_reduced", {{"k", 3}}), ValidationError);
    EXPECT_THROW(catalog_get("enneper"), ValidationError);
}

TEST(Catalog, TrinoidParameterB) {
    const WeierstrassData d = catalog_get("trinoid-1", {{"a", 3.67}});
    const double a = 3.67;
    EXPECT_NEAR(d.params.at("b"), -a * a + a * std::sqrt(4 * a * a - 1), 1e-12);
}

TEST(Catalog, GenusKUsesTheClosingConstant) {
    const WeierstrassData d = catalog_get("genus_k", {{"k", 1}});
    const auto [A, B] = AkBk_beta(1);
    EXPECT_NEAR(d.params.at("c"), std::sqrt(B / (2 * A)), 1e-10);
    EXPECT_NEAR(d.params.at("c"), 1.04603, 1e-4);
    EXPECT_DOUBLE_EQ(catalog_get("genus_k", {{"k", 2}, {"c", 1.3}}).params.at("c"), 1.3);
}

TEST(Catalog, DerivativesMatchFiniteDifferences) {
    std::mt19937 rng(31);
    for (const auto& d : whole_catalog()) {
        for (int i = 0; i < 10; ++i) {
            const SurfacePoint p = random_point(d, rng);
            const double h = 1e-5;
            auto at = [&](Complex z) {
                const Complex w = d.cover.family == CoverFamily::Planar ? Complex{0.0} : segment_w(d.cover, p.z, p.w, z);
                return d.at(z, w);
            };
            const LocalData v = at(p.z), vp = at(p.z + h), vm = at(p.z - h);
            const double scale = 1 + std::abs(v.G) + std::abs(v.dG);
            EXPECT_LT(std::abs((vp.G - vm.G) / (2 * h) - v.dG), 1e-6 * scale) << d.name;
            EXPECT_LT(std::abs((vp.dG - vm.dG) / (2 * h) - v.d2G), 1e-5 * (scale + std::abs(v.d2G))) << d.name;
            EXPECT_LT(std::abs((vp.eta - vm.eta) / (2 * h) - v.deta), 1e-6 * (1 + std::abs(v.deta))) << d.name;
        }
    }
}

TEST(PhiForm, CatenoidAtOne) {
    const CVec3 p = phi_form(catalog_get("catenoid"), 1.0, 0.0);
    EXPECT_LT(std::abs(p[0] - Complex(-2.0)), 1e-15);
    EXPECT_LT(std::abs(p[1] - Complex(2.0)), 1e-15);
    EXPECT_LT(std::abs(p[2]), 1e-15);
}

TEST(PhiForm, NullAtRandomPointsOfEveryEntry) {
    std::mt19937 rng(8);
    for (const auto& d : whole_catalog())
        for (int i = 0; i < 50; ++i) {
            const SurfacePoint p = random_point(d, rng);
            EXPECT_LT(null_residual(phi_form(d, p.z, p.w)), 1e-12) << d.name;
        }
}

TEST(PhiForm, GenusOneAtTheBasePoint) {
    const WeierstrassData d = genus_k_data(1, 1.0);
    const LocalData v = d.at(d.base);
    EXPECT_NEAR(v.G.real(), std::sqrt(6.0) / 2, 1e-14);
    EXPECT_NEAR(v.G.imag(), 0.0, 1e-14);
    EXPECT_LT(null_residual(phi_form(v)), 1e-14);
}

TEST(PhiForm, PoleIsReported) {
    EXPECT_THROW(phi_form(catalog_get("catenoid"), 0.0, 0.0), DegenerateError);
}

TEST(PhiForm, MetricVanishesExactlyOnTheUnitLevel) {
    const WeierstrassData d = catalog_get("catenoid");
    EXPECT_EQ(metric_factor(d.at(std::polar(1.0, 0.7))), 0.0);
    EXPECT_GT(metric_factor(d.at(1.2)), 0.0);
}

TEST(PhiForm, QuarterTurnOfEtaTurnsCatenoidIntoHelicoid) {
    const WeierstrassData cat = rotate_eta(catalog_get("catenoid"), pi / 2), hel = catalog_get("helicoid");
    std::mt19937 rng(1);
    for (int i = 0; i < 20; ++i) {
        const SurfacePoint p = random_point(hel, rng);
        const CVec3 a = phi_form(cat, p.z, 0.0), b = phi_form(hel, p.z, 0.0);
        for (int c = 0; c < 3; ++c) EXPECT_LT(std::abs(a[c] - b[c]), 1e-14 * (1 + std::abs(b[c])));
    }
}

TEST(Immersion, ConstantPathIsTheOrigin) {
    const WeierstrassData d = catalog_get("genus_k", {{"k", 2}});
    const ImmersionSample s = integrate_immersion(d, {{d.base.z}, d.base.w});
    for (double x : s.f) EXPECT_EQ(x, 0.0);
}

TEST(Immersion, CatenoidUnitCircleMapsToOnePoint) {
    const WeierstrassData d = catalog_get("catenoid");
    for (double theta : {0.5, 1.7, 3.0, 5.5}) {
        const SurfacePath arc{circle_polyline(0.0, 1.0, theta / (2 * pi), 64), 1.0};
        const ImmersionSample s = integrate_immersion(d, arc);
        for (double x : s.f) EXPECT_NEAR(x, 0.0, 1e-10);
        EXPECT_NEAR(s.metric, 0.0, 1e-12);
    }
}

TEST(Immersion, GenusOneTimeCoordinateIsLogarithmic) {
    const WeierstrassData d = catalog_get("genus_k", {{"k", 1}});
    const double c = d.params.at("c");
    for (double r : {3.0, 5.0, 9.0}) {
        const SurfacePath ray{{2.0, Complex(r)}, d.base.w};
        const ImmersionSample s = integrate_immersion(d, ray);
        EXPECT_NEAR(s.f[0], -2 * c * std::log(r / 2.0), 1e-9);
        // x0 is constant along |z| = r
        const SurfacePath around{circle_polyline(0.0, r, 0.3), s.p.w};
        EXPECT_NEAR(integrate_immersion(d, around).f[0], 0.0, 1e-9);
    }
}

TEST(Immersion, PathIndependenceWhenPeriodsClose) {
    for (int k = 1; k <= 3; ++k) {
        const WeierstrassData d = catalog_get("genus_k", {{"k", double(k)}});
        const Complex target{0.3, 1.4};
        SurfacePath direct{{d.base.z, target}, d.base.w};
        const SurfacePath g = gamma_loop(d.cover, d.base);
        SurfacePath detour = g;
        detour.z.push_back(target);
        const Vec3 a = integrate_immersion(d, direct).f, b = integrate_immersion(d, detour).f;
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(a[c], b[c], 1e-8) << "k=" << k;
    }
}

TEST(Ends, GenusKEndsAreComplete) {
    for (int k = 1; k <= 3; ++k) {
        const auto rep = completeness_report(catalog_get("genus_k", {{"k", double(k)}}));
        ASSERT_EQ(rep.size(), 2u);
        for (const auto& e : rep) {
            EXPECT_TRUE(e.G_unbounded) << e.label;
            EXPECT_TRUE(e.complete);
            EXPECT_EQ(e.order_G2_eta, -(k + 1));
        }
    }
}

TEST(Ends, CatenoidEndsAreComplete) {
    const auto rep = completeness_report(catalog_get("catenoid"));
    ASSERT_EQ(rep.size(), 2u);
    EXPECT_LT(rep[0].G_abs_limit, 1e-3);
    EXPECT_TRUE(rep[1].G_unbounded);
    EXPECT_TRUE(rep[0].complete && rep[1].complete);
}

TEST(Ends, UnitGaussLimitIsFlagged) {
    const Poly z{0.0, 1.0};
    const WeierstrassData d = detail::rational_data("synthetic", Rational{Poly{1.0, 1.0}, Poly{1.0}},
                                                    Rational{Poly{1.0}, z * z}, {{0.0, false, "0"}}, {}, 1.0);
    const auto rep = completeness_report(d);
    ASSERT_EQ(rep.size(), 1u);
    EXPECT_FALSE(rep[0].complete);
}

TEST(Orders, GenusKTable) {
    for (int k = 1; k <= 3; ++k) {
        const auto rows = order_table(catalog_get("genus_k", {{"k", double(k)}}));
        ASSERT_EQ(rows.size(), 5u);
        // (0,0) and (inf,inf)
        for (int r : {0, 1}) {
            EXPECT_EQ(rows[r].G, -k);
            EXPECT_EQ(rows[r].eta, k - 1);
            EXPECT_EQ(rows[r].G_eta, -1);
            EXPECT_EQ(rows[r].G2_eta, -k - 1);
            EXPECT_EQ(rows[r].Q, -2);
        }
        // (1,0) and (-1,0)
        for (int r : {2, 3}) {
            EXPECT_EQ(rows[r].G, k);
            EXPECT_EQ(rows[r].eta, 0);
            EXPECT_EQ(rows[r].G_eta, k);
            EXPECT_EQ(rows[r].G2_eta, 2 * k);
            EXPECT_EQ(rows[r].Q, k - 1);
        }
        EXPECT_EQ(rows[4].G, 0);
        EXPECT_EQ(rows[4].eta, 0);
        EXPECT_EQ(rows[4].Q, 1);
    }
}

TEST(Orders, AmbiguousSlopeIsAnError) {
    EXPECT_THROW(fit_order([](Complex q) { return std::pow(q, 1.5); }), NumericalError);
    EXPECT_EQ(fit_order([](Complex q) { return 3.0 * q * q; }).order, 2);
}

TEST(Degree, GenusKIsTwiceK) {
    for (int k = 1; k <= 3; ++k) {
        const DegreeReport r = gauss_degree(catalog_get("genus_k", {{"k", double(k)}}));
        EXPECT_EQ(r.by_roots, 2 * k);
        EXPECT_EQ(r.by_poles, 2 * k);
    }
}

TEST(Degree, RationalEntries) {
    EXPECT_EQ(gauss_degree(catalog_get("catenoid")).by_roots, 1);
    EXPECT_EQ(gauss_degree(catalog_get("catenoid")).by_poles, 1);
    EXPECT_EQ(gauss_degree(catalog_get("trinoid-1")).by_roots, 2);
    EXPECT_EQ(gauss_degree(catalog_get("cone")).by_roots, 3);
    EXPECT_EQ(gauss_degree(catalog_get("cone")).by_poles, 3);
}

TEST(Degree, ReducedDataPullsBackToTheFullGaussMap) {
    // G = G_1 o (z^2, z w) and the projection has degree 2, so 2 deg G_1 = deg G = 2k
    for (int k : {2, 4}) {
        const WeierstrassData full = genus_k_data(k, 1.2), red = genus_k_reduced_data(k, 1.2);
        const SurfacePoint p{Complex(0.7, 0.9), solve_fiber(full.cover, Complex(0.7, 0.9))[1]};
        const SurfacePoint q = double_cover_project(full.cover, p);
        EXPECT_LT(std::abs(full.at(p).G - red.at(q).G), 1e-12);
        const DegreeReport r = gauss_degree(red);
        EXPECT_EQ(r.by_roots, k);
        EXPECT_EQ(r.by_poles, k);
    }
}

TEST(Osserman, EqualityCases) {
    const auto g1 = osserman_check(catalog_get("genus_k", {{"k", 1}}), 2);
    EXPECT_TRUE(g1.equality);
    EXPECT_EQ(g1.lhs, 4);
    const auto cat = osserman_check(catalog_get("catenoid"), 1);
    EXPECT_TRUE(cat.equality);
    EXPECT_EQ(cat.genus, 0);
    const auto red = osserman_check(catalog_get("genus_k_reduced", {{"k", 2}}), 2);
    EXPECT_TRUE(red.equality);
    const auto g3 = osserman_check(catalog_get("genus_k", {{"k", 3}}), 6);
    EXPECT_TRUE(g3.holds);
    EXPECT_FALSE(g3.equality);
}

TEST(Mesh, CountsAndIndexing) {
    GridSpec g;
    g.nu = g.nv = 10;
    const Mesh m = mesh_sample(catalog_get("catenoid"), g);
    EXPECT_EQ(m.vertices.size(), 100u);
    EXPECT_EQ(m.quads.size(), 81u);
    EXPECT_THROW(mesh_sample(catalog_get("catenoid"), GridSpec{GridSpec::Kind::Polar, 0.5, 2, 0, 1, 1, 5, std::nullopt, 1}),
                 ValidationError);
}

TEST(Mesh, CatenoidAnnulusIsRotational) {
    GridSpec g;
    g.u0 = 0.5;
    g.u1 = 2.0;
    g.nu = 7;
    g.nv = 12;
    g.jobs = 3;
    const Mesh m = mesh_sample(catalog_get("catenoid"), g);
    double lo = 1e9, hi = -1e9;
    for (int i = 0; i < g.nu; ++i) {
        const double r = std::abs(m.vertices[i * g.nv].p.z);
        const double rad0 = std::hypot(m.vertices[i * g.nv].f[1], m.vertices[i * g.nv].f[2]);
        for (int j = 0; j < g.nv; ++j) {
            const auto& v = m.vertices[i * g.nv + j];
            EXPECT_NEAR(v.f[0], -2 * std::log(r), 1e-9);
            EXPECT_NEAR(std::hypot(v.f[1], v.f[2]), rad0, 1e-9);
            lo = std::min(lo, v.f[0]);
            hi = std::max(hi, v.f[0]);
        }
    }
    EXPECT_NEAR(lo, -2 * std::log(2.0), 1e-9);
    EXPECT_NEAR(hi, 2 * std::log(2.0), 1e-9);
}

TEST(Mesh, ParallelAndSerialAgree) {
    GridSpec g;
    g.u0 = 1.5;
    g.u1 = 3.0;
    g.nu = 5;
    g.nv = 6;
    g.v0 = 0.2;
    g.v1 = 1.4;
    const WeierstrassData d = catalog_get("genus_k", {{"k", 1}});
    const Mesh a = mesh_sample(d, g);
    g.jobs = 4;
    const Mesh b = mesh_sample(d, g);
    for (std::size_t i = 0; i < a.vertices.size(); ++i)
        for (int c = 0; c < 3; ++c) EXPECT_EQ(a.vertices[i].f[c], b.vertices[i].f[c]);
}

TEST(Mesh, ObjAndPlyWriters) {
    GridSpec g;
    g.nu = 3;
    g.nv = 4;
    const Mesh m = mesh_sample(catalog_get("catenoid"), g);
    std::ostringstream obj, ply;
    write_obj(obj, m);
    write_ply(ply, m);
    const std::string o = obj.str(), p = ply.str();
    EXPECT_NE(o.find("v x1 x2 x0"), std::string::npos);
    EXPECT_EQ(std::count(o.begin(), o.end(), '\n'), 2 + 12 + 6);
    EXPECT_NE(p.find("property double metric_factor"), std::string::npos);
    EXPECT_NE(p.find("element vertex 12"), std::string::npos);
    EXPECT_NE(p.find("element face 6"), std::string::npos);
}
