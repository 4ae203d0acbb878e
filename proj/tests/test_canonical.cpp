#include <gtest/gtest.h>

#include <dmin/canonical.hpp>

#include "support.hpp"

using namespace dmin;
using dmin::test::close;
using dmin::test::rel_err;

namespace {

const Rect s2_region{0.25, 0.75, 1.0, 2.0};

double grid_max(const Rect& r, int n, const std::function<double(DNum)>& f) {
    double m = 0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) m = std::fmax(m, f(r.node(i, k, n, n)));
    return m;
}

}  // namespace

TEST(Canonical, CumulativeTable) {
    const CumulativeTable s([](double x) { return 1 + x * x; }, 0.0, 2.0, 0.5);
    for (double x : {0.0, 0.3, 1.0, 1.7, 2.0}) {
        const double exact = x + x * x * x / 3 - (0.5 + 0.125 / 3);
        EXPECT_NEAR(s(x), exact, 1e-13);
        EXPECT_NEAR(s.inverse(exact), x, 1e-13);
    }
    EXPECT_THROW(s.inverse(10.0), DomainError);
}

TEST(Canonical, S1IsAlreadyCanonical) {
    const SurfacePatch s1 = surface_s1();
    const CanonicalMap m = build_canonical_map(s1, s1.domain(), j_unit);
    EXPECT_EQ(m.epsilon, DNum(1.0));
    EXPECT_FALSE(m.pre_conjugation);
    EXPECT_LE(grid_max(s1.domain(), 11, [&](DNum t) { return abs_max(m.forward(t) - (t - j_unit)); }), 1e-13);

    const SurfacePatch c = reparametrize(s1, m);
    EXPECT_LE(grid_max(c.domain(), 11, [&](DNum s) { return abs_max(c.phi(s) - s1.phi(s + j_unit)); }), 1e-12);
}

TEST(Canonical, S2ThirdTypeRegion) {
    const SurfacePatch s2 = surface_s2();
    const CanonicalMap m = build_canonical_map(s2, s2_region, s2_region.center());
    EXPECT_EQ(m.epsilon, j_unit);
    EXPECT_FALSE(m.pre_conjugation);
    // eps Phi'^2 = j 2t has null components (2(v-u), 2(u+v)), both positive here.
    for (int k = 0; k < 5; ++k) {
        const DNum t = s2_region.node(k, 4 - k, 5, 5);
        const auto [a, b] = null_decompose(m.rate(t));
        EXPECT_TRUE(close(a, std::pow(2 * (t.im - t.re), 0.25), 1e-14));
        EXPECT_TRUE(close(b, std::pow(2 * (t.re + t.im), 0.25), 1e-14));
    }
    const SurfacePatch c = reparametrize(s2, m);
    EXPECT_GT(c.domain().u1 - c.domain().u0, 0.1);
    EXPECT_GT(c.domain().v1 - c.domain().v0, 0.1);
    EXPECT_LE(grid_max(c.domain(), 21, [&](DNum s) {
                  const Vec4D d = c.jet(s, 1).d1;
                  return abs_max(dot(d, d) - j_unit);
              }),
              1e-7);
    EXPECT_LE(grid_max(c.domain(), 21, [&](DNum s) {
                  const Curvatures k = curvatures(c, s);
                  return rel_err(metric(c, s), -std::pow(std::fabs(k.K * k.K - k.kappa * k.kappa), -0.25));
              }),
              1e-6);

    EXPECT_LE(grid_max(s2_region, 11, [&](DNum t) { return abs_max(m.inverse(m.forward(t)) - t); }), 1e-10);
}

TEST(Canonical, PreConjugation) {
    const Rect neg{0.25, 0.75, -2.0, -1.0};
    const SurfacePatch s2 = surface_s2(neg);
    const CanonicalMap m = build_canonical_map(s2, neg, DNum(0.5, -1.5));
    EXPECT_TRUE(m.pre_conjugation);
    EXPECT_EQ(m.epsilon, j_unit);
    EXPECT_EQ(m.forward(DNum(0.5, -1.5)), DNum(0.0));
    const SurfacePatch c = reparametrize(m);
    EXPECT_LE(grid_max(c.domain(), 11, [&](DNum s) {
                  const Vec4D d = c.jet(s, 1).d1;
                  return abs_max(dot(d, d) - j_unit);
              }),
              1e-7);
    EXPECT_EQ(c.history().front().kind, "reflect");
}

TEST(Canonical, RegionErrors) {
    const SurfacePatch wide = surface_s2({0.25, 2.0, -2.0, 2.0});
    EXPECT_THROW(build_canonical_map(wide, {0.3, 0.7, 0.11, 0.91}, DNum(0.5, 0.5)), MixedTypeError);
    EXPECT_THROW(build_canonical_map(wide, {0.5, 1.5, 0.5, 1.5}, DNum(1.0, 0.7)), DegeneratePointError);
    EXPECT_THROW(build_canonical_map(surface_s2(), {0.25, 0.75, 1.0, 3.0}, DNum(0.5, 1.5)), DomainError);
}

TEST(Canonical, HomothetyScalesMap) {
    const SurfacePatch s2 = surface_s2();
    const SurfacePatch k4(s2.phi_curve()->scaled(DNum(4.0)), s2.domain(), "4S2");
    const DNum t0 = s2_region.center();
    const CanonicalMap m = build_canonical_map(s2, s2_region, t0);
    const CanonicalMap mk = build_canonical_map(k4, s2_region, t0);
    EXPECT_LE(grid_max(s2_region, 11, [&](DNum t) { return abs_max(mk.forward(t) - 2.0 * m.forward(t)); }), 1e-10);
}

TEST(Canonical, Uniqueness) {
    const SurfacePatch s2 = surface_s2();
    const CanonicalMap m1 = build_canonical_map(s2, s2_region, DNum(0.5, 1.5), 1e-10);
    const CanonicalMap m2 = build_canonical_map(s2, s2_region, DNum(0.3, 1.2), 1e-13);
    const DNum c = m2.forward(s2_region.center()) - m1.forward(s2_region.center());
    EXPECT_LE(grid_max(s2_region, 21, [&](DNum t) { return abs_max(m2.forward(t) - m1.forward(t) - c); }), 1e-7);

    // Canonicalizing a canonical patch gives s = t + c.
    const SurfacePatch p = reparametrize(m1);
    const Rect inner = p.domain();
    const CanonicalMap again = build_canonical_map(p, inner, inner.center());
    const DNum c2 = again.forward(inner.u0 + DNum(0, inner.v0)) - (inner.u0 + DNum(0, inner.v0));
    EXPECT_LE(grid_max(inner, 9, [&](DNum s) { return abs_max(again.forward(s) - s - c2); }), 1e-7);
}

TEST(Canonical, FrameS1) {
    const SurfacePatch s1 = surface_s1();
    const CanonicalFrame f = canonical_frame(s1, j_unit);
    EXPECT_EQ(f.epsilon, DNum(1.0));
    EXPECT_EQ(f.delta, j_unit);
    EXPECT_NEAR(f.phi_angle, 0.0, 1e-12);
    EXPECT_TRUE(close(f.c1 * f.c2, DNum(1.0), 1e-12));
    EXPECT_LE(abs_max(f.beta), 1e-8);
    EXPECT_LE(abs_max(reconstruct_normal(f) - phi_prime_normal(point_data(s1, j_unit))), 1e-12);
    const MetricAngle ea = fields_from_curvatures(1.0, 0.0);
    EXPECT_EQ(ea.E, -1.0);
    EXPECT_EQ(ea.phi_angle, 0.0);
    EXPECT_EQ(ea.E, metric(s1, j_unit));
}

TEST(Canonical, FieldsFromCurvatures) {
    const MetricAngle a = fields_from_curvatures(0.0, 1.0);
    EXPECT_EQ(a.E, -1.0);
    EXPECT_EQ(a.phi_angle, 0.0);
    EXPECT_THROW(fields_from_curvatures(1.0, 1.0), DegeneratePointError);
    EXPECT_THROW(fields_from_curvatures(0.0, 0.0), DegeneratePointError);
}

TEST(Canonical, FrameRejectsNonCanonical) {
    EXPECT_THROW(canonical_frame(surface_s2(), DNum(0.5, 1.5)), ValidationError);
}

// ---- properties ----------------------------------------------------------

TEST(CanonicalProperty, FrameIdentitiesOnCanonicalS2) {
    const SurfacePatch c = reparametrize(build_canonical_map(surface_s2(), s2_region, s2_region.center()));
    const int n = 7;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const DNum s = c.domain().node(i, k, n, n);
            const CanonicalFrame f = canonical_frame(c, s);
            const PointData d = point_data(c, s);
            const NormalFrame nf = normal_frame(d);
            ASSERT_NEAR(dot(f.m1, f.m1), 0.0, 1e-9);
            ASSERT_NEAR(dot(f.m2, f.m2), 0.0, 1e-9);
            ASSERT_NEAR(dot(f.m1, f.m2), 0.5, 1e-9);
            ASSERT_NEAR(det4(nf.X1, nf.X2, f.m1, f.m2), 0.5, 1e-9);
            ASSERT_EQ(f.epsilon, j_unit);
            ASSERT_LE(abs_max(reconstruct_normal(f) - phi_prime_normal(d)), 1e-9 * abs_max(phi_prime_normal(d)));
            const Curvatures cv = curvatures(c, s);
            const DNum rhs = -1.0 * conj(f.epsilon) * modulus_sq(f.delta) * exp_j(f.phi_angle) / (d.E * d.E);
            ASSERT_TRUE(close(DNum(cv.K, cv.kappa), rhs, 1e-8));
            const MetricAngle ea = fields_from_curvatures(cv.K, cv.kappa);
            ASSERT_TRUE(close(ea.E, d.E, 1e-8));
            ASSERT_NEAR(ea.phi_angle, f.phi_angle, 1e-8);
        }
}

TEST(CanonicalProperty, FrameIndependentOfSeed) {
    const SurfacePatch c = reparametrize(build_canonical_map(surface_s2(), s2_region, s2_region.center()));
    test::Rng rng(51);
    for (int n = 0; n < 20; ++n) {
        const DNum s = c.domain().node(rng.pick(9), rng.pick(9), 9, 9);
        const Motion m = test::random_motion(rng, true);
        const CanonicalFrame a = canonical_frame_pointwise(point_data(c, s));
        const CanonicalFrame b = canonical_frame_pointwise(point_data(c, s), m.matrix);
        ASSERT_NEAR(a.phi_angle, b.phi_angle, 1e-8);
        ASSERT_EQ(a.delta, b.delta);
        ASSERT_LE(abs_max(a.m1 - b.m1), 1e-8 * abs_max(a.m1));
        ASSERT_LE(abs_max(a.m2 - b.m2), 1e-8 * abs_max(a.m2));
    }
}
