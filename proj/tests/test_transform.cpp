#include <gtest/gtest.h>

#include <dmin/transform.hpp>

#include "support.hpp"

using namespace dmin;
using dmin::test::close;

namespace {

const Rect s2_wide{0.25, 2.0, -2.0, 2.0};

Motion flip_x1() { return make_motion({MotionStep::flip(1)}); }

}  // namespace

TEST(Transform, AssociatedFamily) {
    const SurfacePatch s1 = surface_s1();
    const SurfacePatch same = associated(s1, 0.0);
    EXPECT_EQ(same.phi(DNum(0.3, 1.1)), s1.phi(DNum(0.3, 1.1)));
    EXPECT_EQ(same.history().back().kind, "associated");

    const SurfacePatch a = associated(s1, 1.0);
    test::Rng rng(61);
    for (int n = 0; n < 10; ++n) {
        const DNum t{rng.uniform(-1, 1), rng.uniform(0.5, 2)};
        const InvariantSample x = classify(s1, t), y = classify(a, t);
        EXPECT_TRUE(close(y.E, x.E, 1e-12));
        EXPECT_TRUE(close(y.K, x.K, 1e-9));
        EXPECT_NEAR(y.kappa, x.kappa, 1e-9);
    }
    EXPECT_TRUE(check_law(s1, a).pass(1e-9));

    // Canonical coordinates of M_theta: t = e^{-j theta/2} s, i.e. s = e^{j theta/2} (t - t0).
    const CanonicalMap m = build_canonical_map(a, s1.domain(), j_unit);
    EXPECT_EQ(m.epsilon, DNum(1.0));
    for (const DNum t : {DNum(0.2, 1.0), DNum(-0.5, 1.5), DNum(0.9, 0.6)})
        EXPECT_LE(abs_max(m.forward(t) - exp_j(0.5) * (t - j_unit)), 1e-9);
}

TEST(Transform, Conjugate) {
    const SurfacePatch s1 = surface_s1();
    const SurfacePatch c = conjugate(s1);
    EXPECT_EQ(c.domain().u0, 0.5);
    EXPECT_EQ(c.domain().v1, 1.0);
    const SurfacePatch cc = conjugate(c);
    EXPECT_LE(abs_max(cc.phi(DNum(0.2, 0.8)) - s1.phi(DNum(0.2, 0.8))), 1e-14);
    // js = v + j u, so K^(s) = -1 / Im(js)^4 = -1 / u^4.
    for (const DNum s : {DNum(0.7, 0.1), DNum(1.5, -0.8), DNum(2.0, 0.4)})
        EXPECT_TRUE(close(curvatures(c, s).K, -1.0 / std::pow(s.re, 4), 1e-12));
    EXPECT_LT(metric(c, DNum(0.7, 0.1)), 0.0);
    EXPECT_TRUE(check_law(s1, c).pass(1e-9));
    const SurfacePatch s2 = surface_s2();
    EXPECT_TRUE(check_law(s2, conjugate(s2)).pass(1e-9));
    // Psi^ = j Psi(js) still integrates Phi^.
    const DNum s{0.9, 0.3};
    const double h = 1e-5;
    const Vec4D d = (1.0 / (2 * h)) * ((*c.psi())(s + DNum(h)) - (*c.psi())(s - DNum(h)));
    EXPECT_LE(abs_max(d - c.phi(s)), 1e-8);
}

TEST(Transform, Motion) {
    const SurfacePatch s2 = surface_s2();
    const Motion shift = make_motion(identity_matrix(), {1, 2, 3, 4});
    const SurfacePatch m0 = apply_motion(s2, shift);
    EXPECT_TRUE(check_law(s2, m0).pass(1e-12));
    EXPECT_LE(abs_max(re((*m0.psi())(DNum(0.5, 1.5)) - (*s2.psi())(DNum(0.5, 1.5))) - Vec4{1, 2, 3, 4}), 1e-14);

    const Motion f = flip_x1();
    EXPECT_EQ(f.det_sign, -1);
    const SurfacePatch m1 = apply_motion(s2, f);
    const DNum t{0.5, 1.0};
    EXPECT_TRUE(close(curvatures(m1, t).kappa, -curvatures(s2, t).kappa, 1e-12));
    EXPECT_TRUE(close(curvatures(m1, t).K, curvatures(s2, t).K, 1e-12));
    EXPECT_TRUE(check_law(s2, m1, 11, -1).pass(1e-9));
    EXPECT_FALSE(check_law(s2, m1, 11, +1).pass(1e-9));

    const SurfacePatch s1 = surface_s1();
    EXPECT_TRUE(check_law(s1, apply_motion(s1, f), 11, -1).pass(1e-9));
    EXPECT_THROW(apply_motion(s2, concrete_anti_isometry()), KindError);
}

TEST(Transform, AntiIsometry) {
    const SurfacePatch s1 = surface_s1();
    const Motion a = concrete_anti_isometry();
    const SurfacePatch x = apply_anti_isometry(s1, a);
    const DNum s = x.domain().center();
    const InvariantSample c = classify(x, s);
    EXPECT_EQ(c.type, SurfaceType::second);
    EXPECT_TRUE(close(c.phi_prime_sq, DNum(-1.0), 1e-12));
    EXPECT_TRUE(check_law(s1, x, 11, a.det_sign).pass(1e-9));

    const SurfacePatch s2 = surface_s2();
    const SurfacePatch y = apply_anti_isometry(s2, a);
    for (int k = 0; k < 5; ++k) EXPECT_EQ(classify(y, y.domain().node(k, 4 - k, 5, 5)).type, SurfaceType::third);
    EXPECT_TRUE(check_law(s2, y, 11, a.det_sign).pass(1e-9));
    const Motion af = compose(a, flip_x1());
    EXPECT_EQ(af.det_sign, -a.det_sign);
    EXPECT_TRUE(check_law(s2, apply_anti_isometry(s2, af), 11, af.det_sign).pass(1e-9));
    EXPECT_THROW(apply_anti_isometry(s2, flip_x1()), KindError);
}

TEST(Transform, Homothety) {
    const SurfacePatch s1 = surface_s1();
    EXPECT_EQ(homothety(s1, 1.0).phi(DNum(0.1, 0.9)), s1.phi(DNum(0.1, 0.9)));
    const SurfacePatch h = homothety(s1, 2.0);
    EXPECT_TRUE(close(curvatures(h, j_unit).K, 0.25, 1e-14));
    EXPECT_TRUE(check_law(s1, h, 11, 1, 2.0).pass(1e-10));
    EXPECT_THROW(homothety(s1, 0.0), ParamError);
    EXPECT_THROW(homothety(s1, -1.0), ParamError);
    // t = s / sqrt(k) on the scaled surface.
    const CanonicalMap m = build_canonical_map(homothety(s1, 4.0), s1.domain(), j_unit);
    EXPECT_LE(abs_max(m.forward(DNum(0.3, 1.4)) - 2.0 * (DNum(0.3, 1.4) - j_unit)), 1e-12);
}

TEST(Transform, MBarA) {
    const SurfacePatch s1 = surface_s1();
    const Motion a = concrete_anti_isometry();
    ASSERT_EQ(a.det_sign, 1);
    const SurfacePatch x = m_bar_a(s1, a);
    EXPECT_TRUE(check_law(s1, x).pass(1e-9));
    const InvariantSample c = classify(x, j_unit);
    EXPECT_EQ(c.type, SurfaceType::second);
    EXPECT_TRUE(close(c.K, 1.0, 1e-12));
    EXPECT_NEAR(c.kappa, 0.0, 1e-12);
    EXPECT_TRUE(close(c.phi_prime_sq, DNum(-1.0), 1e-12));
    const InvariantSample twice = classify(m_bar_a(x, a), j_unit);
    EXPECT_EQ(twice.type, SurfaceType::first);
    EXPECT_TRUE(close(twice.phi_prime_sq, DNum(1.0), 1e-12));

    const SurfacePatch s2 = surface_s2();
    EXPECT_TRUE(check_law(s2, m_bar_a(s2, a)).pass(1e-9));
    EXPECT_THROW(m_bar_a(s1, compose(a, flip_x1())), DetError);
    EXPECT_THROW(m_bar_a(s1, flip_x1()), KindError);
}

TEST(Transform, RescaleParameter) {
    const SurfacePatch s1 = surface_s1();
    const SurfacePatch r = rescale_parameter(s1, 2.0);
    EXPECT_EQ(r.domain().v0, 0.25);
    EXPECT_TRUE(close(curvatures(r, DNum(0.1, 0.5)).K, curvatures(s1, DNum(0.2, 1.0)).K, 1e-12));
    EXPECT_TRUE(close(metric(r, DNum(0.1, 0.5)), 4 * metric(s1, DNum(0.2, 1.0)), 1e-12));
    EXPECT_EQ(r.history().back().substitution, "t=2s");
}

// ---- properties ----------------------------------------------------------

TEST(TransformProperty, StrongIsometryFamily) {
    test::Rng rng(62);
    const Motion a = concrete_anti_isometry();
    for (const SurfacePatch& p : {surface_s1(), surface_s2()}) {
        for (int n = 0; n < 10; ++n) {
            const double th = rng.uniform(-2, 2);
            const SurfacePatch mt = associated(p, th);
            const SurfacePatch mb = m_bar_a(mt, a);
            for (int q = 0; q < 10; ++q) {
                const DNum t = p.domain().node(rng.pick(11), rng.pick(11), 11, 11);
                const InvariantSample x = classify(p, t);
                for (const SurfacePatch* y : {&mt, &mb}) {
                    const InvariantSample z = classify(*y, t);
                    const double ks = std::fmax(1.0, std::fabs(x.K));
                    ASSERT_LE(std::fabs(z.E - x.E), 1e-9 * std::fmax(1.0, std::fabs(x.E)));
                    ASSERT_LE(std::fabs(z.K - x.K), 1e-9 * ks);
                    ASSERT_LE(std::fabs(z.kappa - x.kappa), 1e-9 * ks);
                }
            }
        }
    }
}

TEST(TransformProperty, DegenerateLocusMapsAsPredicted) {
    const SurfacePatch s2 = surface_s2(s2_wide);
    const Motion a = concrete_anti_isometry();
    // Points on u = v and u = -v of the source.
    const DNum on[4] = {DNum(1.0, 1.0), DNum(0.5, 0.5), DNum(1.5, -1.5), DNum(0.7, -0.7)};
    const SurfacePatch same_t[4] = {associated(s2, 0.7), apply_motion(s2, flip_x1()), homothety(s2, 3.0),
                                    m_bar_a(s2, a)};
    for (const DNum t : on) {
        ASSERT_EQ(classify(s2, t).type, SurfaceType::degenerate);
        for (const auto& p : same_t) EXPECT_EQ(classify(p, t).type, SurfaceType::degenerate) << p.label();
        // t = js: the lines u = +-v map to u_s = +-v_s.
        const DNum s{t.im, t.re};
        EXPECT_EQ(classify(conjugate(s2), s).type, SurfaceType::degenerate);
        EXPECT_EQ(classify(apply_anti_isometry(s2, a), s).type, SurfaceType::degenerate);
    }
    EXPECT_NE(classify(conjugate(s2), DNum(1.0, 0.5)).type, SurfaceType::degenerate);
}

TEST(TransformProperty, MotionGroupClosure) {
    test::Rng rng(63);
    for (int n = 0; n < 200; ++n) {
        const bool aa = rng.pick(2), ab = rng.pick(2);
        const Motion x = test::random_motion(rng, false, aa), y = test::random_motion(rng, false, ab);
        const Motion z = compose(x, y);
        const Motion check = make_motion(z.matrix, z.translation);  // re-validates M^T G M = +-G
        ASSERT_EQ(check.kind, aa == ab ? MotionKind::isometry : MotionKind::anti_isometry);
        ASSERT_EQ(check.det_sign, x.det_sign * y.det_sign);
    }
}
