#include <gtest/gtest.h>

#include <dmin/splitnum.hpp>

#include "support.hpp"

using namespace dmin;
using dmin::test::close;

TEST(SplitNum, NullBasisProducts) {
    EXPECT_EQ(q_unit * qbar_unit, DNum(0.0));
    EXPECT_EQ(j_unit * j_unit, DNum(1.0));
    EXPECT_EQ(DNum(1, 1) * DNum(1, -1), DNum(0.0));
    EXPECT_EQ(q_unit * q_unit, q_unit);
    EXPECT_EQ(qbar_unit * qbar_unit, qbar_unit);
}

TEST(SplitNum, NullDecompose) {
    auto [a1, b1] = null_decompose(j_unit);
    EXPECT_EQ(a1, -1.0);
    EXPECT_EQ(b1, 1.0);
    auto [a2, b2] = null_decompose(DNum(1.0));
    EXPECT_EQ(a2, 1.0);
    EXPECT_EQ(b2, 1.0);
    auto [a3, b3] = null_decompose(DNum(2, 3));
    EXPECT_EQ(a3, -1.0);
    EXPECT_EQ(b3, 5.0);
}

TEST(SplitNum, ModulusSq) {
    EXPECT_EQ(modulus_sq(DNum(2, 1)), 3.0);
    EXPECT_EQ(modulus_sq(q_unit), 0.0);
    EXPECT_TRUE(close(modulus_sq(exp_j(1.7)), 1.0, 1e-12));
}

TEST(SplitNum, PolarExamples) {
    PolarForm p = polar_decompose(DNum(2.0));
    EXPECT_EQ(p.delta, DNum(1.0));
    EXPECT_DOUBLE_EQ(p.rho, 2.0);
    EXPECT_DOUBLE_EQ(p.theta, 0.0);

    p = polar_decompose(DNum(-1.0));
    EXPECT_EQ(p.delta, DNum(-1.0));
    EXPECT_DOUBLE_EQ(p.rho, 1.0);
    EXPECT_DOUBLE_EQ(p.theta, 0.0);

    // Null components (-3, 5): j t has components (3, 5) and e^{j theta} = (e^-theta, e^theta).
    p = polar_decompose(null_compose(-3.0, 5.0));
    EXPECT_EQ(p.delta, j_unit);
    EXPECT_TRUE(close(p.rho, 3.872983346207417, 1e-15));
    EXPECT_TRUE(close(p.theta, 0.25541281188299536, 1e-15));

    EXPECT_THROW(polar_decompose(q_unit), NullDivisorError);
    EXPECT_THROW(polar_decompose(DNum(1.0, 1.0 - 1e-12)), NullDivisorError);
}

TEST(SplitNum, Exp) {
    const double th = 0.8;
    EXPECT_TRUE(close(exp(DNum(0.0, th)), DNum(std::cosh(th), std::sinh(th)), 1e-15));
    EXPECT_EQ(exp(DNum(0.0)), DNum(1.0));
    EXPECT_TRUE(close(exp(q_unit), 2.718281828459045 * q_unit + qbar_unit, 1e-15));
}

TEST(SplitNum, FourthRoot) {
    EXPECT_EQ(fourth_root_dplus(DNum(1.0)), DNum(1.0));
    EXPECT_TRUE(close(fourth_root_dplus(DNum(16.0)), DNum(2.0), 1e-15));
    const double th = 0.3;
    EXPECT_TRUE(close(fourth_root_dplus(exp_j(4 * th)), exp_j(th), 1e-14));
    EXPECT_THROW(fourth_root_dplus(j_unit), DomainError);
    EXPECT_THROW(fourth_root_dplus(DNum(-1.0)), DomainError);
}

TEST(SplitNum, Invert) {
    EXPECT_EQ(invert(DNum(2.0)), DNum(0.5));
    EXPECT_EQ(invert(j_unit), j_unit);
    EXPECT_THROW(invert(q_unit), NullDivisorError);
}

TEST(SplitNum, TextRoundTrip) {
    EXPECT_EQ(to_string(DNum(1.5, 2)), "1.5+j2");
    EXPECT_EQ(to_string(DNum(-0.25, -3)), "-0.25-j3");
    EXPECT_EQ(to_string(DNum(0.1, 0)), "0.1+j0");
    EXPECT_EQ(parse_dnum("1.5+j2"), DNum(1.5, 2));
    EXPECT_EQ(parse_dnum("-0.25-j3"), DNum(-0.25, -3));
    EXPECT_EQ(parse_dnum("j"), j_unit);
    EXPECT_EQ(parse_dnum("-j2"), DNum(0, -2));
    EXPECT_EQ(parse_dnum("3"), DNum(3.0));
    EXPECT_EQ(parse_dnum("1e-3+j1e2"), DNum(1e-3, 1e2));
    EXPECT_THROW(parse_dnum("1+2"), ParseError);
    EXPECT_THROW(parse_dnum("1+j-2"), ParseError);
    EXPECT_THROW(parse_dnum(""), ParseError);

    test::Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const DNum x = rng.dnum(-1e6, 1e6) * DNum(rng.uniform(1e-9, 1.0));
        EXPECT_EQ(parse_dnum(to_string(x)), x);
    }
}

// ---- properties ----------------------------------------------------------

TEST(SplitNumProperty, MultiplicationIsComponentwiseOnNullBasis) {
    test::Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const DNum x = rng.dnum(-10, 10), y = rng.dnum(-10, 10);
        const auto [xa, xb] = null_decompose(x);
        const auto [ya, yb] = null_decompose(y);
        const auto [pa, pb] = null_decompose(x * y);
        ASSERT_TRUE(close(pa, xa * ya, 1e-12));
        ASSERT_TRUE(close(pb, xb * yb, 1e-12));
        // u^2 - v^2 cancels, so the reference scale is the squared magnitude.
        const double sx = abs_max(x) * abs_max(x), sy = abs_max(y) * abs_max(y);
        ASSERT_LE(std::fabs(modulus_sq(x * y) - modulus_sq(x) * modulus_sq(y)), 1e-12 * sx * sy);
        ASSERT_LE(std::fabs(modulus_sq(x) - xa * xb), 1e-12 * sx);
        const auto [ca, cb] = null_decompose(conj(x));
        ASSERT_EQ(ca, xb);
        ASSERT_EQ(cb, xa);
        ASSERT_TRUE(close(null_compose(null_decompose(x)), x, 1e-15));
    }
}

TEST(SplitNumProperty, PolarRoundTrip) {
    test::Rng rng(12);
    const DNum deltas[4] = {DNum(1.0), DNum(-1.0), j_unit, -j_unit};
    for (int i = 0; i < 10000; ++i) {
        const PolarForm in{deltas[rng.pick(4)], rng.uniform(1e-3, 1e3), rng.uniform(-10, 10)};
        const DNum t = from_polar(in);
        const PolarForm out = polar_decompose(t);
        ASSERT_EQ(out.delta, in.delta);
        ASSERT_LE(abs_max(from_polar(out) - t), 1e-10 * abs_max(t));
        ASSERT_TRUE(in_dplus(out.rho * exp_j(out.theta)));
        // |theta| <= 10 keeps e^{-2|theta|} above tau0, i.e. off the null cone. The small
        // null component survives the (re, im) storage only while e^{2|theta|} << 1/eps.
        if (std::fabs(in.theta) <= 5.0) {
            ASSERT_LE(std::fabs(out.rho - in.rho) / in.rho, 1e-10);
            ASSERT_LE(std::fabs(out.theta - in.theta), 1e-10 * std::fmax(1.0, std::fabs(in.theta)));
        }
    }
    for (int i = 0; i < 10000; ++i) {
        const DNum t = rng.dnum(-100, 100);
        if (on_null_cone(t)) continue;
        ASSERT_LE(abs_max(from_polar(polar_decompose(t)) - t), 1e-12 * abs_max(t));
    }
}

TEST(SplitNumProperty, FourthRootCorrect) {
    test::Rng rng(13);
    for (int i = 0; i < 10000; ++i) {
        const DNum x = rng.dplus(1e-6, 1e6);
        const DNum r = fourth_root_dplus(x);
        ASSERT_TRUE(in_dplus(r));
        ASSERT_LE(abs_max(r * r * r * r - x), 1e-12 * abs_max(x));
    }
}

TEST(SplitNumProperty, InverseIsExactOnNullComponents) {
    test::Rng rng(14);
    for (int i = 0; i < 10000; ++i) {
        const DNum x = rng.dnum(-10, 10);
        if (on_null_cone(x)) continue;
        ASSERT_TRUE(close(x * invert(x), DNum(1.0), 1e-12));
    }
}
