#pragma once

/// Vector algebra of D^4 with the neutral bilinear form of signature (-,+,-,+),
/// plus isometries and anti-isometries of R^4_2.

#include <array>
#include <cmath>
#include <vector>

#include "splitnum.hpp"

namespace dmin {

using Vec4D = std::array<DNum, 4>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

inline constexpr Vec4 signature{-1.0, 1.0, -1.0, 1.0};

// ---- element-wise arithmetic -------------------------------------------

template <class T>
std::array<T, 4> operator+(const std::array<T, 4>& a, const std::array<T, 4>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]};
}
template <class T>
std::array<T, 4> operator-(const std::array<T, 4>& a, const std::array<T, 4>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]};
}
template <class T>
std::array<T, 4> operator-(const std::array<T, 4>& a) {
    return {-a[0], -a[1], -a[2], -a[3]};
}
template <class T, class S>
std::array<T, 4> operator*(S s, const std::array<T, 4>& a) {
    return {s * a[0], s * a[1], s * a[2], s * a[3]};
}
inline Vec4D operator*(DNum s, const Vec4& a) { return {s * a[0], s * a[1], s * a[2], s * a[3]}; }

inline Vec4D lift(const Vec4& a) { return {DNum(a[0]), DNum(a[1]), DNum(a[2]), DNum(a[3])}; }
inline Vec4D conj(const Vec4D& a) { return {conj(a[0]), conj(a[1]), conj(a[2]), conj(a[3])}; }
inline Vec4 re(const Vec4D& a) { return {a[0].re, a[1].re, a[2].re, a[3].re}; }
inline Vec4 im(const Vec4D& a) { return {a[0].im, a[1].im, a[2].im, a[3].im}; }
inline Vec4D combine(const Vec4& r, const Vec4& i) {
    return {DNum(r[0], i[0]), DNum(r[1], i[1]), DNum(r[2], i[2]), DNum(r[3], i[3])};
}

// ---- bilinear form -------------------------------------------------------

inline DNum dot(const Vec4D& a, const Vec4D& b) {
    return -(a[0] * b[0]) + a[1] * b[1] - a[2] * b[2] + a[3] * b[3];
}
inline double dot(const Vec4& a, const Vec4& b) {
    return -a[0] * b[0] + a[1] * b[1] - a[2] * b[2] + a[3] * b[3];
}

/// a . conj(a), which is real.
inline double norm_sq(const Vec4D& a) {
    const DNum s = dot(a, conj(a));
    double scale = 0.0;
    for (const auto& c : a) scale += c.re * c.re + c.im * c.im;
    if (std::fabs(s.im) > 1e-10 * std::fmax(1.0, scale))
        throw InternalError("norm_sq: imaginary residue in a . conj(a)");
    return s.re;
}

/// ||a||^2 ||b||^2 - |conj(a).b|^2
inline double bivector_norm_sq(const Vec4D& a, const Vec4D& b) {
    return norm_sq(a) * norm_sq(b) - modulus_sq(dot(conj(a), b));
}

/// Largest component magnitude; used for tolerance scales.
inline double abs_max(const Vec4D& a) {
    double m = 0.0;
    for (const auto& c : a) m = std::fmax(m, abs_max(c));
    return m;
}
inline double abs_max(const Vec4& a) {
    double m = 0.0;
    for (double c : a) m = std::fmax(m, std::fabs(c));
    return m;
}

// ---- determinants --------------------------------------------------------

/// det of the 4x4 matrix whose columns are a, b, c, d.
template <class T>
T det4(const std::array<T, 4>& a, const std::array<T, 4>& b, const std::array<T, 4>& c,
       const std::array<T, 4>& d) {
    // 2x2 minors of the first two columns against the last two.
    auto m = [](const std::array<T, 4>& x, const std::array<T, 4>& y, int i, int k) {
        return x[i] * y[k] - x[k] * y[i];
    };
    return m(a, b, 0, 1) * m(c, d, 2, 3) - m(a, b, 0, 2) * m(c, d, 1, 3) + m(a, b, 0, 3) * m(c, d, 1, 2) +
           m(a, b, 1, 2) * m(c, d, 0, 3) - m(a, b, 1, 3) * m(c, d, 0, 2) + m(a, b, 2, 3) * m(c, d, 0, 1);
}

inline double det(const Mat4& m) {
    Vec4 c[4];
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i) c[k][i] = m[i][k];
    return det4(c[0], c[1], c[2], c[3]);
}

// ---- tangent / normal split ------------------------------------------------

struct Projection {
    Vec4D tangent;
    Vec4D normal;
};

/// Split v along span{phi, conj(phi)} and its orthogonal complement, where
/// ||phi||^2 = 2E and phi^2 = 0.
inline Projection project(const Vec4D& v, const Vec4D& phi, double E) {
    if (std::fabs(E) < tau0) throw DegenerateMetricError("project: |E| below tolerance");
    const double n2 = 2.0 * E;
    const Vec4D phib = conj(phi);
    const Vec4D tangent = (dot(v, phib) / n2) * phi + (dot(v, phi) / n2) * phib;
    return {tangent, v - tangent};
}

// ---- motions ---------------------------------------------------------------

enum class MotionKind { isometry, anti_isometry };

struct Motion {
    Mat4 matrix{};
    Vec4 translation{};
    MotionKind kind = MotionKind::isometry;
    int det_sign = 1;

    template <class T>
    std::array<T, 4> linear(const std::array<T, 4>& x) const {
        std::array<T, 4> r{};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k) r[i] = r[i] + matrix[i][k] * x[k];
        return r;
    }
    Vec4 operator()(const Vec4& x) const { return linear(x) + translation; }
};

inline Mat4 identity_matrix() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 r{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) r[i][k] += a[i][l] * b[l][k];
    return r;
}

/// Validates M^T G M = +-G and tags the kind; the caller's intent is not trusted.
inline Motion make_motion(const Mat4& m, const Vec4& translation = {}) {
    bool iso = true, anti = true;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            double g = 0.0;
            for (int l = 0; l < 4; ++l) g += m[l][i] * signature[l] * m[l][k];
            const double gij = i == k ? signature[i] : 0.0;
            if (std::fabs(g - gij) > 1e-10) iso = false;
            if (std::fabs(g + gij) > 1e-10) anti = false;
        }
    if (!iso && !anti) throw ValidationError("make_motion: matrix preserves neither G nor -G");
    return {m, translation, iso ? MotionKind::isometry : MotionKind::anti_isometry, det(m) > 0 ? 1 : -1};
}

struct MotionStep {
    enum class Op { rotate, boost, flip, swap };
    Op op;
    int i = 0;  // zero-based axes
    int k = 0;
    double angle = 0.0;

    static MotionStep rotate(int i, int k, double a) { return {Op::rotate, i, k, a}; }
    static MotionStep boost(int i, int k, double a) { return {Op::boost, i, k, a}; }
    static MotionStep flip(int i) { return {Op::flip, i, i, 0.0}; }
    static MotionStep swap() { return {Op::swap, 0, 0, 0.0}; }
};

inline Mat4 step_matrix(const MotionStep& s) {
    Mat4 m = identity_matrix();
    switch (s.op) {
        case MotionStep::Op::rotate: {
            const double c = std::cos(s.angle), sn = std::sin(s.angle);
            m[s.i][s.i] = c; m[s.i][s.k] = -sn;
            m[s.k][s.i] = sn; m[s.k][s.k] = c;
            break;
        }
        case MotionStep::Op::boost: {
            const double c = std::cosh(s.angle), sn = std::sinh(s.angle);
            m[s.i][s.i] = c; m[s.i][s.k] = sn;
            m[s.k][s.i] = sn; m[s.k][s.k] = c;
            break;
        }
        case MotionStep::Op::flip:
            m[s.i][s.i] = -1.0;
            break;
        case MotionStep::Op::swap:
            m = Mat4{};
            m[0][1] = m[1][0] = m[2][3] = m[3][2] = 1.0;
            break;
    }
    return m;
}

/// Steps apply in order: the first step acts first.
inline Motion make_motion(const std::vector<MotionStep>& steps, const Vec4& translation = {}) {
    Mat4 m = identity_matrix();
    for (const auto& s : steps) m = matmul(step_matrix(s), m);
    return make_motion(m, translation);
}

/// (x1, x2, x3, x4) -> (x2, x1, x4, x3)
inline Motion concrete_anti_isometry() { return make_motion({MotionStep::swap()}); }

/// outer after inner.
inline Motion compose(const Motion& outer, const Motion& inner) {
    return make_motion(matmul(outer.matrix, inner.matrix), outer.linear(inner.translation) + outer.translation);
}

}  // namespace dmin
