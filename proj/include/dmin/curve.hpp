#pragma once

/// Holomorphic curves in D^4: the isotropic data Phi and its primitive Psi.

#include <array>
#include <cmath>
#include <string>

#include "expr.hpp"
#include "geom4.hpp"

namespace dmin {

/// Axis-aligned rectangle in the (u, v) parameter plane.
struct Rect {
    double u0 = 0, u1 = 0, v0 = 0, v1 = 0;

    bool contains(DNum t, double slack = 1e-12) const {
        const double su = slack * std::fmax(1.0, std::fmax(std::fabs(u0), std::fabs(u1)));
        const double sv = slack * std::fmax(1.0, std::fmax(std::fabs(v0), std::fabs(v1)));
        return t.re >= u0 - su && t.re <= u1 + su && t.im >= v0 - sv && t.im <= v1 + sv;
    }
    DNum center() const { return {0.5 * (u0 + u1), 0.5 * (v0 + v1)}; }
    /// Node (i, k) of an nu x nv grid including the edges.
    DNum node(int i, int k, int nu, int nv) const {
        const double u = nu > 1 ? u0 + (u1 - u0) * i / (nu - 1) : 0.5 * (u0 + u1);
        const double v = nv > 1 ? v0 + (v1 - v0) * k / (nv - 1) : 0.5 * (v0 + v1);
        return {u, v};
    }
};

enum class CurveRole { Phi, Psi };

struct HoloCurve {
    std::array<HoloExpr, 4> c;
    CurveRole role = CurveRole::Phi;

    Vec4D operator()(DNum t) const { return {c[0](t), c[1](t), c[2](t), c[3](t)}; }
    HoloCurve derivative() const {
        return {{c[0].derivative(), c[1].derivative(), c[2].derivative(), c[3].derivative()}, CurveRole::Phi};
    }
    HoloCurve substitute(DNum k, DNum shift = {}) const {
        return {{c[0].substitute(k, shift), c[1].substitute(k, shift), c[2].substitute(k, shift),
                 c[3].substitute(k, shift)},
                role};
    }
    HoloCurve conj_coefficients() const {
        return {{c[0].conj_coefficients(), c[1].conj_coefficients(), c[2].conj_coefficients(),
                 c[3].conj_coefficients()},
                role};
    }
    HoloCurve scaled(DNum k) const {
        return {{scale(k, c[0]), scale(k, c[1]), scale(k, c[2]), scale(k, c[3])}, role};
    }
    /// Component-wise real-linear recombination A * curve.
    HoloCurve transformed(const Mat4& a) const {
        HoloCurve r{{}, role};
        for (int i = 0; i < 4; ++i)
            for (int k = 0; k < 4; ++k)
                if (a[i][k] != 0.0) r.c[i] = r.c[i] + scale(DNum(a[i][k]), c[k]);
        return r;
    }
    HoloCurve shifted(const Vec4& b) const {
        return {{c[0] + DNum(b[0]), c[1] + DNum(b[1]), c[2] + DNum(b[2]), c[3] + DNum(b[3])}, role};
    }
};

/// Phi = ((f + gh)/2, (f - gh)/2, (g - fh)/2, (g + fh)/2); Phi^2 = 0 identically.
inline HoloCurve isotropic_from_fgh(const HoloExpr& f, const HoloExpr& g, const HoloExpr& h) {
    const HoloExpr gh = g * h, fh = f * h;
    const DNum half{0.5};
    return {{scale(half, f + gh), scale(half, f - gh), scale(half, g - fh), scale(half, g + fh)}, CurveRole::Phi};
}

/// Psi with Psi' = Phi term by term.
inline HoloCurve antiderivative(const HoloCurve& phi) {
    HoloCurve psi{{}, CurveRole::Psi};
    for (int i = 0; i < 4; ++i) psi.c[i] = antiderivative(phi.c[i]);
    return psi;
}

struct ValidationReport {
    bool pass = false;
    double min_norm_sq = 0;
    double max_norm_sq = 0;
    DNum argmax;
    std::string message;
};

/// ||Phi||^2 < -tau0 on the n x n grid of the domain.
inline ValidationReport validate_timelike(const HoloCurve& phi, const Rect& domain, int n) {
    ValidationReport r;
    r.min_norm_sq = INFINITY;
    r.max_norm_sq = -INFINITY;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const DNum t = domain.node(i, k, n, n);
            const double s = norm_sq(phi(t));
            if (!std::isfinite(s)) {
                r.max_norm_sq = s;
                r.argmax = t;
                r.message = "non-finite ||Phi||^2";
                return r;
            }
            r.min_norm_sq = std::fmin(r.min_norm_sq, s);
            if (s > r.max_norm_sq) {
                r.max_norm_sq = s;
                r.argmax = t;
            }
        }
    r.pass = r.max_norm_sq < -tau0;
    if (!r.pass) r.message = "||Phi||^2 >= -tau0 at " + to_string(r.argmax) + ": surface is not time-like there";
    return r;
}

/// max(|h_u - g_v|, |h_v - g_u|) for f = g + j h by central differences.
inline double check_holomorphy_fd(const HoloExpr& f, DNum t, double step) {
    const DNum fu = (f(t + DNum(step)) - f(t - DNum(step))) / (2 * step);
    const DNum fv = (f(t + DNum(0, step)) - f(t - DNum(0, step))) / (2 * step);
    return std::fmax(std::fabs(fu.im - fv.re), std::fabs(fv.im - fu.re));
}

}  // namespace dmin
