#pragma once

/// Associated family, conjugate surface, motions, anti-isometries, homotheties and the M-bar-a construction.

#include <sstream>

#include "canonical.hpp"

namespace dmin {

namespace detail {

inline const HoloCurve& require_tree(const SurfacePatch& p, const char* op) {
    if (!p.phi_curve()) throw UnsupportedExpressionError(std::string(op) + ": patch has no expression tree");
    return *p.phi_curve();
}

inline Rect swap_uv(const Rect& r) { return {r.v0, r.v1, r.u0, r.u1}; }

inline SurfacePatch build(const SurfacePatch& from, HoloCurve phi, Rect domain, std::optional<HoloCurve> psi,
                          TransformRecord rec) {
    SurfacePatch out(std::move(phi), domain, from.label() + "/" + rec.kind, std::move(psi));
    for (const auto& r : from.history()) out = out.with_record(r);
    return out.with_record(std::move(rec));
}

inline std::string motion_text(const Motion& m) {
    std::ostringstream os;
    os << "det=" << m.det_sign << " A=[";
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) os << (i || k ? "," : "") << format_real(m.matrix[i][k]);
    os << "] b=[";
    for (int i = 0; i < 4; ++i) os << (i ? "," : "") << format_real(m.translation[i]);
    return os.str() + "]";
}

inline std::optional<HoloCurve> map_psi(const SurfacePatch& p, const std::function<HoloCurve(const HoloCurve&)>& f) {
    if (!p.psi()) return std::nullopt;
    return f(*p.psi());
}

}  // namespace detail

/// Phi_theta = e^{j theta} Phi, same parameter.
inline SurfacePatch associated(const SurfacePatch& p, double theta) {
    const DNum e = exp_j(theta);
    return detail::build(p, detail::require_tree(p, "associated").scaled(e), p.domain(),
                         detail::map_psi(p, [&](const HoloCurve& c) { return c.scaled(e); }),
                         {"associated", "theta=" + format_real(theta), "s=t"});
}

/// Phi^(s) = Phi(js) on the parameter rectangle with u and v exchanged; Psi^(s) = j Psi(js).
inline SurfacePatch conjugate(const SurfacePatch& p) {
    return detail::build(p, detail::require_tree(p, "conjugate").substitute(j_unit), detail::swap_uv(p.domain()),
                         detail::map_psi(p, [](const HoloCurve& c) { return c.substitute(j_unit).scaled(j_unit); }),
                         {"conjugate", "", "t=js"});
}

/// Phi^ = A Phi, Psi^ = A Psi + b.
inline SurfacePatch apply_motion(const SurfacePatch& p, const Motion& m) {
    if (m.kind != MotionKind::isometry) throw KindError("apply_motion: expected an isometry");
    return detail::build(p, detail::require_tree(p, "motion").transformed(m.matrix), p.domain(),
                         detail::map_psi(p, [&](const HoloCurve& c) { return c.transformed(m.matrix).shifted(m.translation); }),
                         {"motion", detail::motion_text(m), "s=t"});
}

/// Phi^(s) = j A Phi(js), Psi^(s) = A Psi(js) + b.
inline SurfacePatch apply_anti_isometry(const SurfacePatch& p, const Motion& m) {
    if (m.kind != MotionKind::anti_isometry) throw KindError("apply_anti_isometry: expected an anti-isometry");
    const HoloCurve& phi = detail::require_tree(p, "anti_isometry");
    return detail::build(p, phi.substitute(j_unit).transformed(m.matrix).scaled(j_unit), detail::swap_uv(p.domain()),
                         detail::map_psi(p, [&](const HoloCurve& c) {
                             return c.substitute(j_unit).transformed(m.matrix).shifted(m.translation);
                         }),
                         {"anti_isometry", detail::motion_text(m), "t=js"});
}

/// Phi^ = k Phi, k > 0.
inline SurfacePatch homothety(const SurfacePatch& p, double k) {
    if (!(k > 0)) throw ParamError("homothety: k must be positive");
    return detail::build(p, detail::require_tree(p, "homothety").scaled(DNum(k)), p.domain(),
                         detail::map_psi(p, [&](const HoloCurve& c) { return c.scaled(DNum(k)); }),
                         {"homothety", "k=" + format_real(k), "s=t"});
}

/// Conjugate of the anti-isometric image, so the parameter is t again: Phi^ = j A Phi, Psi^ = j A Psi + b.
inline SurfacePatch m_bar_a(const SurfacePatch& p, const Motion& m) {
    if (m.kind != MotionKind::anti_isometry) throw KindError("m_bar_a: expected an anti-isometry");
    if (m.det_sign != 1) throw DetError("m_bar_a: det(A) must be +1");
    const HoloCurve& phi = detail::require_tree(p, "m_bar_a");
    return detail::build(p, phi.transformed(m.matrix).scaled(j_unit), p.domain(),
                         detail::map_psi(p, [&](const HoloCurve& c) {
                             return c.transformed(m.matrix).scaled(j_unit).shifted(m.translation);
                         }),
                         {"m_bar_a", detail::motion_text(m), "s=t"});
}

/// Phi^(s) = k Phi(ks): the same surface in the coordinates t = ks.
inline SurfacePatch rescale_parameter(const SurfacePatch& p, double k) {
    if (k == 0) throw ParamError("rescale_parameter: k must be nonzero");
    const Rect& d = p.domain();
    Rect r{d.u0 / k, d.u1 / k, d.v0 / k, d.v1 / k};
    if (k < 0) r = {r.u1, r.u0, r.v1, r.v0};
    return detail::build(p, detail::require_tree(p, "rescale").substitute(DNum(k)).scaled(DNum(k)), r,
                         detail::map_psi(p, [&](const HoloCurve& c) { return c.substitute(DNum(k)); }),
                         {"rescale", "k=" + format_real(k), "t=" + format_real(k) + "s"});
}

// ---- transformation laws -------------------------------------------------------

/// Predicted source parameter and invariants for a transformed patch at s.
struct LawPrediction {
    DNum t;  // matched parameter on the source
    double E = 0, K = 0, kappa = 0;
    DNum phi_prime_sq;
};

inline LawPrediction predict(const SurfacePatch& src, const TransformRecord& rec, DNum s, double det_sign = 1,
                             double k = 1) {
    LawPrediction out;
    auto at = [&](DNum t) {
        const InvariantSample x = classify(src, t);
        out.t = t;
        out.E = x.E;
        out.K = x.K;
        out.kappa = x.kappa;
        out.phi_prime_sq = x.phi_prime_sq;
    };
    if (rec.kind == "associated") {
        at(s);
        // Phi'^2 picks up e^{2j theta}; not a preserved quantity.
        out.phi_prime_sq = DNum(NAN, NAN);
    } else if (rec.kind == "conjugate") {
        // Phi^' = j Phi'(js), so Phi^'^2 = Phi'(js)^2.
        at(j_unit * s);
        out.K = -out.K;
        out.kappa = -out.kappa;
    } else if (rec.kind == "motion") {
        at(s);
        out.kappa *= det_sign;
    } else if (rec.kind == "anti_isometry") {
        at(j_unit * s);
        out.K = -out.K;
        out.kappa = -det_sign * out.kappa;
        out.phi_prime_sq = -1.0 * out.phi_prime_sq;
    } else if (rec.kind == "homothety") {
        at(s);
        out.E *= k * k;
        out.K /= k * k;
        out.kappa /= k * k;
        out.phi_prime_sq = k * k * out.phi_prime_sq;
    } else if (rec.kind == "m_bar_a") {
        at(s);
        out.phi_prime_sq = -1.0 * out.phi_prime_sq;
    } else {
        throw ParamError("no transformation law for kind " + rec.kind);
    }
    return out;
}

struct LawCheck {
    double max_rel_E = 0, max_rel_K = 0, max_rel_kappa = 0, max_rel_phi2 = 0;
    int samples = 0;
    double worst() const { return std::fmax(std::fmax(max_rel_E, max_rel_K), std::fmax(max_rel_kappa, max_rel_phi2)); }
    bool pass(double tol) const { return samples > 0 && worst() <= tol; }
};

/// Compares the transformed patch against the law of its last transform on an n x n grid.
/// Relative errors are scaled by max(1, |K|, |kappa|) so zero invariants compare absolutely.
inline LawCheck check_law(const SurfacePatch& src, const SurfacePatch& dst, int n = 11, double det_sign = 1,
                          double k = 1) {
    if (dst.history().empty()) throw ParamError("check_law: patch has no transform record");
    const TransformRecord& rec = dst.history().back();
    LawCheck c;
    for (int q = 0; q < n; ++q)
        for (int i = 0; i < n; ++i) {
            const DNum s = dst.domain().node(i, q, n, n);
            const LawPrediction want = predict(src, rec, s, det_sign, k);
            const InvariantSample got = classify(dst, s);
            const double ks = std::fmax(1.0, std::fmax(std::fabs(want.K), std::fabs(want.kappa)));
            c.max_rel_E = std::fmax(c.max_rel_E, std::fabs(got.E - want.E) / std::fmax(1.0, std::fabs(want.E)));
            c.max_rel_K = std::fmax(c.max_rel_K, std::fabs(got.K - want.K) / ks);
            c.max_rel_kappa = std::fmax(c.max_rel_kappa, std::fabs(got.kappa - want.kappa) / ks);
            if (!std::isnan(want.phi_prime_sq.re))
                c.max_rel_phi2 = std::fmax(c.max_rel_phi2, abs_max(got.phi_prime_sq - want.phi_prime_sq) /
                                                                std::fmax(1.0, abs_max(want.phi_prime_sq)));
            ++c.samples;
        }
    return c;
}

}  // namespace dmin
