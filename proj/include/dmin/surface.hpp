#pragma once

/// Pointwise invariants of a minimal time-like surface given by Phi = x_u + j x_v.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curve.hpp"

namespace dmin {

/// Phi and its first t-derivatives at one point. `order` says how many are valid.
struct Jet {
    Vec4D phi{};
    Vec4D d1{};
    Vec4D d2{};
    Vec4D d3{};
    int order = 0;
};

class PhiSource {
public:
    virtual ~PhiSource() = default;
    virtual Jet jet(DNum t, int order) const = 0;
    /// Non-null when Phi is an expression tree (needed for exact rewrites).
    virtual const HoloCurve* curve() const { return nullptr; }
};

class TreeSource final : public PhiSource {
public:
    explicit TreeSource(HoloCurve phi) : d_{std::move(phi)} {
        for (int k = 1; k < 4; ++k) d_[k] = d_[k - 1].derivative();
    }
    Jet jet(DNum t, int order) const override {
        Jet j;
        j.order = std::min(order, 3);
        j.phi = d_[0](t);
        if (order >= 1) j.d1 = d_[1](t);
        if (order >= 2) j.d2 = d_[2](t);
        if (order >= 3) j.d3 = d_[3](t);
        return j;
    }
    const HoloCurve* curve() const override { return &d_[0]; }

private:
    std::array<HoloCurve, 4> d_;
};

/// Provenance of a patch produced by a transform.
struct TransformRecord {
    std::string kind;          // associated, conjugate, motion, anti_isometry, homothety, m_bar_a, ...
    std::string parameters;    // human-readable payload
    std::string substitution;  // coordinate relation between the two parameters
};

class SurfacePatch {
public:
    SurfacePatch(HoloCurve phi, Rect domain, std::string label, std::optional<HoloCurve> psi = std::nullopt)
        : src_(std::make_shared<TreeSource>(std::move(phi))), domain_(domain), label_(std::move(label)),
          psi_(std::move(psi)) {}
    SurfacePatch(std::shared_ptr<const PhiSource> src, Rect domain, std::string label)
        : src_(std::move(src)), domain_(domain), label_(std::move(label)) {}

    Jet jet(DNum t, int order = 1) const { return src_->jet(t, order); }
    Vec4D phi(DNum t) const { return src_->jet(t, 0).phi; }

    const Rect& domain() const { return domain_; }
    const std::string& label() const { return label_; }
    const std::optional<HoloCurve>& psi() const { return psi_; }
    const HoloCurve* phi_curve() const { return src_->curve(); }
    const std::shared_ptr<const PhiSource>& source() const { return src_; }
    const std::vector<TransformRecord>& history() const { return history_; }

    SurfacePatch with_domain(Rect d) const {
        SurfacePatch p = *this;
        p.domain_ = d;
        return p;
    }
    SurfacePatch with_label(std::string l) const {
        SurfacePatch p = *this;
        p.label_ = std::move(l);
        return p;
    }
    SurfacePatch with_record(TransformRecord r) const {
        SurfacePatch p = *this;
        p.history_.push_back(std::move(r));
        return p;
    }

    void require_in_domain(DNum t) const {
        if (!domain_.contains(t)) throw DomainError("point " + to_string(t) + " outside the domain of " + label_);
    }

private:
    std::shared_ptr<const PhiSource> src_;
    Rect domain_;
    std::string label_;
    std::optional<HoloCurve> psi_;
    std::vector<TransformRecord> history_;
};

inline ValidationReport validate_timelike(const SurfacePatch& p, int n) {
    if (const HoloCurve* c = p.phi_curve()) return validate_timelike(*c, p.domain(), n);
    ValidationReport r;
    r.min_norm_sq = INFINITY;
    r.max_norm_sq = -INFINITY;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const DNum t = p.domain().node(i, k, n, n);
            const double s = norm_sq(p.phi(t));
            r.min_norm_sq = std::fmin(r.min_norm_sq, s);
            if (s > r.max_norm_sq) {
                r.max_norm_sq = s;
                r.argmax = t;
            }
        }
    r.pass = r.max_norm_sq < -tau0;
    if (!r.pass) r.message = "||Phi||^2 >= -tau0 at " + to_string(r.argmax);
    return r;
}

// ---- named surfaces -------------------------------------------------------

/// f = 1, g = t, h = t. First type and already canonical.
inline SurfacePatch surface_s1(Rect domain = {-1.0, 1.0, 0.5, 2.0}) {
    const HoloExpr t = HoloExpr::var();
    HoloCurve phi = isotropic_from_fgh(DNum(1.0), t, t);
    return SurfacePatch(phi, domain, "S1", antiderivative(phi));
}

/// f = 1, g = t^2, h = t. ||Phi||^2 = -4uv^2, Phi'^2 = 2t: time-like for u > 0,
/// third type where |u| < v, degenerate on u = +-v.
inline SurfacePatch surface_s2(Rect domain = {0.25, 0.75, 1.0, 2.0}) {
    const HoloExpr t = HoloExpr::var();
    HoloCurve phi = isotropic_from_fgh(DNum(1.0), pow(t, 2), t);
    return SurfacePatch(phi, domain, "S2", antiderivative(phi));
}

// ---- metric and second fundamental form --------------------------------------

struct PointData {
    Vec4D phi;
    Vec4D dphi;
    double norm_sq;  // ||Phi||^2 = 2E
    double E;
};

inline PointData point_data(const Vec4D& phi, const Vec4D& dphi) {
    const double n2 = norm_sq(phi);
    if (std::fabs(0.5 * n2) < tau0) throw DegenerateMetricError("|E| below tolerance");
    return {phi, dphi, n2, 0.5 * n2};
}

inline PointData point_data(const SurfacePatch& p, DNum t) {
    const Jet j = p.jet(t, 1);
    return point_data(j.phi, j.d1);
}

inline double metric(const SurfacePatch& p, DNum t) {
    p.require_in_domain(t);
    const double E = 0.5 * norm_sq(p.phi(t));
    if (std::fabs(E) < tau0) throw DegenerateMetricError("metric: |E| below tolerance at " + to_string(t));
    return E;
}

/// Phi'^perp, the normal part of Phi'.
inline Vec4D phi_prime_normal(const PointData& d) { return project(d.dphi, d.phi, d.E).normal; }

struct SecondFundamental {
    Vec4 sigma_uu;
    Vec4 sigma_uv;
    Vec4 sigma_vv;
};

inline SecondFundamental second_fundamental(const SurfacePatch& p, DNum t) {
    p.require_in_domain(t);
    const Vec4D n = phi_prime_normal(point_data(p, t));
    return {re(n), im(n), re(n)};
}

// ---- curvatures ------------------------------------------------------------

struct Curvatures {
    double K;
    double kappa;
};

/// K = -4||Phi ^ Phi'||^2 / ||Phi||^6, kappa = -4 det(Phi, conj Phi, Phi', conj Phi') / ||Phi||^6.
inline Curvatures curvatures_from_vectors(const Vec4D& phi, const Vec4D& dphi) {
    const PointData d = point_data(phi, dphi);
    const double n6 = d.norm_sq * d.norm_sq * d.norm_sq;
    const DNum dt = det4(phi, conj(phi), dphi, conj(dphi));
    if (std::fabs(dt.im) > 1e-8 * std::fmax(1.0, std::fabs(dt.re)))
        throw InternalError("curvatures: determinant is not real");
    return {-4.0 * bivector_norm_sq(phi, dphi) / n6, -4.0 * dt.re / n6};
}

inline Curvatures curvatures(const SurfacePatch& p, DNum t) {
    p.require_in_domain(t);
    const Jet j = p.jet(t, 1);
    return curvatures_from_vectors(j.phi, j.d1);
}

/// K = -4||Phi'^perp||^2 / ||Phi||^4.
inline double K_projection(const SurfacePatch& p, DNum t) {
    const PointData d = point_data(p, t);
    return -4.0 * norm_sq(phi_prime_normal(d)) / (d.norm_sq * d.norm_sq);
}

/// K = Laplacian^h ln(-||Phi||^2) / (-||Phi||^2), central differences.
inline double K_laplacian(const SurfacePatch& p, DNum t, double h) {
    auto f = [&](double du, double dv) { return std::log(-norm_sq(p.phi(t + DNum(du, dv)))); };
    auto lap = [&](double k) { return (f(k, 0) + f(-k, 0) - f(0, k) - f(0, -k)) / (k * k); };
    // The 2c terms of the two second differences cancel; one Richardson step removes the h^2 term.
    return (4 * lap(h / 2) - lap(h)) / 3 / (-norm_sq(p.phi(t)));
}

/// Orthonormal tangent frame and right-oriented normal frame with n1^2 = -1.
struct NormalFrame {
    Vec4 X1, X2, n1, n2;
};

/// Gram-Schmidt on the seeds (M e1, M e3, M e2, M e4) after removing the tangent part.
inline NormalFrame normal_frame(const PointData& d, const Mat4& seed = identity_matrix()) {
    const double s = std::sqrt(-d.E);
    NormalFrame f;
    f.X1 = (1.0 / s) * re(d.phi);
    f.X2 = (1.0 / s) * im(d.phi);
    // X1^2 = -1, X2^2 = +1
    auto strip = [&](Vec4 w) { return w + dot(w, f.X1) * f.X1 - dot(w, f.X2) * f.X2; };
    Vec4 seeds[4];
    const int order[4] = {0, 2, 1, 3};
    for (int i = 0; i < 4; ++i)
        for (int r = 0; r < 4; ++r) seeds[i][r] = seed[r][order[i]];

    int found = 0;
    for (const Vec4& e : seeds) {
        Vec4 w = strip(e);
        const double q = dot(w, w);
        if (q < -tau0) {
            f.n1 = (1.0 / std::sqrt(-q)) * w;
            found = 1;
            break;
        }
    }
    if (!found) throw FrameConstructionError("normal frame: no time-like normal seed");
    for (const Vec4& e : seeds) {
        Vec4 w = strip(e);
        w = w + dot(w, f.n1) * f.n1;
        const double q = dot(w, w);
        if (q > tau0) {
            f.n2 = (1.0 / std::sqrt(q)) * w;
            found = 2;
            break;
        }
    }
    if (found != 2) throw FrameConstructionError("normal frame: no space-like normal seed");
    if (det4(f.X1, f.X2, f.n1, f.n2) < 0) f.n2 = -f.n2;
    return f;
}

inline NormalFrame normal_frame(const SurfacePatch& p, DNum t, const Mat4& seed = identity_matrix()) {
    return normal_frame(point_data(p, t), seed);
}

/// kappa = -4j det(X1, X2, Phi'^perp, conj Phi'^perp) / ||Phi||^4.
inline double kappa_normal(const SurfacePatch& p, DNum t) {
    const PointData d = point_data(p, t);
    const NormalFrame f = normal_frame(d);
    const Vec4D n = phi_prime_normal(d);
    const DNum dt = det4(lift(f.X1), lift(f.X2), n, conj(n));
    const DNum k = -4.0 * (j_unit * dt) / (d.norm_sq * d.norm_sq);
    return k.re;
}

struct Weingarten {
    double nu, lambda, rho, mu;
    double K() const { return nu * nu - lambda * lambda - rho * rho + mu * mu; }
    double kappa() const { return 2 * nu * mu - 2 * rho * lambda; }
};

/// sigma(X1,X1) = nu n1 - rho n2, sigma(X1,X2) = -lambda n1 + mu n2.
inline Weingarten weingarten_in_frame(const PointData& d, const NormalFrame& f) {
    const Vec4D perp = phi_prime_normal(d);
    const Vec4 s11 = (1.0 / -d.E) * re(perp);
    const Vec4 s12 = (1.0 / -d.E) * im(perp);
    return {-dot(s11, f.n1), dot(s12, f.n1), -dot(s11, f.n2), dot(s12, f.n2)};
}

inline Weingarten weingarten(const SurfacePatch& p, DNum t) {
    p.require_in_domain(t);
    const PointData d = point_data(p, t);
    return weingarten_in_frame(d, normal_frame(d));
}

// ---- classification --------------------------------------------------------

enum class SurfaceType { degenerate, first, second, third };

inline const char* type_name(SurfaceType t) {
    switch (t) {
        case SurfaceType::degenerate: return "degenerate";
        case SurfaceType::first: return "first";
        case SurfaceType::second: return "second";
        case SurfaceType::third: return "third";
    }
    return "?";
}

struct Classification {
    SurfaceType type = SurfaceType::degenerate;
    std::optional<DNum> epsilon;
    bool needs_conjugation = false;  // third type with eps = -j
};

/// By the null components (alpha, beta) of Phi'^2.
inline Classification classify_phi2(DNum phi2) {
    if (on_null_cone(phi2)) return {};
    const auto [a, b] = null_decompose(phi2);
    if (a > 0 && b > 0) return {SurfaceType::first, DNum(1.0), false};
    if (a < 0 && b < 0) return {SurfaceType::second, DNum(-1.0), false};
    if (a < 0) return {SurfaceType::third, j_unit, false};
    return {SurfaceType::third, -j_unit, true};
}

struct InvariantSample {
    DNum t;
    double E = 0, K = 0, kappa = 0;
    DNum phi_prime_sq;
    SurfaceType type = SurfaceType::degenerate;
    std::optional<DNum> epsilon;
    bool needs_conjugation = false;
    bool consistent = true;  // sign(K^2 - kappa^2) agrees with the type
};

inline InvariantSample classify(const SurfacePatch& p, DNum t) {
    p.require_in_domain(t);
    const Jet j = p.jet(t, 1);
    InvariantSample s;
    s.t = t;
    const PointData d = point_data(j.phi, j.d1);
    s.E = d.E;
    const Curvatures c = curvatures_from_vectors(j.phi, j.d1);
    s.K = c.K;
    s.kappa = c.kappa;
    s.phi_prime_sq = dot(j.d1, j.d1);
    const Classification cl = classify_phi2(s.phi_prime_sq);
    s.type = cl.type;
    s.epsilon = cl.epsilon;
    s.needs_conjugation = cl.needs_conjugation;
    const double disc = s.K * s.K - s.kappa * s.kappa;
    if (s.type == SurfaceType::first || s.type == SurfaceType::second) s.consistent = disc > 0;
    if (s.type == SurfaceType::third) s.consistent = disc < 0;
    return s;
}

/// Sup-norm of dPhi/dt-bar = (Phi_u - j Phi_v)/2 by central differences.
inline double mean_curvature_fd(const SurfacePatch& p, DNum t, double h) {
    const Vec4D pu = (1.0 / (2 * h)) * (p.phi(t + DNum(h)) - p.phi(t - DNum(h)));
    const Vec4D pv = (1.0 / (2 * h)) * (p.phi(t + DNum(0, h)) - p.phi(t - DNum(0, h)));
    return abs_max(0.5 * (pu - j_unit * pv));
}

}  // namespace dmin
