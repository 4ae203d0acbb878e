#pragma once

/// Canonical coordinates (Phi'^2 = eps) and the canonical isotropic normal frame.

#include <algorithm>
#include <functional>
#include <memory>
#include <set>
#include <vector>

#include "surface.hpp"

namespace dmin {

/// S(x) = integral of a positive rate from `anchor` to x, tabulated on [lo, hi].
class CumulativeTable {
public:
    CumulativeTable() = default;
    CumulativeTable(std::function<double(double)> rate, double lo, double hi, double anchor, double rel_tol = 1e-10,
                    int min_cells = 256)
        : rate_(std::move(rate)), lo_(lo), hi_(hi) {
        if (!(hi > lo)) throw InternalError("cumulative table: empty interval");
        int n = 16;
        double prev = tabulate(n);
        for (;;) {
            const double cur = tabulate(2 * n);
            n *= 2;
            if (n >= min_cells && std::fabs(cur - prev) <= rel_tol * std::fabs(cur)) break;
            if (n > (1 << 22)) throw InternalError("cumulative table: quadrature does not settle");
            prev = cur;
        }
        offset_ = 0;
        offset_ = raw(anchor);
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    int cells() const { return static_cast<int>(cum_.size()) - 1; }
    double rate(double x) const { return rate_(x); }
    double operator()(double x) const { return raw(x) - offset_; }
    const std::vector<double>& nodes() const { return cum_; }

    /// Bracketed Newton with bisection fallback.
    double inverse(double s) const {
        const double target = s + offset_;
        if (target < cum_.front() - 1e-13 * scale() || target > cum_.back() + 1e-13 * scale())
            throw DomainError("canonical inverse: value outside the tabulated range");
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
        const int k = std::clamp(static_cast<int>(it - cum_.begin()) - 1, 0, cells() - 1);
        double a = node(k), b = node(k + 1);
        double x = a + (b - a) * (target - cum_[k]) / (cum_[k + 1] - cum_[k]);
        for (int it_n = 0; it_n < 100; ++it_n) {
            const double f = raw(x) - target;
            if (f == 0) return x;
            if (f > 0) b = x;
            else a = x;
            double nx = x - f / rate_(x);
            if (!(nx > a && nx < b)) nx = 0.5 * (a + b);
            if (std::fabs(nx - x) <= 2e-16 * std::fmax(1.0, std::fabs(x))) return nx;
            x = nx;
        }
        throw InverseSolveError("canonical inverse: no convergence in 100 iterations");
    }

private:
    double node(int k) const { return lo_ + (hi_ - lo_) * k / cells(); }
    double scale() const { return std::fmax(1.0, std::fmax(std::fabs(cum_.front()), std::fabs(cum_.back()))); }

    static double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fb) {
        return (b - a) / 6 * (fa + 4 * f(0.5 * (a + b)) + fb);
    }

    double tabulate(int n) {
        cum_.assign(n + 1, 0.0);
        const double w = (hi_ - lo_) / n;
        double fa = rate_(lo_);
        for (int k = 0; k < n; ++k) {
            const double a = lo_ + w * k, b = lo_ + w * (k + 1);
            const double fb = rate_(b);
            cum_[k + 1] = cum_[k] + simpson(rate_, a, b, fa, fb);
            fa = fb;
        }
        return cum_.back();
    }

    double raw(double x) const {
        const double w = (hi_ - lo_) / cells();
        const int k = std::clamp(static_cast<int>(std::floor((x - lo_) / w)), 0, cells() - 1);
        const double a = node(k);
        return cum_[k] + simpson(rate_, a, x, rate_(a), rate_(x));
    }

    std::function<double(double)> rate_;
    double lo_ = 0, hi_ = 1, offset_ = 0;
    std::vector<double> cum_;
};

/// Phi(s) -> conj(Phi(conj s)): the same surface with the orientation of v reversed.
class ReflectedSource final : public PhiSource {
public:
    explicit ReflectedSource(std::shared_ptr<const PhiSource> base) : base_(std::move(base)) {}
    Jet jet(DNum s, int order) const override {
        Jet j = base_->jet(conj(s), order);
        j.phi = conj(j.phi);
        j.d1 = conj(j.d1);
        j.d2 = conj(j.d2);
        j.d3 = conj(j.d3);
        return j;
    }

private:
    std::shared_ptr<const PhiSource> base_;
};

inline Rect reflect(const Rect& r) { return {r.u0, r.u1, -r.v1, -r.v0}; }

/// t = conj(s). Keeps the expression tree when there is one.
inline SurfacePatch reflect_parameter(const SurfacePatch& p) {
    SurfacePatch out = p.phi_curve()
        ? SurfacePatch(p.phi_curve()->conj_coefficients(), reflect(p.domain()), p.label(),
                       p.psi() ? std::optional<HoloCurve>(p.psi()->conj_coefficients()) : std::nullopt)
        : SurfacePatch(std::make_shared<ReflectedSource>(p.source()), reflect(p.domain()), p.label());
    for (const auto& r : p.history()) out = out.with_record(r);
    return out.with_record({"reflect", "", "t=conj(s)"});
}

/// Uniform type of a region, checked on an n x n grid.
inline Classification region_type(const SurfacePatch& p, const Rect& region, int n = 21) {
    std::optional<Classification> first;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const DNum t = region.node(i, k, n, n);
            const Vec4D d1 = p.jet(t, 1).d1;
            const Classification c = classify_phi2(dot(d1, d1));
            if (c.type == SurfaceType::degenerate) throw DegeneratePointError("degenerate point at " + to_string(t));
            if (!first) first = c;
            else if (c.type != first->type || *c.epsilon != *first->epsilon)
                throw MixedTypeError(std::string("region mixes ") + type_name(first->type) + " (eps " +
                                     to_string(*first->epsilon) + ") and " + type_name(c.type) + " (eps " +
                                     to_string(*c.epsilon) + ") at " + to_string(t));
        }
    return *first;
}

/// s(t) with s' = (eps Phi'^2)^{1/4}, s(t0) = 0, as two 1-D quadratures over the null components.
class CanonicalMap {
public:
    DNum t0;                       // base point, original parameter
    DNum epsilon;                  // of the working patch
    bool pre_conjugation = false;  // working parameter is conj(t)
    Rect region;                   // working parameter
    CumulativeTable S1, S2;        // q-part over a, q-bar part over b
    std::optional<SurfacePatch> working_patch;

    const SurfacePatch& working() const { return *working_patch; }

    DNum to_working(DNum t) const { return pre_conjugation ? conj(t) : t; }
    DNum from_working(DNum t) const { return pre_conjugation ? conj(t) : t; }

    /// Working parameter -> s.
    DNum forward_working(DNum t) const {
        const auto [a, b] = null_decompose(t);
        return null_compose(S1(a), S2(b));
    }
    DNum inverse_working(DNum s) const {
        const auto [a, b] = null_decompose(s);
        return null_compose(S1.inverse(a), S2.inverse(b));
    }
    DNum forward(DNum t) const { return forward_working(to_working(t)); }
    DNum inverse(DNum s) const { return from_working(inverse_working(s)); }
    /// ds/dt in the working parameter.
    DNum rate(DNum t) const {
        const auto [a, b] = null_decompose(t);
        return null_compose(S1.rate(a), S2.rate(b));
    }
};

namespace detail {

/// A point of the rectangle whose first null component is a (second when `second`).
inline DNum point_on_null_line(const Rect& r, double x, bool second) {
    const double uc = 0.5 * (r.u0 + r.u1);
    if (!second) {
        const double v = std::clamp(uc - x, r.v0, r.v1);
        return {x + v, v};
    }
    const double v = std::clamp(x - uc, r.v0, r.v1);
    return {x - v, v};
}

}  // namespace detail

inline CanonicalMap build_canonical_map(const SurfacePatch& patch, const Rect& region, DNum t0,
                                        double rel_tol = 1e-10) {
    const Rect& d = patch.domain();
    if (region.u0 < d.u0 - 1e-12 || region.u1 > d.u1 + 1e-12 || region.v0 < d.v0 - 1e-12 || region.v1 > d.v1 + 1e-12)
        throw DomainError("canonical map: region leaves the patch domain");
    if (!region.contains(t0)) throw DomainError("canonical map: base point outside the region");
    const Classification c = region_type(patch, region);

    CanonicalMap m;
    m.t0 = t0;
    m.pre_conjugation = c.needs_conjugation;
    m.working_patch = m.pre_conjugation ? reflect_parameter(patch.with_domain(region)) : patch.with_domain(region);
    m.region = m.pre_conjugation ? reflect(region) : region;
    m.epsilon = m.pre_conjugation ? j_unit : *c.epsilon;
    const DNum w0 = m.to_working(t0);
    const auto anchor = null_decompose(w0);

    const auto src = m.working().source();
    const DNum eps = m.epsilon;
    const Rect reg = m.region;
    auto rate = [src, eps, reg](bool second) {
        return [src, eps, reg, second](double x) {
            const Vec4D d1 = src->jet(detail::point_on_null_line(reg, x, second), 1).d1;
            const NullPair n = null_decompose(eps * dot(d1, d1));
            const double c = second ? n.b : n.a;
            if (!(c > 0)) throw DomainError("canonical map: eps Phi'^2 leaves D+");
            return std::sqrt(std::sqrt(c));
        };
    };
    m.S1 = CumulativeTable(rate(false), reg.u0 - reg.v1, reg.u1 - reg.v0, anchor.a, rel_tol);
    m.S2 = CumulativeTable(rate(true), reg.u0 + reg.v0, reg.u1 + reg.v1, anchor.b, rel_tol);
    return m;
}

/// Phi~(s) = Phi(t(s)) t'(s) with the chain rule done exactly from the jet of Phi.
class ReparamSource final : public PhiSource {
public:
    explicit ReparamSource(std::shared_ptr<const CanonicalMap> map) : map_(std::move(map)) {}
    Jet jet(DNum s, int order) const override {
        Jet out = first_order(s);
        if (order >= 2) {
            // No tree to differentiate; Phi~' is holomorphic, so d/ds = d/du.
            const double h = 1e-5;
            out.d2 = (1.0 / (2 * h)) * (first_order(s + DNum(h)).d1 - first_order(s - DNum(h)).d1);
            out.order = 2;
        }
        return out;
    }
    const CanonicalMap& map() const { return *map_; }

private:
    Jet first_order(DNum s) const {
        const DNum t = map_->inverse_working(s);
        const Jet b = map_->working().jet(t, 2);
        const DNum r = fourth_root_dplus(map_->epsilon * dot(b.d1, b.d1));
        const DNum r3 = r * r * r;
        const DNum dr = map_->epsilon * dot(b.d1, b.d2) * invert(2.0 * r3);
        const DNum tp = invert(r), tpp = -1.0 * dr * invert(r3);
        Jet j;
        j.order = 1;
        j.phi = tp * b.phi;
        j.d1 = (tp * tp) * b.d1 + tpp * b.phi;
        return j;
    }

    std::shared_ptr<const CanonicalMap> map_;
};

/// Largest rectangle about s(center) whose sampled boundary pulls back into the region.
inline Rect canonical_domain(const CanonicalMap& m, double margin = 0.98, int samples = 32) {
    const DNum sc = m.forward_working(m.region.center());
    const DNum g = m.rate(m.region.center());
    const double gs = std::sqrt(std::fabs(modulus_sq(g)));
    const double hu = 0.5 * (m.region.u1 - m.region.u0) * gs, hv = 0.5 * (m.region.v1 - m.region.v0) * gs;
    auto fits = [&](double lam) {
        const Rect r{sc.re - lam * hu, sc.re + lam * hu, sc.im - lam * hv, sc.im + lam * hv};
        for (int k = 0; k <= samples; ++k) {
            const double f = static_cast<double>(k) / samples;
            const DNum pts[4] = {{r.u0 + f * (r.u1 - r.u0), r.v0}, {r.u0 + f * (r.u1 - r.u0), r.v1},
                                 {r.u0, r.v0 + f * (r.v1 - r.v0)}, {r.u1, r.v0 + f * (r.v1 - r.v0)}};
            for (const DNum s : pts) {
                try {
                    if (!m.region.contains(m.inverse_working(s), 0.0)) return false;
                } catch (const DomainError&) {
                    return false;
                }
            }
        }
        return true;
    };
    double lo = 0, hi = 4;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (fits(mid) ? lo : hi) = mid;
    }
    const double lam = lo * margin;
    return {sc.re - lam * hu, sc.re + lam * hu, sc.im - lam * hv, sc.im + lam * hv};
}

inline SurfacePatch reparametrize(const CanonicalMap& map) {
    auto shared = std::make_shared<const CanonicalMap>(map);
    SurfacePatch out(std::make_shared<ReparamSource>(shared), canonical_domain(map), map.working().label() + "~");
    for (const auto& r : map.working().history()) out = out.with_record(r);
    return out.with_record({"canonical", "t0=" + to_string(map.t0) + " eps=" + to_string(map.epsilon),
                            map.pre_conjugation ? "conj(t)=t(s)" : "t=t(s)"});
}

inline SurfacePatch reparametrize(const SurfacePatch& patch, const CanonicalMap& map) {
    if (patch.label() != map.working().label()) throw ValidationError("reparametrize: map was built for another patch");
    return reparametrize(map);
}

// ---- canonical frame ---------------------------------------------------------

struct CanonicalFrame {
    Vec4 m1{}, m2{};
    double phi_angle = 0;
    DNum delta{1.0};
    DNum epsilon{1.0};
    DNum beta{};
    DNum c1{}, c2{};
};

inline DNum snap_unit(DNum x, double tol) {
    for (const DNum u : {DNum(1.0), DNum(-1.0), j_unit, -j_unit})
        if (abs_max(x - u) <= tol) return u;
    throw ValidationError("value " + to_string(x) + " is not one of 1, -1, j, -j");
}

/// Frame at t with beta = 0; the seed picks the starting orthonormal normal basis.
inline CanonicalFrame canonical_frame_pointwise(const PointData& d, const Mat4& seed = identity_matrix()) {
    const DNum p2 = dot(d.dphi, d.dphi);
    const DNum eps = snap_unit(p2, 1e-6);
    const NormalFrame f = normal_frame(d, seed);
    Vec4 m1 = 0.5 * (f.n1 + f.n2);
    Vec4 m2 = 0.5 * (f.n2 - f.n1);
    const Vec4D P = phi_prime_normal(d);
    DNum c1 = 2.0 * dot(P, lift(m2));
    if (on_null_cone(c1)) throw PolarError("canonical frame: c1 on the null cone");
    const PolarForm pf = polar_decompose(c1);
    m1 = pf.rho * m1;
    m2 = (1.0 / pf.rho) * m2;
    if (pf.delta == DNum(-1.0) || pf.delta == -j_unit) {
        m1 = -m1;
        m2 = -m2;
    }
    CanonicalFrame cf;
    cf.m1 = m1;
    cf.m2 = m2;
    cf.c1 = 2.0 * dot(P, lift(m2));
    cf.c2 = 2.0 * dot(P, lift(m1));
    cf.delta = (pf.delta == DNum(1.0) || pf.delta == DNum(-1.0)) ? DNum(1.0) : j_unit;
    cf.phi_angle = 2 * pf.theta;
    cf.epsilon = snap_unit(cf.c2 * invert(cf.delta * exp_j(-0.5 * cf.phi_angle)), 1e-6);
    if (cf.epsilon != eps) throw InternalError("canonical frame: eps from c2 disagrees with Phi'^2");
    return cf;
}

inline double phi_angle(const SurfacePatch& p, DNum t) {
    return canonical_frame_pointwise(point_data(p, t)).phi_angle;
}

/// beta = (j/2) dphi/dt = phi_v/4 + j phi_u/4, by central differences of the phi field.
inline CanonicalFrame canonical_frame(const SurfacePatch& p, DNum t, const Mat4& seed = identity_matrix(),
                                      double beta_step = 1e-5) {
    p.require_in_domain(t);
    CanonicalFrame cf = canonical_frame_pointwise(point_data(p, t), seed);
    const double h = beta_step;
    const double pu = (phi_angle(p, t + DNum(h)) - phi_angle(p, t - DNum(h))) / (2 * h);
    const double pv = (phi_angle(p, t + DNum(0, h)) - phi_angle(p, t - DNum(0, h))) / (2 * h);
    cf.beta = DNum(0.25 * pv, 0.25 * pu);
    return cf;
}

/// delta e^{j phi/2} m1 + eps delta e^{-j phi/2} m2
inline Vec4D reconstruct_normal(const CanonicalFrame& f) {
    return (f.delta * exp_j(0.5 * f.phi_angle)) * f.m1 + (f.epsilon * f.delta * exp_j(-0.5 * f.phi_angle)) * f.m2;
}

struct MetricAngle {
    double E = 0, phi_angle = 0;
};

inline MetricAngle fields_from_curvatures(double K, double kappa) {
    const double disc = K * K - kappa * kappa;
    if (std::fabs(disc) < tau0 * std::fmax(1.0, std::fmax(K * K, kappa * kappa)))
        throw DegeneratePointError("K^2 - kappa^2 vanishes");
    return {-std::pow(std::fabs(disc), -0.25), 0.5 * std::log(std::fabs((K + kappa) / (K - kappa)))};
}

}  // namespace dmin
