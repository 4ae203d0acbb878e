#pragma once

/// Finite-difference residuals of the natural equations and the Frenet integrability conditions.

#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "canonical.hpp"

namespace dmin {

/// d^2/du^2 - d^2/dv^2 by central differences, for real or D-valued fields.
template <class F>
auto hyper_laplacian_fd(const F& f, DNum t, double h) -> decltype(f(t)) {
    return (f(t + DNum(h)) + f(t - DNum(h)) - f(t + DNum(0, h)) - f(t - DNum(0, h))) / (h * h);
}

/// d/dt = (d/du + j d/dv)/2 of a real field.
inline DNum d_dt_fd(const std::function<double(DNum)>& f, DNum t, double h) {
    const double fu = (f(t + DNum(h)) - f(t - DNum(h))) / (2 * h);
    const double fv = (f(t + DNum(0, h)) - f(t - DNum(0, h))) / (2 * h);
    return {0.5 * fu, 0.5 * fv};
}

struct ResidualOptions {
    int grid = 21;
    double step = 1e-3;
    double tol = 1e-5;
    bool richardson = false;  // (4 L(h/2) - L(h)) / 3 for every Laplacian
};

struct EquationResidual {
    std::string id;
    double max_abs = 0;
    DNum argmax{};
    double step = 0, tol = 0;
    int evaluated = 0, skipped = 0;
    bool pass() const { return evaluated > 0 && std::isfinite(max_abs) && max_abs <= tol; }
};

struct ResidualReport {
    std::string suite;
    std::vector<EquationResidual> equations;

    bool pass() const {
        for (const auto& e : equations)
            if (!e.pass()) return false;
        return !equations.empty();
    }
    double max_abs() const {
        double m = 0;
        for (const auto& e : equations) m = std::fmax(m, e.max_abs);
        return m;
    }
    /// equation,max_residual,argmax_u,argmax_v,step,evaluated,skipped,verdict
    std::string csv(bool header = true) const {
        std::ostringstream os;
        if (header) os << "equation,max_residual,argmax_u,argmax_v,step,evaluated,skipped,verdict\n";
        char buf[64];
        for (const auto& e : equations) {
            std::snprintf(buf, sizeof buf, "%.6e", e.max_abs);
            os << suite << '.' << e.id << ',' << buf << ',' << format_real(e.argmax.re) << ','
               << format_real(e.argmax.im) << ',' << format_real(e.step) << ',' << e.evaluated << ',' << e.skipped
               << ',' << (e.pass() ? "pass" : "fail") << '\n';
        }
        return os.str();
    }
};

/// Runs `f` at the nodes of an n x n grid whose stencil of the given radius stays inside `region`.
inline ResidualReport residual_grid(std::string suite, const std::vector<std::string>& ids, const Rect& region,
                                    const ResidualOptions& o, double radius,
                                    const std::function<std::vector<double>(DNum)>& f) {
    ResidualReport r;
    r.suite = std::move(suite);
    for (const auto& id : ids) r.equations.push_back({id, 0.0, {}, o.step, o.tol, 0, 0});
    const Rect inner{region.u0 + radius, region.u1 - radius, region.v0 + radius, region.v1 - radius};
    for (int k = 0; k < o.grid; ++k)
        for (int i = 0; i < o.grid; ++i) {
            const DNum t = region.node(i, k, o.grid, o.grid);
            if (!inner.contains(t, 0.0)) {
                for (auto& e : r.equations) ++e.skipped;
                continue;
            }
            std::vector<double> res;
            try {
                res = f(t);
            } catch (const DegenerateMetricError& e) {
                throw DegeneratePointError(std::string(e.what()) + " inside the stencil at " + to_string(t));
            }
            for (std::size_t q = 0; q < ids.size(); ++q) {
                auto& e = r.equations[q];
                ++e.evaluated;
                const double a = std::fabs(res[q]);
                if (!(a <= e.max_abs)) {  // also catches NaN
                    e.max_abs = std::isnan(a) ? INFINITY : a;
                    e.argmax = t;
                }
            }
        }
    return r;
}

/// Pointwise scalar fields of a canonical patch, evaluated off-domain as the stencil needs.
struct NaturalFields {
    SurfacePatch patch;
    DNum epsilon{1.0}, delta{1.0};
    std::function<double(DNum)> phi_perturbation;  // negative controls only

    explicit NaturalFields(SurfacePatch p, std::function<double(DNum)> perturb = {})
        : patch(std::move(p)), phi_perturbation(std::move(perturb)) {
        const CanonicalFrame f = canonical_frame_pointwise(point_data(patch, patch.domain().center()));
        epsilon = f.epsilon;
        delta = f.delta;
    }
    double E(DNum t) const {
        const double e = 0.5 * norm_sq(patch.phi(t));
        if (std::fabs(e) < tau0) throw DegenerateMetricError("|E| below tolerance at " + to_string(t));
        return e;
    }
    double phi(DNum t) const {
        const double p = canonical_frame_pointwise(point_data(patch, t)).phi_angle;
        return phi_perturbation ? p + phi_perturbation(t) : p;
    }
    Curvatures K(DNum t) const {
        const Jet j = patch.jet(t, 1);
        return curvatures_from_vectors(j.phi, j.d1);
    }
    /// eps-bar |delta|^2 e^{j phi}
    DNum w(double phi_angle) const { return conj(epsilon) * modulus_sq(delta) * exp_j(phi_angle); }
};

namespace detail {

template <class F>
auto lap(const F& f, DNum t, const ResidualOptions& o) -> decltype(f(t)) {
    if (!o.richardson) return hyper_laplacian_fd(f, t, o.step);
    return (4.0 * hyper_laplacian_fd(f, t, o.step / 2) - hyper_laplacian_fd(f, t, o.step)) / 3.0;
}

inline std::vector<double> ephi_at(const NaturalFields& F, DNum t, const ResidualOptions& o) {
    const double E = F.E(t);
    const DNum w = F.w(F.phi(t));
    const double l1 = lap([&](DNum x) { return std::log(std::fabs(F.E(x))); }, t, o);
    const double l2 = lap([&](DNum x) { return F.phi(x); }, t, o);
    return {l1 - 2 * w.re / E, l2 + 2 * w.im / E};
}

}  // namespace detail

/// Delta ln|E| - 2 Re(w)/E and Delta phi + 2 Im(w)/E.
inline ResidualReport natural_residual_Ephi(const SurfacePatch& p, const Rect& region, const ResidualOptions& o = {}) {
    const NaturalFields F(p);
    return residual_grid("Ephi", {"E", "phi"}, region, o, o.step,
                         [&](DNum t) { return detail::ephi_at(F, t, o); });
}

/// (K^2-kappa^2)^{1/4} Delta ln|K^2-kappa^2| + 8K and (K^2-kappa^2)^{1/4} Delta ln|(K+kappa)/(K-kappa)| + 4kappa.
inline ResidualReport natural_residual_Kkappa(const SurfacePatch& p, const Rect& region,
                                              const ResidualOptions& o = {}) {
    const NaturalFields F(p);
    auto disc = [&](DNum x) {
        const Curvatures c = F.K(x);
        const double d = c.K * c.K - c.kappa * c.kappa;
        if (std::fabs(d) < tau0 * std::fmax(1.0, std::fmax(c.K * c.K, c.kappa * c.kappa)))
            throw DegeneratePointError("K^2 - kappa^2 vanishes at " + to_string(x));
        return d;
    };
    return residual_grid("Kkappa", {"K", "kappa"}, region, o, o.step, [&](DNum t) {
        const Curvatures c = F.K(t);
        const double q = std::pow(std::fabs(disc(t)), 0.25);
        const double l1 = detail::lap([&](DNum x) { return std::log(std::fabs(disc(x))); }, t, o);
        const double l2 = detail::lap(
            [&](DNum x) {
                const Curvatures k = F.K(x);
                return std::log(std::fabs((k.K + k.kappa) / (k.K - k.kappa)));
            },
            t, o);
        return std::vector<double>{q * l1 + 8 * c.K, q * l2 + 4 * c.kappa};
    });
}

/// (1/E) Delta ln|K +- kappa| - 2(2K +- kappa). Valid in any isothermal coordinates.
inline ResidualReport natural_residual_sakaki(const SurfacePatch& p, const Rect& region,
                                              const ResidualOptions& o = {}) {
    auto curv = [&](DNum x) {
        const Jet j = p.jet(x, 1);
        const Curvatures c = curvatures_from_vectors(j.phi, j.d1);
        if (std::fabs(c.K + c.kappa) < tau0 || std::fabs(c.K - c.kappa) < tau0)
            throw DegeneratePointError("K +- kappa vanishes at " + to_string(x));
        return c;
    };
    const SurfacePatch& patch = p;
    return residual_grid("Sakaki", {"plus", "minus"}, region, o, o.step, [&](DNum t) {
        const Curvatures c = curv(t);
        const double E = 0.5 * norm_sq(patch.phi(t));
        const double lp = detail::lap([&](DNum x) { const Curvatures k = curv(x); return std::log(std::fabs(k.K + k.kappa)); }, t, o);
        const double lm = detail::lap([&](DNum x) { const Curvatures k = curv(x); return std::log(std::fabs(k.K - k.kappa)); }, t, o);
        return std::vector<double>{lp / E - 2 * (2 * c.K + c.kappa), lm / E - 2 * (2 * c.K - c.kappa)};
    });
}

/// Delta lambda - 2 eps-bar |delta|^2 e^lambda for a D-valued field lambda; reports both components.
inline ResidualReport liouville_residual(const std::function<DNum(DNum)>& lambda, DNum epsilon, DNum delta,
                                         const Rect& region, const ResidualOptions& o = {}) {
    return residual_grid("Liouville", {"re", "im"}, region, o, o.step, [&](DNum t) {
        const DNum r = detail::lap(lambda, t, o) - 2.0 * conj(epsilon) * modulus_sq(delta) * exp(lambda(t));
        return std::vector<double>{r.re, r.im};
    });
}

/// lambda = eta + j phi with E = -e^{-eta}.
inline ResidualReport liouville_residual(const SurfacePatch& p, const Rect& region, const ResidualOptions& o = {}) {
    const NaturalFields F(p);
    return liouville_residual([&](DNum t) { return DNum(-std::log(-F.E(t)), F.phi(t)); }, F.epsilon, F.delta, region,
                              o);
}

/// beta from the frame: 2 (dm1/dt) . m2 with dm1/dt by central differences.
inline DNum beta_from_frame(const SurfacePatch& p, DNum t, double h) {
    auto m1 = [&](DNum x) { return canonical_frame_pointwise(point_data(p, x)).m1; };
    const Vec4 mu = (1.0 / (2 * h)) * (m1(t + DNum(h)) - m1(t - DNum(h)));
    const Vec4 mv = (1.0 / (2 * h)) * (m1(t + DNum(0, h)) - m1(t - DNum(0, h)));
    const Vec4 m2 = canonical_frame_pointwise(point_data(p, t)).m2;
    return {dot(mu, m2), dot(mv, m2)};
}

/// Gauss, Codazzi (beta = (j/2) dphi/dt) and Ricci (Im dbeta/dt-bar + Im(w)/(4E)) conditions.
inline ResidualReport frenet_integrability_residuals(const SurfacePatch& p, const Rect& region,
                                                     const ResidualOptions& o = {},
                                                     std::function<double(DNum)> phi_perturbation = {}) {
    const NaturalFields F(p, std::move(phi_perturbation));
    const double h = o.step;
    return residual_grid("Frenet", {"gauss", "codazzi", "ricci"}, region, o, 2 * h, [&](DNum t) {
        const double E = F.E(t);
        const DNum w = F.w(F.phi(t));
        const double gauss = detail::lap([&](DNum x) { return std::log(std::fabs(F.E(x))); }, t, o) - 2 * w.re / E;
        const DNum beta = beta_from_frame(p, t, h);
        const DNum codazzi = beta - j_unit * 0.5 * d_dt_fd([&](DNum x) { return F.phi(x); }, t, h);
        const DNum bu = (beta_from_frame(p, t + DNum(h), h) - beta_from_frame(p, t - DNum(h), h)) / (2 * h);
        const DNum bv = (beta_from_frame(p, t + DNum(0, h), h) - beta_from_frame(p, t - DNum(0, h), h)) / (2 * h);
        const DNum dbar = 0.5 * (bu - j_unit * bv);
        const double ricci = dbar.im + w.im / (4 * E);
        return std::vector<double>{gauss, abs_max(codazzi), ricci};
    });
}

}  // namespace dmin
