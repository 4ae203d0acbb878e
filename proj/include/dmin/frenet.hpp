#pragma once

/// Frenet-type moving frame (Phi, Phi-bar, m1, m2) and reconstruction of Phi from (E, phi, eps, delta).

#include <functional>
#include <thread>
#include <vector>

#include "canonical.hpp"

namespace dmin {

/// Scalar fields on a rectangle in canonical coordinates; t-derivatives by central differences.
struct CanonicalData {
    std::function<double(DNum)> E;
    std::function<double(DNum)> phi;
    DNum epsilon{1.0};
    DNum delta{1.0};
    double fd_step = 1e-5;

    DNum d_dt(const std::function<double(DNum)>& f, DNum t) const {
        const double h = fd_step;
        return {0.25 * (f(t + DNum(h)) - f(t - DNum(h))) / h, 0.25 * (f(t + DNum(0, h)) - f(t - DNum(0, h))) / h};
    }
    DNum dlnE_dt(DNum t) const {
        return d_dt([this](DNum x) { return std::log(std::fabs(E(x))); }, t);
    }
    DNum dphi_dt(DNum t) const { return d_dt(phi, t); }
    DNum beta(DNum t) const { return 0.5 * j_unit * dphi_dt(t); }
};

/// (E, phi, eps, delta) read off a canonical patch; `perturb` is added to phi (negative controls).
inline CanonicalData canonical_data(const SurfacePatch& p, std::function<double(DNum)> perturb = {}) {
    CanonicalData d;
    const CanonicalFrame f = canonical_frame_pointwise(point_data(p, p.domain().center()));
    d.epsilon = f.epsilon;
    d.delta = f.delta;
    d.E = [p](DNum t) { return 0.5 * norm_sq(p.phi(t)); };
    d.phi = [p, perturb](DNum t) {
        const double a = canonical_frame_pointwise(point_data(p, t)).phi_angle;
        return perturb ? a + perturb(t) : a;
    };
    return d;
}

struct FrenetState {
    Vec4D Phi{};
    Vec4 m1{}, m2{};
    Vec4 x{};  // position, integrated alongside
};

inline FrenetState operator+(const FrenetState& a, const FrenetState& b) {
    return {a.Phi + b.Phi, a.m1 + b.m1, a.m2 + b.m2, a.x + b.x};
}
inline FrenetState operator*(double s, const FrenetState& a) { return {s * a.Phi, s * a.m1, s * a.m2, s * a.x}; }

inline FrenetState apply(const Motion& m, const FrenetState& s) {
    return {m.linear(s.Phi), m.linear(s.m1), m.linear(s.m2), m.linear(s.x) + m.translation};
}

struct FrenetDerivative {
    Vec4D dPhi{}, dm1{}, dm2{};  // d/dt
};

inline FrenetDerivative frenet_rhs(const FrenetState& s, DNum t, const CanonicalData& d) {
    const double E = d.E(t);
    if (std::fabs(E) < tau0) throw DegenerateMetricError("frenet: |E| below tolerance at " + to_string(t));
    const double phi = d.phi(t);
    const DNum P = d.delta * exp_j(0.5 * phi);
    const DNum Q = d.epsilon * d.delta * exp_j(-0.5 * phi);
    const DNum beta = d.beta(t);
    const Vec4D bar = conj(s.Phi);
    FrenetDerivative r;
    r.dPhi = d.dlnE_dt(t) * s.Phi + P * s.m1 + Q * s.m2;
    r.dm1 = (-1.0 * Q / (4 * E)) * bar + beta * s.m1;
    r.dm2 = (-1.0 * P / (4 * E)) * bar - beta * s.m2;
    return r;
}

/// d/du (axis 0) or d/dv (axis 1) of the state. Phi is holomorphic; m1, m2, x are real.
inline FrenetState frenet_axis(const FrenetState& s, DNum t, const CanonicalData& d, int axis) {
    const FrenetDerivative r = frenet_rhs(s, t, d);
    if (axis == 0) return {r.dPhi, 2.0 * re(r.dm1), 2.0 * re(r.dm2), re(s.Phi)};
    return {j_unit * r.dPhi, 2.0 * im(r.dm1), 2.0 * im(r.dm2), im(s.Phi)};
}

/// The seven conserved quantities; largest deviation relative to max(1, |Phi|^2).
inline double frenet_drift(const FrenetState& s, double E) {
    const double sc = std::fmax(1.0, abs_max(s.Phi) * abs_max(s.Phi));
    double m = abs_max(dot(s.Phi, s.Phi));
    m = std::fmax(m, std::fabs(dot(s.m1, s.m1)));
    m = std::fmax(m, std::fabs(dot(s.m2, s.m2)));
    m = std::fmax(m, std::fabs(dot(s.m1, s.m2) - 0.5));
    m = std::fmax(m, abs_max(dot(s.Phi, lift(s.m1))));
    m = std::fmax(m, abs_max(dot(s.Phi, lift(s.m2))));
    m = std::fmax(m, std::fabs(norm_sq(s.Phi) - 2 * E));
    return m / sc;
}

inline FrenetState rk4_step(const FrenetState& s, DNum t, double h, int axis, const CanonicalData& d) {
    const DNum e = axis == 0 ? DNum(h) : DNum(0, h);
    const FrenetState k1 = frenet_axis(s, t, d, axis);
    const FrenetState k2 = frenet_axis(s + (0.5 * h) * k1, t + 0.5 * e, d, axis);
    const FrenetState k3 = frenet_axis(s + (0.5 * h) * k2, t + 0.5 * e, d, axis);
    const FrenetState k4 = frenet_axis(s + h * k3, t + e, d, axis);
    return s + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct Reconstruction {
    std::vector<double> us, vs;          // lattice through t0
    std::vector<FrenetState> states;     // u-first path, index k * us.size() + i
    std::vector<FrenetState> alt;        // v-first path
    double max_drift = 0;
    DNum drift_at{};
    double path_disagreement = 0;        // max |Phi| difference between the two paths
    double corner_disagreement = 0;      // at the far corner from t0

    DNum node(std::size_t i, std::size_t k) const { return {us[i], vs[k]}; }
    const FrenetState& at(std::size_t i, std::size_t k) const { return states[k * us.size() + i]; }
};

namespace detail {

inline std::vector<double> lattice(double c, double lo, double hi, double h, std::size_t& origin) {
    const int nl = static_cast<int>(std::floor((c - lo) / h + 1e-9));
    const int nr = static_cast<int>(std::floor((hi - c) / h + 1e-9));
    std::vector<double> out;
    for (int i = -nl; i <= nr; ++i) out.push_back(c + i * h);
    origin = static_cast<std::size_t>(nl);
    return out;
}

/// Fills line[origin +- n] by integrating from line[origin] along `axis` at the given nodes.
inline void sweep(std::vector<FrenetState>& line, const std::vector<DNum>& nodes, std::size_t origin, double h,
                  int axis, const CanonicalData& d) {
    for (std::size_t i = origin + 1; i < line.size(); ++i) line[i] = rk4_step(line[i - 1], nodes[i - 1], h, axis, d);
    for (std::size_t i = origin; i-- > 0;) line[i] = rk4_step(line[i + 1], nodes[i + 1], -h, axis, d);
}

template <class F>
void parallel_for(std::size_t n, F f) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

/// RK4 along u then v, and along v then u, over the lattice through t0 clipped to `domain`.
inline Reconstruction reconstruct(const CanonicalData& d, DNum t0, const FrenetState& initial, const Rect& domain,
                                  double step, double drift_limit = 1e-5) {
    const double d0 = frenet_drift(initial, d.E(t0));
    if (d0 > 1e-10) throw ValidationError("reconstruct: initial state violates the invariants by " + format_real(d0));
    Reconstruction r;
    std::size_t iu = 0, iv = 0;
    r.us = detail::lattice(t0.re, domain.u0, domain.u1, step, iu);
    r.vs = detail::lattice(t0.im, domain.v0, domain.v1, step, iv);
    const std::size_t nu = r.us.size(), nv = r.vs.size();
    r.states.assign(nu * nv, {});
    r.alt.assign(nu * nv, {});

    auto row_nodes = [&](std::size_t k) {
        std::vector<DNum> n(nu);
        for (std::size_t i = 0; i < nu; ++i) n[i] = {r.us[i], r.vs[k]};
        return n;
    };
    auto col_nodes = [&](std::size_t i) {
        std::vector<DNum> n(nv);
        for (std::size_t k = 0; k < nv; ++k) n[k] = {r.us[i], r.vs[k]};
        return n;
    };

    // u-first: spine along u at v = v0(t0), then every column along v.
    std::vector<FrenetState> spine(nu);
    spine[iu] = initial;
    detail::sweep(spine, row_nodes(iv), iu, step, 0, d);
    detail::parallel_for(nu, [&](std::size_t i) {
        std::vector<FrenetState> col(nv);
        col[iv] = spine[i];
        detail::sweep(col, col_nodes(i), iv, step, 1, d);
        for (std::size_t k = 0; k < nv; ++k) r.states[k * nu + i] = col[k];
    });
    // v-first.
    std::vector<FrenetState> vspine(nv);
    vspine[iv] = initial;
    detail::sweep(vspine, col_nodes(iu), iv, step, 1, d);
    detail::parallel_for(nv, [&](std::size_t k) {
        std::vector<FrenetState> row(nu);
        row[iu] = vspine[k];
        detail::sweep(row, row_nodes(k), iu, step, 0, d);
        for (std::size_t i = 0; i < nu; ++i) r.alt[k * nu + i] = row[i];
    });

    for (std::size_t k = 0; k < nv; ++k)
        for (std::size_t i = 0; i < nu; ++i) {
            const DNum t = r.node(i, k);
            const double E = d.E(t);
            for (const auto* s : {&r.states[k * nu + i], &r.alt[k * nu + i]}) {
                const double dr = frenet_drift(*s, E);
                if (dr > r.max_drift) {
                    r.max_drift = dr;
                    r.drift_at = t;
                }
            }
            r.path_disagreement =
                std::fmax(r.path_disagreement, abs_max(r.states[k * nu + i].Phi - r.alt[k * nu + i].Phi));
        }
    const std::size_t ci = (iu < nu - 1 - iu) ? nu - 1 : 0, ck = (iv < nv - 1 - iv) ? nv - 1 : 0;
    r.corner_disagreement = abs_max(r.at(ci, ck).Phi - r.alt[ck * nu + ci].Phi);
    if (!(r.max_drift <= drift_limit))
        throw DriftError("frenet invariants drift by " + format_real(r.max_drift) + " at " + to_string(r.drift_at));
    return r;
}

/// Source frame at t0: Phi(t0), the canonical (m1, m2) and x = Re Psi(t0) when a primitive is known.
inline FrenetState initial_state(const SurfacePatch& p, DNum t0) {
    const CanonicalFrame f = canonical_frame_pointwise(point_data(p, t0));
    FrenetState s{p.phi(t0), f.m1, f.m2, {}};
    if (p.psi()) s.x = re((*p.psi())(t0));
    return s;
}

struct RoundTripReport {
    bool pass = false;
    std::string message;
    double max_rel_E = 0, max_rel_K = 0, max_rel_kappa = 0, max_rel_phi2 = 0, max_rel_fields = 0;
    double max_drift = 0, path_disagreement = 0;
    double worst() const {
        return std::fmax(std::fmax(std::fmax(max_rel_E, max_rel_K), std::fmax(max_rel_kappa, max_rel_phi2)),
                         max_rel_fields);
    }
};

/// Invariants (E, K, kappa, Phi'^2) of the reconstruction against the source, compared on the lattice.
inline RoundTripReport compare_reconstruction(const SurfacePatch& p, const CanonicalData& d, const Reconstruction& r,
                                              double tol) {
    RoundTripReport rep;
    rep.max_drift = r.max_drift;
    rep.path_disagreement = r.path_disagreement;
    for (std::size_t k = 0; k < r.vs.size(); ++k)
        for (std::size_t i = 0; i < r.us.size(); ++i) {
            const DNum t = r.node(i, k);
            const FrenetState& s = r.at(i, k);
            const Vec4D dphi = frenet_rhs(s, t, d).dPhi;
            const Curvatures got = curvatures_from_vectors(s.Phi, dphi);
            const Jet j = p.jet(t, 1);
            const Curvatures want = curvatures_from_vectors(j.phi, j.d1);
            const double Eg = 0.5 * norm_sq(s.Phi), Ew = 0.5 * norm_sq(j.phi);
            const double ks = std::fmax(1.0, std::fmax(std::fabs(want.K), std::fabs(want.kappa)));
            rep.max_rel_E = std::fmax(rep.max_rel_E, std::fabs(Eg - Ew) / std::fmax(1.0, std::fabs(Ew)));
            rep.max_rel_K = std::fmax(rep.max_rel_K, std::fabs(got.K - want.K) / ks);
            rep.max_rel_kappa = std::fmax(rep.max_rel_kappa, std::fabs(got.kappa - want.kappa) / ks);
            rep.max_rel_phi2 = std::fmax(rep.max_rel_phi2, abs_max(dot(dphi, dphi) - dot(j.d1, j.d1)));
            const MetricAngle ea = fields_from_curvatures(got.K, got.kappa);
            const double fe = std::fmax(std::fabs(ea.E - d.E(t)) / std::fmax(1.0, std::fabs(d.E(t))),
                                        std::fabs(ea.phi_angle - d.phi(t)));
            rep.max_rel_fields = std::fmax(rep.max_rel_fields, fe);
        }
    rep.pass = rep.worst() <= tol;
    if (!rep.pass) rep.message = "invariants differ by " + format_real(rep.worst());
    return rep;
}

/// Extract (E, phi, eps, delta), rebuild from the source frame at t0, compare invariants.
inline RoundTripReport roundtrip_check(const SurfacePatch& p, const Rect& domain, DNum t0, double step,
                                       double tol = 1e-5, std::function<double(DNum)> perturb = {}) {
    const CanonicalData d = canonical_data(p, std::move(perturb));
    try {
        const Reconstruction r = reconstruct(d, t0, initial_state(p, t0), domain, step);
        return compare_reconstruction(p, d, r, tol);
    } catch (const DriftError& e) {
        RoundTripReport rep;
        rep.message = e.what();
        return rep;
    }
}

}  // namespace dmin
