// dmin: command-line front end over the library.
//
// Exit codes: 0 pass, 1 validation failure (bad input, non-time-like surface, wrong region),
// 2 residual failure (a numeric check ran and missed its tolerance).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include <dmin/frenet.hpp>
#include <dmin/natural.hpp>
#include <dmin/transform.hpp>

#include "surface_spec.hpp"

using namespace dmin;
using namespace dmin::cli;

namespace {

constexpr int exit_ok = 0, exit_validation = 1, exit_residual = 2;

struct Options {
    std::string surface = "S1";
    std::string grid;
    std::string domain;
    std::string t0;
    std::string out;
    std::optional<double> step, tol;
    bool csv = false;

    // per-command
    std::string kind, motion, suite;
    double theta = 0, k = 1;
    bool all = false;
};

struct Run {
    SurfaceSpec spec;
    Rect domain;
    int nu = 21, nv = 21;
};

Run prepare(const Options& o) {
    Run r{load_surface(o.surface), {}, 21, 21};
    r.domain = o.domain.empty() ? r.spec.patch.domain() : parse_rect(o.domain);
    r.spec.patch = r.spec.patch.with_domain(r.domain);
    std::tie(r.nu, r.nv) = o.grid.empty() ? std::pair{r.spec.grid_u, r.spec.grid_v} : parse_grid(o.grid);
    return r;
}

double tol_or(const Options& o, const Run& r, double fallback) { return o.tol ? *o.tol : r.spec.tol.value_or(fallback); }
double step_or(const Options& o, const Run& r, double fallback) {
    return o.step ? *o.step : r.spec.step.value_or(fallback);
}

void require_timelike(const SurfacePatch& p, int n) {
    const ValidationReport v = validate_timelike(p, n);
    if (!v.pass) throw ValidationError(p.label() + ": " + v.message);
}

/// Evaluates f at every node in parallel; rows come back ordered by (v, u).
template <class F>
std::vector<std::string> grid_rows(const Rect& d, int nu, int nv, F f) {
    std::vector<std::string> rows(static_cast<std::size_t>(nu) * nv);
    dmin::detail::parallel_for(rows.size(), [&](std::size_t q) {
        const int i = static_cast<int>(q % nu), k = static_cast<int>(q / nu);
        const DNum t = d.node(i, k, nu, nv);
        try {
            rows[q] = f(t);
        } catch (const Error& e) {
            throw ValidationError(std::string(e.what()) + " (at u=" + format_real(t.re) + ", v=" + format_real(t.im) +
                                  ")");
        }
    });
    return rows;
}

std::string num(double x) { return std::isfinite(x) ? format_real(x) : "nan"; }

std::string sample_row(const InvariantSample& s) {
    std::string r = num(s.t.re) + "," + num(s.t.im) + "," + num(s.E) + "," + num(s.K) + "," + num(s.kappa) + "," +
                    num(s.phi_prime_sq.re) + "," + num(s.phi_prime_sq.im) + "," + type_name(s.type) + ",";
    // + 0.0 turns -0 into 0 so eps prints as 0-j1, not -0-j1.
    return r + (s.epsilon ? to_string(DNum(s.epsilon->re + 0.0, s.epsilon->im + 0.0)) : "");
}

const char* sample_header = "u,v,E,K,kappa,phi2_re,phi2_im,type,eps";

/// Writes the CSV or the report to --out (default stdout); with --csv the report goes to stderr.
struct Emitter {
    explicit Emitter(const Options& opts) : o(opts) {}

    const Options& o;
    std::ostringstream csv, report;

    void flush() {
        std::ofstream file;
        if (!o.out.empty()) {
            file.open(o.out, std::ios::binary);
            if (!file) throw ValidationError("cannot write " + o.out);
        }
        std::ostream& main = o.out.empty() ? std::cout : file;
        if (o.csv) {
            main << csv.str();
            std::cerr << report.str();
        } else {
            main << report.str();
        }
    }
};

// ---- a canonical working patch for the residual and reconstruction commands ---------------

struct CanonicalPatch {
    SurfacePatch patch;
    Rect domain;
    DNum t0;
    bool reparametrized = false;
    std::string note;
};

/// max |Phi'^2 - eps| over an n x n grid, eps read at the center.
double canonical_defect(const SurfacePatch& p, int n) {
    const Jet c = p.jet(p.domain().center(), 1);
    const DNum eps = dot(c.d1, c.d1);
    double worst = 0;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const Vec4D d1 = p.jet(p.domain().node(i, k, n, n), 1).d1;
            worst = std::fmax(worst, abs_max(dot(d1, d1) - eps));
        }
    const bool unit = abs_max(eps - DNum(1.0)) < 1e-9 || abs_max(eps + DNum(1.0)) < 1e-9 ||
                      abs_max(eps - j_unit) < 1e-9;
    return unit ? worst : INFINITY;
}

CanonicalPatch canonical_patch(const Run& r, const Options& o) {
    const SurfacePatch& p = r.spec.patch;
    const DNum t0 = o.t0.empty() ? r.domain.center() : parse_dnum(o.t0);
    if (canonical_defect(p, 11) <= 1e-9) return {p, r.domain, t0, false, "patch is already canonical"};
    const CanonicalMap m = build_canonical_map(p, r.domain, t0);
    const SurfacePatch c = reparametrize(m);
    return {c, c.domain(), DNum{}, true,
            "canonicalized on " + to_string({r.domain.u0, r.domain.v0}) + " .. " + to_string({r.domain.u1, r.domain.v1}) +
                " about t0=" + to_string(t0) + ", eps=" + to_string(m.epsilon) +
                (m.pre_conjugation ? ", pre-conjugated" : "")};
}

// ---- commands -----------------------------------------------------------------------------

int cmd_analyze(const Options& o) {
    const Run r = prepare(o);
    require_timelike(r.spec.patch, std::max(r.nu, r.nv));
    Emitter em{o};
    const auto rows = grid_rows(r.domain, r.nu, r.nv, [&](DNum t) { return sample_row(classify(r.spec.patch, t)); });
    em.csv << sample_header << '\n';
    for (const auto& row : rows) em.csv << row << '\n';

    std::map<std::string, int> types;
    int inconsistent = 0;
    for (int k = 0; k < r.nv; ++k)
        for (int i = 0; i < r.nu; ++i) {
            const InvariantSample s = classify(r.spec.patch, r.domain.node(i, k, r.nu, r.nv));
            ++types[type_name(s.type)];
            inconsistent += !s.consistent && s.type != SurfaceType::degenerate;
        }
    em.report << r.spec.patch.label() << ": " << r.nu << "x" << r.nv << " grid, time-like\n";
    for (const auto& [name, n] : types) em.report << "  " << name << ": " << n << "\n";
    em.report << "  sign(K^2 - kappa^2) disagreements: " << inconsistent << "\n";
    em.flush();
    return exit_ok;
}

/// Lenient: no time-like gate, so maps may cross the light-like and space-like parts.
int cmd_classify(const Options& o) {
    const Run r = prepare(o);
    Emitter em{o};
    std::vector<int> counts(4, 0);
    const auto rows = grid_rows(r.domain, r.nu, r.nv, [&](DNum t) {
        const Jet j = r.spec.patch.jet(t, 1);
        InvariantSample s;
        s.t = t;
        s.E = 0.5 * norm_sq(j.phi);
        s.phi_prime_sq = dot(j.d1, j.d1);
        const Classification c = classify_phi2(s.phi_prime_sq);
        s.type = c.type;
        s.epsilon = c.epsilon;
        if (s.E < -tau0) {
            const Curvatures k = curvatures_from_vectors(j.phi, j.d1);
            s.K = k.K;
            s.kappa = k.kappa;
        } else {
            s.K = s.kappa = NAN;
        }
        return sample_row(s);
    });
    em.csv << sample_header << '\n';
    for (const auto& row : rows) em.csv << row << '\n';
    for (int k = 0; k < r.nv; ++k)
        for (int i = 0; i < r.nu; ++i) {
            const Jet j = r.spec.patch.jet(r.domain.node(i, k, r.nu, r.nv), 1);
            ++counts[static_cast<int>(classify_phi2(dot(j.d1, j.d1)).type)];
        }
    em.report << r.spec.patch.label() << ": type map on " << r.nu << "x" << r.nv << "\n";
    for (int t = 0; t < 4; ++t) em.report << "  " << type_name(static_cast<SurfaceType>(t)) << ": " << counts[t] << "\n";
    em.flush();
    return exit_ok;
}

int cmd_canonicalize(const Options& o) {
    const Run r = prepare(o);
    require_timelike(r.spec.patch, 21);
    const DNum t0 = o.t0.empty() ? r.domain.center() : parse_dnum(o.t0);
    const CanonicalMap m = build_canonical_map(r.spec.patch, r.domain, t0);
    const SurfacePatch c = reparametrize(m);
    const double tol = tol_or(o, r, 1e-7);
    Emitter em{o};
    double worst = 0;
    std::vector<double> defect(static_cast<std::size_t>(r.nu) * r.nv);
    const auto rows = grid_rows(r.domain, r.nu, r.nv, [&](DNum t) {
        const DNum s = m.forward(t);
        const Vec4D d1 = c.jet(s, 1).d1;
        const DNum q = dot(d1, d1);
        return num(t.re) + "," + num(t.im) + "," + num(s.re) + "," + num(s.im) + "," + num(q.re) + "," + num(q.im);
    });
    for (int k = 0; k < r.nv; ++k)
        for (int i = 0; i < r.nu; ++i) {
            const Vec4D d1 = c.jet(m.forward(r.domain.node(i, k, r.nu, r.nv)), 1).d1;
            worst = std::fmax(worst, abs_max(dot(d1, d1) - m.epsilon));
        }
    em.csv << "u,v,s_u,s_v,phi2_re,phi2_im\n";
    for (const auto& row : rows) em.csv << row << '\n';
    const Rect cd = c.domain();
    em.report << r.spec.patch.label() << ": eps=" << to_string(m.epsilon) << (m.pre_conjugation ? " (pre-conjugated)" : "")
              << ", t0=" << to_string(t0) << "\n"
              << "  canonical rectangle u in [" << format_real(cd.u0) << ", " << format_real(cd.u1) << "], v in ["
              << format_real(cd.v0) << ", " << format_real(cd.v1) << "]\n"
              << "  max |Phi~'^2 - eps| = " << format_real(worst) << " (tol " << format_real(tol) << ") "
              << (worst <= tol ? "pass" : "fail") << "\n";
    em.flush();
    return worst <= tol ? exit_ok : exit_residual;
}

int cmd_residuals(const Options& o) {
    const Run r = prepare(o);
    require_timelike(r.spec.patch, 21);
    const CanonicalPatch c = canonical_patch(r, o);
    ResidualOptions ro;
    ro.grid = std::min(r.nu, r.nv);
    ro.step = step_or(o, r, 1e-3);
    ro.tol = tol_or(o, r, c.reparametrized ? 1e-4 : 1e-5);
    ro.richardson = true;

    static const std::vector<std::string> names = {"Ephi", "Kkappa", "Sakaki", "Liouville", "Frenet"};
    std::vector<std::string> run;
    if (o.all || o.suite.empty()) {
        run = names;
    } else {
        if (std::find(names.begin(), names.end(), o.suite) == names.end())
            throw ValidationError("unknown suite '" + o.suite + "'");
        run = {o.suite};
    }
    Emitter em{o};
    em.report << c.patch.label() << ": " << c.note << "\n";
    bool pass = true, header = true;
    for (const auto& s : run) {
        ResidualReport rep;
        if (s == "Ephi") rep = natural_residual_Ephi(c.patch, c.domain, ro);
        if (s == "Kkappa") rep = natural_residual_Kkappa(c.patch, c.domain, ro);
        if (s == "Sakaki") rep = natural_residual_sakaki(c.patch, c.domain, ro);
        if (s == "Liouville") rep = liouville_residual(c.patch, c.domain, ro);
        if (s == "Frenet") {
            // Differences of a reparametrized frame carry the map's rounding; a coarser step keeps it out.
            ResidualOptions fo = ro;
            if (c.reparametrized) {
                fo.step = std::max(ro.step, 1e-2);
                fo.grid = std::min(ro.grid, 9);
                if (!o.tol && !r.spec.tol) fo.tol = 1e-3;  // O(h^2) truncation at h = 1e-2
            }
            rep = frenet_integrability_residuals(c.patch, c.domain, fo);
        }
        em.csv << rep.csv(header);
        header = false;
        pass = pass && rep.pass();
        for (const auto& e : rep.equations) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3e", e.max_abs);
            em.report << "  " << s << "." << e.id << ": " << buf << " at " << to_string(e.argmax) << " ("
                      << e.evaluated << " nodes) " << (e.pass() ? "pass" : "FAIL") << "\n";
        }
    }
    em.report << (pass ? "all suites pass" : "residual failure") << "\n";
    em.flush();
    return pass ? exit_ok : exit_residual;
}

int cmd_transform(const Options& o) {
    const Run r = prepare(o);
    require_timelike(r.spec.patch, 21);
    const SurfacePatch& src = r.spec.patch;
    double det_sign = 1, k = 1;
    SurfacePatch dst = src;
    if (o.kind == "associated") {
        dst = associated(src, o.theta);
    } else if (o.kind == "conjugate") {
        dst = conjugate(src);
    } else if (o.kind == "motion" || o.kind == "anti_isometry" || o.kind == "m_bar_a") {
        const Motion m = load_motion(o.motion.empty() ? (o.kind == "motion" ? "flip1" : "swap") : o.motion);
        det_sign = m.det_sign;
        dst = o.kind == "motion" ? apply_motion(src, m) : o.kind == "m_bar_a" ? m_bar_a(src, m) : apply_anti_isometry(src, m);
    } else if (o.kind == "homothety") {
        k = o.k;
        dst = homothety(src, k);
    } else {
        throw ValidationError("unknown transform kind '" + o.kind + "'");
    }
    const TransformRecord& rec = dst.history().back();
    const double tol = tol_or(o, r, 1e-9);
    const LawCheck law = check_law(src, dst, std::min(r.nu, r.nv), det_sign, k);
    Emitter em{o};
    const auto rows = grid_rows(dst.domain(), r.nu, r.nv, [&](DNum s) {
        const InvariantSample got = classify(dst, s);
        const LawPrediction want = predict(src, rec, s, det_sign, k);
        return sample_row(got) + "," + num(want.t.re) + "," + num(want.t.im) + "," + num(want.E) + "," + num(want.K) +
               "," + num(want.kappa) + "," + num(want.phi_prime_sq.re) + "," + num(want.phi_prime_sq.im);
    });
    em.csv << sample_header << ",t_u,t_v,E_pred,K_pred,kappa_pred,phi2_pred_re,phi2_pred_im\n";
    for (const auto& row : rows) em.csv << row << '\n';
    em.report << dst.label() << ": " << rec.kind << (rec.parameters.empty() ? "" : " " + rec.parameters)
              << ", substitution " << rec.substitution << "\n"
              << "  max rel error E " << format_real(law.max_rel_E) << ", K " << format_real(law.max_rel_K) << ", kappa "
              << format_real(law.max_rel_kappa) << ", Phi'^2 " << format_real(law.max_rel_phi2) << " (tol "
              << format_real(tol) << ") " << (law.pass(tol) ? "pass" : "FAIL") << "\n";
    em.flush();
    return law.pass(tol) ? exit_ok : exit_residual;
}

int cmd_reconstruct(const Options& o) {
    const Run r = prepare(o);
    require_timelike(r.spec.patch, 21);
    const CanonicalPatch c = canonical_patch(r, o);
    const double step = step_or(o, r, c.reparametrized ? 1.0 / 32 : 1.0 / 128);
    const double tol = tol_or(o, r, c.reparametrized ? 1e-4 : 1e-5);
    const CanonicalData d = canonical_data(c.patch);
    Emitter em{o};
    em.report << c.patch.label() << ": " << c.note << ", RK4 step " << format_real(step) << "\n";
    Reconstruction rec;
    try {
        rec = reconstruct(d, c.t0, initial_state(c.patch, c.t0), c.domain, step);
    } catch (const DriftError& e) {
        em.report << "  " << e.what() << "\n  FAIL\n";
        em.flush();
        return exit_residual;
    }
    const RoundTripReport rt = compare_reconstruction(c.patch, d, rec, tol);
    em.csv << "u,v,x1,x2,x3,x4,phi1_re,phi1_im,phi2_re,phi2_im,phi3_re,phi3_im,phi4_re,phi4_im\n";
    for (std::size_t k = 0; k < rec.vs.size(); ++k)
        for (std::size_t i = 0; i < rec.us.size(); ++i) {
            const FrenetState& s = rec.at(i, k);
            em.csv << num(rec.us[i]) << ',' << num(rec.vs[k]);
            for (double x : s.x) em.csv << ',' << num(x);
            for (const DNum& p : s.Phi) em.csv << ',' << num(p.re) << ',' << num(p.im);
            em.csv << '\n';
        }
    em.report << "  " << rec.us.size() << "x" << rec.vs.size() << " lattice, drift " << format_real(rec.max_drift)
              << ", path disagreement " << format_real(rec.path_disagreement) << "\n"
              << "  invariant error " << format_real(rt.worst()) << " (tol " << format_real(tol) << ") "
              << (rt.pass ? "pass" : "FAIL") << "\n";
    em.flush();
    return rt.pass ? exit_ok : exit_residual;
}

void add_common(CLI::App* app, Options& o) {
    app->add_option("--surface", o.surface, "S1, S2 or a spec file")->capture_default_str();
    app->add_option("--grid", o.grid, "NxM sample grid");
    app->add_option("--domain", o.domain, "u0,u1,v0,v1");
    app->add_option("--step", o.step, "finite-difference or integration step");
    app->add_option("--tol", o.tol, "pass tolerance");
    app->add_option("--out", o.out, "output path (default stdout)");
    app->add_flag("--csv", o.csv, "emit CSV; the report goes to stderr");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimal time-like surfaces in R^4_2 over the double numbers"};
    app.require_subcommand(1);
    Options o;

    auto* analyze = app.add_subcommand("analyze", "invariant grid (E, K, kappa, Phi'^2, type)");
    auto* classify = app.add_subcommand("classify", "type map; no time-like gate");
    auto* canon = app.add_subcommand("canonicalize", "canonical coordinates over a single-type region");
    auto* resid = app.add_subcommand("residuals", "natural-equation residual suites");
    auto* trans = app.add_subcommand("transform", "apply a transform and check its law");
    auto* recon = app.add_subcommand("reconstruct", "rebuild from (E, phi, eps, delta) by RK4");
    for (auto* s : {analyze, classify, canon, resid, trans, recon}) add_common(s, o);
    for (auto* s : {canon, resid, recon}) s->add_option("--t0", o.t0, "base point u+jv");
    resid->add_option("--suite", o.suite, "Ephi, Kkappa, Sakaki, Liouville or Frenet");
    resid->add_flag("--all", o.all, "every suite");
    trans->add_option("--kind", o.kind, "associated, conjugate, motion, anti_isometry, homothety, m_bar_a")->required();
    trans->add_option("--theta", o.theta, "associated family angle");
    trans->add_option("--k", o.k, "homothety factor");
    trans->add_option("--motion", o.motion, "motion file, or flip1 / swap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        if (*analyze) return cmd_analyze(o);
        if (*classify) return cmd_classify(o);
        if (*canon) return cmd_canonicalize(o);
        if (*resid) return cmd_residuals(o);
        if (*trans) return cmd_transform(o);
        if (*recon) return cmd_reconstruct(o);
    } catch (const DriftError& e) {
        std::cerr << "dmin: " << e.what() << "\n";
        return exit_residual;
    } catch (const ResidualError& e) {
        std::cerr << "dmin: " << e.what() << "\n";
        return exit_residual;
    } catch (const std::exception& e) {
        std::cerr << "dmin: " << e.what() << "\n";
        return exit_validation;
    }
    return exit_validation;
}
