#include "schro/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "schro/oracles.hpp"
#include "schro/uq.hpp"

namespace schro {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Gauss {
    std::vector<double> c;
    double w = 1.0;
    cplx amp = 1.0;
};

Gauss initial_gaussian(const ProblemFile& pf) {
    const Json j = pf.raw.value("initial", Json{{"kind", "gaussian"}});
    if (j.value("kind", std::string("gaussian")) != "gaussian")
        fail(ErrorKind::Validation, "the oracle needs Gaussian initial data");
    Gauss g;
    g.c = j.value("center", std::vector<double>(pf.grid.x.size(), 0.0));
    g.w = j.value("width", 1.0);
    if (j.contains("amplitude")) {
        const Json& a = j.at("amplitude");
        g.amp = a.is_array() ? cplx(a[0].get<double>(), a[1].get<double>()) : cplx(a.get<double>());
    }
    return g;
}

double param(const OracleSpec& o, const std::string& k, double def) {
    auto it = o.params.find(k);
    return it == o.params.end() ? def : it->second;
}

double param(const OracleSpec& o, const std::string& k) {
    auto it = o.params.find(k);
    if (it == o.params.end()) fail(ErrorKind::Validation, "oracle parameter '" + k + "' missing");
    return it->second;
}

double rel_l2(const CVec& u, const CVec& ref) {
    if (u.size() != ref.size()) fail(ErrorKind::Validation, "oracle and field differ in size");
    double e = 0.0, n = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        e += std::norm(u[i] - ref[i]);
        n += std::norm(ref[i]);
    }
    return std::sqrt(e / n);
}

// first spatial axis of the recovered layout
const ModeAxis& axis0(const Simulation& s) { return s.run.rec.u.layout->modes.at(0); }

}  // namespace

double DetectorProfile::operator()(double x) const {
    if (!xi.empty()) {
        if (x <= xi.front()) return f.front();
        if (x >= xi.back()) return f.back();
        const auto it = std::upper_bound(xi.begin(), xi.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xi.begin());
        const double s = (x - xi[i - 1]) / (xi[i] - xi[i - 1]);
        return (1.0 - s) * f[i - 1] + s * f[i];
    }
    if (x >= lo && x <= hi) return 1.0;
    if (ramp <= 0.0) return 0.0;
    const double d = x < lo ? lo - x : x - hi;
    return std::max(0.0, 1.0 - d / ramp);
}

DetectorProfile detector_from_json(const Json& j) {
    DetectorProfile p;
    try {
        if (j.is_array()) {
            const auto v = j.get<std::vector<double>>();
            if (v.size() < 2) fail(ErrorKind::Validation, "detector needs [lo, hi(, ramp)]");
            p.lo = v[0];
            p.hi = v[1];
            p.ramp = v.size() > 2 ? v[2] : 0.0;
        } else if (j.contains("xi")) {
            p.xi = j.at("xi").get<std::vector<double>>();
            p.f = j.at("f").get<std::vector<double>>();
            if (p.xi.size() != p.f.size() || p.xi.size() < 2 || !std::is_sorted(p.xi.begin(), p.xi.end()))
                fail(ErrorKind::Validation, "detector table needs ascending xi and matching f");
        } else {
            p.lo = j.value("lo", 0.0);
            p.hi = j.value("hi", 1e300);
            p.ramp = j.value("ramp", 0.0);
        }
    } catch (const Json::exception& e) {
        fail(ErrorKind::Validation, std::string("bad detector profile: ") + e.what());
    }
    if (!(p.hi > p.lo) || p.ramp < 0.0) fail(ErrorKind::Validation, "detector window is empty");
    return p;
}

RunConfig run_config(const ProblemFile& pf, int threads) {
    RunConfig rc;
    rc.evolve.t_final = pf.t;
    rc.evolve.dt = pf.dt;
    rc.evolve.krylov_m = pf.krylov_m;
    rc.evolve.krylov_tol = pf.krylov_tol;
    rc.evolve.threads = threads;
    rc.recover = pf.recover;
    rc.xi_star = pf.xi_star;
    rc.margin = pf.margin;
    rc.evolve.check_boundary = pf.check_boundary;
    if (pf.recover == "imperfect") {
        if (pf.detector.is_null()) fail(ErrorKind::Validation, "imperfect recovery needs a detector");
        rc.profile = detector_from_json(pf.detector);
    }
    return rc;
}

Simulation simulate(const ProblemFile& pf, int threads) {
    Simulation s;
    auto t0 = std::chrono::steady_clock::now();
    const Pipeline p = pipeline_from_name(pf.pipeline);
    s.sys = pf.spec.L > 0 ? build_uq_generator(pf.spec, pf.grid, p) : schrodingerise(pf.spec, pf.grid, p);
    s.t_schrodingerise = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    s.run = run_system(s.sys, pf.init, run_config(pf, threads));
    const double total = seconds_since(t0);
    s.t_evolve = s.run.stats.seconds;
    s.t_recover = std::max(0.0, total - s.t_evolve);
    if (s.sys.dilation == Dilation::Inhomogeneous) {
        // the forcing sector is constant in time
        GridState f1;
        if (s.sys.direct()) {
            f1 = project_qubit(s.run.final_state, s.sys.dil_qubit, 1);
        } else {
            RecoverOptions o = recovery_options(s.sys, s.run.y0, pf.t);
            o.sector = 1;
            o.margin = pf.margin;
            f1 = recover_integrate(s.run.w, o).u;
        }
        double e = 0.0, m = 0.0;
        for (std::size_t i = 0; i < s.sys.forcing.size(); ++i) {
            e = std::max(e, std::abs(f1.v[i] - s.sys.forcing[i]));
            m = std::max(m, std::abs(s.sys.forcing[i]));
        }
        s.forcing_error = m > 0.0 ? e / m : e;
    }
    return s;
}

OracleReport compare_to_oracle(const ProblemFile& pf, const Simulation& s) {
    if (!pf.oracle) fail(ErrorKind::Validation, "problem file has no oracle section");
    const OracleSpec& o = *pf.oracle;
    OracleReport r;
    r.problem = o.problem;
    r.tol = o.tol;
    r.metric = "relative L2";
    const CVec& u = s.run.rec.u.v;
    const double t = pf.t;

    if (o.problem == "convection") {
        const Gauss g = initial_gaussian(pf);
        const Layout& L = *s.run.rec.u.layout;
        const int D = static_cast<int>(L.modes.size());
        std::vector<double> a(D);
        for (int j = 0; j < D; ++j) a[j] = param(o, "a" + std::to_string(j + 1));
        CVec ref(L.mode_size());
        for_each_index(L.mode_shape(), [&](std::size_t flat, const std::vector<int>& idx) {
            double r2 = 0.0;
            for (int j = 0; j < D; ++j) {
                const double d = L.modes[j].x[idx[j]] - a[j] * t - g.c.at(j);
                r2 += d * d;
            }
            ref[flat] = g.amp * std::exp(-r2 / (2.0 * g.w * g.w));
        });
        r.method = "exact translation";
        r.error = rel_l2(u, ref);
    } else if (o.problem == "heat") {
        const Gauss g = initial_gaussian(pf);
        const Layout& L = *s.run.rec.u.layout;
        const int D = static_cast<int>(L.modes.size());
        const double a = param(o, "a", 1.0);
        cplx f0 = 0.0;
        if (pf.spec.f) {
            if (!pf.spec.f->is_polynomial() || !pf.spec.f->poly().is_constant())
                fail(ErrorKind::Validation, "heat oracle handles constant forcing only");
            f0 = pf.spec.f->poly().constant_term();
        }
        CVec ref;
        if (D == 1) {
            const double c = g.c.at(0), w = g.w;
            const auto& ax = L.modes[0];
            const OracleResult o1 = oracle_heat([&](double x) { return std::exp(-(x - c) * (x - c) / (2 * w * w)); },
                                                a, t, ax.x, ax.lo - 10 * w, ax.hi + 10 * w);
            ref = o1.values;
            for (auto& v : ref) v *= g.amp;
            r.method = o1.method;
            r.accuracy = o1.accuracy;
        } else {
            // isotropic Gaussian stays Gaussian
            const double s2 = g.w * g.w + 2.0 * a * t;
            const double fac = std::pow(g.w * g.w / s2, 0.5 * D);
            ref.assign(L.mode_size(), 0.0);
            for_each_index(L.mode_shape(), [&](std::size_t flat, const std::vector<int>& idx) {
                double r2 = 0.0;
                for (int j = 0; j < D; ++j) r2 += std::pow(L.modes[j].x[idx[j]] - g.c.at(j), 2);
                ref[flat] = g.amp * fac * std::exp(-r2 / (2.0 * s2));
            });
            r.method = "Gaussian closed form";
        }
        if (f0 != 0.0) {
            for (auto& v : ref) v += f0 * t;
            r.method += " + Duhamel";
        }
        r.error = rel_l2(u, ref);
    } else if (o.problem == "wave") {
        const Gauss g = initial_gaussian(pf);
        const auto& ax = axis0(s);
        const OracleResult w = oracle_dalembert(
            [&](double x) { return std::exp(-std::pow(x - g.c.at(0), 2) / (2 * g.w * g.w)); }, param(o, "s", 1.0),
            t, ax.x);
        CVec ref = w.values;
        for (auto& v : ref) v *= g.amp;
        r.method = w.method;
        r.accuracy = w.accuracy;
        r.error = rel_l2(u, ref);
    } else if (o.problem == "black_scholes") {
        const Gauss g = initial_gaussian(pf);
        const auto& ax = axis0(s);
        const OracleResult b = oracle_black_scholes(
            [&](double x) { return std::exp(-std::pow(x - g.c.at(0), 2) / (2 * g.w * g.w)); }, param(o, "sigma"),
            param(o, "r"), t, ax.x, param(o, "lo", ax.lo), param(o, "hi", ax.hi));
        CVec ref = b.values;
        for (auto& v : ref) v *= g.amp;
        r.method = b.method;
        r.accuracy = b.accuracy;
        r.error = rel_l2(u, ref);
    } else if (o.problem == "ou") {
        const Gauss g = initial_gaussian(pf);
        const auto& ax = axis0(s);
        double m0 = 0.0, m1 = 0.0, m2 = 0.0;
        for (int i = 0; i < ax.n; ++i) {
            const double v = u[i].real();
            m0 += v;
            m1 += v * ax.x[i];
            m2 += v * ax.x[i] * ax.x[i];
        }
        const double mean = m1 / m0, var = m2 / m0 - mean * mean;
        const OuMoments ref = oracle_ou_moments(g.c.at(0), g.w * g.w, param(o, "c"), param(o, "a"), t);
        r.method = "moment ODE";
        r.metric = "max abs moment error";
        r.error = std::max(std::abs(mean - ref.mean), std::abs(var - ref.var));
        r.detail = Json{{"mean", mean}, {"var", var}, {"mean_ref", ref.mean}, {"var_ref", ref.var}};
    } else if (o.problem == "uq_convection") {
        const Gauss g = initial_gaussian(pf);
        const Layout& L = *s.run.rec.u.layout;
        const ChaosStatistics st = extract_statistics(u, L);
        const auto& ax = L.modes.at(0);
        const UqOracle q = oracle_uq_convection(
            [&](double x) { return std::abs(g.amp) * std::exp(-std::pow(x - g.c.at(0), 2) / (2 * g.w * g.w)); },
            param(o, "c1"), param(o, "c2"), t, ax.x);
        double em = 0.0, ev = 0.0;
        for (int i = 0; i < ax.n; ++i) {
            em = std::max(em, std::abs(st.mean[i] - q.mean[i]));
            ev = std::max(ev, std::abs(st.variance[i] - q.var[i]));
        }
        r.method = "Gauss-Hermite characteristics";
        r.metric = "max abs error of mean and variance";
        r.error = std::max(em, ev);
        r.detail = Json{{"mean_error", em}, {"variance_error", ev}, {"top_population", st.top_population}};
    } else {
        fail(ErrorKind::Validation, "no oracle for problem '" + o.problem + "'");
    }
    r.pass = std::isfinite(r.error) && r.error < r.tol;
    return r;
}

Json recovery_json(const Simulation& s) {
    const RecoveryResult& r = s.run.rec;
    Json j{{"mode", r.mode},
           {"pipeline", pipeline_name(s.sys.pipeline)},
           {"p_formula", r.p_formula},
           {"p_measured", r.p_measured},
           {"p_continuum", r.p_continuum},
           {"norm_u", r.norm_u},
           {"norm_u0", r.norm_u0},
           {"xi_c", r.xi_c},
           {"xi_star", r.xi_star},
           {"xi_decay_point", s.run.xi_star},
           {"xi_tail", s.run.xi_tail},
           {"norm_drift", s.run.stats.norm_drift},
           {"max_step_drift", s.run.stats.max_step_drift},
           {"boundary_mass", s.run.stats.boundary_mass},
           {"krylov_substeps", s.run.stats.substeps},
           {"applies", s.run.stats.applies}};
    if (s.forcing_error >= 0.0) j["forcing_sector_error"] = s.forcing_error;
    return j;
}

}  // namespace schro
