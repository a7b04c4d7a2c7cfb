// One line per acceptance criterion. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include "schro/driver.hpp"
#include "schro/error_analysis.hpp"
#include "schro/hamiltonian.hpp"
#include "schro/lift.hpp"
#include "schro/oracles.hpp"
#include "schro/uq.hpp"

using namespace schro;
namespace fs = std::filesystem;

namespace {

const std::string kSpecs = SCHRO_SPEC_DIR;

double worst_drift = 0.0, worst_pgap = 0.0;
std::string worst_pgap_run;
int runs = 0;

void note_probability(const Simulation& s, const std::string& name) {
    const double g = std::abs(s.run.rec.p_formula - s.run.rec.p_measured);
    if (g > worst_pgap) worst_pgap = g, worst_pgap_run = name;
}

void note_drift(const EvolveStats& s) {
    worst_drift = std::max(worst_drift, s.norm_drift);
    ++runs;
}

Simulation run_spec(const std::string& name, ProblemFile* out = nullptr) {
    ProblemFile pf = load_problem(kSpecs + "/" + name + ".json");
    Simulation s = simulate(pf);
    note_drift(s.run.stats);
    note_probability(s, name);
    if (out) *out = pf;
    return s;
}

double rel_l2(const CVec& a, const CVec& b) {
    double e = 0.0, n = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e += std::norm(a[i] - b[i]);
        n += std::norm(b[i]);
    }
    return std::sqrt(e / n);
}

std::string fmt(const char* f, double a) {
    char b[128];
    std::snprintf(b, sizeof b, f, a);
    return b;
}

struct Verdict {
    bool pass = true;
    std::string detail;
    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [over]");
    }
};

int failures = 0;

void criterion(int n, const char* title, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail = std::string("threw: ") + e.what();
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("criterion %2d %s: %s (%s) [%.1fs]\n", n, v.pass ? "PASS" : "FAIL", title, v.detail.c_str(), sec);
    std::fflush(stdout);
}

Verdict oracle_check(const std::string& spec, double tol) {
    ProblemFile pf;
    const Simulation s = run_spec(spec, &pf);
    const OracleReport r = compare_to_oracle(pf, s);
    Verdict v;
    v.check(r.error < tol, spec + " " + r.metric + " " + fmt("%.2e", r.error));
    return v;
}

}  // namespace

int main() {
    criterion(1, "convection D=1,2 direct", [] {
        Verdict v;
        for (const char* s : {"convection", "convection2d"}) {
            ProblemFile pf;
            const Simulation sim = run_spec(s, &pf);
            v.check(sim.sys.direct(), std::string(s) + " direct");
            const OracleReport r = compare_to_oracle(pf, sim);
            v.check(r.error < 1e-8, std::string(s) + fmt(" rel L2 %.2e", r.error));
        }
        return v;
    });

    criterion(2, "heat 1-D standard pipeline", [] {
        Verdict v;
        ProblemFile pf;
        const Simulation s = run_spec("heat", &pf);
        CVec ref(s.run.rec.u.v.size());
        const auto& x = s.run.rec.u.layout->modes[0].x;
        for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = std::exp(-x[i] * x[i] / 4.0) / std::sqrt(2.0);
        v.check(rel_l2(s.run.rec.u.v, ref) < 1e-2, fmt("rel L2 %.2e", rel_l2(s.run.rec.u.v, ref)));
        // slices above xi_c against the first one past 0.5
        RecoverOptions o = recovery_options(s.sys, s.run.y0, pf.t);
        const auto slices = unwarped_slices(s.run.w, o);
        const CVec* first = nullptr;
        double spread = 0.0;
        for (const auto& [xi, u] : slices) {
            if (xi < 0.5 || xi > 2.5) continue;
            if (!first) first = &u;
            else spread = std::max(spread, rel_l2(u, *first));
        }
        v.check(first && spread < 1e-6, fmt("slice spread on [0.5, 2.5] %.2e", spread));
        const double p_ref = 0.5 / std::sqrt(1.0 + 2.0 * pf.t);
        v.check(std::abs(s.run.rec.p_measured - p_ref) < 1e-3,
                fmt("p %.5f", s.run.rec.p_measured) + fmt(" vs %.5f", p_ref));
        return v;
    });

    criterion(4, "hermiticity of assembled Hamiltonians", [] {
        Verdict v;
        GridSpec g;
        g.x = {{"x", -4, 4, 16, true}};
        g.xi_L = 8;
        g.xi_n = 16;
        GridSpec g2 = g;
        g2.x.push_back({"y", -4, 4, 16, true});
        PdeSpec forced = build_heat(1, 1.0, {0.3});
        forced.f = CoefficientExpr(Polynomial::constant(1, 0.5));
        GridSpec gu = g;
        gu.n_max = {4};
        const Polynomial c = Polynomial::constant(2, 1.0) + Polynomial::variable(2, 1, 0.5) + Polynomial::variable(2, 0, 0.2);
        std::vector<std::pair<std::string, SchrodingerisedSystem>> systems;
        systems.emplace_back("heat", schrodingerise(build_heat(1, 1.0, {0.3}), g));
        systems.emplace_back("convection", schrodingerise(build_convection(2, {1.0, -0.5}), g2));
        systems.emplace_back("fokker_planck", schrodingerise(build_fokker_planck(1, {Polynomial::monomial({1}, -1.0)}, {Polynomial::constant(1, 0.5)}), g));
        systems.emplace_back("black_scholes", schrodingerise(build_black_scholes(0.2, 0.05), g));
        systems.emplace_back("wave", schrodingerise(build_wave(1, {1.0}, Polynomial::monomial({2}, 0.1)), g));
        systems.emplace_back("forced heat", schrodingerise(forced, g));
        systems.emplace_back("liouville", schrodingerise(build_liouville(1, {Polynomial::monomial({1}, 0.5)}), g));
        systems.emplace_back("uq convection", build_uq_generator(build_uncertain_convection(1, 1, {c}), gu));
        systems.emplace_back("extended heat 2-D", schrodingerise(build_heat(2, 1.0, {0.0, 0.0}), g2, Pipeline::Extended));
        double worst = 0.0;
        for (const auto& [name, sys] : systems) {
            const HermiticityProbe h = probe_hermitian(sys.H, sys.layout, 7);
            worst = std::max(worst, h.worst);
            if (!h.hermitian) v.check(false, name);
        }
        // Maxwell: vacuum and a smooth medium, split and assembled with one ancilla
        GridSpec gm;
        gm.x = {{"x", -3, 3, 8, true}, {"y", -3, 3, 8, true}, {"z", -3, 3, 8, true}};
        gm.xi_L = 6;
        gm.xi_n = 8;
        const LayoutPtr base = make_layout(gm, 3, 0), full = make_layout(gm, 3, 1);
        const auto z = CoefficientExpr::constant(0.0);
        const Polynomial eps = Polynomial::constant(3, 2.0) + Polynomial::monomial({2, 0, 0}, 0.05) +
                               Polynomial::monomial({0, 1, 0}, 0.1);
        const Polynomial mu = Polynomial::constant(3, 1.0) + Polynomial::monomial({0, 0, 2}, 0.03);
        for (const auto& [name, m] :
             {std::pair{std::string("maxwell vacuum"), build_maxwell(CoefficientExpr::constant(1.0), CoefficientExpr::constant(1.0), {z, z, z}, z)},
              std::pair{std::string("maxwell medium"), build_maxwell(CoefficientExpr(eps), CoefficientExpr(mu), {z, z, z}, z)}}) {
            const MaxwellSystem ms = assemble_maxwell(m, *base);
            const HermitianSplit sp = hermitian_split(ms.A);
            const HermiticityProbe h = probe_hermitian(assemble_hamiltonian(sp.A1, sp.A2), full, 11);
            worst = std::max(worst, h.worst);
            if (!h.hermitian) v.check(false, name);
        }
        v.check(worst < 1e-10, fmt("%.0f", double(systems.size() + 2)) + fmt(" systems, worst %.2e", worst));
        return v;
    });

    criterion(5, "Fokker-Planck OU moments", [] { return oracle_check("ou", 1e-3); });

    criterion(6, "Black-Scholes vs Crank-Nicolson and resource row", [] {
        Verdict v = oracle_check("black_scholes", 1e-2);
        ProblemFile pf = load_problem(kSpecs + "/black_scholes.json");
        const SchrodingerisedSystem sys = schrodingerise(pf.spec, pf.grid);
        const ResourceRow r = count_resources(sys.H, sys.layout->dims(), sys.direct());
        v.check(r.qumodes == 2 && r.terms == 5 && r.max_term == "(x²p²+p²x²)⊗η",
                "row: " + format_resources(r));
        return v;
    });

    criterion(7, "wave 1-D via time-order dilation", [] {
        Verdict v = oracle_check("wave", 1e-2);
        ProblemFile pf = load_problem(kSpecs + "/wave.json");
        const SchrodingerisedSystem sys = schrodingerise(pf.spec, pf.grid);
        v.check(sys.dilation == Dilation::TimeOrder2 && sys.layout->qubits == 1, "one dilation qubit");
        return v;
    });

    criterion(8, "inhomogeneous heat via qubit dilation", [] {
        ProblemFile pf;
        const Simulation s = run_spec("heat_forced", &pf);
        const OracleReport r = compare_to_oracle(pf, s);
        Verdict v;
        v.check(r.error < 1e-2, fmt("Duhamel rel L2 %.2e", r.error));
        v.check(s.forcing_error >= 0.0 && s.forcing_error < 1e-8, fmt("|1> sector error %.2e", s.forcing_error));
        return v;
    });

    criterion(9, "extended pipeline, heat D=2", [] {
        Verdict v;
        // nx 32 and n_xi 128 per axis keeps both runs under 10 s
        Json j = load_problem(kSpecs + "/heat2d.json").raw;
        for (auto& ax : j["grid"]["x"]) ax["n"] = 32;
        j["grid"]["xi"] = {{"L", 10}, {"n", 128}};
        ProblemFile pf = parse_problem(j, kSpecs);
        pf.pipeline = "extended";
        const Simulation ext = simulate(pf);
        pf.pipeline = "standard";
        const Simulation std_ = simulate(pf);
        note_drift(ext.run.stats);
        note_drift(std_.run.stats);
        note_probability(ext, "heat2d extended");
        note_probability(std_, "heat2d standard");
        const double d = rel_l2(ext.run.rec.u.v, std_.run.rec.u.v);
        v.check(d < 1e-6, fmt("extended vs standard %.2e", d));
        // |u(t)|^2/|u0|^2 = 1/(1+2t) for the unit Gaussian in 2-D
        const double ratio = 1.0 / (1.0 + 2.0 * pf.t);
        const double squared = ratio / 4.0, single = ratio / 2.0;
        v.check(std::abs(ext.run.rec.p_measured - squared) < 1e-3,
                fmt("p %.5f", ext.run.rec.p_measured) + fmt(" vs |u|^2/(2^2|u0|^2) %.5f", squared) +
                    fmt(", unsquared-denominator reading %.5f", single));
        return v;
    });

    criterion(10, "UQ convection, n_max 4/8/12", [] {
        Verdict v;
        double prev = 1e300;
        bool monotone = true;
        for (int nmax : {4, 8, 12}) {
            ProblemFile pf = load_problem(kSpecs + "/uq_convection.json");
            Json j = pf.raw;
            j["grid"]["n_max"] = {nmax};
            pf = parse_problem(j, kSpecs);
            const Simulation s = simulate(pf);
            note_drift(s.run.stats);
            note_probability(s, "uq_convection");
            const OracleReport r = compare_to_oracle(pf, s);
            const double top = r.detail.at("top_population").get<double>();
            monotone = monotone && r.error < prev;
            prev = r.error;
            if (nmax == 8) {
                v.check(r.error < 1e-3, fmt("n_max 8 moment error %.2e", r.error));
                v.check(top < 1e-4, fmt("top population %.2e", top));
            } else {
                if (!v.detail.empty()) v.detail += "; ";
                v.detail += fmt("n_max %.0f", nmax) + fmt(" error %.2e", r.error);
            }
        }
        v.check(monotone, "monotone in n_max");
        return v;
    });

    criterion(11, "nonlinear lifts", [] {
        Verdict v;
        {
            LiftSpec s;
            s.kind = LiftKind::OdeSystem;
            s.D = 0;
            s.F = {Polynomial::variable(1, 0) - Polynomial::monomial({2}, 1.0)};
            s.lift = {{"q", -0.1, 1.2, 256, true}};
            s.gamma0 = {0.1};
            const LiftedSystem ls = ode_lift(s);
            const auto sys = schrodingerise_lift(ls, Pipeline::Auto, 10.0, 256);
            InitialData init;
            init.u0 = ls.psi0;
            std::vector<double> ts;
            for (int i = 0; i <= 20; ++i) ts.push_back(0.25 * i);
            RunConfig rc;
            rc.evolve.dt = 0.25;
            const auto rs = run_trajectory(sys, init, rc, ts);
            double worst = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const auto m = extract_moments(rs[k].rec.u.v, *sys.base, 0);
                const auto ref = oracle_rk4([](const std::vector<double>& q) { return std::vector<double>{q[0] * (1 - q[0])}; },
                                            {0.1}, ts[k], 1e-10);
                worst = std::max(worst, std::abs(m.mean[0][0] - ref[0]));
            }
            note_drift(rs.back().stats);
            v.check(worst < 1e-2, fmt("logistic worst %.2e", worst));
        }
        {
            LiftSpec s;
            s.kind = LiftKind::ScalarHyperbolic;
            s.D = 1;
            s.F = {Polynomial::variable(1, 0)};
            s.x = {{"x", 0, 2 * kPi, 128, true}};
            s.lift = {{"chi", -0.1, 1.1, 64, true}};
            s.u0 = [](std::span<const double> x) { return std::vector<double>{0.5 + 0.25 * std::sin(x[0])}; };
            const LiftedSystem ls = levelset_lift(s);
            const auto sys = schrodingerise_lift(ls);
            InitialData init;
            init.u0 = ls.psi0;
            RunConfig rc;
            rc.evolve.t_final = 0.5;
            rc.evolve.dt = 0.5;
            rc.evolve.check_boundary = false;
            const auto rr = run_system(sys, init, rc);
            note_drift(rr.stats);
            const auto m = extract_moments(rr.rec.u.v, *sys.base, 1);
            const auto& x = sys.base->modes[0].x;
            const auto o = oracle_burgers([](double y) { return 0.5 + 0.25 * std::sin(y); },
                                          [](double y) { return 0.25 * std::cos(y); }, 0.5, x);
            const double e = rel_l2(CVec(m.mean[0].begin(), m.mean[0].end()), o.values);
            v.check(e < 1e-2, fmt("Burgers rel L2 %.2e", e));
        }
        {
            LiftSpec s;
            s.kind = LiftKind::HamiltonJacobi;
            s.D = 1;
            s.H = Polynomial::monomial({2, 0}, 0.5) + Polynomial::monomial({0, 2}, 0.5);
            s.x = {{"x", -8, 8, 64, true}};
            s.lift = {{"chi", -8, 8, 64, true}};
            s.u0 = [](std::span<const double> x) { return std::vector<double>{0.5 * x[0]}; };
            s.envelope = [](std::span<const double> x) { return std::exp(-x[0] * x[0] / 2); };
            const LiftedSystem ls = hj_lift(s);
            const auto sys = schrodingerise_lift(ls);
            InitialData init;
            init.u0 = ls.psi0;
            RunConfig rc;
            rc.evolve.t_final = kPi / 2;
            rc.evolve.dt = kPi / 2;
            const auto rr = run_system(sys, init, rc);
            note_drift(rr.stats);
            const auto& X = sys.base->modes[0].x;
            const auto& C = sys.base->modes[1].x;
            CVec ref(64 * 64);
            for (int i = 0; i < 64; ++i)
                for (int j = 0; j < 64; ++j) {
                    const double x0 = -C[j], c0 = X[i];
                    ref[i * 64 + j] = std::exp(-x0 * x0 / 2) * regularized_delta(c0 - 0.5 * x0, ls.width);
                }
            const double e = rel_l2(rr.rec.u.v, ref);
            v.check(e < 1e-3, fmt("harmonic HJ rel L2 %.2e", e));
        }
        return v;
    });

    criterion(12, "ancilla and robustness bounds", [] {
        Verdict v;
        const FidelityScan f = ancilla_fidelity_scan(0.5, 1.5, 0.001);
        v.check(std::abs(f.f_best - 0.986) <= 1e-3 && std::abs(f.s_best - 0.925) <= 1e-2,
                fmt("max %.4f", f.f_best) + fmt(" at s = %.3f", f.s_best));
        double worst = 0.0;
        for (int D : {1, 2, 4})
            for (double et : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                const auto r = robustness_convection(et, 1.0, D);
                worst = std::max(worst, std::abs(r.measured - r.predicted));
            }
        v.check(worst < 1e-6, fmt("convection |measured - exp(-(eps t)^2 D/4)| %.2e", worst));
        const Problem pb = heat_problem();
        const SubstitutionResult sub = ancilla_substitution_experiment(pb, 0.925);
        note_drift(EvolveStats{sub.norm_drift});
        v.check(sub.holds, fmt("substitution fidelity %.5f", sub.fidelity) + fmt(" >= %.5f", sub.bound));
        const RobustnessReport rr = robustness_schrodingerised(pb, {0.0, 1e-3, 1e-2, 1e-1}, 0.01);
        v.check(rr.all_pass(), fmt("heat robustness sweep, eps up to %.0e", 1e-1));
        return v;
    });

    criterion(13, "deterministic field dumps", [] {
        Verdict v;
        const fs::path dir = fs::temp_directory_path() / "schro_acceptance";
        fs::create_directories(dir);
        std::string sums[2];
        for (int k = 0; k < 2; ++k) {
            ProblemFile pf;
            const Simulation s = run_spec("heat", &pf);
            FieldMeta m;
            m.shape = s.run.rec.u.layout->mode_shape();
            const auto files = write_field((dir / ("u" + std::to_string(k))).string(), s.run.rec.u.v, m);
            sums[k] = sha256_file(files[0]);
        }
        v.check(sums[0] == sums[1], "sha256 " + sums[0].substr(0, 16));
        fs::remove_all(dir);
        return v;
    });

    // every evolution above counts
    criterion(3, "unitarity of all acceptance evolutions", [] {
        Verdict v;
        v.check(worst_drift < 1e-10, fmt("%.0f runs,", runs) + fmt(" worst norm drift %.2e", worst_drift));
        return v;
    });

    // not a numbered criterion, but a stated invariant of every acceptance run
    {
        const bool ok = worst_pgap < 1e-6;
        if (!ok) ++failures;
        std::printf("invariant    %s: formula vs measured success probability (worst %.2e on %s)\n", ok ? "PASS" : "FAIL",
                    worst_pgap, worst_pgap_run.c_str());
    }

    std::printf("%d checks failed\n", failures);
    return failures == 0 ? 0 : 1;
}
