#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "schro/driver.hpp"
#include "schro/error_analysis.hpp"
#include "schro/hamiltonian.hpp"
#include "schro/io.hpp"

using namespace schro;
namespace fs = std::filesystem;

namespace {

enum Exit { Ok = 0, Invalid = 2, GuardTripped = 3, OracleFailed = 4 };

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Guard:
        case ErrorKind::Numerical: return GuardTripped;
        default: return Invalid;
    }
}

struct Common {
    int threads = 0;
    std::uint64_t seed = 0;
    std::string out;
};

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream f(p);
    if (!f) fail(ErrorKind::Io, "cannot write " + p.string());
    f << s;
}

// Lists every file in the directory (manifest.json itself without a checksum).
void write_manifest(const fs::path& dir, Json m) {
    Json files = Json::array();
    std::vector<fs::path> paths;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() != "manifest.json") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (const auto& p : paths)
        files.push_back(Json{{"path", fs::relative(p, dir).string()},
                             {"size", fs::file_size(p)},
                             {"sha256", sha256_file(p.string())}});
    files.push_back(Json{{"path", "manifest.json"}, {"self", true}});
    m["output_dir"] = fs::absolute(dir).string();
    m["files"] = files;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

fs::path prepare_out(const std::string& out, const std::string& fallback) {
    fs::path d = out.empty() ? fs::path("schro_out") / fallback : fs::path(out);
    fs::create_directories(d);
    return d;
}

struct SimulateOpts {
    std::string spec, pipeline, recover;
    bool oracle = false, strict = false;
};

int cmd_simulate(const SimulateOpts& o, const Common& c) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    ProblemFile pf = load_problem(o.spec);
    if (!o.pipeline.empty()) pf.pipeline = o.pipeline;
    if (!o.recover.empty()) {
        const auto eq = o.recover.find('=');
        const std::string mode = o.recover.substr(0, eq);
        const std::string arg = eq == std::string::npos ? "" : o.recover.substr(eq + 1);
        pf.recover = mode;
        if (mode == "slice") {
            if (arg.empty()) fail(ErrorKind::Validation, "--recover slice needs =xi*");
            try {
                pf.xi_star = std::stod(arg);
            } catch (const std::exception&) {
                fail(ErrorKind::Validation, "bad slice position '" + arg + "'");
            }
        } else if (mode == "imperfect") {
            if (arg.empty()) fail(ErrorKind::Validation, "--recover imperfect needs =profile.json");
            std::ifstream f(arg);
            if (!f) fail(ErrorKind::Io, "cannot open " + arg);
            Json j;
            try {
                f >> j;
            } catch (const Json::exception& e) {
                fail(ErrorKind::Validation, std::string("malformed profile: ") + e.what());
            }
            detector_from_json(j);
            pf.detector = j;
        } else if (mode != "integrate") {
            fail(ErrorKind::Validation, "unknown recovery mode '" + mode + "'");
        }
    }
    if (o.oracle && !pf.oracle) fail(ErrorKind::Validation, "--oracle given but the spec has no oracle section");
    const double t_parse = std::chrono::duration<double>(clock::now() - t0).count();

    const fs::path dir = prepare_out(c.out, pf.name);
    Json manifest{{"input", fs::absolute(pf.path).string()},
                  {"config",
                   {{"pipeline", pf.pipeline},
                    {"recover", pf.recover},
                    {"xi_star", pf.xi_star},
                    {"margin", pf.margin},
                    {"t", pf.t},
                    {"dt", pf.dt},
                    {"krylov_m", pf.krylov_m},
                    {"krylov_tol", pf.krylov_tol},
                    {"threads", c.threads},
                    {"seed", c.seed},
                    {"oracle", o.oracle},
                    {"strict", o.strict},
                    {"pde", spec_to_json(pf.spec)},
                    {"grid", grid_to_json(pf.grid)}}}};
    Json timings{{"validate", t_parse}};
    Json result{{"name", pf.name}};
    int code = Ok;
    try {
        Simulation s = simulate(pf, c.threads);
        timings["schrodingerise"] = s.t_schrodingerise;
        timings["evolve"] = s.t_evolve;
        timings["recover"] = s.t_recover;
        result["recovery"] = recovery_json(s);
        FieldMeta meta;
        const Layout& L = *s.run.rec.u.layout;
        for (int f : L.fock) meta.shape.push_back(f);
        for (int n : L.mode_shape()) meta.shape.push_back(n);
        meta.axes = pf.grid.x;
        meta.extra = Json{{"field", L.fock.empty() ? "u" : "chaos coefficients (fock axes first)"}, {"t", pf.t}};
        write_field((dir / "u").string(), s.run.rec.u.v, meta);
        if (o.oracle) {
            auto t1 = clock::now();
            const OracleReport r = compare_to_oracle(pf, s);
            timings["oracle"] = std::chrono::duration<double>(clock::now() - t1).count();
            result["oracle"] = Json{{"problem", r.problem}, {"method", r.method}, {"metric", r.metric},
                                    {"error", r.error},     {"tol", r.tol},       {"oracle_accuracy", r.accuracy},
                                    {"pass", r.pass},       {"detail", r.detail}};
            std::printf("oracle %s (%s): %s = %.3e, tol %.1e -> %s\n", r.problem.c_str(), r.method.c_str(),
                        r.metric.c_str(), r.error, r.tol, r.pass ? "pass" : "FAIL");
            if (!r.pass && o.strict) code = OracleFailed;
        }
        std::printf("%s: pipeline %s, recovery %s, p = %.6f, norm drift %.2e\n", pf.name.c_str(),
                    pipeline_name(s.sys.pipeline), s.run.rec.mode.c_str(), s.run.rec.p_measured,
                    s.run.stats.norm_drift);
        if (s.forcing_error >= 0.0) std::printf("forcing sector error %.3e\n", s.forcing_error);
        result["status"] = code == Ok ? "ok" : "oracle tolerance exceeded";
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Guard && e.kind() != ErrorKind::Numerical) throw;
        result["status"] = "guard";
        result["error"] = e.what();
        std::fprintf(stderr, "guard: %s\n", e.what());
        code = GuardTripped;
    }
    result["exit_code"] = code;
    manifest["timings"] = timings;
    write_text(dir / "result.json", result.dump(2) + "\n");
    write_manifest(dir, manifest);
    return code;
}

int cmd_resources(const std::string& spec, const std::string& pipeline, bool json, const Common& c) {
    ProblemFile pf = load_problem(spec);
    if (!pipeline.empty()) pf.pipeline = pipeline;
    const Pipeline p = pipeline_from_name(pf.pipeline);
    const SchrodingerisedSystem sys = schrodingerise(pf.spec, pf.grid, p);
    const ResourceRow r = count_resources(sys.H, sys.layout->dims(), sys.direct());
    const HermiticityProbe h = probe_hermitian(sys.H, sys.layout, c.seed);
    if (json) {
        Json j{{"name", pf.name},       {"pipeline", pipeline_name(sys.pipeline)},
               {"direct", r.direct},    {"qumodes", r.qumodes},
               {"qubits", r.qubits},    {"terms", r.terms},
               {"max_order", r.max_order}, {"max_term", r.max_term},
               {"gaussian", r.gaussian}, {"symbolic", r.symbolic},
               {"labels", r.labels},    {"hermitian", h.hermitian},
               {"hamiltonian", to_string(sys.H)}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << pf.name << " (" << pipeline_name(sys.pipeline) << ")\n" << format_resources(r) << "\n";
        std::cout << "H = " << to_string(sys.H) << "\n";
        std::cout << "hermitian: " << (h.hermitian ? "yes" : "NO") << "\n";
    }
    return h.hermitian ? Ok : GuardTripped;
}

struct StudyOpts {
    std::string kind;
    double s_min = 0.5, s_max = 1.5, s_step = 0.005;
    bool substitution = false;
    std::string problem = "convection";
    int D = 1;
    std::vector<double> eps{0.0, 0.05, 0.1, 0.2, 0.5, 1.0};
    double t = 1.0, eta = 0.05;
};

int cmd_error_study(const StudyOpts& o, const Common& c) {
    const fs::path dir = prepare_out(c.out, "error_study_" + o.kind);
    Json manifest{{"input", "error-study " + o.kind}, {"config", {{"seed", c.seed}, {"threads", c.threads}}}};
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    if (o.kind == "ancilla") {
        if (!(o.s_max > o.s_min) || !(o.s_step > 0.0) || o.s_min <= 0.0) fail(ErrorKind::Validation, "bad s range");
        const FidelityScan f = ancilla_fidelity_scan(o.s_min, o.s_max, o.s_step);
        std::ostringstream csv;
        csv << "s,fidelity\n";
        for (std::size_t i = 0; i < f.s.size(); ++i) csv << f.s[i] << "," << f.fidelity[i] << "\n";
        write_text(dir / "ancilla.csv", csv.str());
        std::printf("ancilla fidelity max %.6f at s = %.4f\n", f.f_best, f.s_best);
        manifest["config"]["s"] = {o.s_min, o.s_max, o.s_step};
        manifest["summary"] = {{"s_best", f.s_best}, {"f_best", f.f_best}};
        ok = f.f_best <= 1.0;
        if (o.substitution) {
            EvolveConfig ec;
            ec.threads = c.threads;
            const SubstitutionResult s = ancilla_substitution_experiment(heat_problem(), f.s_best, AncillaProfile::Gaussian, ec);
            std::printf("heat substitution: fidelity %.6f >= bound %.6f : %s\n", s.fidelity, s.bound,
                        s.holds ? "holds" : "VIOLATED");
            manifest["summary"]["substitution"] = {{"fidelity", s.fidelity}, {"bound", s.bound}, {"holds", s.holds}};
            ok = ok && s.holds;
        }
    } else if (o.kind == "robustness") {
        RobustnessReport r;
        if (o.problem == "convection") {
            if (o.D < 1) fail(ErrorKind::Validation, "--D must be positive");
            r = robustness_convection_sweep(o.eps, o.t, o.D);
        } else if (o.problem == "heat") {
            EvolveConfig ec;
            ec.threads = c.threads;
            r = robustness_schrodingerised(heat_problem(), o.eps, o.eta, ec);
        } else {
            fail(ErrorKind::Validation, "unknown robustness problem '" + o.problem + "'");
        }
        write_text(dir / "robustness.csv", report_csv(r));
        for (std::size_t i = 0; i < r.eps.size(); ++i)
            std::printf("eps %-8g measured %.8f predicted %.8f bound %.8f %s\n", r.eps[i], r.measured[i],
                        r.predicted[i], r.bound[i], r.pass[i] ? "pass" : "FAIL");
        manifest["config"]["problem"] = o.problem;
        manifest["config"]["D"] = o.D;
        manifest["config"]["t"] = o.t;
        manifest["config"]["eps"] = o.eps;
        ok = r.all_pass();
    } else {
        fail(ErrorKind::Validation, "unknown study '" + o.kind + "'");
    }
    manifest["timings"] = {{"study", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    manifest["summary"]["pass"] = ok;
    write_manifest(dir, manifest);
    std::printf("%s\n", ok ? "all bounds hold" : "bound violated");
    return ok ? Ok : GuardTripped;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schrodingerised PDE simulator"};
    app.require_subcommand(1);
    Common c;
    app.add_option("--threads", c.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--seed", c.seed, "seed for probe states");
    app.add_option("--out", c.out, "output directory");

    SimulateOpts so;
    auto* sim = app.add_subcommand("simulate", "evolve, recover and optionally check a problem file");
    sim->add_option("spec", so.spec, "problem file")->required();
    sim->add_option("--pipeline", so.pipeline)->check(CLI::IsMember({"auto", "direct", "standard", "extended"}));
    sim->add_option("--recover", so.recover, "integrate | slice=XI | imperfect=profile.json");
    sim->add_flag("--oracle", so.oracle, "compare against the reference solution");
    sim->add_flag("--strict", so.strict, "exit 4 when the oracle tolerance is exceeded");

    std::string rspec, rpipe;
    bool rjson = false;
    auto* res = app.add_subcommand("resources", "resource row of the assembled Hamiltonian");
    res->add_option("spec", rspec)->required();
    res->add_option("--pipeline", rpipe)->check(CLI::IsMember({"auto", "direct", "standard", "extended"}));
    res->add_flag("--json", rjson);

    StudyOpts eo;
    auto* es = app.add_subcommand("error-study", "ancilla substitution or coefficient robustness sweeps");
    es->add_option("kind", eo.kind)->required()->check(CLI::IsMember({"ancilla", "robustness"}));
    es->add_option("--s-min", eo.s_min);
    es->add_option("--s-max", eo.s_max);
    es->add_option("--s-step", eo.s_step);
    es->add_flag("--substitution", eo.substitution, "also run the heat problem with the best Gaussian ancilla");
    es->add_option("--problem", eo.problem)->check(CLI::IsMember({"convection", "heat"}));
    es->add_option("--D", eo.D);
    es->add_option("--epsilon", eo.eps)->delimiter(',');
    es->add_option("--t", eo.t);
    es->add_option("--eta", eo.eta);

    for (auto* s : {sim, res, es}) {
        s->add_option("--threads", c.threads)->check(CLI::NonNegativeNumber);
        s->add_option("--seed", c.seed);
        s->add_option("--out", c.out);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int r = app.exit(e);
        return r == 0 ? 0 : Invalid;
    }

    try {
        if (*sim) return cmd_simulate(so, c);
        if (*res) return cmd_resources(rspec, rpipe, rjson, c);
        return cmd_error_study(eo, c);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return Invalid;
    }
}
