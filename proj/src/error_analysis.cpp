#include "schro/error_analysis.hpp"

#include <cmath>
#include <sstream>

namespace schro {

Problem heat_problem(int nx, double box, double xi_L, int xi_n, double t) {
    Problem pb;
    pb.name = "heat";
    pb.spec = build_heat(1, 1.0, {});
    pb.grid.x = {{"x", -box, box, nx, true}};
    pb.grid.xi_L = xi_L;
    pb.grid.xi_n = xi_n;
    pb.init = gaussian_initial(pb.grid, {0.0}, 1.0);
    pb.t = t;
    return pb;
}

AncillaFidelity ancilla_gaussian_fidelity(double s) {
    if (!(s > 0.0)) fail(ErrorKind::Validation, "ancilla width must be positive");
    AncillaFidelity f;
    const double q = std::pow(kPi, 0.25);
    f.closed = std::sqrt(2.0 * s) * std::exp(0.5 * s * s) * q * std::erfc(s / std::sqrt(2.0));
    // 2 int_0^inf e^{-xi} G_s(xi) d xi, composite Simpson
    const double X = 60.0 * std::max(1.0, s);
    const int n = 1 << 18;
    const double h = X / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double xi = i * h;
        const double g = std::exp(-xi - xi * xi / (2.0 * s * s));
        acc += g * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    f.numeric = 2.0 * acc * h / 3.0 / (std::sqrt(s) * q);
    return f;
}

FidelityScan ancilla_fidelity_scan(double s_min, double s_max, double step) {
    if (!(s_min > 0.0) || !(s_max >= s_min) || !(step > 0.0)) fail(ErrorKind::Validation, "bad scan range");
    FidelityScan sc;
    const int n = static_cast<int>(std::floor((s_max - s_min) / step + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double s = s_min + i * step;
        const double v = std::sqrt(2.0 * s) * std::exp(0.5 * s * s) * std::pow(kPi, 0.25) * std::erfc(s / std::sqrt(2.0));
        sc.s.push_back(s);
        sc.fidelity.push_back(v);
        if (v > sc.f_best) {
            sc.f_best = v;
            sc.s_best = s;
        }
    }
    return sc;
}

namespace {

double overlap(const GridState& a, const GridState& b) {
    return std::abs(inner(a, b)) / (a.norm() * b.norm());
}

double norm_of(const CVec& u, LayoutPtr base) {
    GridState g(std::move(base), AncRep::Xi);
    g.v = u;
    return g.norm();
}

RunConfig run_config(const EvolveConfig& ec, double t) {
    RunConfig rc;
    rc.evolve = ec;
    rc.evolve.t_final = t;
    return rc;
}

}  // namespace

SubstitutionResult ancilla_substitution_experiment(const Problem& pb, double s, AncillaProfile alt,
                                                   const EvolveConfig& ec) {
    const SchrodingerisedSystem sys = schrodingerise(pb.spec, pb.grid);
    if (sys.direct()) fail(ErrorKind::Validation, "the problem needs an ancilla");
    RunConfig rc = run_config(ec, pb.t);
    const RunResult a = run_system(sys, pb.init, rc);
    rc.ancilla = alt;
    rc.ancilla_s = s;
    const RunResult b = run_system(sys, pb.init, rc);

    SubstitutionResult r;
    r.fidelity = overlap(a.rec.u, b.rec.u);
    const GridState v = warp_initial(sys.layout, a.y0, AncillaProfile::Exact);
    const GridState v2 = warp_initial(sys.layout, a.y0, alt, s);
    r.delta = 1.0 - overlap(v, v2);
    r.xi_star = a.xi_star;
    const double n0 = norm_of(initial_block(sys, pb.init), sys.base), nt = a.rec.u.norm();
    if (!(nt > 1e-300)) fail(ErrorKind::Numerical, "recovered field vanished; the bound is degenerate");
    r.norm_ratio = n0 * n0 / (nt * nt);
    r.bound = 1.0 - 2.0 * r.xi_star * r.delta * r.norm_ratio;
    r.holds = r.fidelity >= r.bound - 1e-12;
    r.norm_drift = std::max(a.stats.norm_drift, b.stats.norm_drift);
    return r;
}

ConvectionRobustness robustness_convection(double eps, double t, int D, int n, double box) {
    if (D < 1) fail(ErrorKind::Validation, "D must be >= 1");
    GridSpec g;
    for (int j = 0; j < D; ++j) g.x.push_back({"x" + std::to_string(j + 1), -box, box, n, true});
    const InitialData init = gaussian_initial(g, std::vector<double>(D, 0.0), 1.0);
    RunConfig rc;
    rc.evolve.t_final = t;
    rc.evolve.dt = t > 0.0 ? t : 1.0;
    auto run = [&](double a) {
        const auto sys = schrodingerise(build_convection(D, std::vector<cplx>(D, a)), g);
        return run_system(sys, init, rc).rec.u;
    };
    const GridState u = run(1.0), v = run(1.0 + eps);
    return {overlap(u, v), std::exp(-(eps * t) * (eps * t) * D / 4.0)};
}

double epsilon_bound(int D, double t, double Delta, bool convection, double dE) {
    if (!(Delta > 0.0 && Delta < 1.0)) fail(ErrorKind::Validation, "Delta must lie in (0, 1)");
    if (D < 1 || !(t > 0.0)) fail(ErrorKind::Validation, "need D >= 1 and t > 0");
    const double l = std::log(1.0 / (1.0 - Delta));
    if (convection) return 2.0 / t * std::sqrt(l) / std::sqrt(static_cast<double>(D));
    if (!(dE > 0.0)) fail(ErrorKind::Validation, "energy spread must be positive");
    return l / (D * t * dE);
}

double energy_spread(const GridState& psi, const OperatorSum& H) {
    const double m1 = expectation(psi, H).real(), m2 = expectation(psi, H * H).real();
    return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

bool RobustnessReport::all_pass() const {
    for (bool b : pass)
        if (!b) return false;
    return true;
}

OperatorSum perturb_coefficients(const OperatorSum& H, double eps) {
    OperatorSum out;
    const OperatorSum c = canonicalize(H);
    for (auto t : c.terms()) {
        t.coeff += eps;
        out.add(std::move(t));
    }
    return out;
}

RobustnessReport robustness_convection_sweep(const std::vector<double>& eps, double t, int D) {
    RobustnessReport r;
    for (double e : eps) {
        const auto c = robustness_convection(e, t, D);
        r.eps.push_back(e);
        r.measured.push_back(c.measured);
        r.predicted.push_back(c.predicted);
        r.bound.push_back(c.predicted - 1e-6);
        r.state_fidelity.push_back(c.measured);
        r.pass.push_back(std::abs(c.measured - c.predicted) < 1e-6);
    }
    return r;
}

RobustnessReport robustness_schrodingerised(const Problem& pb, const std::vector<double>& eps, double eta,
                                            const EvolveConfig& ec) {
    const SchrodingerisedSystem sys = schrodingerise(pb.spec, pb.grid);
    if (sys.direct()) fail(ErrorKind::Validation, "the problem needs an ancilla");
    const RunConfig rc = run_config(ec, pb.t);
    const RunResult ref = run_system(sys, pb.init, rc);
    const double n0 = norm_of(initial_block(sys, pb.init), sys.base), nt = ref.rec.u.norm();
    const double ratio = n0 * n0 / (nt * nt);

    RobustnessReport r;
    r.xi_star = ref.xi_star;
    r.eta = eta;
    r.delta_star = eta / (2.0 * r.xi_star * ratio);
    std::vector<RunResult> runs(eps.size());
    parallel_for(eps.size(), ec.threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            SchrodingerisedSystem s = sys;
            s.H = perturb_coefficients(sys.H, eps[i]);
            RunConfig c = rc;
            c.evolve.threads = 1;
            runs[i] = run_system(s, pb.init, c);
        }
    });
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double f = overlap(ref.rec.u, runs[i].rec.u);
        const double sf = overlap(ref.final_state, runs[i].final_state);
        const double Delta = 1.0 - sf;
        const double bound = 1.0 - 2.0 * r.xi_star * Delta * ratio;
        r.eps.push_back(eps[i]);
        r.measured.push_back(f);
        r.state_fidelity.push_back(sf);
        r.predicted.push_back(sf);
        r.bound.push_back(bound);
        const bool chain = Delta > r.delta_star || f >= 1.0 - eta - 1e-12;
        r.pass.push_back(f >= bound - 1e-12 && chain);
    }
    return r;
}

std::string report_csv(const RobustnessReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << "eps,measured,predicted,bound,pass\n";
    for (std::size_t i = 0; i < r.eps.size(); ++i)
        os << r.eps[i] << ',' << r.measured[i] << ',' << r.predicted[i] << ',' << r.bound[i] << ','
           << (r.pass[i] ? 1 : 0) << '\n';
    return os.str();
}

}  // namespace schro
