#include "schro/recovery.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>

#include "schro/apply.hpp"
#include "schro/kernels.hpp"

namespace schro {

GridState project_qubit(const GridState& psi, int qubit, int bit) {
    const Layout& L = *psi.layout;
    if (qubit < 0 || qubit >= L.qubits) fail(ErrorKind::Validation, "no such qubit");
    if (bit != 0 && bit != 1) fail(ErrorKind::Validation, "qubit sector must be 0 or 1");
    auto nl = std::make_shared<Layout>(L);
    nl->qubits = L.qubits - 1;
    GridState out(nl, psi.rep);
    const std::size_t M = L.mode_size();
    const std::size_t F = L.block_count() >> L.qubits;
    const int Q = L.qubits;
    const int pos = Q - 1 - qubit;  // bit position counted from the least significant qubit
    const std::size_t nb = nl->block_count();
    for (std::size_t s = 0; s < L.n_slices(); ++s) {
        const cplx* in = psi.slice(s);
        cplx* o = out.slice(s);
        for (std::size_t b = 0; b < nb; ++b) {
            const std::size_t qb = b / F, f = b % F;
            const std::size_t low = qb & ((std::size_t{1} << pos) - 1), high = qb >> pos;
            const std::size_t full = (((high << 1) | static_cast<std::size_t>(bit)) << pos) | low;
            std::copy(in + (full * F + f) * M, in + (full * F + f + 1) * M, o + b * M);
        }
    }
    return out;
}

namespace {

using MatC = Eigen::MatrixXcd;

double min_eig(const MatC& m) {
    if (m.rows() == 1) return m(0, 0).real();
    Eigen::SelfAdjointEigenSolver<MatC> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// B x B block matrix at grid point i from diagonal block lists
void accumulate(const BlockDiag& bd, std::size_t i, MatC& m) {
    for (const auto& e : bd.entries) m(e.out, e.in) += e.d.size() == 1 ? e.d[0] : e.d[i];
}

double lanczos_min(const SliceOp& op, const CVec& y0) {
    const std::size_t n = op.size();
    const auto& K = kern::active();
    const int m = static_cast<int>(std::min<std::size_t>(n, 160));
    std::vector<CVec> V;
    std::vector<double> alpha, beta;
    CVec v = y0, w(n);
    const double b0 = std::sqrt(K.norm2(n, v.data()));
    if (b0 == 0.0) return 0.0;
    K.scale(n, 1.0 / b0, v.data());
    V.push_back(v);
    for (int j = 0; j < m; ++j) {
        op.apply(V[j].data(), w.data());
        const double a = K.dot(n, V[j].data(), w.data()).real();
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : V) K.axpy(n, -K.dot(n, q.data(), w.data()), q.data(), w.data());
        const double b = std::sqrt(K.norm2(n, w.data()));
        if (j + 1 == m || b <= 1e-12 * (std::abs(a) + b)) break;
        beta.push_back(b);
        K.scale(n, 1.0 / b, w.data());
        V.push_back(w);
    }
    const int d = static_cast<int>(alpha.size());
    Eigen::VectorXd diag(d), off(std::max(d - 1, 0));
    for (int i = 0; i < d; ++i) diag(i) = alpha[i];
    for (int i = 0; i + 1 < d; ++i) off(i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    double lo = INFINITY;
    for (int i = 0; i < d; ++i) {
        const double wgt = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
        if (wgt >= 1e-14) lo = std::min(lo, es.eigenvalues()(i));
    }
    return std::isfinite(lo) ? lo : es.eigenvalues()(0);
}

}  // namespace

double lambda_min(const OperatorSum& A2, LayoutPtr base, const CVec& y0) {
    if (A2.empty()) return 0.0;
    const Layout& L = *base;
    CompiledOperator co(A2, base);
    const SliceOp op = co.slice({});
    if (op.is_zero()) return 0.0;
    const std::size_t M = L.mode_size(), B = L.block_count();
    if (y0.size() != M * B) fail(ErrorKind::Validation, "seed vector does not match the layout");
    double lo = INFINITY;
    if (op.momentum_diagonal()) {
        // only the momenta the state actually occupies
        CVec yh(M * B);
        slice_fft(L, -1, y0.data(), yh.data());
        std::vector<double> wk(M, 0.0);
        double wmax = 0.0;
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t i = 0; i < M; ++i) wk[i] += std::norm(yh[b * M + i]);
        for (double x : wk) wmax = std::max(wmax, x);
        for (std::size_t i = 0; i < M; ++i) {
            if (wk[i] < 1e-14 * wmax) continue;
            MatC m = MatC::Zero(B, B);
            accumulate(op.kdiag(), i, m);
            accumulate(op.cdiag(), i, m);
            lo = std::min(lo, min_eig(m));
        }
        return lo;
    }
    if (op.position_diagonal()) {
        for (std::size_t i = 0; i < M; ++i) {
            MatC m = MatC::Zero(B, B);
            accumulate(op.xdiag(), i, m);
            accumulate(op.cdiag(), i, m);
            lo = std::min(lo, min_eig(m));
        }
        return lo;
    }
    return lanczos_min(op, y0);
}

std::vector<double> xi_threshold(const SchrodingerisedSystem& sys, const CVec& y0, double t) {
    std::vector<double> out;
    if (sys.direct()) return out;
    const int K = static_cast<int>(sys.layout->anc.size());
    for (int a = 0; a < K; ++a) out.push_back(std::max(0.0, -lambda_min(sys.A2(a), sys.base, y0) * t));
    return out;
}

RecoverOptions recovery_options(const SchrodingerisedSystem& sys, const CVec& y0, double t) {
    RecoverOptions o;
    o.xi_c = xi_threshold(sys, y0, t);
    if (sys.dilation != Dilation::None) {
        o.qubit = sys.dil_qubit;
        o.sector = 0;
    }
    return o;
}

namespace {

struct AxisWeights {
    std::vector<double> q;  // integration weight on [xi_c, L)
    int ic = 0;
    double Z = 0.0;      // sum q e^{-xi} h
    double Splus = 0.0;  // sum q e^{-2 xi} h
    double Sall = 0.0;   // sum e^{-2|xi|} h
};

AxisWeights axis_weights(const AncAxis& a, double xc) {
    AxisWeights w;
    w.q.assign(a.n, 0.0);
    w.ic = a.n;
    for (int i = 0; i < a.n; ++i)
        if (a.xi[i] >= xc - 1e-12 * a.L) {
            w.ic = i;
            break;
        }
    if (w.ic >= a.n - 1) fail(ErrorKind::Guard, "xi threshold lies outside the xi domain; enlarge L_xi");
    for (int i = w.ic; i < a.n; ++i) w.q[i] = i == w.ic ? 0.5 : 1.0;
    for (int i = 0; i < a.n; ++i) {
        w.Z += w.q[i] * std::exp(-a.xi[i]) * a.h;
        w.Splus += w.q[i] * std::exp(-2.0 * a.xi[i]) * a.h;
        w.Sall += std::exp(-2.0 * std::abs(a.xi[i])) * a.h;
    }
    return w;
}

struct Prepared {
    GridState w;  // projected
    double total2 = 0.0;
    std::vector<AxisWeights> ax;
    double Sall = 1.0;
    RecoveryResult base;
};

Prepared prepare(const GridState& w_in, const RecoverOptions& o) {
    if (w_in.rep != AncRep::Xi) fail(ErrorKind::Validation, "recovery needs the xi representation");
    const Layout& L = *w_in.layout;
    if (L.anc.empty()) fail(ErrorKind::Validation, "state has no ancilla axis");
    Prepared p;
    p.total2 = w_in.norm2();
    if (!(p.total2 > 0.0)) fail(ErrorKind::Validation, "zero state");
    p.w = o.qubit >= 0 ? project_qubit(w_in, o.qubit, o.sector) : w_in;
    for (std::size_t a = 0; a < L.anc.size(); ++a) {
        const double xc = (a < o.xi_c.size() ? o.xi_c[a] : 0.0) + o.margin;
        p.ax.push_back(axis_weights(L.anc[a], xc));
        p.Sall *= p.ax.back().Sall;
    }
    p.base.qubit = o.qubit;
    p.base.sector = o.qubit >= 0 ? o.sector : -1;
    for (std::size_t a = 0; a < p.ax.size(); ++a) p.base.xi_c.push_back(L.anc[a].xi[p.ax[a].ic]);
    p.base.norm_u0 = std::sqrt(p.total2 / p.Sall);
    p.base.u = GridState(strip_ancilla(*p.w.layout), AncRep::Xi);
    return p;
}

double slice_weight(const Prepared& p, std::size_t s, const std::function<double(int, int)>& per_axis) {
    const auto idx = p.w.layout->anc_index(s);
    double f = 1.0;
    for (std::size_t a = 0; a < idx.size() && f != 0.0; ++a) f *= per_axis(static_cast<int>(a), idx[a]);
    return f;
}

void finish(RecoveryResult& r) { r.norm_u = r.u.norm(); }

}  // namespace

RecoveryResult recover_integrate(const GridState& w_in, const RecoverOptions& o) {
    Prepared p = prepare(w_in, o);
    RecoveryResult r = p.base;
    r.mode = "integrate";
    const Layout& L = *p.w.layout;
    const std::size_t S = L.slice_size();
    const auto& K = kern::active();
    double Z = 1.0, Splus = 1.0, hK = 1.0, cont = 1.0;
    for (std::size_t a = 0; a < p.ax.size(); ++a) {
        Z *= p.ax[a].Z;
        Splus *= p.ax[a].Splus;
        hK *= L.anc[a].h;
        cont *= 0.5 * std::exp(-2.0 * r.xi_c[a]);
    }
    double mass = 0.0;
    for (std::size_t s = 0; s < L.n_slices(); ++s) {
        const double q = slice_weight(p, s, [&](int a, int i) { return p.ax[a].q[i]; });
        if (q == 0.0) continue;
        K.axpy(S, q * hK / Z, p.w.slice(s), r.u.v.data());
        mass += q * K.norm2(S, p.w.slice(s));
    }
    finish(r);
    r.p_measured = mass * L.mode_weight() * hK / p.total2;
    r.p_formula = r.norm_u * r.norm_u * Splus / p.total2;
    r.p_continuum = r.norm_u * r.norm_u / (r.norm_u0 * r.norm_u0) * cont;
    return r;
}

RecoveryResult recover_slice(const GridState& w_in, double xi_star, const RecoverOptions& o) {
    Prepared p = prepare(w_in, o);
    RecoveryResult r = p.base;
    r.mode = "slice";
    const Layout& L = *p.w.layout;
    if (!(xi_star > 0.0)) fail(ErrorKind::Validation, "slice position must be positive");
    std::vector<int> idx;
    double hK = 1.0, xsum = 0.0;
    for (std::size_t a = 0; a < L.anc.size(); ++a) {
        const auto& ax = L.anc[a];
        const int i = static_cast<int>(std::lround((xi_star + ax.L) / ax.h));
        if (i <= ax.n / 2 || i >= ax.n) fail(ErrorKind::Validation, "slice position is off the positive xi grid");
        if (i <= p.ax[a].ic) fail(ErrorKind::Validation, "slice position lies below the recovery threshold");
        idx.push_back(i);
        hK *= ax.h;
        xsum += ax.xi[i];
    }
    r.xi_star = L.anc[0].xi[idx[0]];
    std::size_t s = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) s = s * L.anc[a].n + idx[a];
    const std::size_t S = L.slice_size();
    const cplx* src = p.w.slice(s);
    const double e = std::exp(xsum);
    for (std::size_t i = 0; i < S; ++i) r.u.v[i] = e * src[i];
    finish(r);
    const double slice_mass = kern::active().norm2(S, src) * L.mode_weight();
    // densities per unit xi^K
    r.p_measured = slice_mass / p.total2;
    r.p_formula = std::exp(-2.0 * xsum) * r.norm_u * r.norm_u / p.total2;
    r.p_continuum = std::exp(-2.0 * xsum) * r.norm_u * r.norm_u / (r.norm_u0 * r.norm_u0);
    (void)hK;
    return r;
}

RecoveryResult recover_imperfect(const GridState& w_in, const std::function<double(double)>& f,
                                 const RecoverOptions& o) {
    Prepared p = prepare(w_in, o);
    RecoveryResult r = p.base;
    r.mode = "imperfect";
    const Layout& L = *p.w.layout;
    const std::size_t S = L.slice_size();
    std::vector<std::vector<double>> fw;
    double Zf = 1.0, hK = 1.0;
    for (std::size_t a = 0; a < L.anc.size(); ++a) {
        const auto& ax = L.anc[a];
        std::vector<double> v(ax.n, 0.0);
        double z = 0.0;
        for (int i = 0; i < ax.n; ++i) {
            if (ax.xi[i] < 0.0) continue;
            const double fv = f(ax.xi[i]);
            if (fv < 0.0 || !std::isfinite(fv)) fail(ErrorKind::Validation, "detector profile must be finite and >= 0");
            v[i] = p.ax[a].q[i] * fv;
            z += v[i] * std::exp(-ax.xi[i]) * ax.h;
        }
        if (z == 0.0) fail(ErrorKind::Validation, "detector profile vanishes on the usable xi range");
        fw.push_back(std::move(v));
        Zf *= z;
        hK *= ax.h;
    }
    CVec acc(S, 0.0);
    const auto& K = kern::active();
    for (std::size_t s = 0; s < L.n_slices(); ++s) {
        const double q = slice_weight(p, s, [&](int a, int i) { return fw[a][i]; });
        if (q != 0.0) K.axpy(S, q * hK, p.w.slice(s), acc.data());
    }
    for (std::size_t i = 0; i < S; ++i) r.u.v[i] = acc[i] / Zf;
    finish(r);
    r.p_measured = K.norm2(S, acc.data()) * L.mode_weight() / p.total2;
    r.p_formula = Zf * Zf * r.norm_u * r.norm_u / p.total2;
    r.p_continuum = Zf * Zf * r.norm_u * r.norm_u / (r.norm_u0 * r.norm_u0);
    return r;
}

double xi_tail_fraction(const GridState& w, double frac) {
    const Layout& L = *w.layout;
    const std::size_t S = L.slice_size();
    const auto& K = kern::active();
    std::vector<double> sm(L.n_slices());
    double total = 0.0;
    for (std::size_t s = 0; s < sm.size(); ++s) total += sm[s] = K.norm2(S, w.slice(s));
    if (total == 0.0) return 0.0;
    double worst = 0.0;
    for (std::size_t a = 0; a < L.anc.size(); ++a) {
        const auto& ax = L.anc[a];
        double tail = 0.0;
        for (std::size_t s = 0; s < sm.size(); ++s) {
            const double xi = ax.xi[L.anc_index(s)[a]];
            if (xi >= (1.0 - frac) * ax.L) tail += sm[s];
        }
        worst = std::max(worst, tail / total);
    }
    return worst;
}

double xi_decay_point(const GridState& w, double rel) {
    const Layout& L = *w.layout;
    if (L.anc.empty()) return 0.0;
    const auto& ax = L.anc[0];
    const std::size_t S = L.slice_size();
    std::vector<double> mx(ax.n, 0.0);
    for (std::size_t s = 0; s < L.n_slices(); ++s) {
        const int i = L.anc_index(s)[0];
        const cplx* p = w.slice(s);
        for (std::size_t k = 0; k < S; ++k) mx[i] = std::max(mx[i], std::abs(p[k]));
    }
    double g = 0.0;
    for (double v : mx) g = std::max(g, v);
    for (int i = ax.n - 1; i > ax.n / 2; --i)
        if (mx[i] >= rel * g) return i + 1 < ax.n ? ax.xi[i + 1] : ax.L;
    return ax.xi[ax.n / 2 + 1];
}

std::vector<std::pair<double, CVec>> unwarped_slices(const GridState& w_in, const RecoverOptions& o) {
    Prepared p = prepare(w_in, o);
    const Layout& L = *p.w.layout;
    if (L.anc.size() != 1) fail(ErrorKind::Unsupported, "slice comparison is for one ancilla axis");
    const auto& ax = L.anc[0];
    const std::size_t S = L.slice_size();
    std::vector<std::pair<double, CVec>> out;
    for (int i = std::max(p.ax[0].ic, ax.n / 2 + 1); i < ax.n; ++i) {
        CVec u(S);
        const double e = std::exp(ax.xi[i]);
        const cplx* src = p.w.slice(i);
        for (std::size_t k = 0; k < S; ++k) u[k] = e * src[k];
        out.emplace_back(ax.xi[i], std::move(u));
    }
    return out;
}

namespace {

GridState prepare_state(const SchrodingerisedSystem& sys, const InitialData& init, const RunConfig& cfg, RunResult& rr) {
    rr.y0 = initial_block(sys, init);
    if (sys.direct()) {
        GridState psi0(sys.layout, AncRep::Xi);
        psi0.v = rr.y0;
        return psi0;
    }
    return fourier_xi_to_eta(warp_initial(sys.layout, rr.y0, cfg.ancilla, cfg.ancilla_s));
}

// recovery of rr.final_state evolved to time t
void finish(const SchrodingerisedSystem& sys, const RunConfig& cfg, double t, double norm0, RunResult& rr) {
    if (sys.direct()) {
        RecoveryResult r;
        r.mode = "direct";
        r.u = sys.dilation != Dilation::None ? project_qubit(rr.final_state, sys.dil_qubit, 0) : rr.final_state;
        r.qubit = sys.dilation != Dilation::None ? sys.dil_qubit : -1;
        r.norm_u = r.u.norm();
        r.norm_u0 = norm0;
        r.p_formula = r.p_measured = r.p_continuum = r.norm_u * r.norm_u / (r.norm_u0 * r.norm_u0);
        rr.rec = std::move(r);
        return;
    }
    rr.w = inverse_eta_to_xi(rr.final_state);
    rr.xi_tail = xi_tail_fraction(rr.w);
    if (cfg.check_xi && rr.xi_tail > cfg.xi_tol)
        fail(ErrorKind::Guard, "xi-domain too small: tail mass " + std::to_string(rr.xi_tail) + " near xi = L");
    rr.xi_star = xi_decay_point(rr.w);
    RecoverOptions o = recovery_options(sys, rr.y0, t);
    o.margin = cfg.margin;
    if (cfg.recover == "integrate") rr.rec = recover_integrate(rr.w, o);
    else if (cfg.recover == "slice") rr.rec = recover_slice(rr.w, cfg.xi_star, o);
    else if (cfg.recover == "imperfect") {
        if (!cfg.profile) fail(ErrorKind::Validation, "imperfect recovery needs a detector profile");
        rr.rec = recover_imperfect(rr.w, cfg.profile, o);
    } else {
        fail(ErrorKind::Validation, "unknown recovery mode '" + cfg.recover + "'");
    }
    // xi < 0 carries slowly decaying x tails that are never read; guard the recovered field
    rr.stats.boundary_mass = boundary_mass_fraction(rr.rec.u);
    if (cfg.evolve.check_boundary && rr.stats.boundary_mass > cfg.evolve.boundary_tol)
        fail(ErrorKind::Guard, "boundary mass " + std::to_string(rr.stats.boundary_mass) +
                                   " exceeds tolerance; enlarge the box");
}

}  // namespace

RunResult run_system(const SchrodingerisedSystem& sys, const InitialData& init, const RunConfig& cfg) {
    RunResult rr;
    const GridState psi0 = prepare_state(sys, init, cfg, rr);
    rr.final_state = evolve(sys.H, psi0, cfg.evolve, &rr.stats);
    finish(sys, cfg, cfg.evolve.t_final, psi0.norm(), rr);
    return rr;
}

std::vector<RunResult> run_trajectory(const SchrodingerisedSystem& sys, const InitialData& init, const RunConfig& cfg,
                                      const std::vector<double>& times) {
    std::vector<RunResult> out;
    RunResult base;
    GridState psi = prepare_state(sys, init, cfg, base);
    const double norm0 = psi.norm();
    const CompiledOperator H(sys.H, psi.layout);
    double t = 0.0, seconds = 0.0;
    std::size_t substeps = 0, applies = 0;
    for (double ti : times) {
        if (ti < t) fail(ErrorKind::Validation, "trajectory times must ascend");
        RunResult rr;
        rr.y0 = base.y0;
        if (ti > t) {
            EvolveConfig ec = cfg.evolve;
            ec.t_final = ti - t;
            psi = evolve(H, psi, ec, &rr.stats);
        }
        seconds += rr.stats.seconds;
        substeps += rr.stats.substeps;
        applies += rr.stats.applies;
        rr.stats.seconds = seconds;
        rr.stats.substeps = substeps;
        rr.stats.applies = applies;
        rr.stats.norm_drift = std::abs(psi.norm() / norm0 - 1.0);
        rr.final_state = psi;
        finish(sys, cfg, ti, norm0, rr);
        out.push_back(std::move(rr));
        t = ti;
    }
    return out;
}

}  // namespace schro
