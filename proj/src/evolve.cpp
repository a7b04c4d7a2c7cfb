#include "schro/evolve.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <optional>
#include <cmath>
#include <exception>
#include <thread>

#include "schro/kernels.hpp"

namespace schro {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& fn) {
    std::size_t nt = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    nt = std::min(nt, std::max<std::size_t>(n, 1));
    if (nt <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
        const std::size_t b = t * chunk, e = std::min(n, b + chunk);
        pool.emplace_back([&, t, b, e] {
            try {
                if (b < e) fn(b, e);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

void krylov_expm(const SliceApply& G, cplx* v, std::size_t n, double t, int m, double tol, bool full_reorth,
                 KrylovInfo* info) {
    if (m < 2) fail(ErrorKind::Validation, "Krylov subspace size must be >= 2");
    const auto& K = kern::active();
    double remaining = t;
    std::vector<CVec> V(m + 1, CVec(n));
    std::vector<double> alpha(m), beta(m + 1);
    CVec w(n);
    while (remaining > 0.0) {
        const double b0 = std::sqrt(K.norm2(n, v));
        if (b0 == 0.0) return;
        std::copy(v, v + n, V[0].begin());
        K.scale(n, 1.0 / b0, V[0].data());
        int dim = m;
        bool exact = false;
        for (int j = 0; j < m; ++j) {
            G(V[j].data(), w.data());
            if (info) ++info->applies;
            alpha[j] = K.dot(n, V[j].data(), w.data()).real();
            K.axpy(n, -alpha[j], V[j].data(), w.data());
            if (j > 0) K.axpy(n, -beta[j], V[j - 1].data(), w.data());
            if (full_reorth)
                for (int i = 0; i <= j; ++i) {
                    const cplx c = K.dot(n, V[i].data(), w.data());
                    K.axpy(n, -c, V[i].data(), w.data());
                }
            beta[j + 1] = std::sqrt(K.norm2(n, w.data()));
            const double scale = std::abs(alpha[j]) + beta[j] + 1e-300;
            if (beta[j + 1] <= 1e-14 * scale) {
                dim = j + 1;
                exact = true;
                break;
            }
            std::copy(w.begin(), w.end(), V[j + 1].begin());
            K.scale(n, 1.0 / beta[j + 1], V[j + 1].data());
        }
        Eigen::VectorXd d(dim), e(std::max(dim - 1, 0));
        for (int j = 0; j < dim; ++j) d[j] = alpha[j];
        for (int j = 0; j + 1 < dim; ++j) e[j] = beta[j + 1];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        if (dim > 1) es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
        auto coeffs = [&](double tau) {
            Eigen::VectorXcd c(dim);
            if (dim == 1) {
                c[0] = std::exp(-kI * d[0] * tau);
                return c;
            }
            const auto& Q = es.eigenvectors();
            const auto& lam = es.eigenvalues();
            for (int i = 0; i < dim; ++i) {
                cplx s = 0.0;
                for (int k = 0; k < dim; ++k) s += Q(i, k) * std::exp(-kI * lam[k] * tau) * Q(0, k);
                c[i] = s;
            }
            return c;
        };
        double tau = remaining;
        Eigen::VectorXcd c = coeffs(tau);
        if (!exact) {
            int halvings = 0;
            // |c_last| below ~eps is rounding noise from the eigen-decomposition, not truncation
            while (beta[dim] * std::abs(c[dim - 1]) > std::max(tol * tau / t, 8e-16 * beta[dim])) {
                tau *= 0.5;
                c = coeffs(tau);
                if (++halvings > 60) fail(ErrorKind::Numerical, "Krylov step size underflow");
            }
        }
        std::fill(v, v + n, cplx(0.0));
        for (int j = 0; j < dim; ++j) K.axpy(n, b0 * c[j], V[j].data(), v);
        remaining -= tau;
        if (remaining < 1e-15 * t) remaining = 0.0;
        if (info) ++info->substeps;
    }
}

namespace {

using Prop = EvolveConfig::Propagator;

// exp(-i G h) when G is a B x B matrix at every grid point (all of G's terms
// diagonal in x, or all diagonal in k). Each point spans an invariant subspace
// of dimension <= B, on which Lanczos terminates exactly; this is that limit.
class PointwiseExp {
public:
    PointwiseExp(const BlockDiag& a, const BlockDiag& b, std::size_t M, std::size_t B) : M_(M), B_(B) {
        diag_ = true;
        for (const BlockDiag* bd : {&a, &b})
            for (const auto& e : bd->entries)
                if (e.out != e.in) diag_ = false;
        lam_.assign(M * B, 0.0);
        if (diag_) {
            for (const BlockDiag* bd : {&a, &b})
                for (const auto& e : bd->entries)
                    for (std::size_t i = 0; i < M; ++i) lam_[e.in * M + i] += (e.d.size() == 1 ? e.d[0] : e.d[i]).real();
            return;
        }
        U_.resize(M * B * B);
        Eigen::MatrixXcd m(B, B);
        for (std::size_t i = 0; i < M; ++i) {
            m.setZero();
            for (const BlockDiag* bd : {&a, &b})
                for (const auto& e : bd->entries) m(e.out, e.in) += e.d.size() == 1 ? e.d[0] : e.d[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
            for (std::size_t k = 0; k < B; ++k) {
                lam_[k * M + i] = es.eigenvalues()(k);
                for (std::size_t r = 0; r < B; ++r) U_[(i * B + r) * B + k] = es.eigenvectors()(r, k);
            }
        }
    }

    void apply(cplx* v, double h) const {
        if (diag_) {
            for (std::size_t j = 0; j < M_ * B_; ++j) v[j] *= std::exp(cplx(0.0, -lam_[j] * h));
            return;
        }
        std::vector<cplx> x(B_), y(B_);
        for (std::size_t i = 0; i < M_; ++i) {
            const cplx* U = &U_[i * B_ * B_];
            for (std::size_t k = 0; k < B_; ++k) {
                cplx s = 0.0;
                for (std::size_t r = 0; r < B_; ++r) s += std::conj(U[r * B_ + k]) * v[r * M_ + i];
                x[k] = s * std::exp(cplx(0.0, -lam_[k * M_ + i] * h));
            }
            for (std::size_t r = 0; r < B_; ++r) {
                cplx s = 0.0;
                for (std::size_t k = 0; k < B_; ++k) s += U[r * B_ + k] * x[k];
                v[r * M_ + i] = s;
            }
        }
    }

private:
    std::size_t M_, B_;
    bool diag_ = true;
    std::vector<double> lam_;
    CVec U_;
};

// exp(-i D tau) for the diagonal blocks of K and X; split-step needs B == 1 style blocks.
void check_splittable(const SliceOp& op) {
    auto diag = [](const BlockDiag& b) {
        for (const auto& e : b.entries)
            if (e.out != e.in) return false;
        return true;
    };
    if (!(op.momentum_diagonal() || op.position_diagonal()) &&
        !(diag(op.kdiag()) && diag(op.xdiag()) && diag(op.cdiag())))
        fail(ErrorKind::Unsupported, "split-step needs a generator diagonal in x or p per block");
}

}  // namespace

GridState evolve(const OperatorSum& H, const GridState& psi0, const EvolveConfig& cfg, EvolveStats* stats) {
    CompiledOperator co(H, psi0.layout);
    return evolve(co, psi0, cfg, stats);
}

GridState evolve(const CompiledOperator& H, const GridState& psi0, const EvolveConfig& cfg, EvolveStats* stats) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(cfg.dt > 0.0) || cfg.t_final < 0.0) fail(ErrorKind::Validation, "evolve needs dt > 0 and t_final >= 0");
    if (cfg.krylov_m < 2) fail(ErrorKind::Validation, "Krylov subspace size must be >= 2");
    const Layout& L = *psi0.layout;
    if (H.uses_eta() && psi0.rep != AncRep::Eta) fail(ErrorKind::Validation, "state must be in the eta representation");
    GridState psi = psi0;
    const std::size_t ns = L.n_slices(), N = L.slice_size(), M = L.mode_size();
    const int nsteps = cfg.t_final == 0.0 ? 0 : static_cast<int>(std::ceil(cfg.t_final / cfg.dt - 1e-12));
    std::vector<double> worst(ns, 0.0);
    std::vector<KrylovInfo> infos(ns);
    std::optional<SliceOp> shared;
    if (!H.uses_eta()) shared = H.slice({});

    parallel_for(ns, cfg.threads, [&](std::size_t b, std::size_t e) {
        const auto& K = kern::active();
        CVec work(N), t1(N), t2(N), t3(N), t4(N);
        for (std::size_t s = b; s < e; ++s) {
            std::optional<SliceOp> own;
            if (!shared) own = H.slice(L.eta_at(s));
            const SliceOp& op = shared ? *shared : *own;
            cplx* v = psi.slice(s);
            if (op.is_zero() || nsteps == 0) continue;
            const bool kmode = op.momentum_diagonal(), xmode = op.position_diagonal();
            SliceApply G;
            if (kmode) G = [&](const cplx* a, cplx* y) { op.apply_k(a, y); };
            else if (xmode) G = [&](const cplx* a, cplx* y) { op.apply_x(a, y); };
            else G = [&](const cplx* a, cplx* y) { op.apply(a, y); };
            double prev = std::sqrt(K.norm2(N, v));
            // in momentum mode the unnormalized DFT scales norms by sqrt(M)
            if (kmode && cfg.prop == Prop::Krylov) {
                slice_fft(L, -1, v, work.data());
                std::copy(work.begin(), work.end(), v);
                prev *= std::sqrt(static_cast<double>(M));
            }
            if (cfg.prop == Prop::SplitStep) check_splittable(op);
            std::optional<PointwiseExp> pw;
            if (cfg.prop == Prop::Krylov && kmode) pw.emplace(op.kdiag(), op.cdiag(), M, L.block_count());
            else if (cfg.prop == Prop::Krylov && xmode) pw.emplace(op.xdiag(), op.cdiag(), M, L.block_count());
            for (int step = 0; step < nsteps; ++step) {
                const double h = std::min(cfg.dt, cfg.t_final - step * cfg.dt);
                if (h <= 0.0) break;
                switch (cfg.prop) {
                    case Prop::Krylov:
                        if (pw) {
                            pw->apply(v, h);
                            ++infos[s].substeps;
                        } else {
                            krylov_expm(G, v, N, h, cfg.krylov_m, cfg.krylov_tol, cfg.full_reorth, &infos[s]);
                        }
                        break;
                    case Prop::RK4: {
                        // k_i stored as -i G(.)
                        auto f = [&](const cplx* a, cplx* y) {
                            op.apply(a, y);
                            K.scale(N, -kI, y);
                        };
                        f(v, t1.data());
                        for (std::size_t i = 0; i < N; ++i) work[i] = v[i] + 0.5 * h * t1[i];
                        f(work.data(), t2.data());
                        for (std::size_t i = 0; i < N; ++i) work[i] = v[i] + 0.5 * h * t2[i];
                        f(work.data(), t3.data());
                        for (std::size_t i = 0; i < N; ++i) work[i] = v[i] + h * t3[i];
                        f(work.data(), t4.data());
                        for (std::size_t i = 0; i < N; ++i) v[i] += h / 6.0 * (t1[i] + 2.0 * t2[i] + 2.0 * t3[i] + t4[i]);
                        infos[s].applies += 4;
                        break;
                    }
                    case Prop::SplitStep: {
                        auto half_x = [&](double tau) {
                            for (const BlockDiag* bd : {&op.xdiag(), &op.cdiag()})
                                for (const auto& en : bd->entries)
                                    for (std::size_t i = 0; i < M; ++i) {
                                        const cplx d = en.d.size() == 1 ? en.d[0] : en.d[i];
                                        v[en.in * M + i] *= std::exp(-kI * d.real() * tau);
                                    }
                        };
                        half_x(0.5 * h);
                        slice_fft(L, -1, v, work.data());
                        for (const auto& en : op.kdiag().entries)
                            for (std::size_t i = 0; i < M; ++i) work[en.in * M + i] *= std::exp(-kI * en.d[i].real() * h);
                        slice_fft(L, +1, work.data(), v);
                        K.scale(N, 1.0 / static_cast<double>(M), v);
                        half_x(0.5 * h);
                        break;
                    }
                }
                const double now = std::sqrt(K.norm2(N, v));
                if (prev > 0.0) worst[s] = std::max(worst[s], std::abs(now / prev - 1.0));
                prev = now;
                if (cfg.prop != Prop::RK4 && worst[s] > cfg.norm_tol)
                    fail(ErrorKind::Guard, "norm drift " + std::to_string(worst[s]) + " at step " +
                                               std::to_string(step) + " of slice " + std::to_string(s));
            }
            if (kmode && cfg.prop == Prop::Krylov) {
                slice_fft(L, +1, v, work.data());
                for (std::size_t i = 0; i < N; ++i) v[i] = work[i] / static_cast<double>(M);
            }
        }
    });

    EvolveStats st;
    for (std::size_t s = 0; s < ns; ++s) {
        st.max_step_drift = std::max(st.max_step_drift, worst[s]);
        st.substeps += infos[s].substeps;
        st.applies += infos[s].applies;
    }
    const double n0 = psi0.norm(), n1 = psi.norm();
    st.norm_drift = n0 > 0.0 ? std::abs(n1 / n0 - 1.0) : 0.0;
    if (cfg.prop != Prop::RK4 && st.norm_drift > cfg.norm_tol)
        fail(ErrorKind::Guard, "norm drift " + std::to_string(st.norm_drift) + " over the run");
    // eta slices disperse freely in x; the caller checks the recombined xi field
    const bool eta_rep = psi.rep == AncRep::Eta && !L.anc.empty();
    st.boundary_mass = eta_rep ? 0.0 : boundary_mass_fraction(psi);
    if (cfg.check_boundary && st.boundary_mass > cfg.boundary_tol)
        fail(ErrorKind::Guard, "boundary mass " + std::to_string(st.boundary_mass) + " exceeds tolerance; enlarge the box");
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (stats) *stats = st;
    return psi;
}

}  // namespace schro
