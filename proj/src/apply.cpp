#include "schro/apply.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "schro/fft.hpp"
#include "schro/kernels.hpp"
#include "schro/uq.hpp"

namespace schro {

namespace {

using Dense = std::vector<cplx>;  // row-major square

Dense kron(const Dense& a, int na, const Dense& b, int nb) {
    Dense r(static_cast<std::size_t>(na * nb) * (na * nb));
    const int n = na * nb;
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            for (int k = 0; k < nb; ++k)
                for (int l = 0; l < nb; ++l) r[(i * nb + k) * n + j * nb + l] = a[i * na + j] * b[k * nb + l];
    return r;
}

Dense matmul(const Dense& a, const Dense& b, int n) {
    Dense r(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const cplx v = a[i * n + k];
            if (v == cplx(0.0)) continue;
            for (int j = 0; j < n; ++j) r[i * n + j] += v * b[k * n + j];
        }
    return r;
}

Dense pauli(char s) {
    switch (s) {
        case 'X': return {0.0, 1.0, 1.0, 0.0};
        case 'Y': return {0.0, -kI, kI, 0.0};
        case 'Z': return {1.0, 0.0, 0.0, -1.0};
        default: return {1.0, 0.0, 0.0, 1.0};
    }
}

thread_local CVec tl_a, tl_b, tl_c, tl_d;

cplx* buf(CVec& v, std::size_t n) {
    if (v.size() < n) v.resize(n);
    return v.data();
}

}  // namespace

void slice_fft(const Layout& L, int sign, const cplx* in, cplx* out) {
    fft::transform(L.mode_shape(), static_cast<int>(L.block_count()), sign, in, out);
}

void BlockDiag::add(int out, int in, cplx scale, const cplx* d, std::size_t M) {
    if (scale == cplx(0.0)) return;
    auto it = std::find_if(entries.begin(), entries.end(), [&](const Entry& e) { return e.out == out && e.in == in; });
    if (it == entries.end()) {
        entries.push_back({out, in, CVec(1, 0.0)});
        it = entries.end() - 1;
    }
    if (d == nullptr) {
        if (it->d.size() == 1) it->d[0] += scale;
        else
            for (auto& v : it->d) v += scale;
        return;
    }
    if (it->d.size() == 1) it->d.assign(M, it->d[0]);
    kern::active().axpy(M, scale, d, it->d.data());
}

void BlockDiag::apply_acc(const cplx* x, cplx* y, std::size_t M) const {
    const auto& K = kern::active();
    for (const auto& e : entries) {
        if (e.d.size() == 1) K.axpy(M, e.d[0], x + e.in * M, y + e.out * M);
        else K.mul_acc(M, e.d.data(), x + e.in * M, y + e.out * M);
    }
}

bool BlockDiag::scalar_only() const {
    return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.d.size() == 1; });
}

CompiledOperator::CompiledOperator(const OperatorSum& op, LayoutPtr layout, bool generic) : layout_(std::move(layout)) {
    const Layout& L = *layout_;
    const OperatorDims need = op.dims(), have = L.dims();
    if (need.modes > have.modes || need.etas > have.etas || need.qubits > have.qubits || need.focks > have.focks)
        fail(ErrorKind::Validation, "operator references axes missing from the grid layout");
    const int B = static_cast<int>(L.block_count());
    const std::size_t M = L.mode_size();
    const auto mshape = L.mode_shape();

    for (const auto& term : op.terms()) {
        CompiledTerm ct;
        ct.c = term.coeff;
        ct.eta_pow.assign(L.anc.size(), 0);
        std::vector<Dense> pm(L.qubits, pauli('I'));
        std::vector<int> zpow(L.fock.size(), 0);
        for (const auto& f : term.factors) {
            switch (f.kind) {
                case FactorKind::Eta: ct.eta_pow[f.axis] += f.power; break;
                case FactorKind::Pauli: pm[f.axis] = matmul(pm[f.axis], pauli(f.sigma), 2); break;
                case FactorKind::FockZ: zpow[f.axis] += f.power; break;
                case FactorKind::P:
                    if (ct.segs.empty() || ct.segs.back().field) {
                        ct.segs.push_back({false, nullptr, std::vector<int>(L.modes.size(), 0)});
                    }
                    ct.segs.back().alpha[f.axis] += f.power;
                    break;
                case FactorKind::X:
                case FactorKind::Table: {
                    CVec v(M);
                    if (f.kind == FactorKind::X) {
                        auto xp = L.coordinate_power(f.axis, f.power);
                        for (std::size_t i = 0; i < M; ++i) v[i] = xp[i];
                    } else {
                        if (f.table->shape != mshape || f.table->values.size() != M)
                            fail(ErrorKind::Validation, "tabulated factor does not match the mode grid");
                        v = f.table->values;
                    }
                    if (!ct.segs.empty() && ct.segs.back().field) {
                        CVec merged = *ct.segs.back().f;
                        for (std::size_t i = 0; i < M; ++i) merged[i] *= v[i];
                        ct.segs.back().f = std::make_shared<const CVec>(std::move(merged));
                    } else {
                        ct.segs.push_back({true, std::make_shared<const CVec>(std::move(v)), {}});
                    }
                    break;
                }
            }
        }
        // block action
        Dense R{1.0};
        int n = 1;
        for (int q = 0; q < L.qubits; ++q) R = kron(R, n, pm[q], 2), n *= 2;
        for (std::size_t l = 0; l < L.fock.size(); ++l) {
            const int nf = L.fock[l];
            auto zm = z_position_matrix(nf - 1);
            Dense Z(zm.begin(), zm.end()), Zp(static_cast<std::size_t>(nf) * nf);
            for (int i = 0; i < nf; ++i) Zp[i * nf + i] = 1.0;
            for (int p = 0; p < zpow[l]; ++p) Zp = matmul(Zp, Z, nf);
            R = kron(R, n, Zp, nf), n *= nf;
        }
        for (int i = 0; i < B; ++i)
            for (int j = 0; j < B; ++j)
                if (std::abs(R[i * B + j]) > 0.0) ct.blocks.entries.push_back({i, j, R[i * B + j]});
        if (ct.blocks.entries.empty()) continue;
        // drop zero momentum powers from segments
        for (auto& s : ct.segs)
            if (!s.field) kpow(s.alpha);
        const auto& sg = ct.segs;
        if (generic) ct.kind = CompiledTerm::Kind::Chain;
        else if (sg.empty() || (sg.size() == 1 && !sg[0].field)) ct.kind = CompiledTerm::Kind::KDiag;
        else if (sg.size() == 1) ct.kind = CompiledTerm::Kind::XDiag;
        else if (sg.size() == 2 && sg[0].field) ct.kind = CompiledTerm::Kind::Left;
        else if (sg.size() == 2) ct.kind = CompiledTerm::Kind::Right;
        else ct.kind = CompiledTerm::Kind::Chain;
        for (int e : ct.eta_pow) uses_eta_ = uses_eta_ || e > 0;
        terms_.push_back(std::move(ct));
    }
}

const std::vector<double>& CompiledOperator::kpow(const std::vector<int>& alpha) const {
    auto it = kpow_.find(alpha);
    if (it == kpow_.end()) {
        // only reached during construction
        auto& self = const_cast<CompiledOperator&>(*this);
        it = self.kpow_.emplace(alpha, layout_->momentum_power(alpha)).first;
    }
    return it->second;
}

SliceOp CompiledOperator::slice(std::span<const double> eta) const {
    SliceOp s;
    s.owner_ = this;
    s.M_ = layout_->mode_size();
    s.B_ = layout_->block_count();
    const std::size_t M = s.M_;
    CVec tmp(M);
    for (const auto& t : terms_) {
        cplx c = t.c;
        for (std::size_t a = 0; a < t.eta_pow.size(); ++a)
            if (t.eta_pow[a]) {
                if (a >= eta.size()) fail(ErrorKind::Validation, "eta value missing for slice");
                c *= std::pow(eta[a], t.eta_pow[a]);
            }
        if (c == cplx(0.0)) continue;
        auto add_all = [&](BlockDiag& bd, const cplx* d) {
            for (const auto& e : t.blocks.entries) bd.add(e.out, e.in, c * e.c, d, M);
        };
        auto kfield = [&](const std::vector<int>& alpha) -> const cplx* {
            const auto& k = kpow_.at(alpha);
            for (std::size_t i = 0; i < M; ++i) tmp[i] = k[i];
            return tmp.data();
        };
        switch (t.kind) {
            case CompiledTerm::Kind::KDiag: {
                bool trivial = t.segs.empty();
                if (!trivial) {
                    const auto& a = t.segs[0].alpha;
                    trivial = std::all_of(a.begin(), a.end(), [](int v) { return v == 0; });
                }
                if (trivial) add_all(s.cdiag_, nullptr);
                else add_all(s.kdiag_, kfield(t.segs[0].alpha));
                break;
            }
            case CompiledTerm::Kind::XDiag: add_all(s.xdiag_, t.segs[0].f->data()); break;
            case CompiledTerm::Kind::Left: add_all(s.left_[t.segs[1].alpha], t.segs[0].f->data()); break;
            case CompiledTerm::Kind::Right: add_all(s.right_[t.segs[0].alpha], t.segs[1].f->data()); break;
            case CompiledTerm::Kind::Chain: s.chains_.emplace_back(c, &t); break;
        }
    }
    return s;
}

bool SliceOp::is_zero() const {
    return kdiag_.empty() && xdiag_.empty() && cdiag_.empty() && left_.empty() && right_.empty() && chains_.empty();
}

void SliceOp::apply_chain(const CompiledTerm& t, cplx s, const cplx* x, cplx* y) const {
    const auto& K = kern::active();
    const std::size_t M = M_, N = M_ * B_;
    const Layout& L = owner_->layout();
    cplx* a = buf(tl_c, N);
    cplx* b = buf(tl_d, N);
    std::fill(a, a + N, cplx(0.0));
    for (const auto& e : t.blocks.entries) K.axpy(M, e.c, x + e.in * M, a + e.out * M);
    for (auto it = t.segs.rbegin(); it != t.segs.rend(); ++it) {
        if (it->field) {
            for (std::size_t blk = 0; blk < B_; ++blk) K.mul(M, it->f->data(), a + blk * M, a + blk * M);
        } else {
            const auto& k = owner_->kpow(it->alpha);
            slice_fft(L, -1, a, b);
            for (std::size_t blk = 0; blk < B_; ++blk) K.rmul(M, k.data(), b + blk * M, b + blk * M);
            slice_fft(L, +1, b, a);
            K.scale(N, 1.0 / static_cast<double>(M), a);
        }
    }
    K.axpy(N, s, a, y);
}

void SliceOp::apply(const cplx* x, cplx* y) const {
    const auto& K = kern::active();
    const std::size_t M = M_, N = M_ * B_;
    const Layout& L = owner_->layout();
    std::fill(y, y + N, cplx(0.0));
    const bool need_hat = !kdiag_.empty() || !left_.empty();
    const bool need_acc = !kdiag_.empty() || !right_.empty();
    if (need_hat || need_acc) {
        cplx* xh = buf(tl_a, N);
        cplx* acc = buf(tl_b, N);
        cplx* t1 = buf(tl_c, N);
        cplx* t2 = buf(tl_d, N);
        if (need_hat) slice_fft(L, -1, x, xh);
        if (need_acc) {
            std::fill(acc, acc + N, cplx(0.0));
            kdiag_.apply_acc(xh, acc, M);
            for (const auto& [alpha, bd] : right_) {
                std::fill(t1, t1 + N, cplx(0.0));
                bd.apply_acc(x, t1, M);
                slice_fft(L, -1, t1, t2);
                const auto& k = owner_->kpow(alpha);
                for (std::size_t blk = 0; blk < B_; ++blk) K.rmul_acc(M, 1.0, k.data(), t2 + blk * M, acc + blk * M);
            }
        }
        for (const auto& [alpha, bd] : left_) {
            const auto& k = owner_->kpow(alpha);
            for (std::size_t blk = 0; blk < B_; ++blk) K.rmul(M, k.data(), xh + blk * M, t1 + blk * M);
            slice_fft(L, +1, t1, t2);
            K.scale(N, 1.0 / static_cast<double>(M), t2);
            bd.apply_acc(t2, y, M);
        }
        if (need_acc) {
            slice_fft(L, +1, acc, t1);
            K.axpy(N, 1.0 / static_cast<double>(M), t1, y);
        }
    }
    xdiag_.apply_acc(x, y, M);
    cdiag_.apply_acc(x, y, M);
    for (const auto& [s, t] : chains_) apply_chain(*t, s, x, y);
}

void SliceOp::apply_k(const cplx* xh, cplx* yh) const {
    const std::size_t N = M_ * B_;
    std::fill(yh, yh + N, cplx(0.0));
    kdiag_.apply_acc(xh, yh, M_);
    cdiag_.apply_acc(xh, yh, M_);
}

void SliceOp::apply_x(const cplx* x, cplx* y) const {
    const std::size_t N = M_ * B_;
    std::fill(y, y + N, cplx(0.0));
    xdiag_.apply_acc(x, y, M_);
    cdiag_.apply_acc(x, y, M_);
}

GridState apply_operator(const OperatorSum& op, const GridState& psi, bool generic) {
    const Layout& L = *psi.layout;
    CompiledOperator co(op, psi.layout, generic);
    if (co.uses_eta() && psi.rep != AncRep::Eta)
        fail(ErrorKind::Unsupported, "eta factors need the state in the eta representation");
    GridState out(psi.layout, psi.rep);
    std::optional<SliceOp> shared;
    if (!co.uses_eta()) shared = co.slice({});
    for (std::size_t s = 0; s < L.n_slices(); ++s) {
        if (co.uses_eta()) {
            const auto eta = L.eta_at(s);
            co.slice(eta).apply(psi.slice(s), out.slice(s));
        } else {
            shared->apply(psi.slice(s), out.slice(s));
        }
    }
    return out;
}

cplx inner(const GridState& a, const GridState& b) {
    if (a.v.size() != b.v.size()) fail(ErrorKind::Validation, "state shapes differ");
    return kern::active().dot(a.v.size(), a.v.data(), b.v.data()) * a.layout->mode_weight() * a.anc_weight();
}

cplx expectation(const GridState& psi, const OperatorSum& op) {
    // same reduction as the numerator so that <I> is exactly one
    const double n2 = inner(psi, psi).real();
    if (!(n2 > 0.0)) fail(ErrorKind::Numerical, "expectation of a zero-norm state");
    return inner(psi, apply_operator(op, psi)) / n2;
}

GridState random_state(LayoutPtr layout, AncRep rep, std::uint64_t seed) {
    GridState s(std::move(layout), rep);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    for (auto& v : s.v) v = cplx(nd(rng), nd(rng));
    return s;
}

HermiticityProbe probe_hermitian(const OperatorSum& op, LayoutPtr layout, std::uint64_t seed, int pairs, double tol) {
    HermiticityProbe r;
    if (op.empty()) {
        r.hermitian = true;
        return r;
    }
    std::vector<std::pair<cplx, double>> raw;  // (defect, |f||g|)
    for (int p = 0; p < pairs; ++p) {
        GridState f = random_state(layout, AncRep::Eta, seed + 2 * p + 1);
        GridState g = random_state(layout, AncRep::Eta, seed + 2 * p + 2);
        GridState Of = apply_operator(op, f), Og = apply_operator(op, g);
        r.op_norm = std::max({r.op_norm, Of.norm() / f.norm(), Og.norm() / g.norm()});
        raw.push_back({inner(f, Og) - inner(Of, g), f.norm() * g.norm()});
    }
    for (const auto& [d, nn] : raw)
        r.worst = std::max(r.worst, r.op_norm > 0.0 ? std::abs(d) / (r.op_norm * nn) : std::abs(d));
    r.hermitian = r.worst <= tol;
    return r;
}

bool is_hermitian(const OperatorSum& op, LayoutPtr layout, std::uint64_t seed) {
    return probe_hermitian(op, std::move(layout), seed).hermitian;
}

}  // namespace schro
