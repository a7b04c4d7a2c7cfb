#include "schro/schrodingerize.hpp"

#include <cmath>

#include "schro/apply.hpp"
#include "schro/fft.hpp"
#include "schro/hamiltonian.hpp"

namespace schro {

const char* pipeline_name(Pipeline p) {
    switch (p) {
        case Pipeline::Auto: return "auto";
        case Pipeline::Direct: return "direct";
        case Pipeline::Standard: return "standard";
        case Pipeline::Extended: return "extended";
    }
    return "auto";
}

Pipeline pipeline_from_name(const std::string& s) {
    for (Pipeline p : {Pipeline::Auto, Pipeline::Direct, Pipeline::Standard, Pipeline::Extended})
        if (s == pipeline_name(p)) return p;
    fail(ErrorKind::Validation, "unknown pipeline '" + s + "'");
}

const OperatorSum& SchrodingerisedSystem::A2(int axis) const {
    if (pipeline == Pipeline::Extended) return axis_split.at(axis).second;
    return split.A2;
}

LayoutPtr make_layout(const GridSpec& g, int qubits, int n_anc) {
    auto L = std::make_shared<Layout>();
    for (const auto& a : g.x) L->modes.push_back(make_mode_axis(a));
    L->qubits = qubits;
    for (int n : g.n_max) L->fock.push_back(n + 1);
    for (int i = 0; i < n_anc; ++i) L->anc.push_back(make_anc_axis(g.xi_L, g.xi_n));
    return L;
}

LayoutPtr strip_ancilla(const Layout& L) {
    auto out = std::make_shared<Layout>(L);
    out->anc.clear();
    return out;
}

namespace {

bool is_zero_op(const OperatorSum& op, const LayoutPtr& base, bool symbolic) {
    if (op.empty()) return true;
    if (symbolic) {
        auto nf = NormalForm::from(op, base->dims().merged(op.dims()));
        if (nf) return nf->is_zero();
    }
    // numeric: largest observed |O psi| relative to the grid's scale
    const auto pr = probe_hermitian(op, base, 7, 4);
    return pr.op_norm == 0.0;
}

bool hermitian(const OperatorSum& A, const HermitianSplit& s, const LayoutPtr& base) {
    if (s.symbolic) return is_zero_op(s.A2, base, true);
    // tabulated factors: compare A with A^dagger numerically
    GridState psi = random_state(base, AncRep::Xi, 11);
    const GridState a = apply_operator(s.A2_raw, psi);
    const GridState b = apply_operator(A, psi);
    return a.norm() <= 1e-12 * std::max(b.norm(), 1e-300);
}

}  // namespace

SchrodingerisedSystem schrodingerise_operator(const std::string& name, const OperatorSum& A, LayoutPtr base,
                                              const GridSpec& g, Pipeline p,
                                              const std::vector<OperatorSum>& axis_parts) {
    if (!base->anc.empty()) fail(ErrorKind::Validation, "base layout must not carry ancilla axes");
    SchrodingerisedSystem sys;
    sys.name = name;
    sys.D = static_cast<int>(base->modes.size());
    sys.A = A;
    sys.base = base;
    sys.split = hermitian_split(A);
    const bool herm = hermitian(A, sys.split, base);
    if (p == Pipeline::Auto) p = herm ? Pipeline::Direct : Pipeline::Standard;
    if (p == Pipeline::Direct && !herm) fail(ErrorKind::Validation, "direct pipeline needs a Hermitian generator");
    sys.pipeline = p;
    auto with_anc = [&](int n) {
        auto L = std::make_shared<Layout>(*base);
        for (int i = 0; i < n; ++i) L->anc.push_back(make_anc_axis(g.xi_L, g.xi_n));
        return LayoutPtr(L);
    };
    switch (p) {
        case Pipeline::Direct:
            sys.H = A;
            sys.layout = base;
            break;
        case Pipeline::Standard:
            sys.H = assemble_hamiltonian(sys.split.A1, sys.split.A2, 0);
            sys.layout = with_anc(1);
            break;
        case Pipeline::Extended: {
            if (axis_parts.empty()) fail(ErrorKind::Validation, "extended pipeline needs per-axis generators");
            for (const auto& a : axis_parts) {
                auto s = hermitian_split(a);
                sys.axis_split.push_back({s.A1, s.A2});
            }
            sys.H = assemble_extended(sys.axis_split);
            sys.layout = with_anc(static_cast<int>(axis_parts.size()));
            break;
        }
        case Pipeline::Auto: break;
    }
    return sys;
}

OperatorSum dilate_inhomogeneous(const OperatorSum& A, int q) {
    using F = OperatorFactor;
    const OperatorSum I = OperatorSum::identity();
    const OperatorSum sx = OperatorSum::of(F::pauli(q, 'X')), sy = OperatorSum::of(F::pauli(q, 'Y')),
                      sz = OperatorSum::of(F::pauli(q, 'Z'));
    const OperatorSum P0 = (I + sz) * cplx(0.5);
    const OperatorSum raise = (sx + sy * kI) * cplx(0.5);  // |0><1|
    return A * P0 + raise * kI;
}

OperatorSum dilate_time_order2(const OperatorSum& A, const OperatorSum& Gamma, int q) {
    using F = OperatorFactor;
    const OperatorSum I = OperatorSum::identity();
    const OperatorSum sx = OperatorSum::of(F::pauli(q, 'X')), sy = OperatorSum::of(F::pauli(q, 'Y')),
                      sz = OperatorSum::of(F::pauli(q, 'Z'));
    const OperatorSum up = (sx + sy * kI) * cplx(0.5);    // |0><1|
    const OperatorSum down = (sx - sy * kI) * cplx(0.5);  // |1><0|
    const OperatorSum P1 = (I - sz) * cplx(0.5);
    OperatorSum V = up * kI + A * down;
    if (!Gamma.empty()) V = V + Gamma * P1 * (-kI);
    return V;
}

std::vector<OperatorSum> axis_generators(const PdeSpec& spec) {
    if (spec.time_order != 1 || spec.f) fail(ErrorKind::Unsupported, "extended pipeline needs a homogeneous first-order spec");
    std::vector<OperatorSum> out;
    for (int j = 0; j < spec.D; ++j) {
        PdeSpec s = spec;
        s.terms.clear();
        for (const auto& t : spec.terms) {
            if (t.outer() != t.j) fail(ErrorKind::Unsupported, "term couples two axes; not attributable to one axis");
            if (t.j == j) s.terms.push_back(t);
        }
        // b shared evenly over the D axes
        if (!spec.b.is_zero()) {
            if (spec.b.is_polynomial()) s.b = spec.b.poly() * cplx(1.0 / spec.D);
            else {
                TabulatedField tf = spec.b.table();
                for (auto& v : tf.values) v /= static_cast<double>(spec.D);
                s.b = tf;
            }
        }
        out.push_back(build_A(s));
    }
    return out;
}

SchrodingerisedSystem schrodingerise(const PdeSpec& spec, const GridSpec& g, Pipeline p) {
    require_valid(spec, g);
    OperatorSum A = build_A(spec);
    Dilation dil = Dilation::None;
    if (spec.time_order == 2) {
        A = dilate_time_order2(A, build_gamma(spec), 0);
        dil = Dilation::TimeOrder2;
    } else if (spec.f) {
        A = dilate_inhomogeneous(A, 0);
        dil = Dilation::Inhomogeneous;
    }
    const int qubits = dil == Dilation::None ? 0 : 1;
    LayoutPtr base = make_layout(g, qubits, 0);
    std::vector<OperatorSum> parts;
    if (p == Pipeline::Extended) {
        if (dil != Dilation::None) fail(ErrorKind::Unsupported, "extended pipeline does not take dilated systems");
        parts = axis_generators(spec);
    }
    SchrodingerisedSystem sys = schrodingerise_operator(spec.name, A, base, g, p, parts);
    sys.dilation = dil;
    sys.dil_qubit = qubits ? 0 : -1;
    if (dil == Dilation::Inhomogeneous) sys.forcing = tabulate(*spec.f, *base);
    return sys;
}

CVec initial_block(const SchrodingerisedSystem& sys, const InitialData& init) {
    const Layout& L = *sys.base;
    const std::size_t M = L.mode_size(), N = L.slice_size();
    CVec y(N, 0.0);
    if (init.u0.size() == N && sys.dilation == Dilation::None) return init.u0;
    if (init.u0.size() != M) fail(ErrorKind::Validation, "initial data does not match the grid");
    const std::size_t F = N / M / (std::size_t{1} << L.qubits);
    // sector |bit> of the dilation qubit, all other qubits 0, Fock index 0
    auto sector = [&](int bit) { return static_cast<std::size_t>(bit) * F * M; };
    std::copy(init.u0.begin(), init.u0.end(), y.begin() + sector(0));
    if (sys.dilation == Dilation::Inhomogeneous) {
        std::copy(sys.forcing.begin(), sys.forcing.end(), y.begin() + sector(1));
    } else if (sys.dilation == Dilation::TimeOrder2) {
        if (init.ut0.size() != M) fail(ErrorKind::Validation, "time order 2 needs du/dt at t = 0");
        std::copy(init.ut0.begin(), init.ut0.end(), y.begin() + sector(1));
    }
    return y;
}

GridState warp_initial(LayoutPtr layout, const CVec& block, AncillaProfile prof, double s) {
    const Layout& L = *layout;
    if (block.size() != L.slice_size()) fail(ErrorKind::Validation, "block does not match the slice size");
    if (prof == AncillaProfile::Gaussian && !(s > 0.0)) fail(ErrorKind::Validation, "Gaussian ancilla width must be positive");
    for (const auto& a : L.anc)
        if (std::abs(a.xi[0] + a.L) > 1e-12 * a.L) fail(ErrorKind::Validation, "xi grid must be symmetric about 0");
    auto g = [&](double xi) {
        if (prof == AncillaProfile::Exact) return std::exp(-std::abs(xi));
        return std::exp(-xi * xi / (2.0 * s * s)) / (std::sqrt(s) * std::pow(kPi, 0.25));
    };
    GridState w(layout, AncRep::Xi);
    const std::size_t S = L.slice_size();
    for (std::size_t sl = 0; sl < L.n_slices(); ++sl) {
        double f = 1.0;
        for (double xi : L.xi_at(sl)) f *= g(xi);
        cplx* out = w.slice(sl);
        for (std::size_t i = 0; i < S; ++i) out[i] = f * block[i];
    }
    return w;
}

namespace {

// sign +1: xi -> eta, sign -1: eta -> xi
GridState anc_transform(const GridState& in, int sign) {
    const Layout& L = *in.layout;
    GridState out(in.layout, sign > 0 ? AncRep::Eta : AncRep::Xi);
    out.v = in.v;
    std::vector<std::size_t> shape;
    for (const auto& a : L.anc) shape.push_back(a.n);
    shape.push_back(L.slice_size());
    const std::size_t S = L.slice_size();
    for (std::size_t ax = 0; ax < L.anc.size(); ++ax) {
        const auto& a = L.anc[ax];
        // inverse: the (-1)^m factor goes in before the transform
        auto sign_flip = [&](double scale) {
            for (std::size_t sl = 0; sl < L.n_slices(); ++sl) {
                const int m = L.anc_index(sl)[ax];
                const double f = (m % 2 ? -scale : scale);
                cplx* p = out.slice(sl);
                for (std::size_t i = 0; i < S; ++i) p[i] *= f;
            }
        };
        if (sign > 0) {
            fft::transform_axis(shape, static_cast<int>(ax), +1, out.v.data(), out.v.data());
            sign_flip(a.h);
        } else {
            sign_flip(1.0 / (a.n * a.h));
            fft::transform_axis(shape, static_cast<int>(ax), -1, out.v.data(), out.v.data());
        }
    }
    return out;
}

}  // namespace

GridState fourier_xi_to_eta(const GridState& w) {
    if (w.rep != AncRep::Xi) fail(ErrorKind::Validation, "state is not in the xi representation");
    if (w.layout->anc.empty()) fail(ErrorKind::Validation, "state has no ancilla axis");
    return anc_transform(w, +1);
}

GridState inverse_eta_to_xi(const GridState& v) {
    if (v.rep != AncRep::Eta) fail(ErrorKind::Validation, "state is not in the eta representation");
    if (v.layout->anc.empty()) fail(ErrorKind::Validation, "state has no ancilla axis");
    return anc_transform(v, -1);
}

GridState initial_state(const SchrodingerisedSystem& sys, const InitialData& init, AncillaProfile prof, double s) {
    const CVec y0 = initial_block(sys, init);
    if (sys.direct()) {
        GridState g(sys.layout, AncRep::Xi);
        g.v = y0;
        return g;
    }
    return fourier_xi_to_eta(warp_initial(sys.layout, y0, prof, s));
}

}  // namespace schro
