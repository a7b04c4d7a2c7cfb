#include "schro/hamiltonian.hpp"

#include <cmath>
#include <sstream>

namespace schro {

namespace {

cplx ipow(int n) {
    static const cplx t[4] = {1.0, kI, -1.0, -kI};
    return t[((n % 4) + 4) % 4];
}

OperatorSum P(int axis, int power = 1) { return OperatorSum::of(OperatorFactor::p(axis, power)); }

}  // namespace

OperatorSum coefficient_operator(const CoefficientExpr& c, int D, const std::string& label) {
    OperatorSum out;
    if (!c.is_polynomial()) {
        const auto& t = c.table();
        if (static_cast<int>(t.shape.size()) != D) fail(ErrorKind::Validation, "tabulated coefficient rank differs from D");
        auto mt = std::make_shared<ModeTable>(ModeTable{t.shape, t.values, label});
        out.add({1.0, {OperatorFactor::tab(std::move(mt))}});
        return out;
    }
    for (const auto& [e, v] : c.poly().terms()) {
        std::vector<OperatorFactor> fs;
        for (std::size_t var = 0; var < e.size(); ++var) {
            if (e[var] == 0) continue;
            if (static_cast<int>(var) < D) fs.push_back(OperatorFactor::x(static_cast<int>(var), e[var]));
            else fs.push_back(OperatorFactor::fock(static_cast<int>(var) - D, e[var]));
        }
        out.add({v, std::move(fs)});
    }
    return out;
}

OperatorSum build_A(const PdeSpec& spec) {
    OperatorSum A;
    const int D = spec.D;
    for (const auto& t : spec.terms) {
        const OperatorSum C = coefficient_operator(t.coef, D);
        switch (t.kind) {
            case TermKind::Plain: A = A + C * P(t.j, t.k) * ipow(t.k + 3); break;
            case TermKind::HeatDivergence: A = A + P(t.outer()) * C * P(t.j) * (-kI); break;
            case TermKind::DriftDivergence: A = A + P(t.j) * C; break;
            case TermKind::DiffusionDivergence: A = A + P(t.j, 2) * C * (-kI); break;
        }
    }
    if (!spec.b.is_zero()) A = A + coefficient_operator(spec.b, D, "b") * (-kI);
    return A;
}

OperatorSum build_gamma(const PdeSpec& spec) {
    if (spec.time_order != 2) fail(ErrorKind::Validation, "damping operator needs time order 2");
    OperatorSum G;
    if (!spec.c0.is_zero()) G = coefficient_operator(spec.c0, spec.D, "c0");
    for (std::size_t j = 0; j < spec.cj.size(); ++j)
        if (!spec.cj[j].is_zero()) G = G + coefficient_operator(spec.cj[j], spec.D, "c") * P(static_cast<int>(j)) * kI;
    return G;
}

OperatorSum assemble_hamiltonian(const OperatorSum& A1, const OperatorSum& A2, int eta_axis) {
    for (const auto* X : {&A1, &A2})
        if (X->has_eta()) fail(ErrorKind::Validation, "split parts must not act on the ancilla");
    return A2 * OperatorSum::of(OperatorFactor::eta(eta_axis)) + A1;
}

OperatorSum assemble_extended(const std::vector<std::pair<OperatorSum, OperatorSum>>& split) {
    OperatorSum H;
    for (std::size_t j = 0; j < split.size(); ++j)
        H = H + assemble_hamiltonian(split[j].first, split[j].second, static_cast<int>(j));
    return H;
}

ResourceRow count_resources(const OperatorSum& H, const OperatorDims& dims_in, bool direct) {
    ResourceRow r;
    const OperatorDims dims = dims_in.merged(H.dims());
    r.qumodes = dims.modes + dims.etas + dims.focks;
    r.qubits = dims.qubits;
    r.direct = direct;
    auto nf = NormalForm::from(H, dims);
    if (nf) {
        for (const auto& st : symmetric_decomposition(*nf)) {
            r.terms += st.key.mixed() ? 2 : 1;
            const int deg = st.key.quadrature_degree();
            r.labels.push_back(sym_term_label(st.key, dims));
            if (deg > r.max_order || r.max_term.empty()) {
                if (deg > r.max_order || r.max_term.empty()) r.max_term = r.labels.back();
                r.max_order = std::max(r.max_order, deg);
            }
            if (deg > 2) r.gaussian = false;
        }
    } else {
        r.symbolic = false;
        for (const auto& t : H.terms()) {
            int deg = 0;
            bool table = false;
            for (const auto& f : t.factors) {
                if (f.kind == FactorKind::Pauli) continue;
                if (f.kind == FactorKind::Table) table = true;
                else deg += f.power;
            }
            ++r.terms;
            if (deg > r.max_order) r.max_order = deg;
            if (deg > 2 || table) r.gaussian = false;
        }
        r.max_term = "(tabulated)";
    }
    if (H.empty()) r.max_term.clear();
    r.gates = r.terms;
    return r;
}

std::string format_resources(const ResourceRow& r) {
    std::ostringstream os;
    if (r.direct) os << "direct; no ancilla\n";
    os << "qumodes: " << r.qumodes;
    if (r.qubits) os << " + " << r.qubits << (r.qubits == 1 ? " qubit" : " qubits");
    os << ", terms: " << r.terms << ", max-order: " << (r.max_term.empty() ? "-" : r.max_term)
       << ", gaussian: " << (r.gaussian ? "yes" : "no");
    return os.str();
}

PdeSpec hamiltonian_to_pde(const OperatorSum& H, int D) {
    OperatorDims dims = H.dims();
    dims.modes = std::max(dims.modes, D);
    if (dims.modes > D || dims.qubits || dims.focks || dims.etas > 1)
        fail(ErrorKind::Unsupported, "no PDE form found: layout is not A2 (x) eta + A1 (x) I");
    auto nf = NormalForm::from(H, dims);
    if (!nf) fail(ErrorKind::Unsupported, "no PDE form found: non-polynomial coefficients");
    // A = A1 - i A2, read off eta^0 and eta^1
    std::map<std::pair<int, int>, Polynomial> coef;
    Polynomial b(D);
    for (const auto& [key, c] : nf->terms()) {
        const int e = key.eta.empty() ? 0 : key.eta[0];
        if (e > 1) fail(ErrorKind::Unsupported, "no PDE form found: eta power above one");
        const cplx ca = e == 0 ? c : -kI * c;
        int axis = -1, order = 0;
        for (int a = 0; a < D; ++a)
            if (key.p[a] > 0) {
                if (axis >= 0) fail(ErrorKind::Unsupported, "no PDE form found: mixed derivatives");
                axis = a;
                order = key.p[a];
            }
        Polynomial::Exponent ex(key.x.begin(), key.x.end());
        ex.resize(D, 0);
        if (axis < 0) {
            b.add_term(ex, kI * ca);
        } else {
            auto& pc = coef.try_emplace({axis, order}, Polynomial(D)).first->second;
            pc.add_term(ex, ca / ipow(order + 3));
        }
    }
    PdeSpec s;
    s.name = "from_hamiltonian";
    s.D = D;
    for (auto& [jk, p] : coef)
        if (!p.is_zero()) s.terms.push_back({jk.first, jk.second, p});
    s.b = b;
    return s;
}

OperatorSum maxwell_curl() {
    using F = OperatorFactor;
    OperatorSum D;
    D.add({-1.0, {F::p(2), F::pauli(2, 'Y')}});
    D.add({-1.0, {F::p(0), F::pauli(1, 'Y'), F::pauli(2, 'X')}});
    D.add({1.0, {F::p(1), F::pauli(1, 'Y'), F::pauli(2, 'Z')}});
    return D;
}

MaxwellSystem assemble_maxwell(const MaxwellSpec& m, const Layout& layout) {
    if (layout.modes.size() != 3 || layout.qubits < 3) fail(ErrorKind::Validation, "Maxwell needs 3 modes and 3 qubits");
    MaxwellSystem sys;
    sys.D = maxwell_curl();
    const OperatorSum sy = OperatorSum::of(OperatorFactor::pauli(0, 'Y'));
    const OperatorSum sx = OperatorSum::of(OperatorFactor::pauli(0, 'X'));
    const std::size_t M = layout.mode_size();
    const CVec eps = tabulate(m.eps, layout), mu = tabulate(m.mu, layout);
    for (std::size_t i = 0; i < M; ++i)
        if (!(eps[i].real() > 0.0) || !(mu[i].real() > 0.0)) fail(ErrorKind::Validation, "medium must be positive");
    const bool uniform = m.eps.is_polynomial() && m.eps.poly().is_constant() && m.mu.is_polynomial() &&
                         m.mu.poly().is_constant();
    CVec v(M), s(M), d(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double eb = std::log(eps[i].real()) / 2.0, mb = std::log(mu[i].real()) / 2.0;
        v[i] = 1.0 / std::sqrt(eps[i].real() * mu[i].real());
        s[i] = 2.0 - eb - mb;
        d[i] = eb - mb;
    }
    if (uniform) {
        sys.v_const = v[0].real();
        sys.A = sys.D * sy * (0.5 * v[0] * s[0]);
        if (std::abs(d[0]) > 0.0) sys.A = sys.A + sys.D * sx * (-kI * 0.5 * v[0] * d[0]);
    } else {
        const auto shape = layout.mode_shape();
        auto table = [&](CVec vals, const char* name) {
            return OperatorSum::of(OperatorFactor::tab(std::make_shared<ModeTable>(ModeTable{shape, std::move(vals), name})));
        };
        CVec half_v(M);
        for (std::size_t i = 0; i < M; ++i) half_v[i] = 0.5 * v[i];
        const OperatorSum V = table(half_v, "v/2");
        sys.A = V * sys.D * table(s, "2-eps-mu") * sy + V * sys.D * table(d, "eps-mu") * sx * (-kI);
    }
    // J = (Jx, Jy, Jz, 0, 0, 0, 0, -v rho) / sqrt(2 eps); block index = 4 q0 + 2 q1 + q2
    sys.J.assign(layout.block_count() * M, 0.0);
    for (int c = 0; c < 3; ++c) {
        const CVec jc = tabulate(m.J[c], layout);
        for (std::size_t i = 0; i < M; ++i) sys.J[c * M + i] = jc[i] / std::sqrt(2.0 * eps[i].real());
    }
    const CVec rho = tabulate(m.rho, layout);
    for (std::size_t i = 0; i < M; ++i) sys.J[7 * M + i] = -v[i] * rho[i] / std::sqrt(2.0 * eps[i].real());
    return sys;
}

}  // namespace schro
