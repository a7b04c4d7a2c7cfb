#include "schro/operator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schro {

namespace {

constexpr int kMaxSymbolicXPower = 4;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// sigma_a * sigma_b = phase * sigma_c
std::pair<cplx, char> pauli_product(char a, char b) {
    if (a == 'I') return {1.0, b};
    if (b == 'I') return {1.0, a};
    if (a == b) return {1.0, 'I'};
    auto pos = [](char s) { return s == 'X' ? 0 : s == 'Y' ? 1 : 2; };
    const int ia = pos(a), ib = pos(b);
    const char c = "XYZ"[3 - ia - ib];
    const bool even = (ib - ia + 3) % 3 == 1;  // XY, YZ, ZX
    return {even ? kI : -kI, c};
}

MonoKey identity_key(const OperatorDims& d) {
    MonoKey k;
    k.x.assign(d.modes, 0);
    k.p.assign(d.modes, 0);
    k.z.assign(d.focks, 0);
    k.eta.assign(d.etas, 0);
    k.pauli.assign(d.qubits, 'I');
    return k;
}

}  // namespace

bool OperatorFactor::operator==(const OperatorFactor& o) const {
    return kind == o.kind && axis == o.axis && power == o.power && sigma == o.sigma && table == o.table;
}

OperatorDims OperatorDims::merged(const OperatorDims& o) const {
    return {std::max(modes, o.modes), std::max(etas, o.etas), std::max(qubits, o.qubits), std::max(focks, o.focks)};
}

OperatorSum OperatorSum::identity(cplx c) {
    OperatorSum s;
    s.add({c, {}});
    return s;
}

OperatorSum OperatorSum::of(OperatorFactor f, cplx c) { return of(std::vector<OperatorFactor>{std::move(f)}, c); }

OperatorSum OperatorSum::of(std::vector<OperatorFactor> fs, cplx c) {
    OperatorSum s;
    s.add({c, std::move(fs)});
    return s;
}

void OperatorSum::add(OperatorTerm t) {
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
        fail(ErrorKind::Validation, "non-finite operator coefficient");
    for (const auto& f : t.factors) {
        if (f.axis < 0) fail(ErrorKind::Validation, "negative factor axis");
        if ((f.kind == FactorKind::P || f.kind == FactorKind::X || f.kind == FactorKind::FockZ ||
             f.kind == FactorKind::Eta) && f.power < 1)
            fail(ErrorKind::Validation, "factor power must be >= 1");
        if (f.kind == FactorKind::Table && !f.table) fail(ErrorKind::Validation, "table factor without data");
    }
    int etas = 0;
    std::vector<int> seen;
    for (const auto& f : t.factors)
        if (f.kind == FactorKind::Eta) {
            if (std::find(seen.begin(), seen.end(), f.axis) != seen.end())
                fail(ErrorKind::Validation, "at most one eta factor per ancilla axis per term");
            seen.push_back(f.axis);
            ++etas;
        }
    if (t.coeff == cplx(0.0)) return;
    terms_.push_back(std::move(t));
}

OperatorSum OperatorSum::adjoint() const {
    OperatorSum r;
    for (const auto& t : terms_) {
        OperatorTerm a{std::conj(t.coeff), {}};
        for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it) {
            OperatorFactor f = *it;
            if (f.kind == FactorKind::Table) {
                auto c = std::make_shared<ModeTable>(*f.table);
                for (auto& v : c->values) v = std::conj(v);
                c->label = f.table->label + "*";
                f.table = std::move(c);
            }
            a.factors.push_back(std::move(f));
        }
        r.terms_.push_back(std::move(a));
    }
    return r;
}

OperatorSum OperatorSum::operator+(const OperatorSum& o) const {
    OperatorSum r = *this;
    for (const auto& t : o.terms_) r.terms_.push_back(t);
    return r;
}

OperatorSum OperatorSum::operator-(const OperatorSum& o) const { return *this + o * cplx(-1.0); }

OperatorSum OperatorSum::operator*(cplx s) const {
    OperatorSum r;
    if (s == cplx(0.0)) return r;
    for (const auto& t : terms_) r.terms_.push_back({t.coeff * s, t.factors});
    return r;
}

OperatorSum OperatorSum::operator*(const OperatorSum& o) const {
    OperatorSum r;
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) {
            OperatorTerm t{a.coeff * b.coeff, a.factors};
            t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
            r.add(std::move(t));
        }
    return r;
}

bool OperatorSum::has_tables() const {
    for (const auto& t : terms_)
        for (const auto& f : t.factors)
            if (f.kind == FactorKind::Table) return true;
    return false;
}

bool OperatorSum::has_eta() const {
    for (const auto& t : terms_)
        for (const auto& f : t.factors)
            if (f.kind == FactorKind::Eta) return true;
    return false;
}

OperatorDims OperatorSum::dims() const {
    OperatorDims d;
    for (const auto& t : terms_)
        for (const auto& f : t.factors) switch (f.kind) {
                case FactorKind::X:
                case FactorKind::P: d.modes = std::max(d.modes, f.axis + 1); break;
                case FactorKind::Table: d.modes = std::max(d.modes, static_cast<int>(f.table->shape.size())); break;
                case FactorKind::Eta: d.etas = std::max(d.etas, f.axis + 1); break;
                case FactorKind::Pauli: d.qubits = std::max(d.qubits, f.axis + 1); break;
                case FactorKind::FockZ: d.focks = std::max(d.focks, f.axis + 1); break;
            }
    return d;
}

int MonoKey::quadrature_degree() const {
    int d = 0;
    for (int v : x) d += v;
    for (int v : p) d += v;
    for (int v : z) d += v;
    for (int v : eta) d += v;
    return d;
}

bool MonoKey::is_identity() const {
    auto zero = [](const std::vector<int>& v) { return std::all_of(v.begin(), v.end(), [](int a) { return a == 0; }); };
    return zero(x) && zero(p) && zero(z) && zero(eta) &&
           std::all_of(pauli.begin(), pauli.end(), [](char c) { return c == 'I'; });
}

bool MonoKey::mixed() const {
    for (std::size_t a = 0; a < x.size(); ++a)
        if (x[a] > 0 && p[a] > 0) return true;
    return false;
}

void NormalForm::add(const MonoKey& k, cplx c) {
    if (c == cplx(0.0)) return;
    auto [it, fresh] = terms_.emplace(k, c);
    if (!fresh) {
        it->second += c;
        if (it->second == cplx(0.0)) terms_.erase(it);
    }
}

bool NormalForm::multiply_right(const OperatorFactor& f) {
    auto check = [&](int axis, int n) {
        if (axis >= n) fail(ErrorKind::Validation, "operator factor axis outside the declared layout");
    };
    std::map<MonoKey, cplx> out;
    auto put = [&](const MonoKey& k, cplx c) {
        if (c == cplx(0.0)) return;
        auto [it, fresh] = out.emplace(k, c);
        if (!fresh) it->second += c;
    };
    switch (f.kind) {
        case FactorKind::Table: return false;
        case FactorKind::X: {
            check(f.axis, dims_.modes);
            if (f.power > kMaxSymbolicXPower) return false;
            const int a = f.axis, n = f.power;
            for (const auto& [k, c] : terms_) {
                const int al = k.p[a];
                // p^al x^n = sum_j C(al,j) C(n,j) j! (-i)^j x^(n-j) p^(al-j)
                cplx phase = 1.0;
                for (int j = 0; j <= std::min(al, n); ++j) {
                    MonoKey nk = k;
                    nk.x[a] += n - j;
                    nk.p[a] = al - j;
                    put(nk, c * phase * (binom(al, j) * binom(n, j) * factorial(j)));
                    phase *= -kI;
                }
            }
            break;
        }
        case FactorKind::P:
            check(f.axis, dims_.modes);
            for (const auto& [k, c] : terms_) {
                MonoKey nk = k;
                nk.p[f.axis] += f.power;
                put(nk, c);
            }
            break;
        case FactorKind::Eta:
            check(f.axis, dims_.etas);
            for (const auto& [k, c] : terms_) {
                MonoKey nk = k;
                nk.eta[f.axis] += f.power;
                put(nk, c);
            }
            break;
        case FactorKind::FockZ:
            check(f.axis, dims_.focks);
            for (const auto& [k, c] : terms_) {
                MonoKey nk = k;
                nk.z[f.axis] += f.power;
                put(nk, c);
            }
            break;
        case FactorKind::Pauli:
            check(f.axis, dims_.qubits);
            for (const auto& [k, c] : terms_) {
                MonoKey nk = k;
                const auto [ph, s] = pauli_product(k.pauli[f.axis], f.sigma);
                nk.pauli[f.axis] = s;
                put(nk, c * ph);
            }
            break;
    }
    terms_.clear();
    for (const auto& [k, c] : out)
        if (c != cplx(0.0)) terms_.emplace(k, c);
    return true;
}

std::optional<NormalForm> NormalForm::from(const OperatorSum& op, OperatorDims dims) {
    dims = dims.merged(op.dims());
    NormalForm nf(dims);
    for (const auto& t : op.terms()) {
        NormalForm term(dims);
        term.add(identity_key(dims), t.coeff);
        for (const auto& f : t.factors)
            if (!term.multiply_right(f)) return std::nullopt;
        for (const auto& [k, c] : term.terms_) nf.add(k, c);
    }
    nf.prune();
    return nf;
}

double NormalForm::max_abs() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

void NormalForm::prune(double rel_tol) {
    const double cut = rel_tol * max_abs();
    for (auto it = terms_.begin(); it != terms_.end();)
        it = std::abs(it->second) <= cut ? terms_.erase(it) : std::next(it);
}

bool NormalForm::is_zero(double tol) const { return max_abs() <= tol; }

NormalForm NormalForm::operator+(const NormalForm& o) const {
    NormalForm r(dims_.merged(o.dims_));
    auto widen = [&](MonoKey k) {
        k.x.resize(r.dims_.modes, 0);
        k.p.resize(r.dims_.modes, 0);
        k.z.resize(r.dims_.focks, 0);
        k.eta.resize(r.dims_.etas, 0);
        k.pauli.resize(r.dims_.qubits, 'I');
        return k;
    };
    for (const auto& [k, c] : terms_) r.add(widen(k), c);
    for (const auto& [k, c] : o.terms_) r.add(widen(k), c);
    return r;
}

NormalForm NormalForm::operator-(const NormalForm& o) const { return *this + o * cplx(-1.0); }

NormalForm NormalForm::operator*(cplx s) const {
    NormalForm r(dims_);
    for (const auto& [k, c] : terms_) r.add(k, c * s);
    return r;
}

namespace {

std::vector<OperatorFactor> rest_factors(const MonoKey& k) {
    std::vector<OperatorFactor> fs;
    for (std::size_t l = 0; l < k.z.size(); ++l)
        if (k.z[l] > 0) fs.push_back(OperatorFactor::fock(static_cast<int>(l), k.z[l]));
    for (std::size_t q = 0; q < k.pauli.size(); ++q)
        if (k.pauli[q] != 'I') fs.push_back(OperatorFactor::pauli(static_cast<int>(q), k.pauli[q]));
    for (std::size_t m = 0; m < k.eta.size(); ++m)
        if (k.eta[m] > 0) fs.push_back(OperatorFactor::eta(static_cast<int>(m), k.eta[m]));
    return fs;
}

std::vector<OperatorFactor> x_factors(const MonoKey& k) {
    std::vector<OperatorFactor> fs;
    for (std::size_t a = 0; a < k.x.size(); ++a)
        if (k.x[a] > 0) fs.push_back(OperatorFactor::x(static_cast<int>(a), k.x[a]));
    return fs;
}

std::vector<OperatorFactor> p_factors(const MonoKey& k) {
    std::vector<OperatorFactor> fs;
    for (std::size_t a = 0; a < k.p.size(); ++a)
        if (k.p[a] > 0) fs.push_back(OperatorFactor::p(static_cast<int>(a), k.p[a]));
    return fs;
}

template <class... V>
std::vector<OperatorFactor> concat(V&&... parts) {
    std::vector<OperatorFactor> r;
    (r.insert(r.end(), parts.begin(), parts.end()), ...);
    return r;
}

}  // namespace

OperatorSum NormalForm::to_operator() const {
    OperatorSum s;
    for (const auto& [k, c] : terms_) s.add({c, concat(x_factors(k), rest_factors(k), p_factors(k))});
    return s;
}

std::vector<SymTerm> symmetric_decomposition(const NormalForm& input) {
    NormalForm work = input;
    const double scale = std::max(input.max_abs(), 1e-300);
    std::vector<SymTerm> out;
    while (!work.terms().empty()) {
        auto lead = work.terms().begin();
        int best = -1;
        for (auto it = work.terms().begin(); it != work.terms().end(); ++it) {
            int d = 0;
            for (int v : it->first.x) d += v;
            for (int v : it->first.p) d += v;
            if (d > best) best = d, lead = it;
        }
        const MonoKey key = lead->first;
        const cplx c = lead->second;
        NormalForm sym(work.dims());
        if (key.mixed()) {
            // normal-ordered (x^b p^a + p^a x^b)/2
            sym.add(key, 0.5);
            MonoKey pk = key;
            std::fill(pk.x.begin(), pk.x.end(), 0);
            NormalForm rev(work.dims());
            rev.add(pk, 0.5);
            for (std::size_t a = 0; a < key.x.size(); ++a)
                if (key.x[a] > 0) rev.multiply_right(OperatorFactor::x(static_cast<int>(a), key.x[a]));
            sym = sym + rev;
        } else {
            sym.add(key, 1.0);
        }
        work = work - sym * c;
        // the lead coefficient cancels up to rounding; drop it outright
        auto& t = const_cast<std::map<MonoKey, cplx>&>(work.terms());
        t.erase(key);
        for (auto it = t.begin(); it != t.end();)
            it = std::abs(it->second) <= 1e-13 * scale ? t.erase(it) : std::next(it);
        out.push_back({c, key});
    }
    return out;
}

OperatorSum to_operator(const std::vector<SymTerm>& terms, const OperatorDims&) {
    OperatorSum s;
    for (const auto& t : terms) {
        if (t.key.mixed()) {
            s.add({t.c * 0.5, concat(x_factors(t.key), rest_factors(t.key), p_factors(t.key))});
            s.add({t.c * 0.5, concat(p_factors(t.key), x_factors(t.key), rest_factors(t.key))});
        } else {
            s.add({t.c, concat(x_factors(t.key), rest_factors(t.key), p_factors(t.key))});
        }
    }
    return s;
}

OperatorSum canonicalize(const OperatorSum& op) {
    auto nf = NormalForm::from(op);
    if (!nf) return op;
    return to_operator(symmetric_decomposition(*nf), nf->dims());
}

namespace {

const char* kSup[] = {"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
const char* kSub[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};

std::string digits(int n, const char* const* table) {
    std::string s;
    for (char ch : std::to_string(n)) s += table[ch - '0'];
    return s;
}

std::string sym(const char* base, int axis, int count, int power) {
    std::string s = base;
    if (count > 1) s += digits(axis + 1, kSub);
    if (power > 1) s += digits(power, kSup);
    return s;
}

std::string mode_part(const std::vector<int>& pw, const char* base) {
    std::string s;
    for (std::size_t a = 0; a < pw.size(); ++a)
        if (pw[a] > 0) s += sym(base, static_cast<int>(a), static_cast<int>(pw.size()), pw[a]);
    return s;
}

std::string coeff_str(cplx c) {
    std::ostringstream os;
    os.precision(6);
    if (c.imag() == 0.0) os << c.real();
    else if (c.real() == 0.0) os << c.imag() << "i";
    else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    return os.str();
}

}  // namespace

std::string sym_term_label(const MonoKey& key, const OperatorDims&) {
    std::string core;
    const std::string xs = mode_part(key.x, "x"), ps = mode_part(key.p, "p");
    if (key.mixed()) core = "(" + xs + ps + "+" + ps + xs + ")";
    else core = xs + ps;
    std::vector<std::string> rest;
    for (std::size_t l = 0; l < key.z.size(); ++l)
        if (key.z[l] > 0) rest.push_back(sym("z", static_cast<int>(l), static_cast<int>(key.z.size()), key.z[l]));
    for (std::size_t q = 0; q < key.pauli.size(); ++q)
        if (key.pauli[q] != 'I') {
            std::string s = std::string("σ") + static_cast<char>(std::tolower(key.pauli[q]));
            if (key.pauli.size() > 1) s += digits(static_cast<int>(q) + 1, kSub);
            rest.push_back(s);
        }
    for (std::size_t m = 0; m < key.eta.size(); ++m)
        if (key.eta[m] > 0) rest.push_back(sym("η", static_cast<int>(m), static_cast<int>(key.eta.size()), key.eta[m]));
    if (core.empty()) core = "I";
    std::string s = core;
    for (const auto& r : rest) s += "⊗" + r;
    return s;
}

std::string to_string(const std::vector<SymTerm>& terms, const OperatorDims& dims) {
    if (terms.empty()) return "0";
    std::string s;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) s += " + ";
        s += coeff_str(terms[i].c) + "·" + sym_term_label(terms[i].key, dims);
    }
    return s;
}

std::string to_string(const OperatorSum& op) {
    if (op.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& t : op.terms()) {
        if (!first) s += " + ";
        first = false;
        s += coeff_str(t.coeff);
        for (const auto& f : t.factors) {
            s += "·";
            switch (f.kind) {
                case FactorKind::X: s += sym("x", f.axis, 2, f.power); break;
                case FactorKind::P: s += sym("p", f.axis, 2, f.power); break;
                case FactorKind::Eta: s += sym("η", f.axis, 2, f.power); break;
                case FactorKind::FockZ: s += sym("z", f.axis, 2, f.power); break;
                case FactorKind::Pauli:
                    s += std::string("σ") + static_cast<char>(std::tolower(f.sigma)) + digits(f.axis + 1, kSub);
                    break;
                case FactorKind::Table: s += "[" + f.table->label + "]"; break;
            }
        }
    }
    return s;
}

std::optional<bool> symbolically_equal(const OperatorSum& a, const OperatorSum& b, double tol) {
    const OperatorDims d = a.dims().merged(b.dims());
    auto na = NormalForm::from(a, d), nb = NormalForm::from(b, d);
    if (!na || !nb) return std::nullopt;
    const double scale = std::max({na->max_abs(), nb->max_abs(), 1.0});
    return (*na - *nb).max_abs() <= tol * scale;
}

HermitianSplit hermitian_split(const OperatorSum& A) {
    const OperatorSum Ad = A.adjoint();
    HermitianSplit s;
    s.A1 = (A + Ad) * cplx(0.5);
    s.A2 = (A - Ad) * (0.5 * kI);
    s.A1_raw = s.A1;
    s.A2_raw = s.A2;
    const OperatorDims d = A.dims();
    auto n1 = NormalForm::from(s.A1, d), n2 = NormalForm::from(s.A2, d);
    if (n1 && n2) {
        s.A1 = to_operator(symmetric_decomposition(*n1), d);
        s.A2 = to_operator(symmetric_decomposition(*n2), d);
        s.symbolic = true;
    }
    return s;
}

}  // namespace schro
