#include "schro/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace schro {

Polynomial Polynomial::constant(int nvars, cplx c) {
    Polynomial p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int nvars, int var, cplx c) {
    if (var < 0 || var >= nvars) fail(ErrorKind::Validation, "polynomial variable index out of range");
    Exponent e(nvars, 0);
    e[var] = 1;
    Polynomial p(nvars);
    p.add_term(e, c);
    return p;
}

Polynomial Polynomial::monomial(Exponent e, cplx c) {
    Polynomial p(static_cast<int>(e.size()));
    p.add_term(e, c);
    return p;
}

void Polynomial::add_term(const Exponent& e, cplx c) {
    if (static_cast<int>(e.size()) != nvars_) fail(ErrorKind::Validation, "exponent length does not match variable count");
    for (int v : e)
        if (v < 0) fail(ErrorKind::Validation, "negative exponent");
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) fail(ErrorKind::Validation, "non-finite coefficient");
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        if (c != cplx(0.0)) terms_.emplace(e, c);
        return;
    }
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
}

bool Polynomial::is_constant() const {
    for (const auto& [e, c] : terms_)
        if (std::any_of(e.begin(), e.end(), [](int v) { return v != 0; })) return false;
    return true;
}

bool Polynomial::is_real() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.imag() == 0.0; });
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
        int s = 0;
        for (int v : e) s += v;
        d = std::max(d, s);
    }
    return d;
}

int Polynomial::degree_in(int var) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
}

cplx Polynomial::constant_term() const {
    auto it = terms_.find(Exponent(nvars_, 0));
    return it == terms_.end() ? cplx(0.0) : it->second;
}

Polynomial Polynomial::widened(int nvars) const {
    if (nvars < nvars_) fail(ErrorKind::Validation, "cannot narrow a polynomial");
    Polynomial p(nvars);
    for (const auto& [e, c] : terms_) {
        Exponent w = e;
        w.resize(nvars, 0);
        p.add_term(w, c);
    }
    return p;
}

Polynomial Polynomial::derivative(int var) const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponent d = e;
        d[var] -= 1;
        p.add_term(d, c * static_cast<double>(e[var]));
    }
    return p;
}

Polynomial Polynomial::conj() const {
    Polynomial p(nvars_);
    for (const auto& [e, c] : terms_) p.add_term(e, std::conj(c));
    return p;
}

cplx Polynomial::eval(std::span<const double> point) const {
    if (static_cast<int>(point.size()) < nvars_) fail(ErrorKind::Validation, "evaluation point too short");
    cplx s = 0.0;
    for (const auto& [e, c] : terms_) {
        double m = 1.0;
        for (int v = 0; v < nvars_; ++v)
            for (int k = 0; k < e[v]; ++k) m *= point[v];
        s += c * m;
    }
    return s;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    const int n = std::max(nvars_, o.nvars_);
    Polynomial r = widened(n);
    for (const auto& [e, c] : o.widened(n).terms_) r.add_term(e, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * cplx(-1.0); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
    const int n = std::max(nvars_, o.nvars_);
    const Polynomial a = widened(n), b = o.widened(n);
    Polynomial r(n);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            Exponent e(n);
            for (int v = 0; v < n; ++v) e[v] = ea[v] + eb[v];
            r.add_term(e, ca * cb);
        }
    return r;
}

Polynomial Polynomial::operator*(cplx s) const {
    Polynomial r(nvars_);
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
}

bool Polynomial::operator==(const Polynomial& o) const {
    const int n = std::max(nvars_, o.nvars_);
    return widened(n).terms_ == o.widened(n).terms_;
}

std::string Polynomial::str(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real();
        if (c.imag() != 0.0) os << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i";
        os << ")";
        for (int v = 0; v < nvars_; ++v) {
            if (e[v] == 0) continue;
            os << "*" << (v < static_cast<int>(names.size()) ? names[v] : "v" + std::to_string(v));
            if (e[v] > 1) os << "^" << e[v];
        }
    }
    return os.str();
}

}  // namespace schro
