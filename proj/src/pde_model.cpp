#include "schro/pde_model.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace schro {

const Polynomial& CoefficientExpr::poly() const {
    if (!is_polynomial()) fail(ErrorKind::Unsupported, "coefficient is tabulated, not polynomial");
    return std::get<Polynomial>(v_);
}

const TabulatedField& CoefficientExpr::table() const {
    if (is_polynomial()) fail(ErrorKind::Unsupported, "coefficient is polynomial, not tabulated");
    return std::get<TabulatedField>(v_);
}

bool CoefficientExpr::is_zero() const {
    if (is_polynomial()) return poly().is_zero();
    for (const cplx& v : table().values)
        if (v != cplx(0.0)) return false;
    return true;
}

bool CoefficientExpr::is_real() const {
    if (is_polynomial()) return poly().is_real();
    for (const cplx& v : table().values)
        if (v.imag() != 0.0) return false;
    return true;
}

bool CoefficientExpr::operator==(const CoefficientExpr& o) const {
    if (is_polynomial() != o.is_polynomial()) return false;
    if (is_polynomial()) return poly() == o.poly();
    return table() == o.table();
}

const char* term_kind_name(TermKind k) {
    switch (k) {
        case TermKind::Plain: return "plain";
        case TermKind::HeatDivergence: return "heat_divergence";
        case TermKind::DriftDivergence: return "drift_divergence";
        case TermKind::DiffusionDivergence: return "diffusion_divergence";
    }
    return "plain";
}

std::optional<TermKind> term_kind_from_name(const std::string& s) {
    for (TermKind k : {TermKind::Plain, TermKind::HeatDivergence, TermKind::DriftDivergence,
                       TermKind::DiffusionDivergence})
        if (s == term_kind_name(k)) return k;
    return std::nullopt;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) os << (i ? "; " : "") << violations[i];
    return os.str();
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> axis_points(const AxisSpec& a) {
    std::vector<double> x(a.n);
    const double h = (a.max - a.min) / a.n;
    for (int i = 0; i < a.n; ++i) x[i] = a.min + i * h;
    return x;
}

std::vector<int> grid_shape(const GridSpec& g) {
    std::vector<int> s;
    for (const auto& a : g.x) s.push_back(a.n);
    return s;
}

namespace {

std::size_t shape_size(const std::vector<int>& s) {
    std::size_t n = 1;
    for (int v : s) n *= static_cast<std::size_t>(v);
    return n;
}

void check_axis(const AxisSpec& a, const std::string& what, std::vector<std::string>& out) {
    if (!(a.max > a.min)) out.push_back(what + " '" + a.name + "': max must exceed min");
    if (!is_power_of_two(a.n)) out.push_back(what + " '" + a.name + "': point count " + std::to_string(a.n) +
                                             " is not a power of two");
}

// Visit every grid point (x coordinates only).
template <class F>
void for_each_point(const GridSpec& g, F&& fn) {
    const std::size_t D = g.x.size();
    if (D == 0) return;
    std::vector<std::vector<double>> pts;
    for (const auto& a : g.x) pts.push_back(axis_points(a));
    std::vector<int> idx(D, 0);
    std::vector<double> p(D);
    const std::size_t total = shape_size(grid_shape(g));
    for (std::size_t n = 0; n < total; ++n) {
        for (std::size_t d = 0; d < D; ++d) p[d] = pts[d][idx[d]];
        fn(p);
        for (int d = static_cast<int>(D) - 1; d >= 0; --d) {
            if (++idx[d] < g.x[d].n) break;
            idx[d] = 0;
        }
    }
}

bool check_coef(const CoefficientExpr& c, const PdeSpec& s, const GridSpec& g, const std::string& what,
                std::vector<std::string>& out) {
    if (c.is_polynomial()) {
        if (c.poly().nvars() > s.D + s.L) {
            out.push_back(what + ": polynomial uses more variables than D+L");
            return false;
        }
        return true;
    }
    const auto& t = c.table();
    if (t.shape != grid_shape(g) || t.values.size() != shape_size(t.shape)) {
        out.push_back(what + ": tabulated shape does not match the grid");
        return false;
    }
    for (const cplx& v : t.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            out.push_back(what + ": tabulated samples must be finite");
            return false;
        }
    return true;
}

// Extreme real part of the coefficient over the grid (z variables at 0).
template <class Pick>
double extreme_real_on_grid(const CoefficientExpr& c, const PdeSpec& s, const GridSpec& g, double init, Pick pick) {
    double m = init;
    if (!c.is_polynomial()) {
        for (const cplx& v : c.table().values) m = pick(m, v.real());
        return m;
    }
    const Polynomial p = c.poly().widened(std::max(c.poly().nvars(), s.D + s.L));
    if (p.is_constant()) return p.constant_term().real();
    std::vector<double> pt(p.nvars(), 0.0);
    for_each_point(g, [&](const std::vector<double>& x) {
        for (int d = 0; d < s.D; ++d) pt[d] = x[d];
        m = pick(m, p.eval(pt).real());
    });
    return m;
}

double max_real_on_grid(const CoefficientExpr& c, const PdeSpec& s, const GridSpec& g) {
    return extreme_real_on_grid(c, s, g, -INFINITY, [](double a, double b) { return std::max(a, b); });
}

double min_real_on_grid(const CoefficientExpr& c, const PdeSpec& s, const GridSpec& g) {
    return extreme_real_on_grid(c, s, g, INFINITY, [](double a, double b) { return std::min(a, b); });
}

}  // namespace

ValidationReport validate_spec(const PdeSpec& s, const GridSpec& g) {
    ValidationReport r;
    auto& v = r.violations;
    if (s.D < 1) v.push_back("D must be at least 1");
    if (s.time_order != 1 && s.time_order != 2) v.push_back("time_order must be 1 or 2");
    if (s.L < 0) v.push_back("stochastic dimension count must be non-negative");
    if (g.x.size() != static_cast<std::size_t>(s.D)) v.push_back("grid must declare exactly D spatial axes");
    for (const auto& a : g.x) check_axis(a, "axis", v);
    for (const auto& a : g.lift) check_axis(a, "lift axis", v);
    if (!(g.xi_L > 0.0)) v.push_back("xi half-width must be positive");
    if (!is_power_of_two(g.xi_n) || g.xi_n < 2) v.push_back("xi point count must be a power of two");
    if (g.n_max.size() != static_cast<std::size_t>(s.L)) v.push_back("one Fock cutoff per stochastic dimension required");
    for (int n : g.n_max)
        if (n < 0) v.push_back("Fock cutoff must be non-negative");

    std::set<std::tuple<int, int, int, int>> seen;
    for (std::size_t t = 0; t < s.terms.size(); ++t) {
        const auto& term = s.terms[t];
        const std::string what = "term " + std::to_string(t + 1);
        if (term.j < 0 || term.j >= s.D) v.push_back(what + ": axis out of range");
        if (term.k < 1) v.push_back(what + ": derivative order must be >= 1");
        switch (term.kind) {
            case TermKind::HeatDivergence:
                if (term.k != 2) v.push_back(what + ": divergence diffusion term must have order 2");
                if (term.outer() < 0 || term.outer() >= s.D) v.push_back(what + ": outer axis out of range");
                break;
            case TermKind::DriftDivergence:
                if (term.k != 1) v.push_back(what + ": drift term must have order 1");
                break;
            case TermKind::DiffusionDivergence:
                if (term.k != 2) v.push_back(what + ": diffusion term must have order 2");
                break;
            case TermKind::Plain: break;
        }
        if (!seen.insert({static_cast<int>(term.kind), term.outer(), term.j, term.k}).second)
            v.push_back(what + ": duplicate (j,k) term");
        if (!check_coef(term.coef, s, g, what, v)) continue;

        // Even-order sign rule on the effective coefficient of d^k/dx^k. The
        // divergence kinds carry their coefficient with a leading minus sign.
        if (term.k % 2 == 0 && !s.allow_unstable && term.outer() == term.j && term.coef.is_real() &&
            g.x.size() == static_cast<std::size_t>(s.D)) {
            const bool divergence = term.kind != TermKind::Plain;
            const double m = divergence ? -min_real_on_grid(term.coef, s, g) : max_real_on_grid(term.coef, s, g);
            if (m > 0.0) v.push_back(what + ": even-order coefficient must be negative");
        }
    }
    check_coef(s.b, s, g, "b", v);
    if (s.f) {
        check_coef(*s.f, s, g, "f", v);
        if (s.time_order == 2) v.push_back("inhomogeneity is only supported for time_order 1");
    }
    if (s.time_order == 1 && (!s.c0.is_zero() || !s.cj.empty()))
        v.push_back("time cross terms require time_order 2");
    if (s.cj.size() > static_cast<std::size_t>(s.D)) v.push_back("more c_j cross terms than axes");
    check_coef(s.c0, s, g, "c0", v);
    for (std::size_t j = 0; j < s.cj.size(); ++j) check_coef(s.cj[j], s, g, "c" + std::to_string(j + 1), v);
    return r;
}

void require_valid(const PdeSpec& spec, const GridSpec& grid) {
    const auto r = validate_spec(spec, grid);
    if (!r.ok()) fail(ErrorKind::Validation, r.summary());
}

namespace {

Polynomial constant_poly(int D, cplx c) { return Polynomial::constant(D, c); }

void require_real(const Polynomial& p, const char* what) {
    if (!p.is_real()) fail(ErrorKind::Validation, std::string(what) + " must be real");
}

}  // namespace

PdeSpec build_convection(int D, const std::vector<cplx>& a) {
    if (static_cast<int>(a.size()) != D) fail(ErrorKind::Validation, "need one speed per axis");
    PdeSpec s;
    s.name = "convection";
    s.D = D;
    s.b = Polynomial(D);
    for (int j = 0; j < D; ++j) {
        if (a[j].imag() != 0.0) fail(ErrorKind::Validation, "convection speeds must be real");
        if (a[j] == cplx(0.0)) continue;
        s.terms.push_back({j, 1, constant_poly(D, a[j])});
    }
    return s;
}

PdeSpec build_heat(int D, const std::vector<std::vector<Polynomial>>& diffusion, const Polynomial& V) {
    if (static_cast<int>(diffusion.size()) != D) fail(ErrorKind::Validation, "diffusion must be D x D");
    require_real(V, "potential");
    PdeSpec s;
    s.name = "heat";
    s.D = D;
    for (int i = 0; i < D; ++i) {
        if (static_cast<int>(diffusion[i].size()) != D) fail(ErrorKind::Validation, "diffusion must be D x D");
        for (int j = 0; j < D; ++j) {
            const Polynomial& d = diffusion[i][j];
            require_real(d, "diffusion");
            if (i == j && (d.is_zero() || (d.is_constant() && d.constant_term().real() <= 0.0)))
                fail(ErrorKind::Validation, "diffusion must be positive");
            if (d.is_zero()) continue;
            DerivativeTerm t{j, 2, d.widened(std::max(d.nvars(), D)), TermKind::HeatDivergence, i == j ? -1 : i};
            s.terms.push_back(t);
        }
    }
    s.b = V.widened(std::max(V.nvars(), D));
    return s;
}

PdeSpec build_heat(int D, double a, const std::vector<double>& k) {
    std::vector<std::vector<Polynomial>> diff(D, std::vector<Polynomial>(D, Polynomial(D)));
    for (int j = 0; j < D; ++j) diff[j][j] = constant_poly(D, a);
    Polynomial V(D);
    for (int j = 0; j < D && j < static_cast<int>(k.size()); ++j)
        if (k[j] != 0.0) V = V + Polynomial::variable(D, j, k[j]);
    return build_heat(D, diff, V);
}

PdeSpec build_fokker_planck(int D, const std::vector<Polynomial>& drift, const std::vector<Polynomial>& diffusion) {
    if (static_cast<int>(drift.size()) != D || static_cast<int>(diffusion.size()) != D)
        fail(ErrorKind::Validation, "need one drift and one diffusion per axis");
    PdeSpec s;
    s.name = "fokker_planck";
    s.D = D;
    s.b = Polynomial(D);
    for (int j = 0; j < D; ++j) {
        require_real(drift[j], "drift");
        require_real(diffusion[j], "diffusion");
        if (diffusion[j].is_zero() || (diffusion[j].is_constant() && diffusion[j].constant_term().real() <= 0.0))
            fail(ErrorKind::Validation, "diffusion must be positive");
        if (!drift[j].is_zero())
            s.terms.push_back({j, 1, drift[j].widened(std::max(drift[j].nvars(), D)), TermKind::DriftDivergence});
        s.terms.push_back({j, 2, diffusion[j].widened(std::max(diffusion[j].nvars(), D)), TermKind::DiffusionDivergence});
    }
    return s;
}

// Time-to-maturity orientation: u_tau = 1/2 s^2 x^2 u_xx + r x u_x - r u.
PdeSpec build_black_scholes(double sigma, double r) {
    PdeSpec s;
    s.name = "black_scholes";
    s.D = 1;
    const Polynomial x2 = Polynomial::monomial({2}, 1.0);
    const Polynomial x1 = Polynomial::monomial({1}, 1.0);
    if (sigma != 0.0) s.terms.push_back({0, 2, x2 * cplx(-0.5 * sigma * sigma)});
    if (r != 0.0) s.terms.push_back({0, 1, x1 * cplx(-r)});
    s.b = constant_poly(1, r);
    if (r == 0.0) s.b = Polynomial(1);
    return s;
}

PdeSpec build_wave(int D, const std::vector<double>& speeds, const Polynomial& V) {
    if (static_cast<int>(speeds.size()) != D) fail(ErrorKind::Validation, "need one speed per axis");
    require_real(V, "potential");
    PdeSpec s;
    s.name = "wave";
    s.D = D;
    s.time_order = 2;
    for (int j = 0; j < D; ++j) {
        if (!(speeds[j] > 0.0)) fail(ErrorKind::Validation, "wave speeds must be positive");
        s.terms.push_back({j, 2, constant_poly(D, -speeds[j])});
    }
    s.b = V.widened(std::max(V.nvars(), D));
    return s;
}

PdeSpec build_liouville(int D, const std::vector<Polynomial>& a) {
    if (static_cast<int>(a.size()) != D) fail(ErrorKind::Validation, "need one velocity per axis");
    PdeSpec s;
    s.name = "liouville";
    s.D = D;
    s.b = Polynomial(D);
    for (int j = 0; j < D; ++j) {
        require_real(a[j], "velocity");
        if (a[j].is_zero()) continue;
        s.terms.push_back({j, 1, a[j].widened(std::max(a[j].nvars(), D))});
    }
    return s;
}

PdeSpec build_uncertain_convection(int D, int L, const std::vector<Polynomial>& c) {
    if (static_cast<int>(c.size()) != D) fail(ErrorKind::Validation, "need one speed per axis");
    PdeSpec s;
    s.name = "uq_convection";
    s.D = D;
    s.L = L;
    s.b = Polynomial(D + L);
    for (int j = 0; j < D; ++j) {
        require_real(c[j], "speed");
        if (c[j].nvars() > D + L) fail(ErrorKind::Validation, "speed uses too many variables");
        if (c[j].is_zero()) continue;
        s.terms.push_back({j, 1, c[j].widened(D + L)});
    }
    return s;
}

MaxwellSpec build_maxwell(CoefficientExpr eps, CoefficientExpr mu, std::array<CoefficientExpr, 3> J,
                          CoefficientExpr rho) {
    auto positive = [](const CoefficientExpr& c) {
        if (c.is_polynomial()) {
            const auto& p = c.poly();
            if (!p.is_real()) return false;
            return !p.is_constant() || p.constant_term().real() > 0.0;
        }
        for (const cplx& v : c.table().values)
            if (!(v.real() > 0.0) || v.imag() != 0.0) return false;
        return true;
    };
    if (!positive(eps) || !positive(mu)) fail(ErrorKind::Validation, "permittivity and permeability must be positive");
    return MaxwellSpec{std::move(eps), std::move(mu), std::move(J), std::move(rho)};
}

CVec gaussian_field(const GridSpec& g, const std::vector<double>& center, double width, cplx amplitude) {
    CVec out;
    out.reserve(shape_size(grid_shape(g)));
    for_each_point(g, [&](const std::vector<double>& x) {
        double r2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double c = d < center.size() ? center[d] : 0.0;
            r2 += (x[d] - c) * (x[d] - c);
        }
        out.push_back(amplitude * std::exp(-r2 / (2.0 * width * width)));
    });
    return out;
}

InitialData gaussian_initial(const GridSpec& g, const std::vector<double>& center, double width) {
    InitialData d;
    d.shape = grid_shape(g);
    d.u0 = gaussian_field(g, center, width);
    d.provenance = "gaussian";
    return d;
}

}  // namespace schro
