#include "schro/lift.hpp"

#include <algorithm>
#include <cmath>

#include "schro/hamiltonian.hpp"

namespace schro {

double regularized_delta(double s, double width) {
    return std::exp(-s * s / (2.0 * width * width)) / (std::sqrt(2.0 * kPi) * width);
}

namespace {

OperatorSum P(int axis) { return OperatorSum::of(OperatorFactor::p(axis)); }

OperatorSum mult(const Polynomial& p, int nmodes) {
    if (p.nvars() > nmodes) fail(ErrorKind::Validation, "lift polynomial has too many variables");
    return coefficient_operator(CoefficientExpr(p.widened(nmodes)), nmodes);
}

// polynomial in one variable moved onto variable `var` of an nvars-variable ring
Polynomial on_var(const Polynomial& p, int var, int nvars) {
    if (p.nvars() > 1) fail(ErrorKind::Validation, "flux must be a polynomial in u only");
    Polynomial out(nvars);
    for (const auto& [e, c] : p.terms()) {
        Polynomial::Exponent x(nvars, 0);
        x[var] = e.empty() ? 0 : e[0];
        out.add_term(x, c);
    }
    return out;
}

struct Prepared {
    GridSpec grid;
    LayoutPtr layout;
    double width;
};

Prepared prepare(const LiftSpec& s, std::size_t want_lift) {
    if (s.lift.size() != want_lift) fail(ErrorKind::Validation, "wrong number of lift axes");
    if (static_cast<int>(s.x.size()) != s.D) fail(ErrorKind::Validation, "need one spatial axis per dimension");
    Prepared p;
    p.grid.x = s.x;
    for (const auto& a : s.lift) p.grid.x.push_back(a);
    for (const auto& a : p.grid.x) {
        if (!(a.max > a.min)) fail(ErrorKind::Validation, "empty lift axis");
        if (!is_power_of_two(a.n)) fail(ErrorKind::Validation, "grid point counts must be powers of two");
    }
    p.layout = make_layout(p.grid, 0, 0);
    const auto& l0 = p.layout->modes[s.D];
    p.width = s.width > 0.0 ? s.width : 4.0 * l0.dx;
    if (!(p.width > 0.0)) fail(ErrorKind::Validation, "delta width must be positive");
    return p;
}

// fills psi(x, chi) = env(x) prod_j delta(chi_j - target_j(x))
CVec ridge(const Layout& L, int D, double width, const PointMap& target,
           const std::function<double(std::span<const double>)>& env) {
    const int nm = static_cast<int>(L.modes.size());
    std::vector<int> shape = L.mode_shape();
    CVec out(L.mode_size());
    std::vector<double> pt(nm);
    for_each_index(shape, [&](std::size_t flat, const std::vector<int>& idx) {
        for (int a = 0; a < nm; ++a) pt[a] = L.modes[a].x[idx[a]];
        std::span<const double> xs(pt.data(), D);
        const auto tg = target(xs);
        if (static_cast<int>(tg.size()) != nm - D) fail(ErrorKind::Validation, "initial map returns the wrong count");
        double v = env ? env(xs) : 1.0;
        for (int j = 0; j < nm - D; ++j) v *= regularized_delta(pt[D + j] - tg[j], width);
        out[flat] = v;
    });
    return out;
}

}  // namespace

LiftedSystem levelset_lift(const LiftSpec& s) {
    if (s.kind != LiftKind::ScalarHyperbolic) fail(ErrorKind::Validation, "not a scalar hyperbolic lift");
    if (static_cast<int>(s.F.size()) != s.D) fail(ErrorKind::Validation, "need one flux speed per axis");
    if (!s.u0) fail(ErrorKind::Validation, "missing initial data");
    Prepared p = prepare(s, 1);
    const int nm = s.D + 1;
    LiftedSystem ls;
    // Psi_t + F(chi) . grad Psi + Q d_chi Psi = 0
    for (int j = 0; j < s.D; ++j) ls.A = ls.A + mult(on_var(s.F[j], s.D, nm), nm) * P(j);
    if (!s.Q.is_zero()) ls.A = ls.A + mult(s.Q, nm) * P(s.D);

    // window must hold the data range with a 20% margin
    double lo = 1e300, hi = -1e300;
    const std::vector<int> full = p.layout->mode_shape();
    for_each_index(std::vector<int>(full.begin(), full.begin() + s.D),
                   [&](std::size_t, const std::vector<int>& idx) {
                       std::vector<double> xs(s.D);
                       for (int a = 0; a < s.D; ++a) xs[a] = p.layout->modes[a].x[idx[a]];
                       const double u = s.u0(xs).at(0);
                       lo = std::min(lo, u);
                       hi = std::max(hi, u);
                   });
    const double pad = 0.2 * std::max(hi - lo, p.width);
    const auto& chi = p.layout->modes[s.D];
    if (lo - pad < chi.lo || hi + pad > chi.hi) fail(ErrorKind::Validation, "chi window must cover the data range with a 20% margin");

    ls.grid = p.grid;
    ls.layout = p.layout;
    ls.width = p.width;
    ls.n_space = s.D;
    ls.psi0 = ridge(*p.layout, s.D, p.width, s.u0, nullptr);
    return ls;
}

LiftedSystem hj_lift(const LiftSpec& s) {
    if (s.kind != LiftKind::HamiltonJacobi) fail(ErrorKind::Validation, "not a Hamilton-Jacobi lift");
    if (!s.u0) fail(ErrorKind::Validation, "missing initial gradient");
    const int D = s.D, nm = 2 * D;
    if (s.H.nvars() > nm) fail(ErrorKind::Validation, "Hamiltonian has too many variables");
    Prepared p = prepare(s, static_cast<std::size_t>(D));
    const Polynomial H = s.H.widened(nm);
    LiftedSystem ls;
    // Psi_t + H_chi . grad_x Psi - H_x . grad_chi Psi = 0, written symmetrically
    for (int j = 0; j < D; ++j) {
        const Polynomial hc = H.derivative(D + j), hx = H.derivative(j);
        if (!hc.is_zero()) {
            const OperatorSum m = mult(hc, nm);
            ls.A = ls.A + (m * P(j) + P(j) * m) * 0.5;
        }
        if (!hx.is_zero()) {
            const OperatorSum m = mult(hx, nm);
            ls.A = ls.A - (m * P(D + j) + P(D + j) * m) * 0.5;
        }
    }
    ls.grid = p.grid;
    ls.layout = p.layout;
    ls.width = p.width;
    ls.n_space = D;
    ls.psi0 = ridge(*p.layout, D, p.width, s.u0, s.envelope);
    return ls;
}

LiftedSystem ode_lift(const LiftSpec& s) {
    if (s.kind != LiftKind::OdeSystem) fail(ErrorKind::Validation, "not an ODE lift");
    const int N = static_cast<int>(s.F.size());
    if (N < 1 || static_cast<int>(s.gamma0.size()) != N) fail(ErrorKind::Validation, "need one right-hand side and start value per unknown");
    LiftSpec t = s;
    t.D = 0;
    t.x.clear();
    Prepared p = prepare(t, static_cast<std::size_t>(N));
    LiftedSystem ls;
    // Phi_t + sum d_q (F_n Phi) = 0
    for (int n = 0; n < N; ++n)
        if (!s.F[n].is_zero()) ls.A = ls.A + P(n) * mult(s.F[n], N);
    ls.grid = p.grid;
    ls.layout = p.layout;
    ls.width = p.width;
    ls.n_space = 0;
    const std::vector<double> g0 = s.gamma0;
    ls.psi0 = ridge(*p.layout, 0, p.width, [g0](std::span<const double>) { return g0; }, nullptr);
    return ls;
}

LiftedSystem lift(const LiftSpec& s) {
    switch (s.kind) {
        case LiftKind::ScalarHyperbolic: return levelset_lift(s);
        case LiftKind::HamiltonJacobi: return hj_lift(s);
        case LiftKind::OdeSystem: return ode_lift(s);
    }
    fail(ErrorKind::Validation, "unknown lift kind");
}

SchrodingerisedSystem schrodingerise_lift(const LiftedSystem& ls, Pipeline p, double xi_L, int xi_n) {
    GridSpec g = ls.grid;
    g.xi_L = xi_L;
    g.xi_n = xi_n;
    return schrodingerise_operator("lift", ls.A, ls.layout, g, p);
}

LiftMoments extract_moments(const CVec& psi, const Layout& L, int n_space, double floor, double abs_floor) {
    if (psi.size() != L.mode_size()) fail(ErrorKind::Validation, "field does not match the layout");
    const int nm = static_cast<int>(L.modes.size()), nl = nm - n_space;
    if (nl < 1) fail(ErrorKind::Validation, "no lift axes");
    std::size_t Ms = 1, Ml = 1;
    for (int a = 0; a < n_space; ++a) Ms *= L.modes[a].n;
    for (int a = n_space; a < nm; ++a) Ml *= L.modes[a].n;
    std::vector<int> lshape;
    double cell = 1.0;
    for (int a = n_space; a < nm; ++a) {
        lshape.push_back(L.modes[a].n);
        cell *= L.modes[a].dx;
    }
    LiftMoments m{std::vector<std::vector<double>>(nl, std::vector<double>(Ms, 0.0)), std::vector<double>(Ms, 0.0)};
    for (std::size_t s = 0; s < Ms; ++s) {
        const cplx* f = psi.data() + s * Ml;
        std::vector<double> first(nl, 0.0);
        double mass = 0.0;
        for_each_index(lshape, [&](std::size_t flat, const std::vector<int>& idx) {
            const double v = f[flat].real();
            mass += v;
            for (int j = 0; j < nl; ++j) first[j] += v * L.modes[n_space + j].x[idx[j]];
        });
        m.mass[s] = mass * cell;
        for (int j = 0; j < nl; ++j) m.mean[j][s] = first[j] / mass;
    }
    const double top = *std::max_element(m.mass.begin(), m.mass.end());
    for (double v : m.mass)
        if (!(v >= floor * top) || v < abs_floor) fail(ErrorKind::Guard, "solution lost from chi window");
    return m;
}

std::vector<double> extract_peaks(const CVec& psi, const Layout& L, int n_space) {
    const int nm = static_cast<int>(L.modes.size());
    if (nm - n_space < 1) fail(ErrorKind::Validation, "no lift axes");
    std::size_t Ms = 1, Ml = 1;
    for (int a = 0; a < n_space; ++a) Ms *= L.modes[a].n;
    for (int a = n_space; a < nm; ++a) Ml *= L.modes[a].n;
    const std::size_t stride = Ml / L.modes[n_space].n;
    std::vector<double> out(Ms);
    for (std::size_t s = 0; s < Ms; ++s) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < Ml; ++i)
            if (std::abs(psi[s * Ml + i]) > std::abs(psi[s * Ml + best])) best = i;
        out[s] = L.modes[n_space].x[best / stride];
    }
    return out;
}

}  // namespace schro
