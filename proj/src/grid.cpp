#include "schro/grid.hpp"

#include <cmath>

#include "schro/kernels.hpp"

namespace schro {

ModeAxis make_mode_axis(const AxisSpec& a) {
    if (!(a.max > a.min) || !is_power_of_two(a.n)) fail(ErrorKind::Validation, "bad mode axis " + a.name);
    ModeAxis m;
    m.name = a.name;
    m.lo = a.min;
    m.hi = a.max;
    m.n = a.n;
    m.dx = (a.max - a.min) / a.n;
    m.x.resize(a.n);
    m.k.resize(a.n);
    const double dk = 2.0 * kPi / (a.max - a.min);
    for (int i = 0; i < a.n; ++i) {
        m.x[i] = a.min + i * m.dx;
        m.k[i] = dk * (i < a.n / 2 ? i : i - a.n);
    }
    return m;
}

AncAxis make_anc_axis(double L, int n) {
    if (!(L > 0.0) || !is_power_of_two(n) || n < 2) fail(ErrorKind::Validation, "bad xi axis");
    AncAxis a;
    a.L = L;
    a.n = n;
    a.h = 2.0 * L / n;
    a.xi.resize(n);
    a.eta.resize(n);
    for (int j = 0; j < n; ++j) {
        a.xi[j] = -L + j * a.h;
        a.eta[j] = kPi / L * (j < n / 2 ? j : j - n);
    }
    return a;
}

std::vector<int> Layout::mode_shape() const {
    std::vector<int> s;
    for (const auto& m : modes) s.push_back(m.n);
    return s;
}

std::size_t Layout::mode_size() const {
    std::size_t n = 1;
    for (const auto& m : modes) n *= m.n;
    return n;
}

std::size_t Layout::block_count() const {
    std::size_t n = std::size_t{1} << qubits;
    for (int f : fock) n *= f;
    return n;
}

std::size_t Layout::n_slices() const {
    std::size_t n = 1;
    for (const auto& a : anc) n *= a.n;
    return n;
}

double Layout::mode_weight() const {
    double w = 1.0;
    for (const auto& m : modes) w *= m.dx;
    return w;
}

OperatorDims Layout::dims() const {
    return {static_cast<int>(modes.size()), static_cast<int>(anc.size()), qubits, static_cast<int>(fock.size())};
}

std::vector<int> Layout::anc_index(std::size_t s) const {
    std::vector<int> idx(anc.size());
    for (int a = static_cast<int>(anc.size()) - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(s % anc[a].n);
        s /= anc[a].n;
    }
    return idx;
}

std::vector<double> Layout::eta_at(std::size_t s) const {
    auto idx = anc_index(s);
    std::vector<double> e(anc.size());
    for (std::size_t a = 0; a < anc.size(); ++a) e[a] = anc[a].eta[idx[a]];
    return e;
}

std::vector<double> Layout::xi_at(std::size_t s) const {
    auto idx = anc_index(s);
    std::vector<double> e(anc.size());
    for (std::size_t a = 0; a < anc.size(); ++a) e[a] = anc[a].xi[idx[a]];
    return e;
}

std::vector<double> Layout::coordinate_power(int axis, int power) const {
    std::vector<double> f(mode_size());
    const auto shape = mode_shape();
    for_each_index(shape, [&](std::size_t flat, const std::vector<int>& idx) {
        f[flat] = std::pow(modes[axis].x[idx[axis]], power);
    });
    return f;
}

std::vector<double> Layout::momentum_power(const std::vector<int>& alpha) const {
    std::vector<double> f(mode_size(), 1.0);
    const auto shape = mode_shape();
    for_each_index(shape, [&](std::size_t flat, const std::vector<int>& idx) {
        double v = 1.0;
        for (std::size_t a = 0; a < alpha.size(); ++a)
            if (alpha[a]) v *= std::pow(modes[a].k[idx[a]], alpha[a]);
        f[flat] = v;
    });
    return f;
}

GridState::GridState(LayoutPtr l, AncRep r) : layout(std::move(l)), rep(r), v(layout->size()) {}

double GridState::anc_weight() const {
    double w = 1.0;
    for (const auto& a : layout->anc) w *= rep == AncRep::Xi ? a.h : 1.0 / (a.n * a.h);
    return w;
}

double GridState::norm2() const {
    return kern::active().norm2(v.size(), v.data()) * layout->mode_weight() * anc_weight();
}

double GridState::norm() const { return std::sqrt(norm2()); }

CVec tabulate(const CoefficientExpr& c, const Layout& L) {
    const std::size_t M = L.mode_size();
    if (!c.is_polynomial()) {
        if (c.table().shape != L.mode_shape() || c.table().values.size() != M)
            fail(ErrorKind::Validation, "tabulated coefficient does not match the grid");
        return c.table().values;
    }
    const Polynomial& p = c.poly();
    for (int v = static_cast<int>(L.modes.size()); v < p.nvars(); ++v)
        if (p.depends_on(v)) fail(ErrorKind::Validation, "coefficient depends on a variable with no grid axis");
    CVec out(M);
    std::vector<double> pt(std::max<std::size_t>(p.nvars(), L.modes.size()), 0.0);
    for_each_index(L.mode_shape(), [&](std::size_t flat, const std::vector<int>& idx) {
        for (std::size_t a = 0; a < L.modes.size(); ++a) pt[a] = L.modes[a].x[idx[a]];
        out[flat] = p.eval(std::span<const double>(pt.data(), p.nvars()));
    });
    return out;
}

double boundary_mass_fraction(const GridState& s, double frac) {
    const Layout& L = *s.layout;
    const auto shape = L.mode_shape();
    const std::size_t M = L.mode_size();
    std::vector<double> per_point(M, 0.0);
    const std::size_t blocks = s.v.size() / M;
    for (std::size_t b = 0; b < blocks; ++b)
        for (std::size_t i = 0; i < M; ++i) per_point[i] += std::norm(s.v[b * M + i]);
    double total = 0.0, edge = 0.0;
    for_each_index(shape, [&](std::size_t flat, const std::vector<int>& idx) {
        total += per_point[flat];
        for (std::size_t a = 0; a < shape.size(); ++a) {
            const int band = std::max(1, static_cast<int>(std::ceil(frac * shape[a])));
            if (idx[a] < band || idx[a] >= shape[a] - band) {
                edge += per_point[flat];
                break;
            }
        }
    });
    return total > 0.0 ? edge / total : 0.0;
}

}  // namespace schro
