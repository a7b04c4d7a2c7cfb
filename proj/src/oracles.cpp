#include "schro/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "schro/uq.hpp"

namespace schro {

OracleResult oracle_convection(const Fn1& u0, double a, double t, const std::vector<double>& x) {
    OracleResult r{{}, "exact translation", 0.0};
    for (double xi : x) r.values.push_back(u0(xi - a * t));
    return r;
}

namespace {

CVec heat_quadrature(const Fn1& u0, double a, double t, const std::vector<double>& x, double lo, double hi, int n) {
    // composite Simpson, n even
    const double h = (hi - lo) / n, den = 4.0 * a * t;
    std::vector<double> y(n + 1), w(n + 1);
    for (int i = 0; i <= n; ++i) {
        y[i] = lo + i * h;
        w[i] = u0(y[i]) * h / 3.0 * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    const double norm = 1.0 / std::sqrt(kPi * den);
    CVec out;
    for (double xi : x) {
        double s = 0.0;
        for (int i = 0; i <= n; ++i) s += w[i] * std::exp(-(xi - y[i]) * (xi - y[i]) / den);
        out.push_back(s * norm);
    }
    return out;
}

double max_diff(const CVec& a, const CVec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

OracleResult oracle_heat(const Fn1& u0, double a, double t, const std::vector<double>& x, double lo, double hi) {
    if (!(a > 0.0)) fail(ErrorKind::Validation, "diffusivity must be positive");
    if (t == 0.0) return oracle_convection(u0, 0.0, 0.0, x);
    int n = 2 * static_cast<int>(std::ceil((hi - lo) / std::sqrt(a * t) * 4.0));
    n = std::max(n, 64);
    const CVec c = heat_quadrature(u0, a, t, x, lo, hi, n);
    const CVec f = heat_quadrature(u0, a, t, x, lo, hi, 2 * n);
    return {f, "heat kernel quadrature", max_diff(c, f)};
}

OracleResult oracle_heat_gaussian(double a, double t, const std::vector<double>& x) {
    const double s = 1.0 + 2.0 * a * t;
    OracleResult r{{}, "gaussian closed form", 0.0};
    for (double xi : x) r.values.push_back(std::exp(-xi * xi / (2.0 * s)) / std::sqrt(s));
    return r;
}

OuMoments oracle_ou_moments(double m0, double var0, double c, double a, double t) {
    const double m = m0 * std::exp(c * t);
    // var' = 2c var + 2a
    double v;
    if (c == 0.0) v = var0 + 2.0 * a * t;
    else v = (var0 + a / c) * std::exp(2.0 * c * t) - a / c;
    return {m, v};
}

OracleResult oracle_dalembert(const Fn1& u0, double s, double t, const std::vector<double>& x) {
    OracleResult r{{}, "d'Alembert", 0.0};
    for (double xi : x) r.values.push_back(0.5 * (u0(xi - s * t) + u0(xi + s * t)));
    return r;
}

namespace {

// Crank-Nicolson with n interior intervals and nt steps, returns the nodal
// solution on lo + i (hi - lo)/n.
std::vector<double> bs_cn(const Fn1& u0, double sigma, double r, double tau, double lo, double hi, int n, int nt) {
    const double h = (hi - lo) / n, k = tau / nt;
    std::vector<double> u(n + 1), lower(n + 1), diag(n + 1), upper(n + 1);
    for (int i = 0; i <= n; ++i) u[i] = u0(lo + i * h);
    u[0] = u[n] = 0.0;
    // L u_i = alpha u_{i-1} + beta u_i + gamma u_{i+1}
    for (int i = 1; i < n; ++i) {
        const double x = lo + i * h;
        const double d = 0.5 * sigma * sigma * x * x / (h * h), c = r * x / (2.0 * h);
        lower[i] = d - c;
        diag[i] = -2.0 * d - r;
        upper[i] = d + c;
    }
    std::vector<double> rhs(n + 1), cp(n + 1), dp(n + 1);
    for (int s = 0; s < nt; ++s) {
        for (int i = 1; i < n; ++i)
            rhs[i] = u[i] + 0.5 * k * (lower[i] * u[i - 1] + diag[i] * u[i] + upper[i] * u[i + 1]);
        // (I - k/2 L) u_new = rhs, Thomas
        cp[0] = 0.0;
        dp[0] = 0.0;
        for (int i = 1; i < n; ++i) {
            const double a = -0.5 * k * lower[i], b = 1.0 - 0.5 * k * diag[i], c = -0.5 * k * upper[i];
            const double m = b - a * cp[i - 1];
            cp[i] = c / m;
            dp[i] = (rhs[i] - a * dp[i - 1]) / m;
        }
        u[n] = 0.0;
        for (int i = n - 1; i >= 1; --i) u[i] = dp[i] - cp[i] * u[i + 1];
    }
    return u;
}

double cubic_sample(const std::vector<double>& u, double lo, double h, double x) {
    const int n = static_cast<int>(u.size()) - 1;
    const double s = (x - lo) / h;
    int i = static_cast<int>(std::floor(s));
    if (std::abs(s - std::round(s)) < 1e-9) {
        const int j = static_cast<int>(std::round(s));
        return j < 0 || j > n ? 0.0 : u[j];
    }
    i = std::clamp(i, 1, n - 2);
    const double t = s - i;
    const double p0 = u[i - 1], p1 = u[i], p2 = u[i + 1], p3 = u[i + 2];
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}

}  // namespace

OracleResult oracle_black_scholes(const Fn1& u0, double sigma, double r, double tau, const std::vector<double>& x,
                                  double lo, double hi) {
    if (!(hi > lo)) fail(ErrorKind::Validation, "empty interval");
    const int n = 4096, nt = 2000;
    const auto fine = bs_cn(u0, sigma, r, tau, lo, hi, n, nt);
    const auto coarse = bs_cn(u0, sigma, r, tau, lo, hi, n / 2, nt / 2);
    OracleResult res{{}, "Crank-Nicolson finite differences", 0.0};
    for (double xi : x) {
        const double a = cubic_sample(fine, lo, (hi - lo) / n, xi);
        const double b = cubic_sample(coarse, lo, (hi - lo) / (n / 2), xi);
        res.values.push_back(a);
        res.accuracy = std::max(res.accuracy, std::abs(a - b));
    }
    return res;
}

UqOracle oracle_uq_convection(const Fn1& u0, double c1, double c2, double t, const std::vector<double>& x, int order) {
    const GaussHermite gh = gauss_hermite(order);
    UqOracle o{std::vector<double>(x.size(), 0.0), std::vector<double>(x.size(), 0.0)};
    for (std::size_t i = 0; i < x.size(); ++i) {
        double m = 0.0, m2 = 0.0;
        for (int q = 0; q < order; ++q) {
            const double u = u0(x[i] - (c1 + c2 * gh.nodes[q]) * t);
            m += gh.weights[q] * u;
            m2 += gh.weights[q] * u * u;
        }
        o.mean[i] = m;
        o.var[i] = m2 - m * m;
    }
    return o;
}

OracleResult oracle_burgers(const Fn1& u0, const Fn1& du0, double t, const std::vector<double>& x) {
    OracleResult r{{}, "characteristics", 0.0};
    if (x.empty()) return r;
    // characteristics cross once 1 + t u0' reaches zero anywhere they can come from
    double lo = *std::min_element(x.begin(), x.end()), hi = *std::max_element(x.begin(), x.end()), umax = 0.0;
    for (double xi : x) umax = std::max(umax, std::abs(u0(xi)));
    lo -= 2.0 * umax * t + 1.0;
    hi += 2.0 * umax * t + 1.0;
    for (int i = 0; i <= 8192; ++i)
        if (1.0 + t * du0(lo + (hi - lo) * i / 8192.0) <= 0.0)
            fail(ErrorKind::Validation, "characteristics have crossed: time is past the shock");
    for (double xi : x) {
        double y = xi - u0(xi) * t;
        for (int it = 0;; ++it) {
            const double g = y + u0(y) * t - xi, dg = 1.0 + du0(y) * t;
            if (dg <= 0.0) fail(ErrorKind::Validation, "characteristics have crossed: time is past the shock");
            const double step = g / dg;
            y -= step;
            if (std::abs(step) < 1e-15 * (1.0 + std::abs(y))) break;
            if (it > 100) fail(ErrorKind::Numerical, "characteristic foot did not converge");
        }
        r.values.push_back(u0(y));
    }
    r.accuracy = 1e-14;
    return r;
}

namespace {

std::vector<double> rk4_fixed(const OdeRhs& f, std::vector<double> y, double t, int steps) {
    const double h = t / steps;
    const std::size_t n = y.size();
    std::vector<double> tmp(n);
    for (int s = 0; s < steps; ++s) {
        const auto k1 = f(y);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        const auto k2 = f(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        const auto k3 = f(tmp);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        const auto k4 = f(tmp);
        for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return y;
}

}  // namespace

std::vector<double> oracle_rk4(const OdeRhs& f, std::vector<double> y0, double t, double tol, double* achieved) {
    int steps = 16;
    auto prev = rk4_fixed(f, y0, t, steps);
    for (int round = 0; round < 24; ++round) {
        steps *= 2;
        auto next = rk4_fixed(f, y0, t, steps);
        double d = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) d = std::max(d, std::abs(next[i] - prev[i]));
        prev = std::move(next);
        if (d < tol) {
            if (achieved) *achieved = d;
            return prev;
        }
    }
    fail(ErrorKind::Numerical, "RK4 step halving did not reach the tolerance");
}

std::vector<double> central_weights(int k, int p) {
    // Fornberg's recursion on nodes 0, -1, 1, -2, 2, ... evaluated at 0
    const int n = 2 * p + 1;
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = (i % 2 ? -1.0 : 1.0) * ((i + 1) / 2);
    std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
    double c1 = 1.0, c4 = z[0];
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, k);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = z[i];
        for (int j = 0; j < i; ++j) {
            const double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int m = mn; m >= 1; --m) c[i][m] = c1 * (m * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int m = mn; m >= 1; --m) c[j][m] = (c4 * c[j][m] - m * c[j][m - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[static_cast<int>(z[i]) + p] = c[i][k];
    return w;
}

CVec finite_difference_apply(const std::vector<cplx>& a, int k, const CVec& f, double dx, bool periodic) {
    if (k < 0 || k > 4) fail(ErrorKind::Validation, "finite differences support derivative orders 0..4");
    const int n = static_cast<int>(f.size());
    if (a.size() != f.size() && a.size() != 1) fail(ErrorKind::Validation, "coefficient size differs from the field");
    auto coef = [&](int i) { return a.size() == 1 ? a[0] : a[i]; };
    CVec out(n, 0.0);
    if (k == 0) {
        for (int i = 0; i < n; ++i) out[i] = coef(i) * f[i];
        return out;
    }
    const int p = (k + 1) / 2 + 3;
    const auto w = central_weights(k, p);
    const double scale = std::pow(dx, -k);
    for (int i = 0; i < n; ++i) {
        if (!periodic && (i < p || i >= n - p)) continue;
        cplx s = 0.0;
        for (int o = -p; o <= p; ++o) s += w[o + p] * f[((i + o) % n + n) % n];
        out[i] = coef(i) * s * scale;
    }
    return out;
}

OracleResult reference_solution(const std::string& problem, const std::map<std::string, double>& params, double t,
                                const std::vector<double>& x) {
    auto get = [&](const char* k, double def) {
        auto it = params.find(k);
        return it == params.end() ? def : it->second;
    };
    const double c = get("center", 0.0), w = get("width", 1.0);
    const Fn1 gauss = [c, w](double y) { return std::exp(-(y - c) * (y - c) / (2 * w * w)); };
    if (problem == "convection") return oracle_convection(gauss, get("a", 1.0), t, x);
    if (problem == "heat") {
        const double a = get("a", 1.0);
        if (c == 0.0 && w == 1.0) return oracle_heat_gaussian(a, t, x);
        const double span = 12.0 * (w + std::sqrt(a * t));
        return oracle_heat(gauss, a, t, x, c - span, c + span);
    }
    if (problem == "wave") return oracle_dalembert(gauss, get("speed", 1.0), t, x);
    if (problem == "black_scholes")
        return oracle_black_scholes(gauss, get("sigma", 0.2), get("r", 0.05), t, x, get("lo", -1.0), get("hi", 3.0));
    if (problem == "burgers") {
        const double m = get("mean", 0.5), amp = get("amp", 0.25);
        return oracle_burgers([=](double y) { return m + amp * std::sin(y); },
                              [=](double y) { return amp * std::cos(y); }, t, x);
    }
    if (problem == "logistic") {
        double acc = 0.0;
        const auto y = oracle_rk4([](const std::vector<double>& q) { return std::vector<double>{q[0] * (1 - q[0])}; },
                                  {get("gamma0", 0.1)}, t, 1e-10, &acc);
        return {{y[0]}, "RK4 with step halving", acc};
    }
    fail(ErrorKind::Validation, "unknown oracle problem: " + problem);
}

}  // namespace schro
