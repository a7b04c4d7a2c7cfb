#include <gtest/gtest.h>

#include <cmath>

#include "schro/error_analysis.hpp"
#include "schro/hamiltonian.hpp"
#include "schro/lift.hpp"
#include "schro/oracles.hpp"
#include "schro/recovery.hpp"
#include "schro/uq.hpp"

using namespace schro;

namespace {

double rel_l2(const CVec& a, const CVec& b) {
    double e = 0, n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        e += std::norm(a[i] - b[i]);
        n += std::norm(b[i]);
    }
    return std::sqrt(e / n);
}

CVec gauss_on(const std::vector<double>& x, double c = 0.0) {
    CVec v;
    for (double xi : x) v.push_back(std::exp(-(xi - c) * (xi - c) / 2));
    return v;
}

LayoutPtr chaos_layout(int n, int nmax) {
    GridSpec g;
    g.x = {{"x", -8, 8, n, true}};
    g.n_max = {nmax};
    return make_layout(g, 0, 0);
}

}  // namespace

// ---- chaos expansion

TEST(Chaos, ZMatrixEntries) {
    const auto z = z_position_matrix(4);
    EXPECT_NEAR(z[0 * 5 + 1], 0.70711, 1e-5);
    for (int n = 0; n < 5; ++n) EXPECT_EQ(z[n * 5 + n], 0.0);
    const auto z0 = z_position_matrix(0);
    ASSERT_EQ(z0.size(), 1u);
    EXPECT_EQ(z0[0], 0.0);
}

TEST(Chaos, ZMatrixMatchesQuadrature) {
    const int nm = 7;
    const auto z = z_position_matrix(nm);
    const auto gh = gauss_hermite(2 * nm + 2);
    for (int m = 0; m <= nm; ++m)
        for (int n = 0; n <= nm; ++n) {
            double q = 0;
            for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
                const auto P = hermite_normalized(nm, gh.nodes[k]);
                q += gh.weights[k] * P[m] * gh.nodes[k] * P[n];
            }
            EXPECT_NEAR(z[m * (nm + 1) + n], q, 1e-12);
        }
}

TEST(Chaos, ProjectLinearInZ) {
    auto L = chaos_layout(32, 5);
    const auto g = gauss_on(L->modes[0].x);
    const CVec c = hermite_project(
        [&](std::span<const double> z) {
            CVec v = g;
            for (auto& e : v) e *= 1.0 + z[0];
            return v;
        },
        *L);
    const std::size_t M = 32;
    for (std::size_t i = 0; i < M; ++i) {
        EXPECT_NEAR(std::abs(c[i] - g[i]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(c[M + i] - g[i] / std::sqrt(2.0)), 0.0, 1e-12);
        for (int n = 2; n <= 5; ++n) EXPECT_LT(std::abs(c[n * M + i]), 1e-12);
    }
}

TEST(Chaos, ProjectSingleMode) {
    auto L = chaos_layout(16, 6);
    const auto g = gauss_on(L->modes[0].x);
    const CVec flat = hermite_project([&](std::span<const double>) { return g; }, *L);
    const CVec p3 = hermite_project(
        [&](std::span<const double> z) {
            CVec v = g;
            const double p = hermite_normalized(3, z[0])[3];
            for (auto& e : v) e *= p;
            return v;
        },
        *L);
    for (int n = 0; n <= 6; ++n)
        for (std::size_t i = 0; i < 16; ++i) {
            EXPECT_NEAR(std::abs(flat[n * 16 + i] - (n == 0 ? g[i] : 0.0)), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(p3[n * 16 + i] - (n == 3 ? g[i] : 0.0)), 0.0, 1e-12);
        }
}

TEST(Chaos, QuadratureOrderTooLow) {
    auto L = chaos_layout(16, 6);
    EXPECT_THROW(hermite_project([](std::span<const double>) { return CVec(16); }, *L, 6), Error);
}

TEST(Chaos, StatisticsParseval) {
    auto L = chaos_layout(32, 4);
    GridState s = random_state(L, AncRep::Xi, 11);
    const auto st = extract_statistics(s.v, *L);
    double sum = 0;
    for (std::size_t i = 0; i < 32; ++i) sum += (std::norm(st.mean[i]) + st.variance[i]) * L->modes[0].dx;
    EXPECT_NEAR(sum, s.norm2(), 1e-10 * s.norm2());
}

TEST(Chaos, GeneratorDirectWhenSpeedIgnoresX) {
    GridSpec g;
    g.x = {{"x", -8, 8, 32, true}};
    g.n_max = {4};
    const Polynomial c = Polynomial::constant(2, 1.0) + Polynomial::variable(2, 1, 0.5);
    const auto sys = build_uq_generator(build_uncertain_convection(1, 1, {c}), g);
    EXPECT_TRUE(sys.direct());
    EXPECT_TRUE(is_hermitian(sys.H, sys.layout));
    const auto row = count_resources(sys.H, sys.layout->dims(), true);
    EXPECT_EQ(row.qumodes, 2);  // x and the z mode carrying the Fock axis
}

TEST(Chaos, GeneratorSplitsWhenSpeedDependsOnX) {
    GridSpec g;
    g.x = {{"x", -8, 8, 32, true}};
    g.n_max = {3};
    g.xi_n = 64;
    // c = 1 + 0.5 x + 0.5 z x
    const Polynomial c = Polynomial::constant(2, 1.0) + Polynomial::variable(2, 0, 0.5) +
                         Polynomial::monomial({1, 1}, 0.5);
    const auto sys = build_uq_generator(build_uncertain_convection(1, 1, {c}), g);
    EXPECT_EQ(sys.pipeline, Pipeline::Standard);
    const std::string h = to_string(sys.H);
    EXPECT_NE(h.find("z"), std::string::npos);
    EXPECT_NE(h.find("η"), std::string::npos);
    EXPECT_TRUE(is_hermitian(sys.H, sys.layout));
}

TEST(Chaos, RandomSpeedAgainstQuadrature) {
    double prev = 1.0;
    for (int nmax : {4, 8, 12}) {
        GridSpec g;
        g.x = {{"x", -16, 16, 128, true}};
        g.n_max = {nmax};
        const Polynomial c = Polynomial::constant(2, 1.0) + Polynomial::variable(2, 1, 0.5);
        const auto sys = build_uq_generator(build_uncertain_convection(1, 1, {c}), g);
        const auto& x = sys.base->modes[0].x;
        InitialData init;
        init.u0 = hermite_project([&](std::span<const double>) { return gauss_on(x); }, *sys.base);
        RunConfig rc;
        rc.evolve.t_final = 1.0;
        rc.evolve.dt = 0.5;
        const auto rr = run_system(sys, init, rc);
        const auto st = extract_statistics(rr.rec.u.v, *sys.base);
        const auto o = oracle_uq_convection([](double y) { return std::exp(-y * y / 2); }, 1.0, 0.5, 1.0, x);
        double em = 0, ev = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            em = std::max(em, std::abs(st.mean[i] - o.mean[i]));
            ev = std::max(ev, std::abs(st.variance[i] - o.var[i]));
        }
        if (nmax == 8) {
            EXPECT_LT(em, 1e-3);
            EXPECT_LT(ev, 1e-3);
            EXPECT_LT(st.top_population, 1e-4);
        }
        EXPECT_LT(em, prev);
        prev = em;
    }
}

TEST(Chaos, DeterministicInputHasNoVariance) {
    GridSpec g;
    g.x = {{"x", -16, 16, 64, true}};
    g.n_max = {4};
    const auto sys = build_uq_generator(build_uncertain_convection(1, 1, {Polynomial::constant(2, 1.0)}), g);
    InitialData init;
    init.u0 = hermite_project([&](std::span<const double>) { return gauss_on(sys.base->modes[0].x); }, *sys.base);
    RunConfig rc;
    rc.evolve.t_final = 1.0;
    const auto st = extract_statistics(run_system(sys, init, rc).rec.u.v, *sys.base);
    for (double v : st.variance) EXPECT_LT(v, 1e-24);
}

// ---- oracles

TEST(Oracle, HeatQuadratureMatchesClosedForm) {
    std::vector<double> x = {-3, -1, 0, 0.5, 2};
    const auto q = oracle_heat([](double y) { return std::exp(-y * y / 2); }, 1.0, 0.5, x, -20, 20);
    const auto c = oracle_heat_gaussian(1.0, 0.5, x);
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(q.values[i].real(), c.values[i].real(), 1e-12);
    EXPECT_NEAR(c.values[2].real(), 0.70710678118654752, 1e-15);  // 1/sqrt(2)
    EXPECT_LT(q.accuracy, 1e-10);
}

TEST(Oracle, OuMomentsMatchRk4) {
    const double c = -0.7, a = 0.3;
    const auto ref = oracle_rk4(
        [&](const std::vector<double>& y) { return std::vector<double>{c * y[0], 2 * c * y[1] + 2 * a}; }, {1.5, 0.2},
        1.0, 1e-12);
    const auto m = oracle_ou_moments(1.5, 0.2, c, a, 1.0);
    EXPECT_NEAR(m.mean, ref[0], 1e-11);
    EXPECT_NEAR(m.var, ref[1], 1e-11);
}

TEST(Oracle, LogisticRk4) {
    double acc = 1;
    const auto y = oracle_rk4([](const std::vector<double>& q) { return std::vector<double>{q[0] * (1 - q[0])}; },
                              {0.1}, 5.0, 1e-8, &acc);
    EXPECT_LT(acc, 1e-8);
    EXPECT_NEAR(y[0], 1.0 / (1.0 + 9.0 * std::exp(-5.0)), 1e-8);
}

TEST(Oracle, DalembertAndTranslation) {
    const Fn1 g = [](double y) { return std::exp(-y * y); };
    const auto d = oracle_dalembert(g, 2.0, 1.0, {2.0, 0.0});
    EXPECT_NEAR(d.values[0].real(), 0.5 * (1.0 + std::exp(-16.0)), 1e-15);
    const auto c = oracle_convection(g, 1.0, 2.0, {2.0});
    EXPECT_DOUBLE_EQ(c.values[0].real(), 1.0);
}

TEST(Oracle, BurgersRejectsShock) {
    const Fn1 u0 = [](double y) { return 0.5 + 0.25 * std::sin(y); };
    const Fn1 du = [](double y) { return 0.25 * std::cos(y); };
    EXPECT_NO_THROW(oracle_burgers(u0, du, 0.5, {0.0, 1.0, kPi}));
    EXPECT_THROW(oracle_burgers(u0, du, 4.5, {kPi}), Error);
    // the value is carried along its characteristic
    const auto r = oracle_burgers(u0, du, 0.5, {1.0});
    const double u = r.values[0].real();
    EXPECT_NEAR(u0(1.0 - u * 0.5), u, 1e-14);
}

TEST(Oracle, BlackScholesPureRateClosedForm) {
    // sigma = 0: u = e^{-r tau} u0(x e^{r tau})
    const Fn1 u0 = [](double y) { return std::exp(-(y - 1) * (y - 1) / 0.18); };
    const double r = 0.05, tau = 0.5;
    const std::vector<double> x = {0.5, 0.9, 1.0, 1.3};
    const auto o = oracle_black_scholes(u0, 0.0, r, tau, x, -1, 3);
    for (std::size_t i = 0; i < x.size(); ++i)
        EXPECT_NEAR(o.values[i].real(), std::exp(-r * tau) * u0(x[i] * std::exp(r * tau)), 1e-5);
    EXPECT_LT(o.accuracy, 1e-4);
}

TEST(Oracle, BlackScholesSelfConsistent) {
    const Fn1 u0 = [](double y) { return std::exp(-(y - 1) * (y - 1) / 0.18); };
    const auto o = oracle_black_scholes(u0, 0.2, 0.05, 0.5, {0.8, 1.0, 1.2}, -1, 3);
    EXPECT_LT(o.accuracy, 1e-4);
}

TEST(Oracle, FiniteDifferenceSin) {
    const int n = 256;
    const double dx = 2 * kPi / n;
    CVec f(n), c(n);
    for (int i = 0; i < n; ++i) {
        f[i] = std::sin(i * dx);
        c[i] = std::cos(i * dx);
    }
    const CVec d = finite_difference_apply({1.0}, 1, f, dx);
    EXPECT_LT(rel_l2(d, c), 1e-9);
    const CVec z = finite_difference_apply({2.0}, 0, f, dx);
    EXPECT_EQ(z[5], 2.0 * f[5]);
    EXPECT_THROW(finite_difference_apply({1.0}, 5, f, dx), Error);
}

TEST(Oracle, FiniteDifferenceXSecondDerivative) {
    const int n = 512;
    const double lo = -10, dx = 20.0 / n;
    CVec f(n), ref(n);
    std::vector<cplx> a(n);
    for (int i = 0; i < n; ++i) {
        const double x = lo + i * dx;
        f[i] = std::exp(-x * x / 2);
        a[i] = x;
        ref[i] = x * (x * x - 1) * std::exp(-x * x / 2);
    }
    const CVec d = finite_difference_apply(a, 2, f, dx, false);
    double worst = 0;
    for (int i = 8; i < n - 8; ++i) worst = std::max(worst, std::abs(d[i] - ref[i]));
    EXPECT_LT(worst, 1e-8);
}

TEST(Oracle, CentralWeightsKnown) {
    const auto w = central_weights(2, 1);
    EXPECT_NEAR(w[0], 1.0, 1e-14);
    EXPECT_NEAR(w[1], -2.0, 1e-14);
    EXPECT_NEAR(w[2], 1.0, 1e-14);
}

TEST(Oracle, DispatcherRejectsUnknown) {
    EXPECT_THROW(reference_solution("plasma", {}, 1.0, {0.0}), Error);
    const auto r = reference_solution("logistic", {{"gamma0", 0.1}}, 5.0, {});
    EXPECT_NEAR(r.values[0].real(), 1.0 / (1.0 + 9.0 * std::exp(-5.0)), 1e-8);
}

// ---- lifts

namespace {

LiftSpec burgers_spec(int nx, int nc) {
    LiftSpec s;
    s.kind = LiftKind::ScalarHyperbolic;
    s.D = 1;
    s.F = {Polynomial::variable(1, 0)};
    s.x = {{"x", 0, 2 * kPi, nx, true}};
    s.lift = {{"chi", -0.1, 1.1, nc, true}};
    s.u0 = [](std::span<const double> x) { return std::vector<double>{0.5 + 0.25 * std::sin(x[0])}; };
    return s;
}

double burgers_error(int nx, int nc, double t) {
    const auto ls = levelset_lift(burgers_spec(nx, nc));
    const auto sys = schrodingerise_lift(ls);
    InitialData init;
    init.u0 = ls.psi0;
    RunConfig rc;
    rc.evolve.t_final = t;
    rc.evolve.dt = t;
    rc.evolve.check_boundary = false;
    const auto rr = run_system(sys, init, rc);
    const auto m = extract_moments(rr.rec.u.v, *sys.base, 1);
    const auto& x = sys.base->modes[0].x;
    const auto o = oracle_burgers([](double y) { return 0.5 + 0.25 * std::sin(y); },
                                  [](double y) { return 0.25 * std::cos(y); }, t, x);
    CVec got(m.mean[0].begin(), m.mean[0].end());
    return rel_l2(got, o.values);
}

}  // namespace

TEST(Lift, BurgersIsDirectAndGaussian) {
    const auto ls = levelset_lift(burgers_spec(32, 32));
    const auto sys = schrodingerise_lift(ls);
    EXPECT_TRUE(sys.direct());
    const auto row = count_resources(sys.H, ls.layout->dims(), true);
    EXPECT_TRUE(row.gaussian);
    EXPECT_EQ(row.qumodes, 2);
}

TEST(Lift, SquareFluxIsNonGaussian) {
    auto s = burgers_spec(32, 32);
    s.F = {Polynomial::monomial({2}, 1.0)};
    const auto ls = levelset_lift(s);
    const auto row = count_resources(ls.A, ls.layout->dims(), true);
    EXPECT_FALSE(row.gaussian);
    EXPECT_EQ(row.max_order, 3);
}

TEST(Lift, WindowNeedsMargin) {
    auto s = burgers_spec(32, 32);
    s.lift = {{"chi", 0.2, 0.8, 32, true}};
    EXPECT_THROW(levelset_lift(s), Error);
}

TEST(Lift, BurgersPreShock) {
    const double coarse = burgers_error(128, 64, 0.5);
    const double fine = burgers_error(128, 128, 0.5);
    EXPECT_LT(coarse, 1e-2);
    EXPECT_LT(fine, coarse);  // halving the delta width helps
}

TEST(Lift, ConstantFluxTranslates) {
    auto s = burgers_spec(64, 64);
    s.F = {Polynomial::constant(1, 0.7)};
    const auto ls = levelset_lift(s);
    const auto sys = schrodingerise_lift(ls);
    InitialData init;
    init.u0 = ls.psi0;
    RunConfig rc;
    rc.evolve.t_final = 1.0;
    rc.evolve.check_boundary = false;
    const auto rr = run_system(sys, init, rc);
    EXPECT_LT(rr.stats.norm_drift, 1e-10);
    const auto m = extract_moments(rr.rec.u.v, *sys.base, 1);
    const auto m0 = extract_moments(ls.psi0, *sys.base, 1);
    // the whole ridge moves by 0.7 in x: compare with the initial moments shifted by 0.7
    const auto& x = sys.base->modes[0].x;
    double mass = 0, mass0 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xs = x[i] - 0.7;
        const double want = 0.5 + 0.25 * std::sin(xs);
        const double have0 = m0.mean[0][i];
        EXPECT_NEAR(m.mean[0][i], want + (have0 - (0.5 + 0.25 * std::sin(x[i]))), 1e-4);
        mass += m.mass[i];
        mass0 += m0.mass[i];
    }
    EXPECT_NEAR(mass, mass0, 1e-8 * mass0);
}

TEST(Lift, MomentGuard) {
    auto L = std::make_shared<Layout>();
    L->modes.push_back(make_mode_axis({"x", 0, 1, 4, true}));
    L->modes.push_back(make_mode_axis({"chi", 0, 1, 4, true}));
    CVec f(16, 1.0);
    for (int j = 0; j < 4; ++j) f[8 + j] = 0.0;
    EXPECT_THROW(extract_moments(f, *L, 1), Error);
    f[9] = 1.0;
    const auto m = extract_moments(f, *L, 1);
    EXPECT_DOUBLE_EQ(m.mean[0][2], 0.25);
}

TEST(Lift, HarmonicRotation) {
    LiftSpec s;
    s.kind = LiftKind::HamiltonJacobi;
    s.D = 1;
    s.H = Polynomial::monomial({2, 0}, 0.5) + Polynomial::monomial({0, 2}, 0.5);
    s.x = {{"x", -8, 8, 64, true}};
    s.lift = {{"chi", -8, 8, 64, true}};
    s.u0 = [](std::span<const double> x) { return std::vector<double>{0.5 * x[0]}; };
    s.envelope = [](std::span<const double> x) { return std::exp(-x[0] * x[0] / 2); };
    const auto ls = hj_lift(s);
    const auto sys = schrodingerise_lift(ls);
    EXPECT_TRUE(sys.direct());
    InitialData init;
    init.u0 = ls.psi0;
    const double t = kPi / 2;
    RunConfig rc;
    rc.evolve.t_final = t;
    rc.evolve.dt = t;
    const auto rr = run_system(sys, init, rc);
    const auto& X = sys.base->modes[0].x;
    const auto& C = sys.base->modes[1].x;
    CVec ref(64 * 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j) {
            // rotated back by a quarter turn
            const double x0 = -C[j], c0 = X[i];
            ref[i * 64 + j] = std::exp(-x0 * x0 / 2) * regularized_delta(c0 - 0.5 * x0, ls.width);
        }
    EXPECT_LT(rel_l2(rr.rec.u.v, ref), 1e-3);
}

TEST(Lift, FreeStreamingGenerator) {
    LiftSpec s;
    s.kind = LiftKind::HamiltonJacobi;
    s.D = 1;
    s.H = Polynomial::monomial({0, 2}, 0.5);
    s.x = {{"x", -4, 4, 16, true}};
    s.lift = {{"chi", -4, 4, 16, true}};
    s.u0 = [](std::span<const double>) { return std::vector<double>{0.0}; };
    const auto ls = hj_lift(s);
    // only chi p_x survives: x-independent H leaves the chi marginal alone
    const auto nf = NormalForm::from(ls.A);
    ASSERT_TRUE(nf.has_value());
    EXPECT_EQ(nf->terms().size(), 1u);
    EXPECT_TRUE(is_hermitian(ls.A, ls.layout));
}

TEST(Lift, LinearDecayOde) {
    LiftSpec s;
    s.kind = LiftKind::OdeSystem;
    s.F = {Polynomial::variable(1, 0, -1.0)};
    s.lift = {{"q", -0.5, 1.5, 128, true}};
    s.gamma0 = {1.0};
    const auto ls = ode_lift(s);
    const auto sys = schrodingerise_lift(ls, Pipeline::Auto, 10.0, 256);
    EXPECT_EQ(sys.pipeline, Pipeline::Standard);
    // A2 = F'/2 = -1/2
    const auto nf = NormalForm::from(sys.split.A2);
    ASSERT_TRUE(nf.has_value());
    ASSERT_EQ(nf->terms().size(), 1u);
    EXPECT_NEAR(nf->terms().begin()->second.real(), -0.5, 1e-14);
    EXPECT_TRUE(nf->terms().begin()->first.is_identity());

    InitialData init;
    init.u0 = ls.psi0;
    RunConfig rc;
    rc.evolve.dt = 0.5;
    const auto rs = run_trajectory(sys, init, rc, {0.0, 0.5, 1.0});
    for (std::size_t k = 0; k < 3; ++k) {
        const double t = 0.5 * k;
        const auto m = extract_moments(rs[k].rec.u.v, *sys.base, 0);
        EXPECT_NEAR(m.mean[0][0], std::exp(-t), 1e-3);
        EXPECT_LT(rs[k].stats.norm_drift, 1e-10);
    }
}

TEST(Lift, StaticOde) {
    LiftSpec s;
    s.kind = LiftKind::OdeSystem;
    s.F = {Polynomial(1)};
    s.lift = {{"q", -1, 1, 32, true}};
    s.gamma0 = {0.2};
    const auto ls = ode_lift(s);
    EXPECT_TRUE(ls.A.empty());
}

// ---- error analysis

TEST(ErrorAnalysis, FidelityClosedVsNumeric) {
    for (double s = 0.1; s <= 3.0; s += 0.1) {
        const auto f = ancilla_gaussian_fidelity(s);
        EXPECT_NEAR(f.closed, f.numeric, 1e-8);
    }
    EXPECT_THROW(ancilla_gaussian_fidelity(0.0), Error);
    EXPECT_LT(ancilla_gaussian_fidelity(1e-6).closed, 0.01);
}

TEST(ErrorAnalysis, FidelityMaximum) {
    const auto sc = ancilla_fidelity_scan(0.5, 1.5, 0.001);
    EXPECT_NEAR(sc.s_best, 0.925, 0.01);
    EXPECT_NEAR(sc.f_best, 0.986, 0.001);
}

TEST(ErrorAnalysis, EpsilonBound) {
    EXPECT_NEAR(epsilon_bound(4, 1.0, 0.01, true), 0.10025, 1e-5);
    EXPECT_LT(epsilon_bound(4, 1.0, 1e-12, true), 1e-5);
    EXPECT_THROW(epsilon_bound(4, 1.0, 1.0, true), Error);
    EXPECT_NEAR(epsilon_bound(2, 1.0, 0.01, false, 0.5), std::log(1 / 0.99), 1e-15);
}

TEST(ErrorAnalysis, ConvectionRobustness) {
    EXPECT_NEAR(robustness_convection(0.0, 1.0, 1).measured, 1.0, 1e-14);
    for (int D : {1, 2}) {
        const auto r = robustness_convection(1.0, 1.0, D);
        EXPECT_NEAR(r.measured, r.predicted, 1e-6);
    }
    EXPECT_NEAR(robustness_convection(1.0, 1.0, 1).predicted, 0.77880, 1e-5);
    const double e = epsilon_bound(2, 1.0, 0.01, true);
    EXPECT_GE(robustness_convection(e, 1.0, 2).measured, 0.99 - 1e-6);
}

TEST(ErrorAnalysis, EnergySpreadOfEigenstate) {
    GridSpec g;
    g.x = {{"x", -kPi, kPi, 16, true}};
    auto L = make_layout(g, 0, 0);
    GridState s(L, AncRep::Xi);
    for (int i = 0; i < 16; ++i) s.v.push_back(std::exp(kI * 3.0 * L->modes[0].x[i]));
    s.v.erase(s.v.begin(), s.v.begin() + static_cast<long>(s.v.size() - 16));
    EXPECT_NEAR(energy_spread(s, OperatorSum::of(OperatorFactor::p(0))), 0.0, 1e-12);
}

TEST(ErrorAnalysis, SubstitutionBoundHolds) {
    const Problem pb = heat_problem(64, 16, 10, 256);
    EvolveConfig ec;
    ec.dt = 0.5;
    const auto good = ancilla_substitution_experiment(pb, 0.925, AncillaProfile::Gaussian, ec);
    const auto poor = ancilla_substitution_experiment(pb, 0.5, AncillaProfile::Gaussian, ec);
    const auto same = ancilla_substitution_experiment(pb, 1.0, AncillaProfile::Exact, ec);
    EXPECT_TRUE(good.holds);
    EXPECT_TRUE(poor.holds);
    EXPECT_LT(poor.fidelity, good.fidelity);
    EXPECT_NEAR(same.fidelity, 1.0, 1e-12);
    EXPECT_NEAR(good.delta, 1.0 - 0.98595, 2e-3);
}

TEST(ErrorAnalysis, SchrodingerisedSweep) {
    const Problem pb = heat_problem(64, 16, 10, 256);
    EvolveConfig ec;
    ec.dt = 0.5;
    const auto r = robustness_schrodingerised(pb, {0.0, 1e-3, 1e-2, 1e-1}, 0.01, ec);
    EXPECT_TRUE(r.all_pass());
    EXPECT_NEAR(r.measured[0], 1.0, 1e-12);
    for (std::size_t i = 1; i < r.measured.size(); ++i) EXPECT_LT(r.measured[i], r.measured[i - 1]);
    EXPECT_NE(report_csv(r).find("eps,measured"), std::string::npos);
}
