#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "schro/types.hpp"

namespace schro {

struct OracleResult {
    CVec values;
    std::string method;
    double accuracy = 0.0;  // estimated absolute error (max norm)
};

using Fn1 = std::function<double(double)>;

// u0(x - a t)
OracleResult oracle_convection(const Fn1& u0, double a, double t, const std::vector<double>& x);

// u_t = a u_xx by convolution with the heat kernel, composite quadrature on a
// fine auxiliary grid over [lo, hi].
OracleResult oracle_heat(const Fn1& u0, double a, double t, const std::vector<double>& x, double lo, double hi);
// exp(-x^2/2) under u_t = a u_xx, closed form
OracleResult oracle_heat_gaussian(double a, double t, const std::vector<double>& x);

struct OuMoments {
    double mean, var;
};
// dm/dt = c m, dvar/dt = 2 c var + 2 a
OuMoments oracle_ou_moments(double m0, double var0, double c, double a, double t);

// u_tt = s^2 u_xx with u_t(0) = 0
OracleResult oracle_dalembert(const Fn1& u0, double s, double t, const std::vector<double>& x);

// u_tau = 1/2 sigma^2 x^2 u_xx + r x u_x - r u, zero Dirichlet data on
// [lo, hi], Crank-Nicolson on a refined grid, then sampled at x.
OracleResult oracle_black_scholes(const Fn1& u0, double sigma, double r, double tau, const std::vector<double>& x,
                                  double lo, double hi);

// mean and variance of u0(x - (c1 + c2 z) t), z ~ N(0, 1/2), by Gauss-Hermite
struct UqOracle {
    std::vector<double> mean, var;
};
UqOracle oracle_uq_convection(const Fn1& u0, double c1, double c2, double t, const std::vector<double>& x,
                              int order = 60);

// u_t + u u_x = 0 before the first shock, by characteristics (periodic u0 fine)
OracleResult oracle_burgers(const Fn1& u0, const Fn1& du0, double t, const std::vector<double>& x);

using OdeRhs = std::function<std::vector<double>(const std::vector<double>&)>;
// classical RK4, step halved until two successive results agree within tol
std::vector<double> oracle_rk4(const OdeRhs& f, std::vector<double> y0, double t, double tol,
                               double* achieved = nullptr);

// a(x) d^k f/dx^k with 8th-order centered differences on a uniform grid.
// Periodic wraps around; otherwise the points within reach of the edge are 0.
CVec finite_difference_apply(const std::vector<cplx>& a, int k, const CVec& f, double dx, bool periodic = true);

// Central difference weights for derivative k on offsets -p..p.
std::vector<double> central_weights(int k, int p);

// Dispatcher over the oracles above for the catalog problems.
OracleResult reference_solution(const std::string& problem, const std::map<std::string, double>& params, double t,
                                const std::vector<double>& x);

}  // namespace schro
