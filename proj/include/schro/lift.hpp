#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "schro/grid.hpp"
#include "schro/operator.hpp"
#include "schro/polynomial.hpp"
#include "schro/schrodingerize.hpp"

namespace schro {

enum class LiftKind { ScalarHyperbolic, HamiltonJacobi, OdeSystem };

using PointMap = std::function<std::vector<double>(std::span<const double>)>;

struct LiftSpec {
    LiftKind kind = LiftKind::ScalarHyperbolic;
    int D = 1;                    // spatial axes (0 for ODE systems)
    std::vector<Polynomial> F;    // speeds F_j(u) in one variable, or ODE right-hand sides over q_1..q_N
    Polynomial Q;                 // source Q(x_1..x_D, u); empty for none
    Polynomial H;                 // Hamiltonian over x_1..x_D, p_1..p_D
    std::vector<AxisSpec> x;      // spatial axes
    std::vector<AxisSpec> lift;   // chi axes (one for scalar, D for HJ) or q axes
    double width = 0.0;           // delta width; 0 means 4 grid spacings of the first lift axis
    PointMap u0;                  // u0(x) (scalar), grad S(0, x) (HJ)
    std::function<double(std::span<const double>)> envelope;  // HJ density, default 1
    std::vector<double> gamma0;   // ODE initial point
};

struct LiftedSystem {
    OperatorSum A;
    GridSpec grid;    // spatial axes followed by lift axes
    LayoutPtr layout;
    CVec psi0;        // on layout
    double width = 0.0;
    int n_space = 0;  // leading spatial mode axes
};

// Gaussian stand-in for delta(s)
double regularized_delta(double s, double width);

LiftedSystem levelset_lift(const LiftSpec& spec);
LiftedSystem hj_lift(const LiftSpec& spec);
LiftedSystem ode_lift(const LiftSpec& spec);
LiftedSystem lift(const LiftSpec& spec);

// Ready to evolve; Auto keeps Hermitian lifts direct. xi settings come from xi_grid.
SchrodingerisedSystem schrodingerise_lift(const LiftedSystem& ls, Pipeline p = Pipeline::Auto, double xi_L = 10.0,
                                          int xi_n = 512);

struct LiftMoments {
    std::vector<std::vector<double>> mean;  // [lift axis][spatial point]
    std::vector<double> mass;               // sum of Psi over the lift axes, per spatial point
};

// First moments over the lift axes of a real field. Throws Guard when the mass
// at some spatial point drops below floor times its largest value or below
// abs_floor.
LiftMoments extract_moments(const CVec& psi, const Layout& L, int n_space, double floor = 1e-3,
                            double abs_floor = 0.0);

// Position of the largest |Psi| along lift axis 0 for every spatial point
// (post-shock diagnostic).
std::vector<double> extract_peaks(const CVec& psi, const Layout& L, int n_space);

}  // namespace schro
