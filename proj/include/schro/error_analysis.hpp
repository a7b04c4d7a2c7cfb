#pragma once

#include <string>
#include <vector>

#include "schro/recovery.hpp"

namespace schro {

// One runnable catalog problem.
struct Problem {
    std::string name;
    PdeSpec spec;
    GridSpec grid;
    InitialData init;
    double t = 0.5;
};

// heat u_t = u_xx, u0 = exp(-x^2/2) on [-box, box]
Problem heat_problem(int nx = 256, double box = 16.0, double xi_L = 10.0, int xi_n = 512, double t = 0.5);

struct AncillaFidelity {
    double closed = 0.0;   // sqrt(2s) e^{s^2/2} pi^{1/4} erfc(s/sqrt 2)
    double numeric = 0.0;  // quadrature of the overlap integral
};
AncillaFidelity ancilla_gaussian_fidelity(double s);

struct FidelityScan {
    std::vector<double> s, fidelity;
    double s_best = 0.0, f_best = 0.0;
};
FidelityScan ancilla_fidelity_scan(double s_min, double s_max, double step);

struct SubstitutionResult {
    double fidelity = 0.0;  // |<u|u'>| of the normalized recovered fields
    double delta = 0.0;     // 1 - |<v|v'>| of the initial ancilla states
    double xi_star = 0.0;
    double norm_ratio = 0.0;  // |u(0)|^2 / |u(t)|^2
    double bound = 0.0;       // 1 - 2 xi* delta |u(0)|^2/|u(t)|^2
    bool holds = false;
    double norm_drift = 0.0;
};

// Runs the problem with the exact ancilla and with `alt` (width s), recovering by integration.
SubstitutionResult ancilla_substitution_experiment(const Problem& pb, double s,
                                                   AncillaProfile alt = AncillaProfile::Gaussian,
                                                   const EvolveConfig& ec = {});

struct ConvectionRobustness {
    double measured = 0.0, predicted = 0.0;
};
// unit product Gaussian, speeds a_j = 1 against a_j = 1 + eps, n points per axis
ConvectionRobustness robustness_convection(double eps, double t, int D, int n = 32, double box = 8.0);

// Largest eps keeping fidelity above 1 - Delta: the convection closed form,
// or the product-state estimate with energy spread dE when dE > 0.
double epsilon_bound(int D, double t, double Delta, bool convection, double dE = 0.0);

// sqrt(<H^2> - <H>^2)
double energy_spread(const GridState& psi, const OperatorSum& H);

struct RobustnessReport {
    std::vector<double> eps, measured, predicted, bound;
    std::vector<double> state_fidelity;  // 1 - Delta of the full evolved states
    std::vector<bool> pass;
    double xi_star = 0.0, eta = 0.0, delta_star = 0.0;
    bool all_pass() const;
};

// H -> H with eps added to every coefficient
OperatorSum perturb_coefficients(const OperatorSum& H, double eps);

// Convection sweep: measured fidelity against exp(-(eps t)^2 D/4).
RobustnessReport robustness_convection_sweep(const std::vector<double>& eps, double t, int D);

// Schrodingerised problem: recovered fidelity under perturbed H, checked
// against 1 - 2 xi* Delta |u(0)|^2/|u(t)|^2, and against 1 - eta whenever
// Delta <= eta |u(t)|^2 / (2 xi* |u(0)|^2).
RobustnessReport robustness_schrodingerised(const Problem& pb, const std::vector<double>& eps, double eta,
                                            const EvolveConfig& ec = {});

std::string report_csv(const RobustnessReport& r);

}  // namespace schro
