#pragma once

#include <functional>
#include <string>
#include <vector>

#include "schro/evolve.hpp"
#include "schro/grid.hpp"
#include "schro/schrodingerize.hpp"

namespace schro {

struct RecoveryResult {
    GridState u;                 // on the layout without ancilla (and without the projected qubit)
    double p_formula = 0.0;      // |u(t)|^2 / |u(0)|^2 times the ancilla factor
    double p_measured = 0.0;     // projected mass of the evolved state
    double p_continuum = 0.0;    // same formula with the continuum ancilla factor
    std::string mode;            // integrate | slice | imperfect | direct
    std::vector<double> xi_c;    // per ancilla axis
    double xi_star = 0.0;        // slice position (slice mode)
    int qubit = -1, sector = -1;
    double norm_u = 0.0, norm_u0 = 0.0;
};

struct RecoverOptions {
    int qubit = -1;  // project this qubit first
    int sector = 0;
    std::vector<double> xi_c;  // lower end of the usable xi range per axis; empty = 0
    double margin = 0.0;       // extra distance above xi_c, away from the smeared kink
};

// Drop one qubit, keeping sector `bit` (unnormalized).
GridState project_qubit(const GridState& psi, int qubit, int bit);

// Smallest eigenvalue of the ancilla-coupled part as seen by y0: exact on the
// grid for diagonal operators, Lanczos Ritz values otherwise.
double lambda_min(const OperatorSum& A2, LayoutPtr base, const CVec& y0);
// xi_c_j = max(0, -lambda_min(A2_j) t)
std::vector<double> xi_threshold(const SchrodingerisedSystem& sys, const CVec& y0, double t);

RecoverOptions recovery_options(const SchrodingerisedSystem& sys, const CVec& y0, double t);

// All functions take the xi representation.
RecoveryResult recover_integrate(const GridState& w, const RecoverOptions& o = {});
RecoveryResult recover_slice(const GridState& w, double xi_star, const RecoverOptions& o = {});
RecoveryResult recover_imperfect(const GridState& w, const std::function<double(double)>& f,
                                 const RecoverOptions& o = {});

// Fraction of the norm in the top 5% of the positive xi range, worst axis.
double xi_tail_fraction(const GridState& w, double frac = 0.05);
// Smallest xi > 0 beyond which max_x |w| stays below rel * max |w| (axis 0;
// L when it never does).
double xi_decay_point(const GridState& w, double rel = 1e-6);

// e^{xi} w(xi) for every positive grid xi above xi_c (axis 0), one field per slice.
std::vector<std::pair<double, CVec>> unwarped_slices(const GridState& w, const RecoverOptions& o);

struct RunConfig {
    EvolveConfig evolve;
    std::string recover = "integrate";  // integrate | slice | imperfect
    double xi_star = 1.0;
    std::function<double(double)> profile;  // imperfect detector
    AncillaProfile ancilla = AncillaProfile::Exact;
    double ancilla_s = 0.925;
    bool check_xi = true;
    double xi_tol = 1e-6;
    double margin = 0.0;
};

struct RunResult {
    GridState final_state;  // evolved, eta representation (or bare when direct)
    GridState w;            // xi representation (empty when direct)
    EvolveStats stats;
    RecoveryResult rec;
    double xi_tail = 0.0;
    double xi_star = 0.0;   // decay point
    CVec y0;
};

RunResult run_system(const SchrodingerisedSystem& sys, const InitialData& init, const RunConfig& cfg);
// One evolution, recovered at each of the ascending times (cfg.evolve.t_final is ignored).
std::vector<RunResult> run_trajectory(const SchrodingerisedSystem& sys, const InitialData& init, const RunConfig& cfg,
                                      const std::vector<double>& times);

}  // namespace schro
