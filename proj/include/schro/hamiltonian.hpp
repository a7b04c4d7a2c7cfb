#pragma once

#include <string>
#include <vector>

#include "schro/grid.hpp"
#include "schro/operator.hpp"
#include "schro/pde_model.hpp"

namespace schro {

// Multiplication by a coefficient: polynomial monomials become x / z factors,
// tabulated data becomes a table factor.
OperatorSum coefficient_operator(const CoefficientExpr& c, int D, const std::string& label = "a");

// du/dt = -i A u for a first-order-in-time spec (f ignored). For time order 2
// this is the spatial part: u_tt + Gamma u_t + i A u = 0.
OperatorSum build_A(const PdeSpec& spec);
// Gamma = c0 + i sum c_j p_j (time order 2 only)
OperatorSum build_gamma(const PdeSpec& spec);

// H = A2 (x) eta_axis + A1 (x) I
OperatorSum assemble_hamiltonian(const OperatorSum& A1, const OperatorSum& A2, int eta_axis = 0);
// sum_j a_{j2} (x) eta_j + a_{j1} (x) I; split[j] = {a_{j1}, a_{j2}}
OperatorSum assemble_extended(const std::vector<std::pair<OperatorSum, OperatorSum>>& split);

struct ResourceRow {
    int qumodes = 0;
    int qubits = 0;
    int terms = 0;          // symmetrized terms, (x^b p^a + p^a x^b) counting as two
    int max_order = 0;      // quadrature degree incl. eta, excl. Pauli
    std::string max_term;   // label of the first highest-degree term
    bool gaussian = true;
    bool direct = false;
    int gates = 0;
    std::vector<std::string> labels;
    bool symbolic = true;   // false when tables prevented a normal form
};

ResourceRow count_resources(const OperatorSum& H, const OperatorDims& dims, bool direct);
std::string format_resources(const ResourceRow& r);

// Reads H = A2 (x) eta + A1 (x) I (eta on ancilla axis 0) back into a spec.
PdeSpec hamiltonian_to_pde(const OperatorSum& H, int D);

// Maxwell generator on 3 modes and 3 qubits; q0 selects E/B, q1 q2 index the
// four components fed to the curl block.
struct MaxwellSystem {
    OperatorSum A;
    OperatorSum D;   // curl block
    CVec J;          // inhomogeneity, already scaled, slice-shaped (8 blocks x modes)
    double v_const = 0.0;  // 0 when the medium varies
};

OperatorSum maxwell_curl();
MaxwellSystem assemble_maxwell(const MaxwellSpec& m, const Layout& layout);

}  // namespace schro
