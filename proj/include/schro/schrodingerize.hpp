#pragma once

#include <string>
#include <vector>

#include "schro/grid.hpp"
#include "schro/operator.hpp"
#include "schro/pde_model.hpp"

namespace schro {

enum class Pipeline { Auto, Direct, Standard, Extended };
enum class Dilation { None, Inhomogeneous, TimeOrder2 };

const char* pipeline_name(Pipeline p);
Pipeline pipeline_from_name(const std::string& s);

struct SchrodingerisedSystem {
    std::string name;
    int D = 1;
    Pipeline pipeline = Pipeline::Standard;  // resolved, never Auto
    Dilation dilation = Dilation::None;
    int dil_qubit = -1;       // qubit added by a dilation
    OperatorSum A;            // generator after dilation: dy/dt = -i A y
    HermitianSplit split;     // of A
    std::vector<std::pair<OperatorSum, OperatorSum>> axis_split;  // extended: {a_j1, a_j2}
    OperatorSum H;
    LayoutPtr layout;         // includes ancilla axes unless direct
    LayoutPtr base;           // same layout without ancilla axes
    CVec forcing;             // tabulated f (inhomogeneous)

    bool direct() const { return pipeline == Pipeline::Direct; }
    // the part of H acting on axis j's ancilla (all of A2 for the standard form)
    const OperatorSum& A2(int axis = 0) const;
};

LayoutPtr make_layout(const GridSpec& g, int qubits, int n_anc);
LayoutPtr strip_ancilla(const Layout& L);

// From a generator already built on the base layout. Auto picks Direct when A
// is Hermitian. Extended needs axis_parts (one generator per spatial axis).
SchrodingerisedSystem schrodingerise_operator(const std::string& name, const OperatorSum& A, LayoutPtr base,
                                              const GridSpec& g, Pipeline p = Pipeline::Auto,
                                              const std::vector<OperatorSum>& axis_parts = {});

// Full pipeline from a spec: time order 2 and inhomogeneous specs are dilated
// with one extra qubit first.
SchrodingerisedSystem schrodingerise(const PdeSpec& spec, const GridSpec& g, Pipeline p = Pipeline::Auto);

// B = A (x) |0><0| + i I (x) |0><1| on a new last qubit.
OperatorSum dilate_inhomogeneous(const OperatorSum& A, int qubit);
// V = [[0, i], [A, -i Gamma]] on a new last qubit.
OperatorSum dilate_time_order2(const OperatorSum& A, const OperatorSum& Gamma, int qubit);

// Per-axis generators with b split evenly over the axes.
std::vector<OperatorSum> axis_generators(const PdeSpec& spec);

// Slice-shaped initial vector: u0 (or a full block vector) in the qubit-0
// sector, the forcing or du/dt(0) in the dilation sector.
CVec initial_block(const SchrodingerisedSystem& sys, const InitialData& init);

enum class AncillaProfile { Exact, Gaussian };

// w(0) = g(xi_1) ... g(xi_n) * block in the xi representation.
// Exact: g = exp(-|xi|); Gaussian: exp(-xi^2/(2 s^2)) / (sqrt(s) pi^(1/4)).
GridState warp_initial(LayoutPtr layout, const CVec& block, AncillaProfile prof = AncillaProfile::Exact,
                       double s = 0.925);

// xi -> eta with kernel e^{+i xi eta}; the inverse carries e^{-i xi eta}/(2 pi).
GridState fourier_xi_to_eta(const GridState& w);
GridState inverse_eta_to_xi(const GridState& v);

// Ready-to-evolve state: eta representation, or the bare block when direct.
GridState initial_state(const SchrodingerisedSystem& sys, const InitialData& init,
                        AncillaProfile prof = AncillaProfile::Exact, double s = 0.925);

}  // namespace schro
