#pragma once

#include <functional>
#include <span>
#include <vector>

#include "schro/grid.hpp"
#include "schro/operator.hpp"
#include "schro/pde_model.hpp"
#include "schro/schrodingerize.hpp"

namespace schro {

// <m|z|n> in the orthonormal Hermite basis for the weight exp(-z^2)/sqrt(pi),
// row-major (n_max+1)^2.
std::vector<double> z_position_matrix(int n_max);

struct GaussHermite {
    std::vector<double> nodes, weights;  // weights sum to 1
};
// Physicists' nodes with probability weights for exp(-z^2)/sqrt(pi).
GaussHermite gauss_hermite(int order);

// Orthonormal P_n(z) = H_n(z)/sqrt(2^n n!) for n = 0..n_max.
std::vector<double> hermite_normalized(int n_max, double z);

// u0 evaluated at one stochastic point z (length L), sampled on the mode grid.
using StochasticField = std::function<CVec(std::span<const double> z)>;

// Chaos coefficients u_n(x) = E[u0(z, x) P_n(z)] by tensor Gauss-Hermite
// quadrature. Result is slice-shaped on L (fock axes, then modes); order 0
// means 2 n_max per axis.
CVec hermite_project(const StochasticField& u0, const Layout& L, int order = 0);

struct ChaosStatistics {
    CVec mean;
    std::vector<double> variance;
    double top_population = 0.0;  // share of |u|^2 in coefficients with some n_l = n_max
};

// Mean is the n = 0 coefficient, variance the sum of |u_n|^2 over n != 0.
// Qubits, if any, must already be projected out.
ChaosStatistics extract_statistics(const CVec& chaos, const Layout& L);

// Generator for an uncertain convection spec; direct whenever every speed is
// independent of its own axis.
SchrodingerisedSystem build_uq_generator(const PdeSpec& spec, const GridSpec& g,
                                         Pipeline p = Pipeline::Auto);

}  // namespace schro
