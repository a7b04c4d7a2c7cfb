#pragma once

#include <cstddef>
#include <functional>

#include "schro/apply.hpp"
#include "schro/grid.hpp"

namespace schro {

struct EvolveConfig {
    enum class Propagator { Krylov, SplitStep, RK4 };
    Propagator prop = Propagator::Krylov;
    int krylov_m = 30;
    double krylov_tol = 1e-12;
    bool full_reorth = true;
    double dt = 0.1;
    double t_final = 0.0;
    double norm_tol = 1e-10;  // per step and for the whole run
    int threads = 0;          // 0: hardware concurrency
    bool check_boundary = true;
    double boundary_tol = 1e-6;
};

struct EvolveStats {
    double norm_drift = 0.0;       // |n(t)/n(0) - 1| of the whole state
    double max_step_drift = 0.0;   // worst single step on any slice
    std::size_t substeps = 0;      // Krylov bases built
    std::size_t applies = 0;
    double boundary_mass = 0.0;
    double seconds = 0.0;
};

struct KrylovInfo {
    std::size_t substeps = 0;
    std::size_t applies = 0;
};

using SliceApply = std::function<void(const cplx*, cplx*)>;

// v <- exp(-i G t) v for Hermitian G by Lanczos with adaptive substeps.
void krylov_expm(const SliceApply& G, cplx* v, std::size_t n, double t, int m, double tol, bool full_reorth,
                 KrylovInfo* info = nullptr);

// Evolve every ancilla slice under its own generator H(eta).
GridState evolve(const OperatorSum& H, const GridState& psi0, const EvolveConfig& cfg, EvolveStats* stats = nullptr);

// Same contract for a precompiled generator.
GridState evolve(const CompiledOperator& H, const GridState& psi0, const EvolveConfig& cfg,
                 EvolveStats* stats = nullptr);

// Run fn(begin, end) over [0, n) split into contiguous chunks.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace schro
