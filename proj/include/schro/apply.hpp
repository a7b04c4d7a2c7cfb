#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "schro/grid.hpp"
#include "schro/operator.hpp"

namespace schro {

// Block-sparse operator on one slice; each block acts diagonally on the mode
// grid. A diagonal of length 1 is a scalar.
struct BlockDiag {
    struct Entry {
        int out = 0, in = 0;
        CVec d;
    };
    std::vector<Entry> entries;

    bool empty() const { return entries.empty(); }
    // d == nullptr adds a scalar
    void add(int out, int in, cplx scale, const cplx* d, std::size_t M);
    void apply_acc(const cplx* x, cplx* y, std::size_t M) const;
    // true when every block is a multiple of the identity on the mode grid
    bool scalar_only() const;
};

struct SparseBlocks {
    struct Entry {
        int out, in;
        cplx c;
    };
    std::vector<Entry> entries;
};

// One term reduced to coefficient, ancilla powers, block action and an
// alternating list of mode multipliers and momentum powers.
struct CompiledTerm {
    enum class Kind { KDiag, XDiag, Left, Right, Chain };
    struct Seg {
        bool field = false;
        std::shared_ptr<const CVec> f;
        std::vector<int> alpha;
    };
    Kind kind = Kind::Chain;
    cplx c;
    std::vector<int> eta_pow;
    SparseBlocks blocks;
    std::vector<Seg> segs;  // leftmost first
};

class CompiledOperator;

// Generator of one ancilla slice with eta fixed to numbers.
class SliceOp {
public:
    void apply(const cplx* x, cplx* y) const;
    // action on the unnormalized mode-space DFT of x; only when momentum_diagonal()
    void apply_k(const cplx* xh, cplx* yh) const;
    // action ignoring momentum terms; only when position_diagonal()
    void apply_x(const cplx* x, cplx* y) const;

    bool momentum_diagonal() const { return xdiag_.empty() && left_.empty() && right_.empty() && chains_.empty(); }
    bool position_diagonal() const { return kdiag_.empty() && left_.empty() && right_.empty() && chains_.empty(); }
    bool is_zero() const;
    std::size_t size() const { return M_ * B_; }

    const BlockDiag& kdiag() const { return kdiag_; }
    const BlockDiag& xdiag() const { return xdiag_; }
    const BlockDiag& cdiag() const { return cdiag_; }

private:
    friend class CompiledOperator;
    const CompiledOperator* owner_ = nullptr;
    std::size_t M_ = 0, B_ = 0;
    BlockDiag kdiag_, xdiag_, cdiag_;
    std::map<std::vector<int>, BlockDiag> left_, right_;
    std::vector<std::pair<cplx, const CompiledTerm*>> chains_;

    void apply_chain(const CompiledTerm& t, cplx s, const cplx* x, cplx* y) const;
};

class CompiledOperator {
public:
    // generic = true keeps every term as a factor chain (reference path).
    CompiledOperator(const OperatorSum& op, LayoutPtr layout, bool generic = false);

    SliceOp slice(std::span<const double> eta) const;
    const Layout& layout() const { return *layout_; }
    LayoutPtr layout_ptr() const { return layout_; }
    bool uses_eta() const { return uses_eta_; }
    const std::vector<double>& kpow(const std::vector<int>& alpha) const;
    const std::vector<CompiledTerm>& terms() const { return terms_; }

private:
    LayoutPtr layout_;
    std::vector<CompiledTerm> terms_;
    std::map<std::vector<int>, std::vector<double>> kpow_;
    bool uses_eta_ = false;
};

// Unnormalized DFT over the mode axes of every block of one slice.
void slice_fft(const Layout& L, int sign, const cplx* in, cplx* out);

GridState apply_operator(const OperatorSum& op, const GridState& psi, bool generic = false);
// <psi, O psi> / <psi, psi>
cplx expectation(const GridState& psi, const OperatorSum& op);
// weighted inner product <a, b>
cplx inner(const GridState& a, const GridState& b);

struct HermiticityProbe {
    bool hermitian = false;
    double worst = 0.0;     // max |<f,Og> - <Of,g>| / (|O| |f| |g|)
    double op_norm = 0.0;   // largest observed |O psi|/|psi|
};

HermiticityProbe probe_hermitian(const OperatorSum& op, LayoutPtr layout, std::uint64_t seed = 0, int pairs = 20,
                                 double tol = 1e-10);
bool is_hermitian(const OperatorSum& op, LayoutPtr layout, std::uint64_t seed = 0);

GridState random_state(LayoutPtr layout, AncRep rep, std::uint64_t seed);

}  // namespace schro
