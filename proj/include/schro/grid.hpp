#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "schro/operator.hpp"
#include "schro/pde_model.hpp"
#include "schro/types.hpp"

namespace schro {

// Periodic spectral axis. x_i = lo + i*dx, k in FFT order with the Nyquist
// bin at -pi/dx.
struct ModeAxis {
    std::string name;
    double lo = 0.0, hi = 1.0;
    int n = 0;
    double dx = 0.0;
    std::vector<double> x, k;
};

ModeAxis make_mode_axis(const AxisSpec& a);

// Auxiliary xi axis and its Fourier dual. xi_j = -L + j*h, eta in FFT order.
struct AncAxis {
    double L = 10.0;
    int n = 512;
    double h = 0.0;
    std::vector<double> xi, eta;
};

AncAxis make_anc_axis(double L, int n);

// Storage order: [ancilla axes][qubits][fock axes][mode axes], row-major, so
// that every ancilla slice is one contiguous block.
struct Layout {
    std::vector<ModeAxis> modes;
    int qubits = 0;
    std::vector<int> fock;  // axis sizes (n_max + 1)
    std::vector<AncAxis> anc;

    std::vector<int> mode_shape() const;
    std::size_t mode_size() const;
    std::size_t block_count() const;
    std::size_t slice_size() const { return mode_size() * block_count(); }
    std::size_t n_slices() const;
    std::size_t size() const { return slice_size() * n_slices(); }
    double mode_weight() const;
    OperatorDims dims() const;

    std::vector<int> anc_index(std::size_t slice) const;
    std::vector<double> eta_at(std::size_t slice) const;
    std::vector<double> xi_at(std::size_t slice) const;

    // field of x_axis^power on the mode grid
    std::vector<double> coordinate_power(int axis, int power) const;
    // prod_a k_a^alpha_a on the mode grid
    std::vector<double> momentum_power(const std::vector<int>& alpha) const;
};

using LayoutPtr = std::shared_ptr<const Layout>;

enum class AncRep { Xi, Eta };

struct GridState {
    LayoutPtr layout;
    AncRep rep = AncRep::Eta;
    CVec v;

    GridState() = default;
    GridState(LayoutPtr l, AncRep r);

    cplx* slice(std::size_t s) { return v.data() + s * layout->slice_size(); }
    const cplx* slice(std::size_t s) const { return v.data() + s * layout->slice_size(); }
    // measure weight of one ancilla cell
    double anc_weight() const;
    double norm2() const;
    double norm() const;
};

// Samples of a coefficient on the mode grid; polynomial variables beyond the
// mode axes are rejected.
CVec tabulate(const CoefficientExpr& c, const Layout& L);

// Fraction of the squared norm lying in the outer `frac` of each mode axis.
double boundary_mass_fraction(const GridState& s, double frac = 0.05);

// Row-major iteration over a multi-index of the given shape.
template <class F>
void for_each_index(const std::vector<int>& shape, F&& f) {
    std::vector<int> idx(shape.size(), 0);
    std::size_t total = 1;
    for (int n : shape) total *= static_cast<std::size_t>(n);
    for (std::size_t flat = 0; flat < total; ++flat) {
        f(flat, idx);
        for (int a = static_cast<int>(shape.size()) - 1; a >= 0; --a) {
            if (++idx[a] < shape[a]) break;
            idx[a] = 0;
        }
    }
}

}  // namespace schro
