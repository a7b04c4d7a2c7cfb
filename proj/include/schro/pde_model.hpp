#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "schro/polynomial.hpp"
#include "schro/types.hpp"

namespace schro {

// Samples over the spatial grid (row-major, axis order of GridSpec::x).
struct TabulatedField {
    std::vector<int> shape;
    CVec values;
    bool operator==(const TabulatedField&) const = default;
};

class CoefficientExpr {
public:
    CoefficientExpr() : v_(Polynomial(0)) {}
    CoefficientExpr(Polynomial p) : v_(std::move(p)) {}
    CoefficientExpr(TabulatedField t) : v_(std::move(t)) {}
    static CoefficientExpr constant(cplx c) { return CoefficientExpr(Polynomial::constant(0, c)); }

    bool is_polynomial() const { return std::holds_alternative<Polynomial>(v_); }
    const Polynomial& poly() const;
    const TabulatedField& table() const;

    bool is_zero() const;
    bool is_real() const;
    bool operator==(const CoefficientExpr& o) const;

private:
    std::variant<Polynomial, TabulatedField> v_;
};

enum class TermKind {
    Plain,                // a(x) d^k u / dx_j^k
    HeatDivergence,       // -d/dx_i ( D(x) du/dx_j ),  k = 2
    DriftDivergence,      // d/dx_j ( mu(x) u ),        k = 1
    DiffusionDivergence,  // -d^2/dx_j^2 ( D(x) u ),    k = 2
};

const char* term_kind_name(TermKind k);
std::optional<TermKind> term_kind_from_name(const std::string& s);

// Axes are 0-based in the C++ API and 1-based in JSON.
struct DerivativeTerm {
    int j = 0;
    int k = 1;
    CoefficientExpr coef;
    TermKind kind = TermKind::Plain;
    int i = -1;  // outer axis of a HeatDivergence term; -1 means i = j
    int outer() const { return i < 0 ? j : i; }
    bool operator==(const DerivativeTerm&) const = default;
};

// du/dt + sum a_{k,j} d^k u/dx_j^k + b u = f       (time_order 1)
// u_tt + c0 u_t + sum c_j d^2u/dx_j dt + sum a d^k u + b u = 0   (time_order 2)
// Polynomial coefficients use variables x_1..x_D then z_1..z_L.
struct PdeSpec {
    std::string name;
    int D = 1;
    int time_order = 1;
    std::vector<DerivativeTerm> terms;
    CoefficientExpr b;
    std::optional<CoefficientExpr> f;
    CoefficientExpr c0;
    std::vector<CoefficientExpr> cj;
    int L = 0;
    bool allow_unstable = false;
    bool operator==(const PdeSpec&) const = default;
};

struct AxisSpec {
    std::string name;
    double min = -1.0;
    double max = 1.0;
    int n = 64;
    bool periodic = true;
    bool operator==(const AxisSpec&) const = default;
};

struct GridSpec {
    std::vector<AxisSpec> x;
    double xi_L = 10.0;
    int xi_n = 512;
    std::vector<int> n_max;       // one per stochastic dimension
    std::vector<AxisSpec> lift;   // chi / q axes
    bool operator==(const GridSpec&) const = default;
};

struct InitialData {
    std::vector<int> shape;
    CVec u0;
    CVec ut0;  // empty unless time_order 2
    std::string provenance;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string summary() const;
};

ValidationReport validate_spec(const PdeSpec& spec, const GridSpec& grid);
void require_valid(const PdeSpec& spec, const GridSpec& grid);

// Grid helpers shared with the engine.
bool is_power_of_two(int n);
std::vector<double> axis_points(const AxisSpec& a);
std::vector<int> grid_shape(const GridSpec& g);

// Catalog builders. Diffusion and potentials are polynomials in x_1..x_D.
PdeSpec build_convection(int D, const std::vector<cplx>& a);
PdeSpec build_heat(int D, const std::vector<std::vector<Polynomial>>& diffusion, const Polynomial& V);
PdeSpec build_heat(int D, double a, const std::vector<double>& k);  // D_ij = a*delta_ij, V = sum k_j x_j
PdeSpec build_fokker_planck(int D, const std::vector<Polynomial>& drift, const std::vector<Polynomial>& diffusion);
PdeSpec build_black_scholes(double sigma, double r);
PdeSpec build_wave(int D, const std::vector<double>& speeds, const Polynomial& V);
PdeSpec build_liouville(int D, const std::vector<Polynomial>& a);
PdeSpec build_uncertain_convection(int D, int L, const std::vector<Polynomial>& c);

struct MaxwellSpec {
    CoefficientExpr eps;
    CoefficientExpr mu;
    std::array<CoefficientExpr, 3> J;
    CoefficientExpr rho;
};

MaxwellSpec build_maxwell(CoefficientExpr eps, CoefficientExpr mu, std::array<CoefficientExpr, 3> J,
                          CoefficientExpr rho);

// Gaussian amplitude * exp(-|x-c|^2 / (2 w^2)) sampled on the grid.
CVec gaussian_field(const GridSpec& g, const std::vector<double>& center, double width, cplx amplitude = 1.0);
InitialData gaussian_initial(const GridSpec& g, const std::vector<double>& center, double width);

}  // namespace schro
