#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "schro/types.hpp"

namespace schro {

// Multiplier sampled on the full mode grid (row-major over mode axes).
struct ModeTable {
    std::vector<int> shape;
    CVec values;
    std::string label;
};

enum class FactorKind { X, Table, P, Eta, Pauli, FockZ };

struct OperatorFactor {
    FactorKind kind = FactorKind::X;
    int axis = 0;      // mode axis, eta axis, qubit or Fock axis depending on kind
    int power = 1;     // X, P, Eta, FockZ
    char sigma = 'I';  // Pauli: 'I', 'X', 'Y', 'Z'
    std::shared_ptr<const ModeTable> table;

    static OperatorFactor x(int axis, int power = 1) { return {FactorKind::X, axis, power, 'I', nullptr}; }
    static OperatorFactor p(int axis, int power = 1) { return {FactorKind::P, axis, power, 'I', nullptr}; }
    static OperatorFactor eta(int axis, int power = 1) { return {FactorKind::Eta, axis, power, 'I', nullptr}; }
    static OperatorFactor pauli(int qubit, char s) { return {FactorKind::Pauli, qubit, 1, s, nullptr}; }
    static OperatorFactor fock(int axis, int power = 1) { return {FactorKind::FockZ, axis, power, 'I', nullptr}; }
    static OperatorFactor tab(std::shared_ptr<const ModeTable> t) { return {FactorKind::Table, 0, 1, 'I', std::move(t)}; }

    bool operator==(const OperatorFactor& o) const;
};

// coeff * factors[0] * factors[1] * ... ; the last factor acts first.
struct OperatorTerm {
    cplx coeff = 1.0;
    std::vector<OperatorFactor> factors;
};

struct OperatorDims {
    int modes = 0;
    int etas = 0;
    int qubits = 0;
    int focks = 0;
    OperatorDims merged(const OperatorDims& o) const;
    bool operator==(const OperatorDims&) const = default;
};

class OperatorSum {
public:
    OperatorSum() = default;
    static OperatorSum identity(cplx c = 1.0);
    static OperatorSum of(OperatorFactor f, cplx c = 1.0);
    static OperatorSum of(std::vector<OperatorFactor> fs, cplx c = 1.0);

    void add(OperatorTerm t);
    const std::vector<OperatorTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    OperatorSum adjoint() const;
    OperatorSum operator+(const OperatorSum& o) const;
    OperatorSum operator-(const OperatorSum& o) const;
    OperatorSum operator*(cplx s) const;
    // Composition: (*this)(o(psi)).
    OperatorSum operator*(const OperatorSum& o) const;

    bool has_tables() const;
    bool has_eta() const;
    OperatorDims dims() const;

private:
    std::vector<OperatorTerm> terms_;
};

inline OperatorSum operator*(cplx s, const OperatorSum& o) { return o * s; }

// Normal-ordered monomial: x^beta z^nu sigma eta^e p^alpha.
struct MonoKey {
    std::vector<int> x, p, z, eta;
    std::string pauli;
    auto operator<=>(const MonoKey&) const = default;
    int quadrature_degree() const;
    bool is_identity() const;
    // x^beta and p^alpha share an axis, so the two orderings differ
    bool mixed() const;
};

class NormalForm {
public:
    explicit NormalForm(OperatorDims d) : dims_(d) {}
    // nullopt when the operator has tabulated factors or exceeds the
    // symbolic degree limit.
    static std::optional<NormalForm> from(const OperatorSum& op, OperatorDims dims);
    static std::optional<NormalForm> from(const OperatorSum& op) { return from(op, op.dims()); }

    const std::map<MonoKey, cplx>& terms() const { return terms_; }
    const OperatorDims& dims() const { return dims_; }
    bool is_zero(double tol = 1e-13) const;
    void add(const MonoKey& k, cplx c);
    NormalForm operator-(const NormalForm& o) const;
    NormalForm operator+(const NormalForm& o) const;
    NormalForm operator*(cplx s) const;
    double max_abs() const;
    void prune(double rel_tol = 1e-13);
    OperatorSum to_operator() const;

    // multiply on the right by one factor
    bool multiply_right(const OperatorFactor& f);

private:
    OperatorDims dims_;
    std::map<MonoKey, cplx> terms_;
};

// c * (x^b p^a + p^a x^b)/2 times the commuting remainder of the key, or the
// single product when the two orderings agree.
struct SymTerm {
    cplx c;
    MonoKey key;
};

std::vector<SymTerm> symmetric_decomposition(const NormalForm& nf);
OperatorSum to_operator(const std::vector<SymTerm>& terms, const OperatorDims& dims);
// Canonical symmetrized rewrite; returns the input unchanged when no normal form exists.
OperatorSum canonicalize(const OperatorSum& op);

// Operator text of one term without its coefficient, e.g. "(x²p²+p²x²)⊗η".
std::string sym_term_label(const MonoKey& key, const OperatorDims& dims);
std::string to_string(const std::vector<SymTerm>& terms, const OperatorDims& dims);
std::string to_string(const OperatorSum& op);

// Symbolic equality through normal forms; nullopt if either side has none.
std::optional<bool> symbolically_equal(const OperatorSum& a, const OperatorSum& b, double tol = 1e-12);

struct HermitianSplit {
    OperatorSum A1;  // (A + A^dagger)/2
    OperatorSum A2;  // i(A - A^dagger)/2
    bool symbolic = false;
    // literal (A + A^dagger)/2 and i(A - A^dagger)/2 before simplification;
    // A1_raw - i A2_raw == A holds exactly on any grid
    OperatorSum A1_raw, A2_raw;
};

HermitianSplit hermitian_split(const OperatorSum& A);

}  // namespace schro
