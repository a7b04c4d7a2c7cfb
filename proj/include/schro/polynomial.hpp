#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "schro/types.hpp"

namespace schro {

// Multivariate polynomial with complex coefficients. Variables are indexed
// 0..nvars-1; the PDE model uses x_1..x_D first, then z_1..z_L.
class Polynomial {
public:
    using Exponent = std::vector<int>;

    Polynomial() = default;
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, cplx c);
    static Polynomial variable(int nvars, int var, cplx c = 1.0);
    static Polynomial monomial(Exponent e, cplx c);

    int nvars() const { return nvars_; }
    const std::map<Exponent, cplx>& terms() const { return terms_; }

    void add_term(const Exponent& e, cplx c);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    bool is_real() const;
    int degree() const;
    int degree_in(int var) const;
    bool depends_on(int var) const { return degree_in(var) > 0; }
    cplx constant_term() const;

    // Same polynomial over more variables (new ones appended, unused).
    Polynomial widened(int nvars) const;
    Polynomial derivative(int var) const;
    Polynomial conj() const;
    cplx eval(std::span<const double> point) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(cplx s) const;
    Polynomial operator-() const { return *this * cplx(-1.0); }
    bool operator==(const Polynomial& o) const;

    std::string str(const std::vector<std::string>& names = {}) const;

private:
    int nvars_ = 0;
    std::map<Exponent, cplx> terms_;
};

}  // namespace schro
