#pragma once

#include <map>
#include <string>
#include <vector>

#include "tt/types.hpp"

namespace tt {

// One term of a sparse multivariate polynomial: coeff * prod x_i^e_i.
// Exponents are kept sorted by variable index.
struct Monomial {
    Complex coeff;
    std::vector<std::pair<int, int>> exps;  // (variable, power), power >= 1
};

// Sparse polynomial over C in globally indexed variables.
class Poly {
public:
    Poly() = default;
    static Poly constant(Complex c);
    static Poly variable(int var);

    Poly& add_term(Complex coeff, std::vector<std::pair<int, int>> exps);

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(Complex s) const;
    Poly operator-() const { return *this * Complex(-1.0); }

    Complex eval(const std::vector<Complex>& x) const;
    // Partial derivative d/dx_var.
    Poly derivative(int var) const;
    // Largest power of any single variable, 0 for constants.
    int degree_in(int var) const;

    bool empty() const { return terms_.empty(); }
    const std::vector<Monomial>& terms() const { return terms_; }
    std::vector<int> variables() const;

    void normalize(double drop_tol = 0.0);

private:
    std::vector<Monomial> terms_;
};

// Region polynomial f_n in zeta_2..zeta_{n-1}, built by the recursion
// f_3 = 1 - z2, f_4 = z2 + z3 - 1, f_n = -f_{n-1} - z_{n-1} f_{n-2}.
// Variable i of the result stands for zeta_{i} (indices 2..n-1 used).
Poly region_polynomial(int n);

// Same polynomial from the closed-form alternating sum over sparse index
// sets {1 < i_1 < ... < i_k < n, gaps >= 2}; used as an independent oracle.
Poly region_polynomial_closed_form(int n);

bool poly_identical(const Poly& a, const Poly& b, double tol = 0.0);

}  // namespace tt
