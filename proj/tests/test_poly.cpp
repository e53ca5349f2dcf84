#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "tt/poly.hpp"

using namespace tt;

TEST_CASE("region polynomial base cases") {
    // f_3 = 1 - z2
    Poly f3 = region_polynomial(3);
    CHECK(poly_identical(f3, Poly::constant(1.0) - Poly::variable(2)));
    // f_4 = z2 + z3 - 1
    Poly f4 = region_polynomial(4);
    CHECK(poly_identical(f4, Poly::variable(2) + Poly::variable(3) - Poly::constant(1.0)));
    // f_5 = 1 - z2 - z3 - z4 + z2 z4
    Poly f5 = region_polynomial(5);
    Poly want = Poly::constant(1.0) - Poly::variable(2) - Poly::variable(3) - Poly::variable(4) +
                Poly::variable(2) * Poly::variable(4);
    CHECK(poly_identical(f5, want));
}

TEST_CASE("recursion equals closed form, coefficient for coefficient") {
    for (int n = 3; n <= 12; ++n) {
        Poly a = region_polynomial(n);
        Poly b = region_polynomial_closed_form(n);
        CHECK(poly_identical(a, b));
        // coefficients are exactly +-1
        for (const Monomial& m : a.terms()) {
            CHECK(m.coeff.imag() == 0.0);
            CHECK(std::abs(std::abs(m.coeff.real()) - 1.0) == 0.0);
        }
    }
}

TEST_CASE("multilinearity: degree at most one in each variable") {
    for (int n = 3; n <= 12; ++n) {
        Poly f = region_polynomial(n);
        for (int v : f.variables()) CHECK(f.degree_in(v) <= 1);
    }
}

TEST_CASE("derivative matches finite differences") {
    Rng rng(7);
    Poly f = region_polynomial(7);
    std::vector<Complex> x(8);
    for (auto& c : x) c = rng.next_complex(2.0);
    const double h = 1e-6;
    for (int v : f.variables()) {
        auto xp = x, xm = x;
        xp[size_t(v)] += h;
        xm[size_t(v)] -= h;
        Complex fd = (f.eval(xp) - f.eval(xm)) / (2 * h);
        Complex an = f.derivative(v).eval(x);
        CHECK(std::abs(fd - an) < 1e-8);
    }
}
