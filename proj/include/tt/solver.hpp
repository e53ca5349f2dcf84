#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tt/linalg.hpp"
#include "tt/system.hpp"

namespace tt {

struct SolverConfig {
    double residual_tol = 1e-10;
    double dedupe_tol = 1e-6;
    int max_starts = 2000;
    int max_newton_iters = 200;
    double damping = 1.0;
    std::uint64_t rng_seed = 1;
    double start_box = 4.0;
    int max_roots = 50;
    void check() const;
};

struct Solution {
    Assignment values;       // all variables
    double residual = 0.0;   // max over all equations and matrix words
    bool degenerate = false;
};

struct SolutionSet {
    std::vector<Solution> solutions;
    int starts_used = 0;
    int converged_starts = 0;
    int nondegenerate_count = 0;
    std::string diagnostics;
};

// Residuals of every polynomial equation followed by every matrix-word defect.
std::vector<double> evaluate(const EquationSystem& sys, const Assignment& x);
double max_residual(const EquationSystem& sys, const Assignment& x);

Complex word_matrix_defect(const EquationSystem& sys, const MatrixWord& w, const Assignment& x,
                           std::array<Complex, 4>* mat_out = nullptr);

// Full Jacobian: rows = poly equations then word defects (central differences
// for the latter), columns = variables.
CMat jacobian(const EquationSystem& sys, const Assignment& x);

SolutionSet solve_all(const EquationSystem& sys, const SolverConfig& cfg);

// json io for solution sets
std::string dump_solutions(const EquationSystem& sys, const SolutionSet& s);
SolutionSet load_solutions(const EquationSystem& sys, const std::string& text);

}  // namespace tt
