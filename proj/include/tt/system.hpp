#pragma once

#include <map>
#include <string>
#include <vector>

#include "tt/poly.hpp"
#include "tt/structure.hpp"

namespace tt {

struct PolyEquation {
    Poly poly;        // == 0
    std::string tag;  // edge | region | vertical | normalization | boundary | gauge
    std::string cell;
};

// Token of a projective matrix word: an arc (inversion, W = (0 w; 1 0)) or a
// peripheral edge (translation, W = (1 -u; 0 1)), u negated when backward.
struct WordToken {
    bool is_arc;
    int var;
    bool forward = true;
};

struct MatrixWord {
    std::string cell;
    std::vector<WordToken> tokens;  // traversal order
};

struct EquationSystem {
    std::vector<Variable> vars;
    int n_label_vars = 0;
    std::vector<PolyEquation> equations;
    std::vector<MatrixWord> words;

    int var_index(const std::string& id) const;
    std::string dump_json() const;
    static EquationSystem load_json(const std::string& text);
};

// Per-tube gauge scalars nu (default 1); scales the meridian constants the way
// a change of peripheral horosphere does.
EquationSystem build_system(const PeripheralStructure& ps,
                            const std::map<std::string, Complex>& nu = {});

// The three region polynomials of a 2-cell (shift = 0, +1, -1), cleared of
// denominators. Cells of size < 3 get the projective matrix conditions instead.
std::vector<Poly> cell_region_polys(const PeripheralStructure& ps, const Cell& cell);

// A label assignment is just a value per variable (aux included).
using Assignment = std::vector<Complex>;

Complex eval_shape(const PeripheralStructure& ps, const Cell& cell, size_t side_index,
                   const Assignment& x);

// nu is indexed by tube id; returns the rescaled assignment.
Assignment gauge_rescale(const PeripheralStructure& ps, const Assignment& x,
                         const std::map<std::string, Complex>& nu);

}  // namespace tt
