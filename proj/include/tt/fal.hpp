#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tt/circles.hpp"
#include "tt/structure.hpp"
#include "tt/system.hpp"

namespace tt {

// Circles indexed by region-graph vertices (the non-bow-tie faces of the
// bow-tie graph, in face order), tangencies by bow-tie vertices.
struct CirclePacking {
    std::vector<GeneralizedCircle> circles;
    std::vector<int> btface_of_circle;
    std::vector<PPoint> tangencies;      // per bow-tie vertex
    std::vector<int> filling;            // interior side per circle (+1/-1), may be empty
    bool torus = false;
    Complex lattice[2] = {0.0, 0.0};
};

struct CriterionReport {
    bool pass = true;
    std::vector<std::string> offenders;
    void fail(const std::string& what) {
        pass = false;
        offenders.push_back(what);
    }
};

struct FalCriteriaReport {
    CriterionReport pure_imag, orientation, shape_range;
    bool verdict() const { return pure_imag.pass && orientation.pass && shape_range.pass; }
};

CriterionReport check_pure_imag(const PeripheralStructure& ps, const Assignment& x,
                                double tol = 1e-8);
CriterionReport check_orientation(const PeripheralStructure& ps, const Assignment& x,
                                  double tol = 1e-8);
CriterionReport check_shape_range(const PeripheralStructure& ps, const Assignment& x,
                                  double tol = 1e-8);
FalCriteriaReport fal_criteria(const PeripheralStructure& ps, const Assignment& x,
                               double tol = 1e-8);
bool is_geometric_fal(const PeripheralStructure& ps, const Assignment& x, double tol = 1e-8);

struct PackingResult {
    CirclePacking packing;
    double circumfit_residual = 0.0;   // worst region circle fit
    double tangency_defect = 0.0;      // worst pencil residual over region-graph edges
    bool ok = false;
    std::string error;
};
PackingResult solution_to_packing(const PeripheralStructure& ps, const Assignment& x);

// Converse construction; aux_residual reports how well the linear boundary
// consistency system is satisfied by the derived labels.
Assignment packing_to_solution(const CirclePacking& pk, const PeripheralStructure& ps,
                               double* aux_residual = nullptr);

struct UnivalenceReport {
    bool order_preserving = false;
    bool locally_univalent = false;
    bool univalent = false;           // via the local criteria (lemma)
    bool univalent_bruteforce = false;  // all-pairs interior disjointness
    std::vector<int> filling;
};
UnivalenceReport check_univalence(const CirclePacking& pk, const PeripheralStructure& ps);

std::string packing_to_json(const CirclePacking& pk, const PeripheralStructure& ps);
CirclePacking packing_from_json(const std::string& text, const PeripheralStructure& ps);
std::string packing_svg(const CirclePacking& pk, const PeripheralStructure& ps);

}  // namespace tt
