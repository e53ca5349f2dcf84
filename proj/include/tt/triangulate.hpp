#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tt/structure.hpp"
#include "tt/words.hpp"

namespace tt {

// Ideal triangulation with developed vertex placements per tetrahedron.
struct PiecewiseGeometry {
    struct Tet {
        std::array<PPoint, 4> z;
        std::array<std::string, 4> cusp;  // cusp / ideal-vertex names, for reports
        std::string tag;
    };
    struct Gluing {
        int t1;
        std::array<int, 3> f1;  // local vertex indices, f1[i] glued to f2[i]
        int t2;
        std::array<int, 3> f2;
    };
    std::vector<Tet> tets;
    std::vector<Gluing> gluings;

    // oriented shape parameter along the edge (a, b) of tet t
    Complex shape(int t, int a, int b, bool* degenerate = nullptr) const;

    struct EdgeClass {
        std::vector<std::pair<int, std::pair<int, int>>> members;  // (tet, edge)
        Complex product{1.0, 0.0};
        double arg_sum = 0.0;
        bool degenerate = false;
    };
    std::vector<EdgeClass> edge_classes() const;
};

struct WeakGluingReport {
    struct Entry {
        double defect;  // |prod zeta - 1|
        size_t size;
        bool degenerate;
    };
    std::vector<Entry> classes;
    double worst = 0.0;     // over nondegenerate classes
    int degenerate_classes = 0;
    bool pass(double tol = 1e-8) const { return worst <= tol; }
};
WeakGluingReport check_weak_gluing(const PiecewiseGeometry& pg);

struct StrongGluingReport {
    bool pass = false;
    int real_or_infinite = 0;   // offending shapes
    double worst_angle_defect = 0.0;  // | |sum arg| - 2pi |
    std::string reason;
};
StrongGluingReport check_strong_gluing(const PiecewiseGeometry& pg, double tol = 1e-8);

struct OrientationReport {
    bool geometric = false;   // every shape has imaginary part < -tol
    bool reversed = false;    // every shape has imaginary part > +tol
    int flat = 0;             // |Im| <= tol
    int marginal = 0;         // tol < |Im| <= marginal band
    std::string offender;
};
OrientationReport is_geometric_by_orientation(const PiecewiseGeometry& pg, double tol = 1e-8,
                                              double marginal = 1e-4);

// Conical triangulations of the corpus decompositions, with shapes developed
// from a solution. Torus link diagrams use the two torihedra; sphere link
// diagrams and FALs use the two balls coned from an ideal vertex.
PiecewiseGeometry induced_geometry_link(const PeripheralStructure& ps, const Assignment& x);
PiecewiseGeometry induced_geometry_fal(const PeripheralStructure& ps, const Assignment& x,
                                       int apex_btvertex = 0);

// Developed boundary of one FAL ball: positions per bow-tie face corner.
struct DevelopedComplex {
    std::vector<std::vector<PPoint>> corners;  // indexed by bow-tie face
    std::vector<Mat2> frames;
    bool bottom = false;
};
DevelopedComplex develop_fal_ball(const PeripheralStructure& ps, const Assignment& x,
                                  bool bottom, int apex_btvertex = 0, int reference_rot = 0);

// Developed polygon of a region on the north/south tube of a torus link.
std::vector<PPoint> develop_region_polygon(const PeripheralStructure& ps, const Assignment& x,
                                           int region, bool north);

// cusp shape: sum of edge labels along a longitude word (eps index, forward)
Complex cusp_shape(const PeripheralStructure& ps, const Assignment& x,
                   const std::vector<std::pair<int, bool>>& word);
// canonical longitude translation of a component tube
Complex cusp_shape_component(const PeripheralStructure& ps, const Assignment& x, int component);

}  // namespace tt
