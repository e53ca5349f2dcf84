#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tt/diagram.hpp"
#include "tt/types.hpp"

namespace tt {

enum class VarKind { Crossing, EdgeLabel, Aux };

struct Variable {
    std::string id;
    VarKind kind;
};

enum class TubeKind { Component, North, South, FalCircle };

struct Tube {
    std::string id;
    TubeKind kind;
    std::vector<int> points;
    int tau = -1;                  // longitude translation (component tubes)
    int tau_xy[2] = {-1, -1};      // lattice translations (north/south tubes)
    int ref = -1;                  // component index / -1
};

struct PeriPoint {
    std::string id;
    int tube = -1;
};

// Kinds of peripheral edges; OldSide are the classical u_{e,R}/u_{e,L}.
enum class EpsKind {
    OldSide,      // link diagrams: alongside a diagram edge
    EndType,      // from p_a to the pass's end crossing, along the strand
    OverType,     // from p_a around to p_c on the far side (l/r pair)
    NEdge,        // on a north/south tube, truncation of a vertical face
    FalZero,      // e_i^0 on a circle tube
    FalMu,        // e_i^{mu 1|2}: meridian loop on a circle tube, value 1
    FalHalf,      // e_i^{1|2, top|bottom}: half-meridian at a disk passage
    FalLong,      // e_j^{l|r}: along a segment
    FalVert,      // T^2 FAL vertical-face truncations off the north/south tubes
};

struct Eps {
    std::string id;
    EpsKind kind = EpsKind::OldSide;
    int var = -1;
    int tube = -1;
    int tail = -1, head = -1;     // PeriPoint indices
    double w_mu = 0.0;            // meridian winding (meridian translates by +1)
    int w_lam = 0;                // tube longitude winding
    int w_xy[2] = {0, 0};         // lattice winding (north/south tubes)
    bool constant_one = false;    // FalMu edges: value pinned to 1
    // provenance handles
    int diagram_edge = -1;        // OldSide
    int side = -1;                // 0 = left of the strand / l; 1 = right / r
    int pass = -1;                // EndType/OverType: strandpass index
    int crossing = -1;
};

struct Arc {
    std::string id;
    int var = -1;
    int endpoint[2] = {-1, -1};   // PeriPoint indices
    int crossing = -1;            // diagram crossing (gamma_c) or -1
    int pass = -1;                // vertical arc of a strandpass, or -1
    int fal_circle = -1, fal_type = -1;  // FAL arcs gamma_i^{0,1,2}
    bool vertical_circle = false;        // gamma_{C_i} / gamma_{a_j} (T^2 FAL)
};

enum class CellKind { Regional, Vertical, Spanning };

// 2-cell boundary: cyclically corner_0 side_0 corner_1 side_1 ...; corner i
// sits between side i-1 and side i. Corners carry the traversal direction of
// the peripheral edge relative to its canonical orientation.
struct Cell {
    std::string id;
    CellKind kind = CellKind::Regional;
    std::vector<int> sides;            // Arc indices
    std::vector<int> corners;          // Eps indices
    std::vector<bool> corner_forward;  // traversed tail->head?
    int region = -1;                   // diagram region (Regional cells)
    int fal_face = -1;                 // bow-tie face (FAL regional cells)
    size_t size() const { return sides.size(); }
};

// A full inventory of label-bearing objects plus the consistency data the
// equation generator and the geometry stages need.
struct PeripheralStructure {
    std::vector<Variable> vars;
    std::vector<Tube> tubes;
    std::vector<PeriPoint> points;
    std::vector<Eps> eps;
    std::vector<Arc> arcs;
    std::vector<Cell> cells;
    std::vector<int> point_z;  // aux variable per point

    std::optional<LinkDiagram> link;
    std::optional<FalDiagram> fal;

    // link diagrams: junction point / pass base point lookups
    std::map<std::pair<int, int>, int> junction_point;    // (component, junction) -> point
    std::map<int, int> pass_point;                        // pass -> base point
    std::map<int, int> pass_npoint;                       // pass -> north/south point
    std::map<int, int> pass_arc;                          // pass -> vertical arc
    std::map<int, int> crossing_arc;                      // crossing -> arc
    std::map<std::pair<int, int>, int> old_eps;           // (edge, side) -> eps
    std::map<std::pair<int, int>, int> wall_cell;         // (crossing, corridor edge) -> cell
    // region walk at the north (over) / south (under) tube: per region, the
    // cyclic list of (pass, N-eps, forward) entries tracing the cone polygon
    struct WallStep {
        int pass;       // base vertex reached after this wall
        int n_eps;
        bool forward;
        int wall;       // cell index
    };
    std::vector<std::vector<WallStep>> region_walk_north, region_walk_south;

    // FAL lookups
    std::map<std::pair<int, int>, int> fal_arc;           // (circle, type) -> arc  (S^3 part)
    std::map<std::pair<int, int>, int> fal_half_eps;      // (passage id, top?) -> eps
    std::map<std::pair<int, int>, int> fal_long_eps;      // (segment, north?) -> eps
    std::map<int, int> fal_zero_eps;                      // circle -> eps
    std::map<std::pair<int, int>, int> fal_mu_eps;        // (circle, 1|2) -> eps
    std::map<int, int> btface_cell;                       // bow-tie regional face -> cell

    int n_label_vars = 0;  // vars[0..n) are labels; the rest are aux

    int add_var(const std::string& id, VarKind k);
    int add_point(const std::string& id, int tube);
    int add_tube(const std::string& id, TubeKind k, int ref = -1);

    // normalization rows: sum_i coeff_i * var_i = rhs; a nonzero rhs scales
    // with the gauge factor of scale_tube
    struct LinearRow {
        std::vector<std::pair<int, Complex>> terms;
        Complex rhs;
        std::string tag;
        std::string scale_tube;
    };
    std::vector<LinearRow> normalizations;
};

PeripheralStructure build_structure(const LinkDiagram& d);
PeripheralStructure build_structure(const FalDiagram& d);

}  // namespace tt
