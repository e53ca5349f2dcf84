#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tt/types.hpp"

namespace tt {

// Slot convention at a crossing, counterclockwise:
//   slot 0 = incoming understrand, slot 2 = outgoing understrand,
//   slots 1 and 3 = the overstrand (one incoming, one outgoing, per edges).
struct Crossing {
    std::string id;
    // slot -> (edge index, true if the edge's head is here)
    std::array<std::pair<int, bool>, 4> slots;
};

struct Edge {
    std::string id;
    int tail_crossing = -1, head_crossing = -1;
    int tail_slot = -1, head_slot = -1;
    int wrap[2] = {0, 0};  // lattice displacement tail -> head (torus only)
    bool flip_label = false;  // label orientation opposite to strand orientation
};

// A dart is a directed traversal of an edge.
struct Dart {
    int edge = -1;
    bool forward = true;
    bool operator==(const Dart& o) const { return edge == o.edge && forward == o.forward; }
};

// One region: counterclockwise boundary word d_1 c_1 d_2 c_2 ... where d_i are
// darts and c_i the crossing between d_i and d_{i+1}.
struct Region {
    std::string id;
    std::vector<Dart> darts;
    std::vector<int> corner_crossings;
    size_t size() const { return darts.size(); }
};

// Maximal over- or underpass run of edges along a component.
struct Strandpass {
    std::string id;
    bool over = true;               // overpass (true) or underpass
    int component = -1;
    std::vector<int> edges;         // in strand order; empty never happens
    std::vector<int> covered;       // crossings run over (resp. under), in order
    int start_crossing = -1;        // crossing where the pass begins (strand dives)
    int end_crossing = -1;
};

struct Ambient {
    bool torus = false;
    Complex periods[2] = {Complex(1, 0), Complex(0, 1)};
};

class LinkDiagram {
public:
    Ambient ambient;
    std::vector<Crossing> crossings;
    std::vector<Edge> edges;
    std::vector<Region> regions;                 // filled by validate()
    std::vector<std::vector<int>> components;    // edge indices per component
    std::vector<Strandpass> passes;              // overpasses then underpasses
    int meridian_class_north[2] = {1, 0};
    int meridian_class_south[2] = {1, 0};

    int crossing_index(const std::string& id) const;
    int edge_index(const std::string& id) const;

    // edge role at one of its ends
    bool under_at_tail(int e) const { return edges[e].tail_slot == 2; }
    bool under_at_head(int e) const { return edges[e].head_slot == 0; }
    // kappa' of Eq. u_{e,R} - u_{e,L} = kappa' kappa''
    int kappa_prime(int e) const;
    int kappa_second(int e) const { return edges[e].flip_label ? -1 : 1; }

    // Region to the left of the dart (region containing that dart in its word).
    int region_left_of(Dart d) const;

    // Derived checks; throws std::runtime_error with the offending id.
    void validate();

private:
    std::map<std::string, int> cidx_, eidx_;
    std::vector<int> region_of_dart_;  // indexed 2*edge + (forward?0:1)
    void extract_regions();
    void extract_components_and_passes();
};

// --- fully augmented links -------------------------------------------------

// A crossing circle: four segment-end slots in ccw order around the circle,
// [P1-left, P2-left, P2-right, P1-right]; slots 0/3 are the two ends meeting
// at passage 1, slots 1/2 at passage 2.
struct FalCircle {
    std::string id;
    std::array<std::pair<int, bool>, 4> slots;  // (segment index, true if segment head)
    bool half_twist = false;
    int chirality = +1;
};

struct FalSegment {
    std::string id;
    // tail = start of the oriented segment, at (circle index, slot)
    int tail_circle = -1, tail_slot = -1;
    int head_circle = -1, head_slot = -1;
    int wrap[2] = {0, 0};
};

// Bow-tie graph vertex kinds.
enum class BtKind { Circle, Segment };

struct BtVertex {
    std::string id;
    BtKind kind;
    int ref;                       // circle or segment index
    std::vector<int> rot;          // incident bt-edge indices, ccw
};

// Arc types match the paper's naming: type 0 joins the two strands through a
// spanning disk, types 1 and 2 join circle to strand at passages 1 and 2.
struct BtEdge {
    std::string id;
    int circle;      // owning circle
    int type;        // 0, 1, 2
    int side;        // 0 = l, 1 = r
    int ends[2];     // bt-vertex indices; for type 1/2 ends[0] is the circle
};

struct BtFace {
    std::vector<int> edges;      // ccw boundary, as directed bt-edge slots
    std::vector<bool> forward;
    std::vector<int> corner_vertices;
    bool bowtie = false;
    int circle = -1;             // for bow-tie faces
    int side = -1;
};

struct BowTieGraph {
    std::vector<BtVertex> vertices;
    std::vector<BtEdge> edges;
    std::vector<BtFace> faces;
    int euler() const { return int(vertices.size()) - int(edges.size()) + int(faces.size()); }
};

struct RegionGraph {
    // vertex v <-> non-bow-tie face btg.faces[face_of_vertex[v]]
    std::vector<int> face_of_vertex;
    std::vector<std::array<int, 2>> edges;   // one per bt-vertex, joins two regions
    std::vector<int> btvertex_of_edge;
    std::vector<std::array<int, 3>> faces;   // triangles <-> bow-tie faces
};

class FalDiagram {
public:
    Ambient ambient;
    std::vector<FalCircle> circles;
    std::vector<FalSegment> segments;
    BowTieGraph bowtie;
    int meridian_class_north[2] = {1, 0};
    int meridian_class_south[2] = {1, 0};

    int circle_index(const std::string& id) const;
    int segment_index(const std::string& id) const;

    void validate();  // builds the bow-tie graph and checks Euler characteristic

    // Lattice wrap of each bow-tie arc, ends[0] -> ends[1] (torus ambient).
    std::vector<std::array<int, 2>> bowtie_edge_wraps() const;

private:
    std::map<std::string, int> cidx_, sidx_;
    void build_bowtie();
};

RegionGraph region_graph(const BowTieGraph& btg);

// Parses the JSON interchange format; throws std::runtime_error on bad input.
struct ParsedDiagram {
    std::optional<LinkDiagram> link;
    std::optional<FalDiagram> fal;
};
ParsedDiagram parse_diagram(const std::string& text);

}  // namespace tt
