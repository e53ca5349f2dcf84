#include "tt/diagram.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace tt {

using nlohmann::json;

static std::runtime_error bad(const std::string& what) { return std::runtime_error(what); }

int LinkDiagram::crossing_index(const std::string& id) const {
    auto it = cidx_.find(id);
    if (it == cidx_.end()) throw bad("unknown crossing id: " + id);
    return it->second;
}

int LinkDiagram::edge_index(const std::string& id) const {
    auto it = eidx_.find(id);
    if (it == eidx_.end()) throw bad("unknown edge id: " + id);
    return it->second;
}

int LinkDiagram::kappa_prime(int e) const {
    bool from_under = under_at_tail(e);
    bool to_under = under_at_head(e);
    if (from_under && !to_under) return 1;   // under- to overpass
    if (!from_under && to_under) return -1;  // over- to underpass
    return 0;
}

int LinkDiagram::region_left_of(Dart d) const {
    return region_of_dart_[size_t(2 * d.edge + (d.forward ? 0 : 1))];
}

// Dart d ends at (crossing, slot); the region to its left continues with the
// edge at the clockwise-next slot.
static std::pair<int, int> dart_end(const LinkDiagram& D, Dart d) {
    const Edge& e = D.edges[size_t(d.edge)];
    return d.forward ? std::make_pair(e.head_crossing, e.head_slot)
                     : std::make_pair(e.tail_crossing, e.tail_slot);
}

static Dart next_in_face(const LinkDiagram& D, Dart d) {
    auto [c, s] = dart_end(D, d);
    int ns = (s + 3) % 4;
    auto [edge, is_head] = D.crossings[size_t(c)].slots[size_t(ns)];
    return Dart{edge, !is_head};
}

void LinkDiagram::extract_regions() {
    regions.clear();
    region_of_dart_.assign(2 * edges.size(), -1);
    for (size_t e = 0; e < edges.size(); ++e) {
        for (int dir = 0; dir < 2; ++dir) {
            Dart d{int(e), dir == 0};
            if (region_of_dart_[2 * e + size_t(dir)] >= 0) continue;
            Region r;
            Dart cur = d;
            do {
                region_of_dart_[size_t(2 * cur.edge + (cur.forward ? 0 : 1))] = int(regions.size());
                r.darts.push_back(cur);
                r.corner_crossings.push_back(dart_end(*this, cur).first);
                cur = next_in_face(*this, cur);
            } while (!(cur == d));
            // canonical id: lexicographically smallest rotation of the word
            std::vector<std::string> word;
            for (const Dart& dd : r.darts)
                word.push_back(edges[size_t(dd.edge)].id + (dd.forward ? "+" : "-"));
            size_t best = 0;
            for (size_t k = 1; k < word.size(); ++k) {
                for (size_t j = 0; j < word.size(); ++j) {
                    const std::string& a = word[(k + j) % word.size()];
                    const std::string& b = word[(best + j) % word.size()];
                    if (a != b) {
                        if (a < b) best = k;
                        break;
                    }
                }
            }
            std::rotate(r.darts.begin(), r.darts.begin() + long(best), r.darts.end());
            std::rotate(r.corner_crossings.begin(), r.corner_crossings.begin() + long(best),
                        r.corner_crossings.end());
            std::ostringstream os;
            os << "R(";
            for (size_t j = 0; j < word.size(); ++j)
                os << word[(best + j) % word.size()] << (j + 1 < word.size() ? "," : "");
            os << ")";
            r.id = os.str();
            regions.push_back(std::move(r));
        }
    }
    std::vector<int> order(regions.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(),
              [this](int a, int b) { return regions[size_t(a)].id < regions[size_t(b)].id; });
    std::vector<Region> sorted;
    std::vector<int> pos(regions.size());
    for (size_t i = 0; i < order.size(); ++i) {
        pos[size_t(order[i])] = int(i);
        sorted.push_back(regions[size_t(order[i])]);
    }
    regions = std::move(sorted);
    for (auto& r : region_of_dart_) r = pos[size_t(r)];
}

void LinkDiagram::extract_components_and_passes() {
    components.clear();
    passes.clear();
    // strand continuation: edge head (c, s) -> the edge leaving c on the same strand
    auto continuation = [this](int e) {
        const Edge& ed = edges[size_t(e)];
        const Crossing& c = crossings[size_t(ed.head_crossing)];
        int out_slot;
        if (ed.head_slot == 0)
            out_slot = 2;
        else
            out_slot = (ed.head_slot == 1) ? 3 : 1;
        auto [ne, is_head] = c.slots[size_t(out_slot)];
        if (is_head) throw bad("inconsistent strand orientation at crossing " + c.id);
        return ne;
    };
    std::vector<int> comp(edges.size(), -1);
    for (size_t e0 = 0; e0 < edges.size(); ++e0) {
        if (comp[e0] >= 0) continue;
        std::vector<int> walk;
        int e = int(e0);
        do {
            comp[size_t(e)] = int(components.size());
            walk.push_back(e);
            e = continuation(e);
        } while (e != int(e0));
        components.push_back(std::move(walk));
    }
    // over/underpass runs per component
    for (size_t k = 0; k < components.size(); ++k) {
        const auto& walk = components[k];
        for (int over = 1; over >= 0; --over) {
            // break the cyclic walk at junctions where the strand dives under
            // (over-pass runs) resp. climbs over (under-pass runs)
            std::vector<size_t> breaks;  // walk positions i such that the junction
                                         // after walk[i] starts a new pass
            for (size_t i = 0; i < walk.size(); ++i) {
                bool junction_under = under_at_head(walk[i]);
                if ((over && junction_under) || (!over && !junction_under)) breaks.push_back(i);
            }
            if (breaks.empty()) continue;  // strand never dives; no passes of this kind
            for (size_t b = 0; b < breaks.size(); ++b) {
                size_t from = breaks[b];
                size_t to = breaks[(b + 1) % breaks.size()];
                Strandpass p;
                p.over = over == 1;
                p.component = int(k);
                p.start_crossing = edges[size_t(walk[from])].head_crossing;
                size_t i = (from + 1) % walk.size();
                while (true) {
                    p.edges.push_back(walk[i]);
                    if (i == to) break;
                    int c = edges[size_t(walk[i])].head_crossing;
                    p.covered.push_back(c);
                    i = (i + 1) % walk.size();
                }
                p.end_crossing = edges[size_t(walk[to])].head_crossing;
                p.id = std::string(p.over ? "a[" : "b[") + edges[size_t(p.edges[0])].id + "]";
                passes.push_back(std::move(p));
            }
        }
    }
    std::sort(passes.begin(), passes.end(),
              [](const Strandpass& a, const Strandpass& b) { return a.id < b.id; });
}

void LinkDiagram::validate() {
    cidx_.clear();
    eidx_.clear();
    for (size_t i = 0; i < crossings.size(); ++i) {
        if (!cidx_.emplace(crossings[i].id, int(i)).second)
            throw bad("duplicate crossing id: " + crossings[i].id);
        crossings[i].slots.fill({-1, false});
    }
    for (size_t i = 0; i < edges.size(); ++i)
        if (!eidx_.emplace(edges[i].id, int(i)).second)
            throw bad("duplicate edge id: " + edges[i].id);
    if (crossings.empty()) throw bad("no crossings: TT system undefined");

    for (size_t i = 0; i < edges.size(); ++i) {
        Edge& e = edges[i];
        auto fill = [&](int c, int s, bool is_head) {
            if (s < 0 || s > 3) throw bad("bad slot on edge " + e.id);
            auto& slot = crossings[size_t(c)].slots[size_t(s)];
            if (slot.first >= 0)
                throw bad("slot collision at crossing " + crossings[size_t(c)].id + " slot " +
                          std::to_string(s));
            slot = {int(i), is_head};
        };
        fill(e.tail_crossing, e.tail_slot, false);
        fill(e.head_crossing, e.head_slot, true);
        if (e.tail_slot == 0 || e.head_slot == 2)
            throw bad("edge " + e.id + " enters slot 0 / leaves slot 2 against orientation");
    }
    for (const Crossing& c : crossings) {
        for (int s = 0; s < 4; ++s)
            if (c.slots[size_t(s)].first < 0)
                throw bad("dangling edge end: crossing " + c.id + " slot " + std::to_string(s));
        // slots 1,3 carry the overstrand through: exactly one head
        bool h1 = c.slots[1].second, h3 = c.slots[3].second;
        if (h1 == h3) throw bad("overstrand does not pass through crossing " + c.id);
    }

    extract_regions();

    int chi = int(crossings.size()) - int(edges.size()) + int(regions.size());
    int want = ambient.torus ? 0 : 2;
    if (chi != want)
        throw bad("Euler characteristic " + std::to_string(chi) + ", expected " +
                  std::to_string(want));
    if (ambient.torus) {
        for (const Region& r : regions) {
            long wx = 0, wy = 0;
            for (const Dart& d : r.darts) {
                const Edge& e = edges[size_t(d.edge)];
                int s = d.forward ? 1 : -1;
                wx += s * e.wrap[0];
                wy += s * e.wrap[1];
            }
            if (wx != 0 || wy != 0)
                throw bad("non-cellular torus diagram: region " + r.id +
                          " does not lift to a disk");
        }
    }
    extract_components_and_passes();
}

// --- FAL --------------------------------------------------------------------

int FalDiagram::circle_index(const std::string& id) const {
    auto it = cidx_.find(id);
    if (it == cidx_.end()) throw bad("unknown circle id: " + id);
    return it->second;
}

int FalDiagram::segment_index(const std::string& id) const {
    auto it = sidx_.find(id);
    if (it == sidx_.end()) throw bad("unknown segment id: " + id);
    return it->second;
}

// Geometry of one segment end. Local frame: passage 1 sits north of passage 2,
// side l is west. The strand points east along the segment's own frame.
struct EndFrame {
    int passage;      // 1 or 2
    bool aligned;     // circle frame east == segment frame east
};

static EndFrame end_frame(int slot, bool is_head) {
    EndFrame f;
    f.passage = (slot == 0 || slot == 3) ? 1 : 2;
    bool west = (slot == 0 || slot == 1);
    bool east_dir = (is_head && west) || (!is_head && !west);
    f.aligned = east_dir;
    return f;
}

void FalDiagram::build_bowtie() {
    bowtie = BowTieGraph{};
    auto& btg = bowtie;
    for (size_t i = 0; i < circles.size(); ++i)
        btg.vertices.push_back({circles[i].id, BtKind::Circle, int(i), {}});
    int seg0 = int(btg.vertices.size());
    for (size_t i = 0; i < segments.size(); ++i)
        btg.vertices.push_back({segments[i].id, BtKind::Segment, int(i), {}});

    // six arcs per circle
    auto seg_vertex = [&](int c, int q) { return seg0 + circles[size_t(c)].slots[size_t(q)].first; };
    std::vector<std::array<int, 6>> arcs(circles.size());  // 1l 1r 2l 2r 0l 0r
    for (size_t c = 0; c < circles.size(); ++c) {
        const char* names[6] = {"1l", "1r", "2l", "2r", "0l", "0r"};
        int ends_a[6] = {int(c), int(c), int(c), int(c), seg_vertex(int(c), 0), seg_vertex(int(c), 3)};
        int ends_b[6] = {seg_vertex(int(c), 0), seg_vertex(int(c), 3), seg_vertex(int(c), 1),
                         seg_vertex(int(c), 2), seg_vertex(int(c), 1), seg_vertex(int(c), 2)};
        int types[6] = {1, 1, 2, 2, 0, 0};
        int sides[6] = {0, 1, 0, 1, 0, 1};
        for (int k = 0; k < 6; ++k) {
            BtEdge e;
            e.id = circles[c].id + "^" + names[k];
            e.circle = int(c);
            e.type = types[k];
            e.side = sides[k];
            e.ends[0] = (types[k] == 0) ? ends_a[k] : int(c);
            e.ends[1] = ends_b[k];
            arcs[c][size_t(k)] = int(btg.edges.size());
            btg.edges.push_back(e);
        }
    }

    // rotations: circle vertex ccw = [1r, 1l, 2l, 2r]
    for (size_t c = 0; c < circles.size(); ++c)
        btg.vertices[c].rot = {arcs[c][1], arcs[c][0], arcs[c][2], arcs[c][3]};

    // segment vertex ccw = [head-north, tail-north, tail-south, head-south]
    for (size_t s = 0; s < segments.size(); ++s) {
        const FalSegment& sg = segments[s];
        auto arcs_at = [&](int circle, int slot, bool is_head, int& north, int& south) {
            EndFrame f = end_frame(slot, is_head);
            int side = (slot == 0 || slot == 1) ? 0 : 1;
            int passage_arc = arcs[size_t(circle)][size_t((f.passage == 1 ? 0 : 2) + side)];
            int zero_arc = arcs[size_t(circle)][size_t(4 + side)];
            // outward (passage) arc points north in the circle frame iff passage 1
            bool passage_north_circle = f.passage == 1;
            bool passage_north_seg = (passage_north_circle == f.aligned);
            north = passage_north_seg ? passage_arc : zero_arc;
            south = passage_north_seg ? zero_arc : passage_arc;
        };
        int hn, hs, tn, ts;
        arcs_at(sg.head_circle, sg.head_slot, true, hn, hs);
        arcs_at(sg.tail_circle, sg.tail_slot, false, tn, ts);
        btg.vertices[size_t(seg0) + s].rot = {hn, tn, ts, hs};
    }

    // faces of the rotation system (each edge side once); ccw boundaries via
    // "depart at the vertex slot clockwise-next after the arrival slot"
    auto other_end = [&](int e, int v) {
        const BtEdge& be = btg.edges[size_t(e)];
        return be.ends[0] == v ? be.ends[1] : be.ends[0];
    };
    // a directed bt-dart is (source vertex, rotation slot); each is used once
    std::set<std::pair<int, int>> seen;
    for (size_t v0 = 0; v0 < btg.vertices.size(); ++v0) {
        const auto& rot0 = btg.vertices[v0].rot;
        for (size_t k0 = 0; k0 < rot0.size(); ++k0) {
            if (seen.count({int(v0), int(k0)})) continue;
            BtFace f;
            int v = int(v0);
            size_t k = k0;
            do {
                int e = btg.vertices[size_t(v)].rot[k];
                seen.insert({v, int(k)});
                f.edges.push_back(e);
                f.forward.push_back(btg.edges[size_t(e)].ends[0] == v);
                int w = other_end(e, v);
                // arrival occurrence of e in rot(w): for loop edges take the other one
                const auto& rw = btg.vertices[size_t(w)].rot;
                size_t arr = rw.size();
                for (size_t j = 0; j < rw.size(); ++j) {
                    if (rw[j] != e) continue;
                    if (w == v && j == k) continue;
                    arr = j;
                    break;
                }
                if (arr == rw.size()) throw bad("rotation system broken at vertex " +
                                                btg.vertices[size_t(w)].id);
                f.corner_vertices.push_back(w);
                k = (arr + rw.size() - 1) % rw.size();
                v = w;
            } while (!(v == int(v0) && k == k0));
            btg.faces.push_back(std::move(f));
        }
    }

    // classify bow-tie faces: triangles consisting of arcs 1s, 0s, 2s of one circle
    std::vector<int> count_per_circle(circles.size(), 0);
    for (auto& f : btg.faces) {
        if (f.edges.size() != 3) continue;
        const BtEdge& a = btg.edges[size_t(f.edges[0])];
        bool same = true;
        std::set<int> types;
        for (int e : f.edges) {
            const BtEdge& be = btg.edges[size_t(e)];
            same = same && be.circle == a.circle && be.side == a.side;
            types.insert(be.type);
        }
        if (same && types == std::set<int>{0, 1, 2}) {
            f.bowtie = true;
            f.circle = a.circle;
            f.side = a.side;
            count_per_circle[size_t(a.circle)]++;
        }
    }
    for (size_t c = 0; c < circles.size(); ++c)
        if (count_per_circle[c] != 2)
            throw bad("circle " + circles[c].id + " does not bound two bow-tie faces");
}

void FalDiagram::validate() {
    cidx_.clear();
    sidx_.clear();
    for (size_t i = 0; i < circles.size(); ++i)
        if (!cidx_.emplace(circles[i].id, int(i)).second)
            throw bad("duplicate circle id: " + circles[i].id);
    for (size_t i = 0; i < segments.size(); ++i)
        if (!sidx_.emplace(segments[i].id, int(i)).second)
            throw bad("duplicate segment id: " + segments[i].id);
    if (circles.empty()) throw bad("no crossing circles: TT system undefined");

    std::vector<int> tails(segments.size(), 0), heads(segments.size(), 0);
    for (size_t c = 0; c < circles.size(); ++c) {
        for (int q = 0; q < 4; ++q) {
            auto [s, is_head] = circles[c].slots[size_t(q)];
            if (s < 0 || s >= int(segments.size()))
                throw bad("circle " + circles[c].id + " slot " + std::to_string(q) +
                          " references no segment");
            (is_head ? heads : tails)[size_t(s)]++;
            if (is_head) {
                segments[size_t(s)].head_circle = int(c);
                segments[size_t(s)].head_slot = q;
            } else {
                segments[size_t(s)].tail_circle = int(c);
                segments[size_t(s)].tail_slot = q;
            }
        }
    }
    for (size_t s = 0; s < segments.size(); ++s)
        if (tails[s] != 1 || heads[s] != 1)
            throw bad("segment " + segments[s].id + " must attach exactly one tail and one head");

    build_bowtie();
    int chi = bowtie.euler();
    int want = ambient.torus ? 0 : 2;
    if (chi != want)
        throw bad("bow-tie graph Euler characteristic " + std::to_string(chi) + ", expected " +
                  std::to_string(want));
    if (ambient.torus) {
        auto wraps = bowtie_edge_wraps();
        for (const BtFace& f : bowtie.faces) {
            long wx = 0, wy = 0;
            for (size_t i = 0; i < f.edges.size(); ++i) {
                int sgn = f.forward[i] ? 1 : -1;
                wx += sgn * wraps[size_t(f.edges[i])][0];
                wy += sgn * wraps[size_t(f.edges[i])][1];
            }
            if (wx != 0 || wy != 0)
                throw bad("non-cellular torus FAL: a face does not lift to a disk");
        }
    }
}

// Lattice displacement of each bow-tie arc from ends[0] to ends[1], with every
// segment lifted at its tail and every circle lifted at its slot-0 attachment.
std::vector<std::array<int, 2>> FalDiagram::bowtie_edge_wraps() const {
    // lift of the attachment point of arc e at a segment end: anchor + wrap if
    // the end in question is the segment's head
    auto attach_lift = [&](const BtEdge& e, int end_index) -> std::array<int, 2> {
        int v = e.ends[end_index];
        const BtVertex& bv = bowtie.vertices[size_t(v)];
        const FalCircle& fc = circles[size_t(e.circle)];
        // which slot of e.circle does this attachment use?
        int slot = -1;
        if (bv.kind == BtKind::Circle) {
            slot = 0;  // circle anchored at its slot-0 attachment
        } else {
            for (int q = 0; q < 4; ++q) {
                int qside = (q == 0 || q == 1) ? 0 : 1;
                int qpass = (q == 0 || q == 3) ? 1 : 2;
                if (qside != e.side) continue;
                if (e.type != 0 && qpass != e.type) continue;
                if (fc.slots[size_t(q)].first == bv.ref) {
                    slot = q;
                    break;
                }
            }
            if (slot < 0) throw bad("bow-tie arc/slot mismatch at " + bv.id);
            const FalSegment& sg = segments[size_t(bv.ref)];
            bool head_here = fc.slots[size_t(slot)].second;
            std::array<int, 2> a{0, 0};
            if (head_here) a = {sg.wrap[0], sg.wrap[1]};
            return a;
        }
        // circle anchor: the lift of its slot-0 end attachment
        auto [s0, head0] = fc.slots[0];
        std::array<int, 2> a{0, 0};
        if (head0) a = {segments[size_t(s0)].wrap[0], segments[size_t(s0)].wrap[1]};
        (void)slot;
        return a;
    };
    std::vector<std::array<int, 2>> out(bowtie.edges.size());
    for (size_t i = 0; i < bowtie.edges.size(); ++i) {
        const BtEdge& e = bowtie.edges[i];
        auto a = attach_lift(e, 0), b = attach_lift(e, 1);
        out[i] = {b[0] - a[0], b[1] - a[1]};
    }
    return out;
}

RegionGraph region_graph(const BowTieGraph& btg) {
    RegionGraph g;
    std::vector<int> vert_of_face(btg.faces.size(), -1);
    for (size_t f = 0; f < btg.faces.size(); ++f) {
        if (btg.faces[f].bowtie) continue;
        vert_of_face[f] = int(g.face_of_vertex.size());
        g.face_of_vertex.push_back(int(f));
    }
    // per bt-vertex: the (exactly two) non-bow-tie sectors around it
    std::vector<std::vector<int>> sectors(btg.vertices.size());
    for (size_t f = 0; f < btg.faces.size(); ++f) {
        if (btg.faces[f].bowtie) continue;
        for (int v : btg.faces[f].corner_vertices) sectors[size_t(v)].push_back(vert_of_face[f]);
    }
    for (size_t v = 0; v < btg.vertices.size(); ++v) {
        if (sectors[v].size() != 2)
            throw bad("bow-tie vertex " + btg.vertices[v].id +
                      " is not adjacent to exactly two regions");
        g.edges.push_back({sectors[v][0], sectors[v][1]});
        g.btvertex_of_edge.push_back(int(v));
    }
    for (size_t f = 0; f < btg.faces.size(); ++f) {
        if (!btg.faces[f].bowtie) continue;
        std::array<int, 3> tri{};
        for (int i = 0; i < 3; ++i) tri[size_t(i)] = btg.faces[f].corner_vertices[size_t(i)];
        g.faces.push_back(tri);  // entries are bt-vertices = region-graph edges
    }
    return g;
}

// --- JSON parsing ------------------------------------------------------------

static Ambient parse_ambient(const json& j) {
    Ambient a;
    if (j.is_string()) {
        if (j.get<std::string>() != "sphere") throw bad("unknown ambient: " + j.get<std::string>());
        return a;
    }
    if (!j.is_object() || !j.contains("torus")) throw bad("malformed ambient");
    a.torus = true;
    auto p = j.at("torus").at("periods");
    for (int i = 0; i < 2; ++i)
        a.periods[i] = Complex(p.at(i).at(0).get<double>(), p.at(i).at(1).get<double>());
    return a;
}

ParsedDiagram parse_diagram(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw bad(std::string("malformed diagram file: ") + e.what());
    }
    ParsedDiagram out;
    std::string kind = j.value("kind", "link");
    Ambient ambient = parse_ambient(j.at("ambient"));
    int mn[2] = {ambient.torus ? 0 : 1, ambient.torus ? 1 : 0};
    int ms[2] = {mn[0], mn[1]};
    if (j.contains("meridians")) {
        auto& m = j.at("meridians");
        if (m.contains("north")) {
            mn[0] = m.at("north").at(0).get<int>();
            mn[1] = m.at("north").at(1).get<int>();
        }
        if (m.contains("south")) {
            ms[0] = m.at("south").at(0).get<int>();
            ms[1] = m.at("south").at(1).get<int>();
        }
    }

    if (kind == "link") {
        LinkDiagram d;
        d.ambient = ambient;
        d.meridian_class_north[0] = mn[0];
        d.meridian_class_north[1] = mn[1];
        d.meridian_class_south[0] = ms[0];
        d.meridian_class_south[1] = ms[1];
        std::map<std::string, int> cids;
        for (auto& c : j.at("crossings")) {
            Crossing cr;
            cr.id = c.at("id").get<std::string>();
            cids[cr.id] = int(d.crossings.size());
            d.crossings.push_back(cr);
        }
        for (auto& e : j.at("edges")) {
            Edge ed;
            ed.id = e.at("id").get<std::string>();
            auto ref = [&](const json& r, int& c, int& s) {
                auto it = cids.find(r.at(0).get<std::string>());
                if (it == cids.end()) throw bad("edge " + ed.id + " references unknown crossing");
                c = it->second;
                s = r.at(1).get<int>();
            };
            ref(e.at("tail"), ed.tail_crossing, ed.tail_slot);
            ref(e.at("head"), ed.head_crossing, ed.head_slot);
            if (e.contains("wrap")) {
                ed.wrap[0] = e.at("wrap").at(0).get<int>();
                ed.wrap[1] = e.at("wrap").at(1).get<int>();
            }
            ed.flip_label = e.value("flip", false);
            d.edges.push_back(ed);
        }
        d.validate();
        out.link = std::move(d);
        return out;
    }
    if (kind != "fal") throw bad("unknown diagram kind: " + kind);

    FalDiagram d;
    d.ambient = ambient;
    d.meridian_class_north[0] = mn[0];
    d.meridian_class_north[1] = mn[1];
    d.meridian_class_south[0] = ms[0];
    d.meridian_class_south[1] = ms[1];
    auto& f = j.at("fal");
    std::map<std::string, int> sids;
    for (auto& s : f.at("segments")) {
        FalSegment sg;
        sg.id = s.at("id").get<std::string>();
        if (s.contains("wrap")) {
            sg.wrap[0] = s.at("wrap").at(0).get<int>();
            sg.wrap[1] = s.at("wrap").at(1).get<int>();
        }
        sids[sg.id] = int(d.segments.size());
        d.segments.push_back(sg);
    }
    for (auto& c : f.at("circles")) {
        FalCircle fc;
        fc.id = c.at("id").get<std::string>();
        fc.half_twist = c.value("half_twist", false);
        fc.chirality = c.value("chirality", 1);
        auto& slots = c.at("slots");
        if (slots.size() != 4) throw bad("circle " + fc.id + " must list four slots");
        for (int q = 0; q < 4; ++q) {
            auto& sl = slots.at(size_t(q));
            auto it = sids.find(sl.at(0).get<std::string>());
            if (it == sids.end()) throw bad("circle " + fc.id + " slot references unknown segment");
            std::string role = sl.at(1).get<std::string>();
            if (role != "tail" && role != "head") throw bad("slot role must be tail or head");
            fc.slots[size_t(q)] = {it->second, role == "head"};
        }
        d.circles.push_back(fc);
    }
    d.validate();
    out.fal = std::move(d);
    return out;
}

}  // namespace tt
