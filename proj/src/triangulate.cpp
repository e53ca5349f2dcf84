#include "tt/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

namespace tt {

static std::runtime_error bad(const std::string& w) { return std::runtime_error(w); }

// --- shapes and reports ------------------------------------------------------

Complex PiecewiseGeometry::shape(int t, int a, int b, bool* degenerate) const {
    int c = -1, d = -1;
    for (int i = 0; i < 4; ++i)
        if (i != a && i != b) (c < 0 ? c : d) = i;
    int perm[4] = {c, a, b, d};
    int inv = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (perm[i] > perm[j]) ++inv;
    if (inv % 2) std::swap(c, d);
    const Tet& T = tets[size_t(t)];
    return cross_ratio(T.z[size_t(c)], T.z[size_t(a)], T.z[size_t(b)], T.z[size_t(d)],
                       degenerate);
}

std::vector<PiecewiseGeometry::EdgeClass> PiecewiseGeometry::edge_classes() const {
    static const int idx[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    static const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    auto eid = [&](int t, int a, int b) { return t * 6 + idx[a][b]; };
    std::vector<int> parent(tets.size() * 6);
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = int(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[size_t(x)] != x) x = parent[size_t(x)] = parent[size_t(parent[size_t(x)])];
        return x;
    };
    for (const Gluing& g : gluings)
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                int a = find(eid(g.t1, g.f1[size_t(i)], g.f1[size_t(j)]));
                int b = find(eid(g.t2, g.f2[size_t(i)], g.f2[size_t(j)]));
                parent[size_t(a)] = b;
            }
    std::map<int, EdgeClass> classes;
    for (size_t t = 0; t < tets.size(); ++t)
        for (int k = 0; k < 6; ++k)
            classes[find(int(t) * 6 + k)].members.push_back({int(t), {pairs[k][0], pairs[k][1]}});
    std::vector<EdgeClass> out;
    for (auto& [root, ec] : classes) {
        for (auto [t, e] : ec.members) {
            bool degen = false;
            Complex z = shape(t, e.first, e.second, &degen);
            if (degen || !std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
                std::abs(z) < 1e-12 || std::abs(z) > 1e12) {
                ec.degenerate = true;
            } else {
                ec.product *= z;
                ec.arg_sum += std::arg(z);
            }
        }
        out.push_back(std::move(ec));
    }
    return out;
}

WeakGluingReport check_weak_gluing(const PiecewiseGeometry& pg) {
    WeakGluingReport r;
    for (const auto& ec : pg.edge_classes()) {
        WeakGluingReport::Entry e;
        e.size = ec.members.size();
        e.degenerate = ec.degenerate;
        e.defect = std::abs(ec.product - Complex(1.0));
        r.classes.push_back(e);
        if (ec.degenerate)
            ++r.degenerate_classes;
        else
            r.worst = std::max(r.worst, e.defect);
    }
    return r;
}

StrongGluingReport check_strong_gluing(const PiecewiseGeometry& pg, double tol) {
    StrongGluingReport r;
    r.pass = true;
    for (const auto& ec : pg.edge_classes()) {
        if (ec.degenerate) {
            r.pass = false;
            ++r.real_or_infinite;
            if (r.reason.empty()) r.reason = "infinite or indeterminate shape parameter";
            continue;
        }
        for (auto [t, e] : ec.members) {
            Complex z = pg.shape(t, e.first, e.second);
            if (std::abs(z.imag()) <= tol * std::max(1.0, std::abs(z))) {
                ++r.real_or_infinite;
                r.pass = false;
                if (r.reason.empty()) r.reason = "real shape parameter";
            }
        }
        // The lifted arguments must make exactly one turn around the edge; the
        // turn is negative under the orientation convention used for shapes
        // here. This is the unfolding (local degree 1) condition seen from the
        // peripheral tori.
        double defect = std::abs(std::abs(ec.arg_sum) - 2 * M_PI);
        r.worst_angle_defect = std::max(r.worst_angle_defect, defect);
        if (defect > tol) {
            r.pass = false;
            if (r.reason.empty()) r.reason = "argument sum is not one full turn";
        }
    }
    return r;
}

OrientationReport is_geometric_by_orientation(const PiecewiseGeometry& pg, double tol,
                                              double marginal) {
    OrientationReport r;
    bool all_neg = true, all_pos = true;
    for (size_t t = 0; t < pg.tets.size(); ++t) {
        static const int pairs[3][2] = {{0, 1}, {0, 2}, {0, 3}};
        for (auto& p : pairs) {
            bool degen = false;
            Complex z = pg.shape(int(t), p[0], p[1], &degen);
            double im = z.imag();
            if (degen || std::abs(im) <= tol) {
                ++r.flat;
                all_neg = all_pos = false;
                if (r.offender.empty()) r.offender = pg.tets[t].tag;
                continue;
            }
            if (std::abs(im) <= marginal) ++r.marginal;
            if (im > 0) {
                all_neg = false;
                if (r.offender.empty()) r.offender = pg.tets[t].tag;
            } else {
                all_pos = false;
            }
        }
    }
    r.geometric = all_neg && r.flat == 0;
    r.reversed = all_pos && r.flat == 0;
    return r;
}

// --- cusp shapes ---------------------------------------------------------------

Complex cusp_shape(const PeripheralStructure& ps, const Assignment& x,
                   const std::vector<std::pair<int, bool>>& word) {
    if (word.empty()) throw bad("empty longitude word");
    Complex sum = 0.0;
    int at = -1;
    for (auto [e, fwd] : word) {
        const Eps& ep = ps.eps[size_t(e)];
        int from = fwd ? ep.tail : ep.head;
        int to = fwd ? ep.head : ep.tail;
        if (at >= 0 && at != from) throw bad("longitude word endpoints mismatch at " + ep.id);
        at = to;
        sum += (fwd ? 1.0 : -1.0) * x[size_t(ep.var)];
    }
    int start = word[0].second ? ps.eps[size_t(word[0].first)].tail
                               : ps.eps[size_t(word[0].first)].head;
    if (at != start) throw bad("longitude word does not close up");
    return sum;
}

Complex cusp_shape_component(const PeripheralStructure& ps, const Assignment& x, int component) {
    for (const Tube& t : ps.tubes)
        if (t.kind == TubeKind::Component && t.ref == component && t.tau >= 0)
            return x[size_t(t.tau)];
    throw bad("component tube has no longitude translation");
}

// --- torus link torihedra -------------------------------------------------------

std::vector<PPoint> develop_region_polygon(const PeripheralStructure& ps, const Assignment& x,
                                           int region, bool north) {
    const auto& walk = (north ? ps.region_walk_north : ps.region_walk_south)[size_t(region)];
    std::vector<PPoint> out;
    Complex acc = 0.0;
    for (const auto& st : walk) {
        acc += (st.forward ? 1.0 : -1.0) * x[size_t(ps.eps[size_t(st.n_eps)].var)];
        out.push_back(PPoint::at(acc));
    }
    return out;
}

namespace {

struct FanLayout {
    int first_tet = -1;
    int m = 0;
    bool mirrored = false;
    int local_of(int j, int v) const {
        if (v == 0) return 1;
        if (v == j) return mirrored ? 3 : 2;
        if (v == j + 1) return mirrored ? 2 : 3;
        return -1;
    }
    std::pair<int, std::pair<int, int>> boundary_edge(int k) const {
        int j = k == 0 ? 1 : (k == m - 1 ? m - 2 : k);
        int va = k == 0 ? 0 : k;
        int vb = k == m - 1 ? 0 : k + 1;
        return {first_tet + j - 1, {local_of(j, va), local_of(j, vb)}};
    }
};

PiecewiseGeometry torus_link_geometry(const PeripheralStructure& ps, const Assignment& x) {
    const LinkDiagram& d = *ps.link;
    PiecewiseGeometry pg;
    std::map<std::pair<int, bool>, FanLayout> fans;
    for (int north = 1; north >= 0; --north) {
        for (size_t r = 0; r < d.regions.size(); ++r) {
            const auto& walk = (north ? ps.region_walk_north : ps.region_walk_south)[r];
            size_t m = walk.size();
            if (m != d.regions[r].size())
                throw bad("triangulation needs an alternating diagram (region " +
                          d.regions[r].id + ")");
            auto pos = develop_region_polygon(ps, x, int(r), north == 1);
            FanLayout f;
            f.first_tet = int(pg.tets.size());
            f.m = int(m);
            f.mirrored = north == 0;
            for (size_t j = 1; j + 1 < m; ++j) {
                PiecewiseGeometry::Tet t;
                t.z[0] = PPoint::infinity();
                t.z[1] = pos[0];
                t.z[2] = north ? pos[j] : pos[j + 1];
                t.z[3] = north ? pos[j + 1] : pos[j];
                auto pass_name = [&](size_t k) { return d.passes[size_t(walk[k].pass)].id; };
                t.cusp = {north ? "*N" : "*S", pass_name(0), pass_name(north ? j : j + 1),
                          pass_name(north ? j + 1 : j)};
                t.tag = d.regions[r].id + (north ? "|N" : "|S") + "#" + std::to_string(j);
                pg.tets.push_back(t);
            }
            for (size_t j = 1; j + 2 < m; ++j) {
                PiecewiseGeometry::Gluing g;
                g.t1 = f.first_tet + int(j) - 1;
                g.t2 = f.first_tet + int(j);
                g.f1 = {0, 1, f.mirrored ? 2 : 3};
                g.f2 = {0, 1, f.mirrored ? 3 : 2};
                pg.gluings.push_back(g);
            }
            fans[{int(r), north == 1}] = f;
        }
    }
    // vertical walls: every wall cell occurs in exactly two region walks
    std::map<int, std::vector<std::tuple<int, bool, int, bool>>> wall_uses;
    for (int north = 1; north >= 0; --north)
        for (size_t r = 0; r < d.regions.size(); ++r) {
            const auto& walk = (north ? ps.region_walk_north : ps.region_walk_south)[r];
            for (size_t k = 0; k < walk.size(); ++k)
                wall_uses[walk[k].wall].push_back({int(r), north == 1, int(k), walk[k].forward});
        }
    for (auto& [wall, uses] : wall_uses) {
        if (uses.size() != 2) throw bad("vertical wall not shared by two region walks");
        auto [r1, n1, k1, fw1] = uses[0];
        auto [r2, n2, k2, fw2] = uses[1];
        if (fw1 == fw2) throw bad("vertical wall traversed twice in one direction");
        const FanLayout& f1 = fans.at({r1, n1});
        const FanLayout& f2 = fans.at({r2, n2});
        auto [t1, e1] = f1.boundary_edge((k1 + f1.m - 1) % f1.m);
        auto [t2, e2] = f2.boundary_edge((k2 + f2.m - 1) % f2.m);
        PiecewiseGeometry::Gluing g;
        g.t1 = t1;
        g.t2 = t2;
        g.f1 = {0, e1.first, e1.second};
        g.f2 = {0, e2.second, e2.first};
        pg.gluings.push_back(g);
    }
    // regional faces join the two torihedra fan by fan
    for (size_t r = 0; r < d.regions.size(); ++r) {
        const FanLayout& fn = fans.at({int(r), true});
        const FanLayout& fs = fans.at({int(r), false});
        for (int j = 1; j + 1 < fn.m; ++j) {
            PiecewiseGeometry::Gluing g;
            g.t1 = fn.first_tet + j - 1;
            g.t2 = fs.first_tet + j - 1;
            g.f1 = {1, 2, 3};
            g.f2 = {1, 3, 2};
            pg.gluings.push_back(g);
        }
    }
    return pg;
}

// --- coned balls (sphere links, FALs) -------------------------------------------

// One boundary-face instance of a coned ball.
struct FaceInst {
    const Cell* cell = nullptr;
    bool bottom = false;
    bool mirror = false;  // cell-word orientation opposite the ball boundary
    std::vector<int> cusp;                  // per cell vertex: 0-cell key
    std::vector<std::pair<int, int>> adj;   // per side k: (instance, their side)
    int partner = -1;
    int anchor = 0;
    std::vector<PPoint> pos;
    Mat2 frame;
    bool placed = false;
    std::vector<int> tet_of_tri;            // fan triangle -> tet or -1
    std::string name;
};

struct BallComplex {
    const PeripheralStructure* ps;
    const Assignment* x;
    std::vector<FaceInst> faces;
    int apex_top = -1, apex_bottom = -1;    // 0-cell keys

    int apex_of(const FaceInst& f) const { return f.bottom ? apex_bottom : apex_top; }

    Mat2 eps_matrix(const Cell& c, size_t k) const {
        const Eps& e = ps->eps[size_t(c.corners[k])];
        return Mat2::edge((c.corner_forward[k] ? 1.0 : -1.0) * (*x)[size_t(e.var)]);
    }
    Mat2 arc_matrix(const Cell& c, size_t k) const {
        return Mat2::arc((*x)[size_t(ps->arcs[size_t(c.sides[k])].var)]);
    }
    void prefixes(const Cell& c, std::vector<Mat2>& S, std::vector<Mat2>& T) const {
        size_t n = c.size();
        S.assign(n + 1, Mat2::id());
        T.assign(n, Mat2::id());
        for (size_t k = 0; k < n; ++k) {
            T[k] = eps_matrix(c, k) * S[k];
            S[k + 1] = arc_matrix(c, k) * T[k];
        }
    }
    // peripheral point where corner k meets side k's arc
    int side_entry_point(const Cell& c, size_t k) const {
        const Eps& e = ps->eps[size_t(c.corners[k])];
        return c.corner_forward[k] ? e.head : e.tail;
    }

    void develop() {
        for (int bottom = 0; bottom < 2; ++bottom) {
            int apex = bottom ? apex_bottom : apex_top;
            int root = -1, root_k = -1;
            for (size_t f = 0; f < faces.size() && root < 0; ++f) {
                if (faces[f].bottom != (bottom == 1)) continue;
                for (size_t k = 0; k < faces[f].cusp.size(); ++k)
                    if (faces[f].cusp[k] == apex) {
                        root = int(f);
                        root_k = int(k);
                        break;
                    }
            }
            if (root < 0) throw bad("cone apex misses the ball boundary");
            std::vector<Mat2> S, T;
            prefixes(*faces[size_t(root)].cell, S, T);
            faces[size_t(root)].frame = S[size_t(root_k)].inverse_projective();
            faces[size_t(root)].placed = true;
            std::deque<int> q{root};
            while (!q.empty()) {
                int fi = q.front();
                q.pop_front();
                FaceInst& F = faces[size_t(fi)];
                prefixes(*F.cell, S, T);
                size_t n = F.cell->size();
                // global position of corner k: (S_k A_F)^{-1} (inf)
                F.pos.resize(n);
                for (size_t k = 0; k < n; ++k)
                    F.pos[k] = apply((S[k] * F.frame).inverse_projective(), PPoint::infinity());
                for (size_t k = 0; k < n; ++k) {
                    auto [g, gk] = F.adj[k];
                    if (g < 0 || faces[size_t(g)].placed) continue;
                    FaceInst& G = faces[size_t(g)];
                    std::vector<Mat2> S2, T2;
                    prefixes(*G.cell, S2, T2);
                    int p_mine = side_entry_point(*F.cell, k);
                    int p_theirs = side_entry_point(*G.cell, size_t(gk));
                    // state X: based path ending at the shared arc's endpoint on
                    // my vertex-k cusp (after the corner eps of side k)
                    Mat2 X = T[k] * F.frame;
                    Mat2 Y = (p_theirs == p_mine)
                                 ? T2[size_t(gk)]
                                 : S2[size_t(gk) + 1];
                    G.frame = Y.inverse_projective() * X;
                    G.placed = true;
                    q.push_back(g);
                }
            }
        }
    }
};

// assemble tets, flat-cone identifications and gluings of both coned balls
PiecewiseGeometry assemble_balls(BallComplex& B) {
    PiecewiseGeometry pg;
    B.develop();
    // anchors per partner pair: prefer an apex corner
    for (size_t fi = 0; fi < B.faces.size(); ++fi) {
        FaceInst& F = B.faces[fi];
        F.anchor = -1;
        for (size_t k = 0; k < F.cusp.size() && F.anchor < 0; ++k)
            if (F.cusp[k] == B.apex_of(F)) F.anchor = int(k);
        if (F.anchor < 0) F.anchor = 0;
    }
    for (size_t fi = 0; fi < B.faces.size(); ++fi) {
        FaceInst& F = B.faces[fi];
        if (F.partner < 0 || F.partner < int(fi)) continue;
        FaceInst& P = B.faces[size_t(F.partner)];
        bool f_apex = F.cusp[size_t(F.anchor)] == B.apex_of(F);
        bool p_apex = P.cusp[size_t(P.anchor)] == B.apex_of(P);
        if (f_apex && !p_apex)
            P.anchor = F.anchor;
        else if (p_apex && !f_apex)
            F.anchor = P.anchor;
        else if (f_apex && p_apex && F.anchor != P.anchor)
            P.anchor = F.anchor;  // F's pick wins; both stay apex-incident or not
        else
            F.anchor = P.anchor = std::min(F.anchor, P.anchor);
    }

    // tets
    for (size_t fi = 0; fi < B.faces.size(); ++fi) {
        FaceInst& F = B.faces[fi];
        size_t n = F.cell->size();
        int apex = B.apex_of(F);
        F.tet_of_tri.assign(n >= 2 ? n - 2 : 0, -1);
        size_t a = size_t(F.anchor);
        for (size_t j = 1; j + 1 < n; ++j) {
            size_t vb = (a + j) % n, vc = (a + j + 1) % n;
            if (F.cusp[a] == apex || F.cusp[vb] == apex || F.cusp[vc] == apex) continue;
            PiecewiseGeometry::Tet t;
            t.z[0] = PPoint::infinity();
            t.z[1] = F.pos[a];
            t.z[2] = F.mirror ? F.pos[vc] : F.pos[vb];
            t.z[3] = F.mirror ? F.pos[vb] : F.pos[vc];
            t.cusp = {"apex", "", "", ""};
            t.tag = F.name + "#" + std::to_string(j);
            F.tet_of_tri[j - 1] = int(pg.tets.size());
            pg.tets.push_back(t);
        }
    }
    auto local_of = [&](const FaceInst& F, size_t j, size_t v) -> int {
        size_t n = F.cell->size();
        size_t a = size_t(F.anchor);
        if (v == a) return 1;
        if (v == (a + j) % n) return F.mirror ? 3 : 2;
        if (v == (a + j + 1) % n) return F.mirror ? 2 : 3;
        return -1;
    };

    // node graph; roles are triples of cell-vertex slots (or the apex)
    struct Node {
        int tet = -1;
        std::array<int, 3> locals{-1, -1, -1};
        std::vector<std::pair<int, std::array<int, 3>>> links;  // (node, role map)
    };
    std::vector<Node> nodes;
    auto add_node = [&]() {
        nodes.push_back({});
        return int(nodes.size()) - 1;
    };
    auto link_nodes = [&](int a, int b, std::array<int, 3> role_of_b_for_role_of_a) {
        nodes[size_t(a)].links.push_back({b, role_of_b_for_role_of_a});
        std::array<int, 3> inv{};
        for (int i = 0; i < 3; ++i) inv[size_t(role_of_b_for_role_of_a[size_t(i)])] = i;
        nodes[size_t(b)].links.push_back({a, inv});
    };

    // base nodes (roles: anchor-offset triple j -> (a, vb, vc)) and side nodes
    // (roles: (apex, k, k+1) for polygon side k, in cell-vertex order)
    std::map<std::pair<int, int>, int> base_node, side_node, diag_node;
    for (size_t fi = 0; fi < B.faces.size(); ++fi) {
        FaceInst& F = B.faces[fi];
        size_t n = F.cell->size();
        size_t a = size_t(F.anchor);
        int apex = B.apex_of(F);
        for (size_t j = 1; j + 1 < n; ++j) {
            int nd = add_node();
            base_node[{int(fi), int(j)}] = nd;
            int tet = F.tet_of_tri[j - 1];
            if (tet >= 0) {
                nodes[size_t(nd)].tet = tet;
                nodes[size_t(nd)].locals = {1, F.mirror ? 3 : 2, F.mirror ? 2 : 3};
            }
        }
        for (size_t k = 0; k < n; ++k) {
            // degenerate side faces (an endpoint at the apex cusp) get no node
            if (F.cusp[k] == apex || F.cusp[(k + 1) % n] == apex) continue;
            int nd = add_node();
            side_node[{int(fi), int(k)}] = nd;
            size_t off = (k + n - a) % n;
            size_t j = off == 0 ? 1 : (off == n - 1 ? n - 2 : off);
            int tet = n >= 3 ? F.tet_of_tri[j - 1] : -1;
            if (tet >= 0) {
                nodes[size_t(nd)].tet = tet;
                nodes[size_t(nd)].locals = {0, local_of(F, j, k), local_of(F, j, (k + 1) % n)};
            }
        }
        for (size_t t = 1; t + 2 < n; ++t) {
            // diagonal (a, a+t+1) between fan triangles t and t+1
            size_t far = (a + t + 1) % n;
            if (F.cusp[a] == apex || F.cusp[far] == apex) continue;
            int nd = add_node();
            diag_node[{int(fi), int(t)}] = nd;
        }
    }

    // fan-internal links across diagonals
    for (size_t fi = 0; fi < B.faces.size(); ++fi) {
        FaceInst& F = B.faces[fi];
        size_t n = F.cell->size();
        size_t a = size_t(F.anchor);
        int apex = B.apex_of(F);
        for (size_t t = 1; t + 2 < n; ++t) {
            auto it = diag_node.find({int(fi), int(t)});
            if (it == diag_node.end()) continue;
            int nd = it->second;
            size_t far = (a + t + 1) % n;
            // roles: (apex, a, far)
            auto attach = [&](size_t j) {
                int tet = F.tet_of_tri[j - 1];
                size_t vb = (a + j) % n, vc = (a + j + 1) % n;
                if (tet >= 0) {
                    int nd2 = add_node();
                    nodes[size_t(nd2)].tet = tet;
                    nodes[size_t(nd2)].locals = {0, 1, local_of(F, j, j == t ? vc : vb)};
                    link_nodes(nd, nd2, {0, 1, 2});
                } else {
                    // flat triangle: its base stands in for the diagonal when the
                    // apex sits at the third corner
                    size_t third = j == t ? vb : vc;
                    if (F.cusp[third] != apex) return;  // fully degenerate
                    int bn = base_node.at({int(fi), int(j)});
                    // base roles (a, vb, vc); diagonal roles (apex, a, far)
                    std::array<int, 3> role_map{};
                    // diagonal role 0 = apex -> base slot of 'third'
                    auto base_role_of_slot = [&](size_t v) {
                        if (v == a) return 0;
                        if (v == (a + j) % n) return 1;
                        return 2;
                    };
                    role_map[0] = base_role_of_slot(third);
                    role_map[1] = base_role_of_slot(a);
                    role_map[2] = base_role_of_slot(far);
                    link_nodes(nd, bn, role_map);
                }
            };
            attach(t);
            attach(t + 1);
        }
        // flat triangles whose apex corner is the anchor: base <-> outer side
        for (size_t j = 1; j + 1 < n; ++j) {
            if (F.tet_of_tri[j - 1] >= 0) continue;
            size_t vb = (a + j) % n, vc = (a + j + 1) % n;
            if (F.cusp[a] != apex) continue;
            if (F.cusp[vb] == apex || F.cusp[vc] == apex)
                throw bad("cone apex meets a face triangle twice; pick a different apex");
            auto it = side_node.find({int(fi), int(vb)});
            if (it == side_node.end()) continue;
            // side roles (apex, vb, vc); base roles (a, vb, vc): a plays apex
            link_nodes(base_node.at({int(fi), int(j)}), it->second, {0, 1, 2});
        }
        // bigons: the cone is flat, the two sides meet each other
        if (n == 2) {
            auto i0 = side_node.find({int(fi), 0});
            auto i1 = side_node.find({int(fi), 1});
            if (i0 != side_node.end() && i1 != side_node.end())
                link_nodes(i0->second, i1->second, {0, 2, 1});
        }
    }

    // side links across shared arcs (within each ball)
    std::set<std::pair<int, int>> done;
    for (size_t fi = 0; fi < B.faces.size(); ++fi) {
        FaceInst& F = B.faces[fi];
        size_t n = F.cell->size();
        for (size_t k = 0; k < n; ++k) {
            auto [g, gk] = F.adj[k];
            if (g < 0) continue;
            if (done.count({int(fi), int(k)})) continue;
            done.insert({int(fi), int(k)});
            done.insert({g, gk});
            auto a_it = side_node.find({int(fi), int(k)});
            auto b_it = side_node.find({g, gk});
            if (a_it == side_node.end() || b_it == side_node.end()) continue;
            FaceInst& G = B.faces[size_t(g)];
            int p_mine = B.side_entry_point(*F.cell, k);
            int p_theirs = B.side_entry_point(*G.cell, size_t(gk));
            // roles (apex, k, k+1) vs (apex, gk, gk+1); matching endpoint points
            std::array<int, 3> role_map{0, 1, 2};
            if (p_mine == p_theirs)
                role_map = {0, 1, 2};
            else
                role_map = {0, 2, 1};
            link_nodes(a_it->second, b_it->second, role_map);
        }
    }

    // base links across the 2-cells
    for (size_t fi = 0; fi < B.faces.size(); ++fi) {
        FaceInst& F = B.faces[fi];
        if (F.partner < int(fi)) continue;
        size_t n = F.cell->size();
        for (size_t j = 1; j + 1 < n; ++j)
            link_nodes(base_node.at({int(fi), int(j)}),
                       base_node.at({F.partner, int(j)}), {0, 1, 2});
    }

    // resolve chains between real nodes
    for (size_t nd = 0; nd < nodes.size(); ++nd) {
        if (nodes[nd].tet < 0) continue;
        for (auto& [next, map0] : nodes[nd].links) {
            // walk until a real node appears
            int prev = int(nd);
            int cur = next;
            std::array<int, 3> acc = map0;
            int hops = 0;
            while (nodes[size_t(cur)].tet < 0) {
                if (++hops > 64) throw bad("unresolved flat-cone chain");
                int found = -1;
                std::array<int, 3> step{};
                for (auto& [nxt2, map2] : nodes[size_t(cur)].links) {
                    if (nxt2 == prev) continue;
                    found = nxt2;
                    step = map2;
                    break;
                }
                if (found < 0) {
                    cur = -1;
                    break;
                }
                std::array<int, 3> comp{};
                for (int i = 0; i < 3; ++i) comp[size_t(i)] = step[size_t(acc[size_t(i)])];
                acc = comp;
                prev = cur;
                cur = found;
            }
            if (cur < 0) continue;           // dangling chain (degenerate corner)
            if (cur < int(nd)) continue;     // emit each pair once
            if (cur == int(nd)) continue;
            PiecewiseGeometry::Gluing g;
            g.t1 = nodes[nd].tet;
            g.f1 = nodes[nd].locals;
            g.t2 = nodes[size_t(cur)].tet;
            for (int i = 0; i < 3; ++i)
                g.f2[size_t(i)] = nodes[size_t(cur)].locals[size_t(acc[size_t(i)])];
            pg.gluings.push_back(g);
        }
    }
    return pg;
}

// sphere link: boundary faces are the regional cells, vertices collapse to
// over- (top) or underpasses (bottom)
PiecewiseGeometry sphere_link_geometry(const PeripheralStructure& ps, const Assignment& x) {
    const LinkDiagram& d = *ps.link;
    BallComplex B;
    B.ps = &ps;
    B.x = &x;
    std::vector<int> over_pass_of_edge(d.edges.size(), -1), under_pass_of_edge(d.edges.size(), -1);
    for (size_t p = 0; p < d.passes.size(); ++p)
        for (int e : d.passes[p].edges)
            (d.passes[p].over ? over_pass_of_edge : under_pass_of_edge)[size_t(e)] = int(p);

    // apexes: least pass id among each kind
    B.apex_top = B.apex_bottom = -1;
    for (size_t p = 0; p < d.passes.size(); ++p) {
        auto& slot = d.passes[p].over ? B.apex_top : B.apex_bottom;
        if (slot < 0 || d.passes[p].id < d.passes[size_t(slot)].id) slot = int(p);
    }

    std::map<std::pair<int, bool>, int> inst;
    for (int bottom = 0; bottom < 2; ++bottom) {
        for (size_t r = 0; r < d.regions.size(); ++r) {
            FaceInst F;
            for (const Cell& c : ps.cells)
                if (c.kind == CellKind::Regional && c.region == int(r)) F.cell = &c;
            F.bottom = F.mirror = bottom == 1;
            F.name = d.regions[r].id + (bottom ? "|S" : "|N");
            const Region& reg = d.regions[r];
            size_t n = reg.size();
            for (size_t k = 0; k < n; ++k) {
                int e = reg.darts[k].edge;
                F.cusp.push_back(bottom ? under_pass_of_edge[size_t(e)]
                                        : over_pass_of_edge[size_t(e)]);
            }
            F.adj.assign(n, {-1, -1});
            inst[{int(r), bottom == 1}] = int(B.faces.size());
            B.faces.push_back(std::move(F));
        }
    }
    // partners and adjacency
    for (int bottom = 0; bottom < 2; ++bottom) {
        for (size_t r = 0; r < d.regions.size(); ++r) {
            FaceInst& F = B.faces[size_t(inst.at({int(r), bottom == 1}))];
            F.partner = inst.at({int(r), bottom == 0});
            const Region& reg = d.regions[r];
            size_t n = reg.size();
            for (size_t k = 0; k < n; ++k) {
                // side k = crossing arc at corner k; the top ball continues
                // across the overstrand there, the bottom across the understrand
                Dart da = reg.darts[k];
                Dart db = reg.darts[(k + 1) % n];
                auto over_at_end = [&](Dart dd) {
                    return dd.forward ? !d.under_at_head(dd.edge) : !d.under_at_tail(dd.edge);
                };
                auto over_at_start = [&](Dart dd) {
                    return dd.forward ? !d.under_at_tail(dd.edge) : !d.under_at_head(dd.edge);
                };
                bool want_over = bottom == 0;
                Dart cross;
                if (over_at_end(da) == want_over)
                    cross = da;
                else if (over_at_start(db) == want_over)
                    cross = db;
                else
                    throw bad("ball adjacency needs an alternating corner");
                Dart rev{cross.edge, !cross.forward};
                int r2 = d.region_left_of(rev);
                const Region& reg2 = d.regions[size_t(r2)];
                // locate rev in reg2 and take the corner at this crossing
                int k2 = -1;
                for (size_t j = 0; j < reg2.size(); ++j)
                    if (reg2.darts[j] == rev) k2 = int(j);
                if (k2 < 0) throw bad("reversed dart missing from its region");
                int n2 = int(reg2.size());
                // rev starts at the shared crossing when cross == da (the
                // neighbor corner precedes it), and ends there otherwise
                int corner = cross == da ? (k2 + n2 - 1) % n2 : k2;
                F.adj[k] = {inst.at({r2, bottom == 1}), corner};
            }
        }
    }
    return assemble_balls(B);
}

// FAL balls: boundary faces are the bow-tie faces; bow-tie triangles carry the
// spanning cells (F^+ above, F^- below)
BallComplex fal_ball_complex(const PeripheralStructure& ps, const Assignment& x,
                                    int apex_btvertex) {
    const FalDiagram& d = *ps.fal;
    const BowTieGraph& btg = d.bowtie;
    BallComplex B;
    B.ps = &ps;
    B.x = &x;
    B.apex_top = B.apex_bottom = apex_btvertex;

    // map the corners of a bow-tie face onto spanning-cell vertices via types
    auto spanning_vertex_of_corner = [&](const BtFace& f, size_t i) {
        const BtEdge& e1 = btg.edges[size_t(f.edges[i])];
        const BtEdge& e2 = btg.edges[size_t(f.edges[(i + 1) % 3])];
        int ta = e1.type, tb = e2.type;
        if ((ta == 1 && tb == 2) || (ta == 2 && tb == 1)) return 1;  // circle corner
        if ((ta == 0 && tb == 1) || (ta == 1 && tb == 0)) return 0;  // passage 1
        return 2;                                                    // passage 2
    };

    std::map<std::pair<int, bool>, int> inst;
    for (int bottom = 0; bottom < 2; ++bottom) {
        for (size_t f = 0; f < btg.faces.size(); ++f) {
            const BtFace& bf = btg.faces[f];
            FaceInst F;
            F.bottom = bottom == 1;
            F.mirror = F.bottom;
            F.name = (bf.bowtie ? "B" : "R") + std::to_string(f) + (bottom ? "|S" : "|N");
            if (!bf.bowtie) {
                F.cell = &ps.cells[size_t(ps.btface_cell.at(int(f)))];
                size_t n = bf.edges.size();
                F.cusp.resize(n);
                // cell vertex i sits at bt corner_vertices[i-1]
                for (size_t i = 0; i < n; ++i)
                    F.cusp[i] = bf.corner_vertices[(i + n - 1) % n];
                F.adj.assign(n, {-1, -1});
            } else {
                // one of the two bow-tie sides traverses the spanning cell
                // against its own word; the cell sides run gamma^1, gamma^2,
                // gamma^0
                int ty0 = btg.edges[size_t(bf.edges[0])].type;
                int ty1 = btg.edges[size_t(bf.edges[1])].type;
                auto cell_side = [](int ty) { return ty == 1 ? 0 : (ty == 2 ? 1 : 2); };
                bool aligned = (cell_side(ty1) - cell_side(ty0) + 3) % 3 == 1;
                F.mirror = (bottom == 1) != !aligned;
                int circle = bf.circle;
                int cell_idx = -1;
                for (size_t c = 0; c < ps.cells.size(); ++c)
                    if (ps.cells[c].kind == CellKind::Spanning &&
                        ps.cells[c].id ==
                            "F[" + d.circles[size_t(circle)].id + (bottom ? "^-]" : "^+]"))
                        cell_idx = int(c);
                F.cell = &ps.cells[size_t(cell_idx)];
                F.cusp.assign(3, -1);
                for (size_t i = 0; i < 3; ++i) {
                    int v = spanning_vertex_of_corner(bf, i);
                    F.cusp[size_t(v)] = bf.corner_vertices[i];
                }
                F.adj.assign(3, {-1, -1});
            }
            inst[{int(f), bottom == 1}] = int(B.faces.size());
            B.faces.push_back(std::move(F));
        }
    }
    // adjacency across bow-tie edges, per ball; and partner assignment
    for (int bottom = 0; bottom < 2; ++bottom) {
        std::map<int, std::vector<std::pair<int, int>>> edge_uses;  // btedge -> (inst, side)
        for (size_t f = 0; f < btg.faces.size(); ++f) {
            const BtFace& bf = btg.faces[f];
            int fi = inst.at({int(f), bottom == 1});
            FaceInst& F = B.faces[size_t(fi)];
            for (size_t i = 0; i < bf.edges.size(); ++i) {
                // which cell side carries this bt edge?
                int side = -1;
                if (!bf.bowtie) {
                    side = int(i);
                } else {
                    int ty = btg.edges[size_t(bf.edges[i])].type;
                    side = ty == 1 ? 0 : (ty == 2 ? 1 : 2);
                }
                if (ps.arcs[size_t(F.cell->sides[size_t(side)])].fal_circle !=
                        btg.edges[size_t(bf.edges[i])].circle ||
                    ps.arcs[size_t(F.cell->sides[size_t(side)])].fal_type !=
                        btg.edges[size_t(bf.edges[i])].type)
                    throw bad("bow-tie face / cell side misalignment");
                edge_uses[bf.edges[i]].push_back({fi, side});
            }
        }
        for (auto& [e, uses] : edge_uses) {
            if (uses.size() != 2) throw bad("bow-tie edge not on two faces");
            B.faces[size_t(uses[0].first)].adj[size_t(uses[0].second)] = uses[1];
            B.faces[size_t(uses[1].first)].adj[size_t(uses[1].second)] = uses[0];
        }
    }
    // partners: regional faces pair top/bottom; bow-tie triangles pair the two
    // sides of the same circle within each ball
    for (size_t f = 0; f < btg.faces.size(); ++f) {
        if (!btg.faces[f].bowtie) {
            int a = inst.at({int(f), false});
            int b = inst.at({int(f), true});
            B.faces[size_t(a)].partner = b;
            B.faces[size_t(b)].partner = a;
        }
    }
    std::map<int, std::vector<int>> by_circle_top, by_circle_bottom;
    for (size_t f = 0; f < btg.faces.size(); ++f) {
        if (!btg.faces[f].bowtie) continue;
        by_circle_top[btg.faces[f].circle].push_back(inst.at({int(f), false}));
        by_circle_bottom[btg.faces[f].circle].push_back(inst.at({int(f), true}));
    }
    for (auto* m : {&by_circle_top, &by_circle_bottom})
        for (auto& [c, v] : *m) {
            if (v.size() != 2) throw bad("circle without two bow-tie faces");
            B.faces[size_t(v[0])].partner = v[1];
            B.faces[size_t(v[1])].partner = v[0];
        }
    return B;
}

}  // namespace

PiecewiseGeometry induced_geometry_link(const PeripheralStructure& ps, const Assignment& x) {
    if (!ps.link) throw bad("not a link structure");
    return ps.link->ambient.torus ? torus_link_geometry(ps, x) : sphere_link_geometry(ps, x);
}

PiecewiseGeometry induced_geometry_fal(const PeripheralStructure& ps, const Assignment& x,
                                       int apex_btvertex) {
    if (!ps.fal) throw bad("not a FAL structure");
    BallComplex B = fal_ball_complex(ps, x, apex_btvertex);
    return assemble_balls(B);
}

DevelopedComplex develop_fal_ball(const PeripheralStructure& ps, const Assignment& x, bool bottom,
                                  int apex_btvertex, int reference_rot) {
    BallComplex B = fal_ball_complex(ps, x, apex_btvertex);
    (void)reference_rot;
    B.develop();
    DevelopedComplex out;
    out.bottom = bottom;
    size_t nfaces = ps.fal->bowtie.faces.size();
    out.corners.resize(nfaces);
    out.frames.resize(nfaces);
    size_t base = bottom ? nfaces : 0;
    for (size_t f = 0; f < nfaces; ++f) {
        out.corners[f] = B.faces[base + f].pos;
        out.frames[f] = B.faces[base + f].frame;
    }
    return out;
}

}  // namespace tt
