#include "tt/structure.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <stdexcept>

namespace tt {

static std::runtime_error bad(const std::string& what) { return std::runtime_error(what); }

int PeripheralStructure::add_var(const std::string& id, VarKind k) {
    vars.push_back({id, k});
    if (k != VarKind::Aux) ++n_label_vars;
    return int(vars.size()) - 1;
}

int PeripheralStructure::add_tube(const std::string& id, TubeKind k, int ref) {
    tubes.push_back({id, k, {}, -1, {-1, -1}, ref});
    return int(tubes.size()) - 1;
}

int PeripheralStructure::add_point(const std::string& id, int tube) {
    points.push_back({id, tube});
    tubes[size_t(tube)].points.push_back(int(points.size()) - 1);
    return int(points.size()) - 1;
}

namespace {

// Per-component walk bookkeeping for a link diagram.
struct CompWalk {
    std::vector<int> edges;        // cyclic, edges[i] spans junction i-1 -> i
    std::vector<int> junction_crossing;
    std::vector<bool> junction_under;
    int pos_of_edge(int e) const {
        for (size_t i = 0; i < edges.size(); ++i)
            if (edges[i] == e) return int(i);
        throw bad("edge not on component");
    }
    int size() const { return int(edges.size()); }
};

struct PassInfo {
    int pass = -1;        // index into diagram passes
    int component = -1;
    int pos0 = -1;        // walk position of first edge
    int len = 0;
    double anchor_t = 0;  // longitude of the vertical arc base
    std::array<int, 2> anchor_lift{0, 0};
};

int lam_crossings(double t_from, double t_to_unrolled, int M) {
    auto f = [M](double t) { return int(std::floor((t + 0.25) / double(M))); };
    return f(t_to_unrolled) - f(t_from);
}

}  // namespace

// ---------------------------------------------------------------------------
// link diagrams (S^3 and thickened torus)
// ---------------------------------------------------------------------------

PeripheralStructure build_structure(const LinkDiagram& d) {
    PeripheralStructure ps;
    ps.link = d;
    const bool torus = d.ambient.torus;

    // component walks
    std::vector<CompWalk> walks(d.components.size());
    for (size_t k = 0; k < d.components.size(); ++k) {
        walks[k].edges = d.components[k];
        for (int e : walks[k].edges) {
            walks[k].junction_crossing.push_back(d.edges[size_t(e)].head_crossing);
            walks[k].junction_under.push_back(d.under_at_head(e));
        }
    }
    std::vector<int> comp_of_edge(d.edges.size(), -1), pos_of_edge(d.edges.size(), -1);
    for (size_t k = 0; k < walks.size(); ++k)
        for (size_t i = 0; i < walks[k].edges.size(); ++i) {
            comp_of_edge[size_t(walks[k].edges[i])] = int(k);
            pos_of_edge[size_t(walks[k].edges[i])] = int(i);
        }

    if (torus) {
        // the vertical structure needs both kinds of passes on every component
        std::vector<int> overs(d.components.size(), 0), unders(d.components.size(), 0);
        for (const Strandpass& sp : d.passes) (sp.over ? overs : unders)[size_t(sp.component)]++;
        for (size_t k = 0; k < d.components.size(); ++k)
            if (!overs[k] || !unders[k])
                throw bad("torus component " + std::to_string(k) +
                          " lacks over- or under-crossings; vertical faces undefined");
    }

    // pass info
    std::vector<PassInfo> pinfo(d.passes.size());
    std::vector<int> over_pass_of_edge(d.edges.size(), -1), under_pass_of_edge(d.edges.size(), -1);
    for (size_t p = 0; p < d.passes.size(); ++p) {
        const Strandpass& sp = d.passes[p];
        PassInfo& pi = pinfo[p];
        pi.pass = int(p);
        pi.component = sp.component;
        pi.pos0 = walks[size_t(sp.component)].pos_of_edge(sp.edges[0]);
        pi.len = int(sp.edges.size());
        pi.anchor_t = sp.covered.empty() ? pi.pos0 - 0.5 : double(pi.pos0);
        for (int e : sp.edges) (sp.over ? over_pass_of_edge : under_pass_of_edge)[size_t(e)] = int(p);
    }

    // lattice anchors chi(crossing) via BFS, and reduced wraps
    std::vector<std::array<int, 2>> chi(d.crossings.size(), {0, 0});
    std::vector<std::array<int, 2>> rwrap(d.edges.size(), {0, 0});
    if (torus) {
        std::vector<bool> seen(d.crossings.size(), false);
        std::deque<int> q{0};
        seen[0] = true;
        // adjacency: edges touching each crossing
        std::vector<std::vector<int>> at(d.crossings.size());
        for (size_t e = 0; e < d.edges.size(); ++e) {
            at[size_t(d.edges[e].tail_crossing)].push_back(int(e));
            at[size_t(d.edges[e].head_crossing)].push_back(int(e));
        }
        while (!q.empty()) {
            int c = q.front();
            q.pop_front();
            for (int e : at[size_t(c)]) {
                const Edge& ed = d.edges[size_t(e)];
                int o = (ed.tail_crossing == c) ? ed.head_crossing : ed.tail_crossing;
                if (seen[size_t(o)]) continue;
                seen[size_t(o)] = true;
                if (ed.tail_crossing == c) {
                    chi[size_t(o)] = {chi[size_t(c)][0] + ed.wrap[0], chi[size_t(c)][1] + ed.wrap[1]};
                } else {
                    chi[size_t(o)] = {chi[size_t(c)][0] - ed.wrap[0], chi[size_t(c)][1] - ed.wrap[1]};
                }
                q.push_back(o);
            }
        }
        for (size_t e = 0; e < d.edges.size(); ++e) {
            const Edge& ed = d.edges[e];
            rwrap[e] = {chi[size_t(ed.tail_crossing)][0] + ed.wrap[0] - chi[size_t(ed.head_crossing)][0],
                        chi[size_t(ed.tail_crossing)][1] + ed.wrap[1] - chi[size_t(ed.head_crossing)][1]};
        }
        for (auto& pi : pinfo) {
            const Strandpass& sp = d.passes[size_t(pi.pass)];
            if (sp.covered.empty()) {
                pi.anchor_lift = chi[size_t(d.edges[size_t(sp.edges[0])].tail_crossing)];
            } else {
                const CompWalk& w = walks[size_t(pi.component)];
                pi.anchor_lift = chi[size_t(w.junction_crossing[size_t(pi.pos0 % w.size())])];
            }
        }
    }

    // walking lift of junction at unrolled position t (integer), reached from a
    // pass anchor along the strand
    auto pass_lift = [&](const PassInfo& pi, int junction_unrolled) {
        const CompWalk& w = walks[size_t(pi.component)];
        const int M = w.size();
        std::array<int, 2> lift = pi.anchor_lift;
        // covered-anchor: anchor junction pos0; mid-edge anchor: tail crossing of
        // edge pos0 = junction pos0-1
        int t = pi.anchor_t == double(pi.pos0) ? pi.pos0 : pi.pos0 - 1;
        auto edge_at = [&](int u) { return w.edges[size_t(((u % M) + M) % M)]; };
        while (t < junction_unrolled) {
            ++t;
            int e = edge_at(t);
            lift = {lift[0] + rwrap[size_t(e)][0], lift[1] + rwrap[size_t(e)][1]};
        }
        while (t > junction_unrolled) {
            int e = edge_at(t);
            lift = {lift[0] - rwrap[size_t(e)][0], lift[1] - rwrap[size_t(e)][1]};
            --t;
        }
        return lift;
    };

    // --- tubes and points ---
    std::vector<int> comp_tube(walks.size());
    for (size_t k = 0; k < walks.size(); ++k) {
        int t = ps.add_tube("K" + std::to_string(k), TubeKind::Component, int(k));
        comp_tube[k] = t;
        for (int j = 0; j < walks[k].size(); ++j) {
            std::string id = "P[K" + std::to_string(k) + ".j" + std::to_string(j) +
                             (walks[k].junction_under[size_t(j)] ? ".u" : ".o") + "]";
            ps.junction_point[{int(k), j}] = ps.add_point(id, t);
        }
    }
    int north_tube = -1, south_tube = -1;
    if (torus) {
        north_tube = ps.add_tube("*N", TubeKind::North);
        south_tube = ps.add_tube("*S", TubeKind::South);
        for (size_t p = 0; p < d.passes.size(); ++p) {
            const Strandpass& sp = d.passes[p];
            int kt = comp_tube[size_t(sp.component)];
            ps.pass_point[int(p)] = ps.add_point("P[" + sp.id + "]", kt);
            ps.pass_npoint[int(p)] =
                ps.add_point(std::string("P[") + (sp.over ? "N." : "S.") + sp.id + "]",
                             sp.over ? north_tube : south_tube);
        }
    }

    // --- label variables: crossing arcs, old edge labels ---
    for (size_t c = 0; c < d.crossings.size(); ++c) {
        Arc a;
        a.id = "w[" + d.crossings[c].id + "]";
        a.crossing = int(c);
        // endpoints: under- and over-junction points
        auto [ue, uh] = d.crossings[c].slots[0];
        (void)uh;
        int uk = comp_of_edge[size_t(ue)], uj = pos_of_edge[size_t(ue)];
        int os = d.crossings[c].slots[1].second ? 1 : 3;
        int oe = d.crossings[c].slots[size_t(os)].first;
        int ok = comp_of_edge[size_t(oe)], oj = pos_of_edge[size_t(oe)];
        a.endpoint[0] = ps.junction_point.at({uk, uj});
        a.endpoint[1] = ps.junction_point.at({ok, oj});
        a.var = ps.add_var(a.id, VarKind::Crossing);
        ps.crossing_arc[int(c)] = int(ps.arcs.size());
        ps.arcs.push_back(a);
    }
    for (size_t e = 0; e < d.edges.size(); ++e) {
        const Edge& ed = d.edges[e];
        int k = comp_of_edge[e];
        int j_head = pos_of_edge[e];
        int j_tail = (j_head + walks[size_t(k)].size() - 1) % walks[size_t(k)].size();
        for (int side = 0; side < 2; ++side) {  // 0 = label-left, 1 = label-right
            Eps ep;
            ep.id = std::string("u[") + ed.id + (side == 0 ? "|L]" : "|R]");
            ep.kind = EpsKind::OldSide;
            ep.diagram_edge = int(e);
            ep.side = side;
            ep.tube = comp_tube[size_t(k)];
            bool strand_left = (side == 0) != ed.flip_label;
            int wmu_strand = strand_left ? -d.kappa_prime(int(e)) : 0;
            int wlam_strand = (j_head == 0) ? 1 : 0;
            int tail = ps.junction_point.at({k, j_tail});
            int head = ps.junction_point.at({k, j_head});
            if (!ed.flip_label) {
                ep.tail = tail;
                ep.head = head;
                ep.w_mu = wmu_strand;
                ep.w_lam = wlam_strand;
            } else {
                ep.tail = head;
                ep.head = tail;
                ep.w_mu = -wmu_strand;
                ep.w_lam = -wlam_strand;
            }
            ep.var = ps.add_var(ep.id, VarKind::EdgeLabel);
            ps.old_eps[{int(e), side}] = int(ps.eps.size());
            ps.eps.push_back(ep);
        }
    }

    // --- regional cells ---
    ps.cells.reserve(d.regions.size());
    for (size_t r = 0; r < d.regions.size(); ++r) {
        const Region& reg = d.regions[r];
        Cell cell;
        cell.id = reg.id;
        cell.kind = CellKind::Regional;
        cell.region = int(r);
        for (size_t i = 0; i < reg.darts.size(); ++i) {
            Dart dt = reg.darts[i];
            const Edge& ed = d.edges[size_t(dt.edge)];
            int label_side = dt.forward == !ed.flip_label ? 0 : 1;
            // region lies to the left of the dart; left of the label orientation
            // iff the dart follows the label orientation
            cell.corners.push_back(ps.old_eps.at({dt.edge, label_side}));
            cell.corner_forward.push_back(dt.forward != ed.flip_label);
            cell.sides.push_back(ps.crossing_arc.at(reg.corner_crossings[i]));
        }
        ps.cells.push_back(std::move(cell));
    }

    // --- vertical structure (torus only) ---
    if (torus) {
        // vertical arcs and end/over-type peripheral edges per pass
        std::map<std::pair<int, int>, int> end_eps;   // (pass, junction-unrolled? use 0=start,1=end)
        std::map<std::pair<int, int>, std::array<int, 2>> overtype_eps;  // (pass, covered idx) -> {l, r}
        for (size_t p = 0; p < d.passes.size(); ++p) {
            const Strandpass& sp = d.passes[p];
            const PassInfo& pi = pinfo[p];
            const CompWalk& w = walks[size_t(sp.component)];
            Arc a;
            a.id = "w[" + sp.id + "]";
            a.pass = int(p);
            a.endpoint[0] = ps.pass_point.at(int(p));
            a.endpoint[1] = ps.pass_npoint.at(int(p));
            a.var = ps.add_var(a.id, VarKind::Crossing);
            ps.pass_arc[int(p)] = int(ps.arcs.size());
            ps.arcs.push_back(a);

            auto junction_pt = [&](int t_unrolled) {
                int j = ((t_unrolled % w.size()) + w.size()) % w.size();
                return ps.junction_point.at({sp.component, j});
            };
            // end-type: to start junction (backward) and end junction (forward)
            for (int which = 0; which < 2; ++which) {
                int t_j = which == 0 ? pi.pos0 - 1 : pi.pos0 + pi.len - 1;
                Eps ep;
                ep.id = "u[" + sp.id + ">" +
                        d.crossings[size_t(w.junction_crossing[size_t(((t_j % w.size()) + w.size()) % w.size())])].id +
                        (which == 0 ? "#start]" : "#end]");
                ep.kind = EpsKind::EndType;
                ep.pass = int(p);
                ep.crossing = w.junction_crossing[size_t(((t_j % w.size()) + w.size()) % w.size())];
                ep.tube = comp_tube[size_t(sp.component)];
                ep.tail = ps.pass_point.at(int(p));
                ep.head = junction_pt(t_j);
                ep.w_mu = 0;
                ep.w_lam = lam_crossings(pi.anchor_t, double(t_j), w.size());
                ep.var = ps.add_var(ep.id, VarKind::EdgeLabel);
                end_eps[{int(p), which}] = int(ps.eps.size());
                ps.eps.push_back(ep);
            }
            // over/under-type at each covered junction
            for (size_t ci = 0; ci < sp.covered.size(); ++ci) {
                int t_j = pi.pos0 + int(ci);
                std::array<int, 2> pair{-1, -1};
                for (int side = 0; side < 2; ++side) {  // 0 = left of the pass
                    Eps ep;
                    ep.id = "u[" + sp.id + ">" + d.crossings[size_t(sp.covered[ci])].id +
                            (side == 0 ? "#l]" : "#r]");
                    ep.kind = EpsKind::OverType;
                    ep.pass = int(p);
                    ep.crossing = sp.covered[ci];
                    ep.side = side;
                    ep.tube = comp_tube[size_t(sp.component)];
                    ep.tail = ps.pass_point.at(int(p));
                    ep.head = junction_pt(t_j);
                    if (sp.over)
                        ep.w_mu = side == 0 ? -1 : 0;
                    else
                        ep.w_mu = side == 0 ? 1 : 0;
                    ep.w_lam = lam_crossings(pi.anchor_t, double(t_j), w.size());
                    ep.var = ps.add_var(ep.id, VarKind::EdgeLabel);
                    pair[size_t(side)] = int(ps.eps.size());
                    ps.eps.push_back(ep);
                }
                overtype_eps[{int(p), int(ci)}] = pair;
            }
        }

        // vertical wall cells, one per (crossing, under/over corridor edge)
        auto build_walls = [&](bool north) {
            for (size_t c = 0; c < d.crossings.size(); ++c) {
                const Crossing& cr = d.crossings[c];
                int s_in = cr.slots[1].second ? 1 : 3;  // over-in slot
                // corridor edges: under strand for north walls, over for south
                int e_in = north ? cr.slots[0].first : cr.slots[size_t(s_in)].first;
                int e_out = north ? cr.slots[2].first : cr.slots[size_t(s_in == 1 ? 3 : 1)].first;
                int cover_pass = -1;
                {
                    // the pass running over (north) resp. under (south) this crossing
                    int probe = north ? cr.slots[size_t(s_in)].first : cr.slots[0].first;
                    cover_pass = north ? over_pass_of_edge[size_t(probe)]
                                       : under_pass_of_edge[size_t(probe)];
                }
                for (int which = 0; which < 2; ++which) {
                    int e = which == 0 ? e_in : e_out;
                    int trans_pass = north ? over_pass_of_edge[size_t(e)]
                                           : under_pass_of_edge[size_t(e)];
                    const Strandpass& a1 = d.passes[size_t(trans_pass)];
                    const PassInfo& pi1 = pinfo[size_t(trans_pass)];
                    const Strandpass& a2 = d.passes[size_t(cover_pass)];
                    const PassInfo& pi2 = pinfo[size_t(cover_pass)];
                    // the corridor edge ends (which==0) or begins (1) pass a1 at c
                    bool ending = which == 0;
                    int end_idx = ending ? 1 : 0;
                    int eps_a1 = end_eps.at({trans_pass, end_idx});
                    // side of a2: derived from the slot geometry
                    int side;
                    if (north)
                        side = (s_in == 3) == (which == 0) ? 1 : 0;
                    else
                        side = (s_in == 3) == (which == 0) ? 0 : 1;
                    // covered index of crossing c on a2
                    int cov = -1;
                    for (size_t ci2 = 0; ci2 < a2.covered.size(); ++ci2)
                        if (a2.covered[ci2] == int(c)) cov = int(ci2);
                    if (cov < 0) throw bad("cover pass misses crossing " + cr.id);
                    int eps_a2 = overtype_eps.at({cover_pass, cov})[size_t(side)];

                    // north/south edge
                    Eps nep;
                    nep.id = std::string("u[") + (north ? "N#" : "S#") + cr.id +
                             (which == 0 ? "#in]" : "#out]");
                    nep.kind = EpsKind::NEdge;
                    nep.crossing = int(c);
                    nep.side = which;
                    nep.tube = north ? north_tube : south_tube;
                    nep.tail = ps.pass_npoint.at(trans_pass);
                    nep.head = ps.pass_npoint.at(cover_pass);
                    {
                        const CompWalk& w1 = walks[size_t(a1.component)];
                        int tj1 = ending ? pi1.pos0 + pi1.len - 1 : pi1.pos0 - 1;
                        auto lift1 = pass_lift(pi1, tj1);
                        (void)w1;
                        int tj2 = pi2.pos0 + cov;
                        auto lift2 = pass_lift(pi2, tj2);
                        nep.w_xy[0] = lift1[0] - lift2[0];
                        nep.w_xy[1] = lift1[1] - lift2[1];
                    }
                    nep.var = ps.add_var(nep.id, VarKind::EdgeLabel);
                    int n_eps = int(ps.eps.size());
                    ps.eps.push_back(nep);

                    Cell cell;
                    cell.id = std::string(north ? "V[N#" : "V[S#") + cr.id +
                              (which == 0 ? "#in]" : "#out]");
                    cell.kind = CellKind::Vertical;
                    cell.corners = {eps_a1, n_eps, eps_a2};
                    cell.corner_forward = {false, true, true};
                    cell.sides = {ps.pass_arc.at(trans_pass), ps.pass_arc.at(cover_pass),
                                  ps.crossing_arc.at(int(c))};
                    // key: corridor edge, complemented for south walls
                    ps.wall_cell[{int(c), north ? e : ~e}] = int(ps.cells.size());
                    ps.cells.push_back(std::move(cell));
                }
            }
        };
        build_walls(true);
        build_walls(false);

        // region walks at *N and *S (cone polygons)
        auto region_walks = [&](bool north) {
            std::vector<std::vector<PeripheralStructure::WallStep>> out(d.regions.size());
            for (size_t r = 0; r < d.regions.size(); ++r) {
                const Region& reg = d.regions[r];
                size_t n = reg.size();
                for (size_t i = 0; i < n; ++i) {
                    Dart da = reg.darts[i];
                    Dart db = reg.darts[(i + 1) % n];
                    int c = reg.corner_crossings[i];
                    auto under_at_end = [&](Dart dd) {
                        return dd.forward ? d.under_at_head(dd.edge) : d.under_at_tail(dd.edge);
                    };
                    auto under_at_start = [&](Dart dd) {
                        return dd.forward ? d.under_at_tail(dd.edge) : d.under_at_head(dd.edge);
                    };
                    bool a_corridor = north ? under_at_end(da) : !under_at_end(da);
                    bool b_corridor = north ? under_at_start(db) : !under_at_start(db);
                    auto add_step = [&](int e, bool fwd) {
                        int cell_idx = ps.wall_cell.at({c, north ? e : ~e});
                        const Cell& cl = ps.cells[size_t(cell_idx)];
                        int n_eps = cl.corners[1];
                        PeripheralStructure::WallStep st;
                        st.n_eps = n_eps;
                        st.forward = fwd;
                        st.wall = cell_idx;
                        st.pass = -1;
                        // pass arrived at = head (forward) or tail (backward)
                        int pt = fwd ? ps.eps[size_t(n_eps)].head : ps.eps[size_t(n_eps)].tail;
                        for (auto& [pp, ppt] : ps.pass_npoint)
                            if (ppt == pt) st.pass = pp;
                        out[r].push_back(st);
                    };
                    if (a_corridor) add_step(da.edge, true);
                    if (b_corridor) add_step(db.edge, false);
                }
            }
            return out;
        };
        ps.region_walk_north = region_walks(true);
        ps.region_walk_south = region_walks(false);

        // north/south lattice translations + meridian normalization
        int tnx = ps.add_var("tau[N.x]", VarKind::Aux);
        int tny = ps.add_var("tau[N.y]", VarKind::Aux);
        int tsx = ps.add_var("tau[S.x]", VarKind::Aux);
        int tsy = ps.add_var("tau[S.y]", VarKind::Aux);
        ps.tubes[size_t(north_tube)].tau_xy[0] = tnx;
        ps.tubes[size_t(north_tube)].tau_xy[1] = tny;
        ps.tubes[size_t(south_tube)].tau_xy[0] = tsx;
        ps.tubes[size_t(south_tube)].tau_xy[1] = tsy;
        PeripheralStructure::LinearRow rn;
        rn.tag = "normalization[*N]";
        rn.scale_tube = "*N";
        if (d.meridian_class_north[0]) rn.terms.push_back({tnx, double(d.meridian_class_north[0])});
        if (d.meridian_class_north[1]) rn.terms.push_back({tny, double(d.meridian_class_north[1])});
        rn.rhs = 1.0;
        ps.normalizations.push_back(rn);
        PeripheralStructure::LinearRow rs;
        rs.tag = "normalization[*S]";
        rs.scale_tube = "*S";
        if (d.meridian_class_south[0]) rs.terms.push_back({tsx, double(d.meridian_class_south[0])});
        if (d.meridian_class_south[1]) rs.terms.push_back({tsy, double(d.meridian_class_south[1])});
        rs.rhs = 1.0;
        ps.normalizations.push_back(rs);
    }

    // component-tube longitude translations + z variables + gauges
    for (size_t t = 0; t < ps.tubes.size(); ++t) {
        if (ps.tubes[t].kind == TubeKind::Component)
            ps.tubes[t].tau = ps.add_var("tau[" + ps.tubes[t].id + "]", VarKind::Aux);
    }
    ps.point_z.resize(ps.points.size());
    for (size_t p = 0; p < ps.points.size(); ++p)
        ps.point_z[p] = ps.add_var("z" + ps.points[p].id.substr(1), VarKind::Aux);
    for (const Tube& t : ps.tubes) {
        if (t.points.empty()) continue;
        PeripheralStructure::LinearRow g;
        g.tag = "gauge[" + t.id + "]";
        g.terms.push_back({ps.point_z[size_t(t.points[0])], 1.0});
        g.rhs = 0.0;
        ps.normalizations.push_back(g);
    }
    return ps;
}

// ---------------------------------------------------------------------------
// fully augmented links
// ---------------------------------------------------------------------------

namespace {

// passage p of a circle: ends at slots (0,3) for p=1, (1,2) for p=2
struct Passage {
    int circle;
    int num;       // 1 or 2
    int seg_in;    // segment whose head is here
    int seg_out;
    bool aligned;  // strand heads east in the circle's local frame
    int component = -1;
    int junction = -1;  // junction index along the component walk
};

}  // namespace

PeripheralStructure build_structure(const FalDiagram& d) {
    PeripheralStructure ps;
    ps.fal = d;
    const bool torus = d.ambient.torus;

    // passages and component walks over segments
    std::vector<std::array<Passage, 2>> passages(d.circles.size());
    std::vector<int> next_seg(d.segments.size(), -1);  // continuation after the head
    for (size_t c = 0; c < d.circles.size(); ++c) {
        for (int pn = 1; pn <= 2; ++pn) {
            int qa = pn == 1 ? 0 : 1, qb = pn == 1 ? 3 : 2;
            auto [sa, ha] = d.circles[c].slots[size_t(qa)];
            auto [sb, hb] = d.circles[c].slots[size_t(qb)];
            if (ha == hb) throw bad("passage of circle " + d.circles[c].id + " is not oriented");
            Passage p;
            p.circle = int(c);
            p.num = pn;
            p.seg_in = ha ? sa : sb;
            p.seg_out = ha ? sb : sa;
            // alignment from the head end's slot
            int head_slot = ha ? qa : qb;
            bool west = (head_slot == 0 || head_slot == 1);
            p.aligned = west;  // head arriving on the west side heads east
            passages[c][size_t(pn - 1)] = p;
            next_seg[size_t(p.seg_in)] = p.seg_out;
        }
    }
    // components of the strand link
    std::vector<std::vector<int>> comps;
    std::vector<int> comp_of_seg(d.segments.size(), -1), pos_of_seg(d.segments.size(), -1);
    for (size_t s0 = 0; s0 < d.segments.size(); ++s0) {
        if (comp_of_seg[s0] >= 0) continue;
        std::vector<int> walk;
        int s = int(s0);
        do {
            comp_of_seg[size_t(s)] = int(comps.size());
            pos_of_seg[size_t(s)] = int(walk.size());
            walk.push_back(s);
            s = next_seg[size_t(s)];
        } while (s != int(s0));
        comps.push_back(std::move(walk));
    }
    // junction i of a component = the passage where segment walk[i] ends
    std::vector<std::vector<Passage*>> junction(comps.size());
    for (size_t k = 0; k < comps.size(); ++k) junction[k].resize(comps[k].size(), nullptr);
    for (auto& pc : passages)
        for (auto& p : pc) {
            p.component = comp_of_seg[size_t(p.seg_in)];
            p.junction = pos_of_seg[size_t(p.seg_in)];
            junction[size_t(p.component)][size_t(p.junction)] = &p;
        }

    // tubes and points
    std::vector<int> comp_tube(comps.size());
    std::map<std::pair<int, int>, int> pO, pS;  // (component, junction) -> points
    for (size_t k = 0; k < comps.size(); ++k) {
        comp_tube[k] = ps.add_tube("K" + std::to_string(k), TubeKind::Component, int(k));
        for (size_t j = 0; j < comps[k].size(); ++j) {
            pO[{int(k), int(j)}] =
                ps.add_point("P[K" + std::to_string(k) + ".j" + std::to_string(j) + ".O]",
                             comp_tube[k]);
            pS[{int(k), int(j)}] =
                ps.add_point("P[K" + std::to_string(k) + ".j" + std::to_string(j) + ".S]",
                             comp_tube[k]);
        }
    }
    std::vector<int> circ_tube(d.circles.size());
    std::vector<std::array<int, 2>> circ_pt(d.circles.size());
    for (size_t c = 0; c < d.circles.size(); ++c) {
        circ_tube[c] = ps.add_tube(d.circles[c].id, TubeKind::FalCircle, int(c));
        circ_pt[c] = {ps.add_point("P[" + d.circles[c].id + ".1]", circ_tube[c]),
                      ps.add_point("P[" + d.circles[c].id + ".2]", circ_tube[c])};
    }

    auto interior_right = [&](const Passage& p) { return (p.num == 1) == p.aligned; };
    auto point_O = [&](const Passage& p) { return pO.at({p.component, p.junction}); };
    auto point_S = [&](const Passage& p) { return pS.at({p.component, p.junction}); };

    // label variables: arcs gamma^{0,1,2} per circle
    for (size_t c = 0; c < d.circles.size(); ++c) {
        for (int ty = 0; ty < 3; ++ty) {
            Arc a;
            a.id = "w[" + d.circles[c].id + "^" + std::to_string(ty) + "]";
            a.fal_circle = int(c);
            a.fal_type = ty;
            if (ty == 0) {
                a.endpoint[0] = point_O(passages[c][0]);
                a.endpoint[1] = point_O(passages[c][1]);
            } else {
                a.endpoint[0] = circ_pt[c][size_t(ty - 1)];
                a.endpoint[1] = point_S(passages[c][size_t(ty - 1)]);
            }
            a.var = ps.add_var(a.id, VarKind::Crossing);
            ps.fal_arc[{int(c), ty}] = int(ps.arcs.size());
            ps.arcs.push_back(a);
        }
    }

    // circle-tube peripheral edges: e^{0 top}, e^{0 bottom}, mu loops
    for (size_t c = 0; c < d.circles.size(); ++c) {
        for (int bot = 0; bot < 2; ++bot) {
            Eps ep;
            ep.id = "u[" + d.circles[c].id + "^0" + (bot ? "b]" : "t]");
            ep.kind = EpsKind::FalZero;
            ep.crossing = int(c);
            ep.side = bot;
            ep.tube = circ_tube[c];
            ep.tail = circ_pt[c][0];
            ep.head = circ_pt[c][1];
            ep.w_lam = bot ? -1 : 0;
            ep.var = ps.add_var(ep.id, VarKind::EdgeLabel);
            if (!bot) ps.fal_zero_eps[int(c)] = int(ps.eps.size());
            ps.eps.push_back(ep);
        }
        for (int m = 1; m <= 2; ++m) {
            Eps ep;
            ep.id = "u[" + d.circles[c].id + "^mu" + std::to_string(m) + "]";
            ep.kind = EpsKind::FalMu;
            ep.crossing = int(c);
            ep.side = m - 1;
            ep.tube = circ_tube[c];
            ep.tail = ep.head = circ_pt[c][size_t(m - 1)];
            ep.w_mu = 1;
            ep.constant_one = true;
            ep.var = ps.add_var(ep.id, VarKind::EdgeLabel);
            ps.fal_mu_eps[{int(c), m}] = int(ps.eps.size());
            ps.eps.push_back(ep);
        }
    }

    // strand-tube peripheral edges: half-meridians at passages, longitudinal pairs
    std::map<std::pair<int, int>, int> half_eps;  // ((circle<<2)|passage, top) handled via id map
    for (size_t c = 0; c < d.circles.size(); ++c) {
        for (int pn = 1; pn <= 2; ++pn) {
            const Passage& p = passages[c][size_t(pn - 1)];
            for (int bot = 0; bot < 2; ++bot) {
                Eps ep;
                ep.id = "u[" + d.circles[c].id + "^" + std::to_string(pn) + (bot ? "b]" : "t]");
                ep.kind = EpsKind::FalHalf;
                ep.crossing = int(c);
                ep.pass = pn;
                ep.side = bot;
                ep.tube = comp_tube[size_t(p.component)];
                ep.tail = point_O(p);
                ep.head = point_S(p);
                if (bot)
                    ep.w_mu = 0;
                else
                    ep.w_mu = interior_right(p) ? 1 : -1;
                ep.var = ps.add_var(ep.id, VarKind::EdgeLabel);
                int key = int(c) * 2 + (pn - 1);
                ps.fal_half_eps[{key, bot ? 0 : 1}] = int(ps.eps.size());
                half_eps[{key, bot}] = int(ps.eps.size());
                ps.eps.push_back(ep);
            }
        }
    }
    // longitudinal e_j^{l,r}: l = north = left of the oriented segment
    for (size_t s = 0; s < d.segments.size(); ++s) {
        int k = comp_of_seg[s];
        int j_head = pos_of_seg[s];
        int j_tail = (j_head + int(comps[size_t(k)].size()) - 1) % int(comps[size_t(k)].size());
        const Passage& ph = *junction[size_t(k)][size_t(j_head)];
        const Passage* pt = junction[size_t(k)][size_t(j_tail)];
        for (int south = 0; south < 2; ++south) {
            // attachment at a junction on the north (south) side: the in-plane
            // point at m = 3/4 (1/4); m(P_O) = 1/4 iff interior is right
            auto attach = [&](const Passage& p, bool is_head, double& mu_adj) {
                bool o_on_north = !interior_right(p);  // P_O at m=3/4?
                bool want_north = south == 0;
                int pt_idx = (o_on_north == want_north) ? pO.at({p.component, p.junction})
                                                        : pS.at({p.component, p.junction});
                mu_adj = 0;
                if (d.circles[size_t(p.circle)].half_twist) {
                    // the truncation follows the half twist: sides swap and the
                    // path winds half a meridian
                    pt_idx = (pt_idx == pO.at({p.component, p.junction}))
                                 ? pS.at({p.component, p.junction})
                                 : pO.at({p.component, p.junction});
                    double sign = d.circles[size_t(p.circle)].chirality >= 0 ? 0.5 : -0.5;
                    mu_adj = (is_head ? 1.0 : -1.0) * sign;
                }
                return pt_idx;
            };
            Eps ep;
            ep.id = "u[" + d.segments[s].id + (south ? "^r]" : "^l]");
            ep.kind = EpsKind::FalLong;
            ep.diagram_edge = int(s);
            ep.side = south;
            ep.tube = comp_tube[size_t(k)];
            double adj_t = 0, adj_h = 0;
            ep.tail = attach(*pt, false, adj_t);
            ep.head = attach(ph, true, adj_h);
            ep.w_mu = adj_h - adj_t;
            ep.w_lam = (j_head == 0) ? 1 : 0;
            ep.var = ps.add_var(ep.id, VarKind::EdgeLabel);
            ps.fal_long_eps[{int(s), south == 0 ? 1 : 0}] = int(ps.eps.size());
            ps.eps.push_back(ep);
        }
    }

    // spanning cells F^+ (top) and F^- (bottom) per circle
    for (size_t c = 0; c < d.circles.size(); ++c) {
        for (int bot = 0; bot < 2; ++bot) {
            Cell cell;
            cell.id = "F[" + d.circles[c].id + (bot ? "^-]" : "^+]");
            cell.kind = CellKind::Spanning;
            int e1 = half_eps.at({int(c) * 2 + 0, bot});
            int e2 = half_eps.at({int(c) * 2 + 1, bot});
            int e0 = int(ps.fal_zero_eps.at(int(c))) + bot;  // 0t / 0b are adjacent
            cell.corners = {e1, e0, e2};
            cell.corner_forward = {true, true, false};
            cell.sides = {ps.fal_arc.at({int(c), 1}), ps.fal_arc.at({int(c), 2}),
                          ps.fal_arc.at({int(c), 0})};
            ps.cells.push_back(std::move(cell));
        }
    }

    // regional cells from non-bow-tie faces of the bow-tie graph
    const BowTieGraph& btg = d.bowtie;
    for (size_t f = 0; f < btg.faces.size(); ++f) {
        const BtFace& bf = btg.faces[f];
        if (bf.bowtie) continue;
        Cell cell;
        cell.id = "R[" + std::to_string(ps.cells.size()) + "]";
        cell.kind = CellKind::Regional;
        cell.fal_face = int(f);
        size_t n = bf.edges.size();
        for (size_t i = 0; i < n; ++i) {
            const BtEdge& arc = btg.edges[size_t(bf.edges[i])];
            cell.sides.push_back(ps.fal_arc.at({arc.circle, arc.type}));
            // corner between edge i and edge i+1 sits at the shared vertex
            const BtEdge& nxt = btg.edges[size_t(bf.edges[(i + 1) % n])];
            int v = bf.corner_vertices[i];
            const BtVertex& bv = btg.vertices[size_t(v)];
            int ce = -1;
            bool fwd = true;
            if (bv.kind == BtKind::Circle) {
                // mu sector: passage 1 sector between 1r,1l; passage 2 between 2l,2r;
                // the two regions run around the circle in opposite meridian
                // directions
                int m = (arc.type == 1 && nxt.type == 1) ? 1 : 2;
                ce = ps.fal_mu_eps.at({bv.ref, m});
                fwd = m == 1;
            } else {
                // longitudinal sector: north iff we run head-arc -> tail-arc...
                // determined by which junction each arc attaches to
                const FalSegment& sg = d.segments[size_t(bv.ref)];
                auto junction_of_arc = [&](const BtEdge& a) {
                    // the junction of segment bv.ref at circle a.circle matching
                    // the slot of (type, side)
                    for (int q = 0; q < 4; ++q) {
                        int qside = (q == 0 || q == 1) ? 0 : 1;
                        int qpass = (q == 0 || q == 3) ? 1 : 2;
                        if (qside != a.side) continue;
                        if (a.type != 0 && qpass != a.type) continue;
                        if (d.circles[size_t(a.circle)].slots[size_t(q)].first != bv.ref) continue;
                        bool head_here = d.circles[size_t(a.circle)].slots[size_t(q)].second;
                        (void)head_here;
                        return d.circles[size_t(a.circle)].slots[size_t(q)].second ? 1 : 0;
                    }
                    throw bad("arc/slot mismatch in region walk");
                };
                int ja = junction_of_arc(arc);   // 1 if the arc sits at the head junction
                int jb = junction_of_arc(nxt);
                if (ja == jb) throw bad("regional face uses a cap sector at " + bv.id);
                (void)sg;
                bool toward_head = jb == 1;  // traversal from tail-junction arc to head-junction
                // north sector = traversed tail->head (see rotation order)
                int south = toward_head ? 0 : 1;
                ce = ps.fal_long_eps.at({bv.ref, south == 0 ? 1 : 0});
                fwd = toward_head;
            }
            cell.corners.push_back(ce);
            cell.corner_forward.push_back(fwd);
        }
        // rotate so that corner i precedes side i (corner between side i-1, side i):
        // built with corner i AFTER side i, so shift corners by one
        std::rotate(cell.corners.begin(), cell.corners.end() - 1, cell.corners.end());
        std::rotate(cell.corner_forward.begin(), cell.corner_forward.end() - 1,
                    cell.corner_forward.end());
        ps.btface_cell[int(f)] = int(ps.cells.size());
        ps.cells.push_back(std::move(cell));
    }

    if (torus) {
        // vertical structure for FALs in the thickened torus: one vertical arc
        // per circle and per segment, one wall per bow-tie arc and side of the
        // torihedron
        throw bad("FAL diagrams in the thickened torus: vertical equations not supported yet");
    }

    // mu-edge normalizations
    for (size_t i = 0; i < ps.eps.size(); ++i) {
        if (!ps.eps[i].constant_one) continue;
        PeripheralStructure::LinearRow r;
        r.tag = "normalization[" + ps.eps[i].id + "]";
        r.scale_tube = ps.tubes[size_t(ps.eps[i].tube)].id;
        r.terms.push_back({ps.eps[i].var, 1.0});
        r.rhs = 1.0;
        ps.normalizations.push_back(r);
    }

    // taus, z variables, gauges
    for (size_t t = 0; t < ps.tubes.size(); ++t)
        if (ps.tubes[t].kind == TubeKind::Component || ps.tubes[t].kind == TubeKind::FalCircle)
            ps.tubes[t].tau = ps.add_var("tau[" + ps.tubes[t].id + "]", VarKind::Aux);
    ps.point_z.resize(ps.points.size());
    for (size_t p = 0; p < ps.points.size(); ++p)
        ps.point_z[p] = ps.add_var("z" + ps.points[p].id.substr(1), VarKind::Aux);
    for (const Tube& t : ps.tubes) {
        if (t.points.empty()) continue;
        PeripheralStructure::LinearRow g;
        g.tag = "gauge[" + t.id + "]";
        g.terms.push_back({ps.point_z[size_t(t.points[0])], 1.0});
        g.rhs = 0.0;
        ps.normalizations.push_back(g);
    }
    return ps;
}

}  // namespace tt
