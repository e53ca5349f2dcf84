#include "tt/fal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "tt/linalg.hpp"
#include "tt/triangulate.hpp"

namespace tt {

static std::runtime_error bad(const std::string& w) { return std::runtime_error(w); }

// --- criteria ------------------------------------------------------------------

namespace {

bool is_real(Complex z, double tol) { return std::abs(z.imag()) <= tol; }
bool is_imag(Complex z, double tol) { return std::abs(z.real()) <= tol; }

std::string show(Complex z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

Complex label(const PeripheralStructure& ps, int eps_idx, const Assignment& x) {
    return x[size_t(ps.eps[size_t(eps_idx)].var)];
}

}  // namespace

CriterionReport check_pure_imag(const PeripheralStructure& ps, const Assignment& x, double tol) {
    CriterionReport r;
    const FalDiagram& d = *ps.fal;
    for (size_t c = 0; c < d.circles.size(); ++c) {
        for (int m = 1; m <= 2; ++m) {
            Complex u = label(ps, ps.fal_mu_eps.at({int(c), m}), x);
            if (std::abs(u - Complex(1.0)) > tol)
                r.fail("u(" + d.circles[c].id + "^mu" + std::to_string(m) + ") = " + show(u) +
                       " != 1");
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (int top = 0; top < 2; ++top) {
                Complex u = label(ps, ps.fal_half_eps.at({int(c) * 2 + pass, top}), x);
                if (!is_real(u, tol) || std::abs(std::abs(u.real()) - 0.5) > tol)
                    r.fail("u(" + d.circles[c].id + "^" + std::to_string(pass + 1) +
                           (top ? "t" : "b") + ") = " + show(u) + " != +-1/2");
            }
        }
        for (int bot = 0; bot < 2; ++bot) {
            Complex u = x[size_t(ps.eps[size_t(ps.fal_zero_eps.at(int(c)) + bot)].var)];
            if (!is_imag(u, tol))
                r.fail("u(" + d.circles[c].id + "^0" + (bot ? "b" : "t") + ") = " + show(u) +
                       " not imaginary");
        }
        Complex w0 = x[size_t(ps.arcs[size_t(ps.fal_arc.at({int(c), 0}))].var)];
        if (!is_real(w0, tol)) r.fail("w(" + d.circles[c].id + "^0) = " + show(w0) + " not real");
        for (int ty = 1; ty <= 2; ++ty) {
            Complex w = x[size_t(ps.arcs[size_t(ps.fal_arc.at({int(c), ty}))].var)];
            if (!is_imag(w, tol))
                r.fail("w(" + d.circles[c].id + "^" + std::to_string(ty) + ") = " + show(w) +
                       " not imaginary");
        }
    }
    for (size_t s = 0; s < d.segments.size(); ++s) {
        Complex ul = label(ps, ps.fal_long_eps.at({int(s), 1}), x);
        Complex ur = label(ps, ps.fal_long_eps.at({int(s), 0}), x);
        if (std::abs(ul - ur) > tol)
            r.fail("u(" + d.segments[s].id + "^l) != u(" + d.segments[s].id + "^r)");
        if (!is_imag(ul, tol))
            r.fail("u(" + d.segments[s].id + "^l) = " + show(ul) + " not imaginary");
    }
    return r;
}

CriterionReport check_orientation(const PeripheralStructure& ps, const Assignment& x,
                                  double tol) {
    CriterionReport r;
    const FalDiagram& d = *ps.fal;
    for (size_t c = 0; c < d.circles.size(); ++c) {
        Complex u = x[size_t(ps.eps[size_t(ps.fal_zero_eps.at(int(c)))].var)];
        if (!(is_imag(u, tol) && u.imag() < -tol))
            r.fail("u(" + d.circles[c].id + "^0t) = " + show(u) + " not in iR_{<0}");
    }
    for (size_t s = 0; s < d.segments.size(); ++s) {
        Complex ul = label(ps, ps.fal_long_eps.at({int(s), 1}), x);
        if (!(is_imag(ul, tol) && ul.imag() < -tol))
            r.fail("u(" + d.segments[s].id + "^l) = " + show(ul) + " not in iR_{<0}");
    }
    return r;
}

CriterionReport check_shape_range(const PeripheralStructure& ps, const Assignment& x,
                                  double tol) {
    CriterionReport r;
    for (const Cell& cell : ps.cells) {
        if (cell.kind != CellKind::Regional) continue;
        size_t n = cell.size();
        if (n < 4) continue;  // a triangle admits no four distinct vertices
        // flanking-edge pairs at every side
        for (size_t i = 0; i < n; ++i) {
            Complex z = eval_shape(ps, cell, i, x);
            if (!is_real(z, tol) || z.real() < tol || z.real() > 1 - tol)
                r.fail(cell.id + " side " + std::to_string(i) + ": zeta = " + show(z) +
                       " not in (0,1)");
        }
        // mixed side/diagonal pairs: replace the forward flanking edge by the
        // peripheral edge to a chord ending further along the region
        for (size_t i = 0; i < n && n >= 4; ++i) {
            Complex w = x[size_t(ps.arcs[size_t(cell.sides[i])].var)];
            Complex u_back = (cell.corner_forward[i] ? 1.0 : -1.0) *
                             x[size_t(ps.eps[size_t(cell.corners[i])].var)];
            for (size_t far = i + 3; far < i + n - 1; ++far) {
                // chord from the vertex after side i to the vertex after side
                // far-1, i.e. skipping at least one corner on each side
                std::vector<WordToken> word;
                for (size_t j = i + 1; j < far; ++j) {
                    size_t k = j % n;
                    word.push_back(
                        {false, ps.eps[size_t(cell.corners[k])].var, cell.corner_forward[k]});
                    word.push_back({true, ps.arcs[size_t(cell.sides[k])].var, true});
                }
                // strip the leading corner eps: the word must start at side i's
                // far endpoint
                word.erase(word.begin());
                auto ext = extend_labels(word, x);
                if (!ext) {
                    r.fail(cell.id + ": chord label read-off failed");
                    continue;
                }
                // peripheral edge from gamma_i to the chord at the shared vertex
                Complex u_fwd = ext->u;
                Complex zeta = w / (u_back * u_fwd);
                if (!is_real(zeta, tol) || std::abs(zeta.real()) < tol ||
                    std::abs(zeta.real()) > 1 - tol)
                    r.fail(cell.id + " side " + std::to_string(i) + " chord " +
                           std::to_string(far % n) + ": zeta = " + show(zeta) +
                           " not real in the unit range");
            }
        }
    }
    return r;
}

FalCriteriaReport fal_criteria(const PeripheralStructure& ps, const Assignment& x, double tol) {
    FalCriteriaReport r;
    r.pure_imag = check_pure_imag(ps, x, tol);
    r.orientation = check_orientation(ps, x, tol);
    r.shape_range = check_shape_range(ps, x, tol);
    return r;
}

bool is_geometric_fal(const PeripheralStructure& ps, const Assignment& x, double tol) {
    return fal_criteria(ps, x, tol).verdict();
}

// --- solution -> packing ----------------------------------------------------------

PackingResult solution_to_packing(const PeripheralStructure& ps, const Assignment& x) {
    PackingResult out;
    const FalDiagram& d = *ps.fal;
    const BowTieGraph& btg = d.bowtie;
    DevelopedComplex dev = develop_fal_ball(ps, x, false);
    RegionGraph rg = region_graph(btg);
    // circumscribe the developed corners of every non-bow-tie face
    for (size_t v = 0; v < rg.face_of_vertex.size(); ++v) {
        int f = rg.face_of_vertex[v];
        double res = 0;
        auto c = circumfit(dev.corners[size_t(f)], &res);
        if (!c) {
            out.error = "region corners do not span a circle";
            return out;
        }
        out.circumfit_residual = std::max(out.circumfit_residual, res);
        out.packing.circles.push_back(*c);
        out.packing.btface_of_circle.push_back(f);
    }
    // tangency points per bow-tie vertex from the incident region circles
    std::vector<int> circle_of_face(btg.faces.size(), -1);
    for (size_t v = 0; v < rg.face_of_vertex.size(); ++v)
        circle_of_face[size_t(rg.face_of_vertex[v])] = int(v);
    out.packing.tangencies.assign(btg.vertices.size(), PPoint::infinity());
    for (size_t e = 0; e < rg.edges.size(); ++e) {
        int btv = rg.btvertex_of_edge[e];
        const GeneralizedCircle& c1 = out.packing.circles[size_t(rg.edges[e][0])];
        const GeneralizedCircle& c2 = out.packing.circles[size_t(rg.edges[e][1])];
        out.tangency_defect = std::max(out.tangency_defect, tangency_residual(c1, c2));
        auto tp = tangency_point(c1, c2);
        if (!tp) {
            out.error = "adjacent region circles are not tangent";
            return out;
        }
        out.packing.tangencies[size_t(btv)] = *tp;
    }
    out.ok = out.tangency_defect < 1e-6;
    if (!out.ok && out.error.empty()) out.error = "tangency residual too large";
    return out;
}

// --- packing -> solution ----------------------------------------------------------

namespace {

struct Frames {
    std::vector<Mat2> M;  // per bow-tie vertex
};

// the bow-tie edge from vertex v of a given circle/type/side
int bt_edge_at(const BowTieGraph& btg, int circle, int type, int side) {
    for (size_t e = 0; e < btg.edges.size(); ++e)
        if (btg.edges[e].circle == circle && btg.edges[e].type == type &&
            btg.edges[e].side == side)
            return int(e);
    throw bad("missing bow-tie edge");
}

int other_end(const BtEdge& e, int v) { return e.ends[0] == v ? e.ends[1] : e.ends[0]; }

}  // namespace

Assignment packing_to_solution(const CirclePacking& pk, const PeripheralStructure& ps,
                               double* aux_residual) {
    const FalDiagram& d = *ps.fal;
    const BowTieGraph& btg = d.bowtie;
    auto tang = [&](int btv) { return pk.tangencies[size_t(btv)]; };

    // local frame per bow-tie vertex: tangency to infinity, meridian to one
    std::vector<Mat2> M(btg.vertices.size());
    auto base_map = [&](const PPoint& p) {
        // z -> 1 / (z - p)
        if (p.is_infinite()) return Mat2::id();
        Complex z = p.value();
        return Mat2{{0.0, 1.0, 1.0, -z}};
    };
    // passages of circle c: junction data from the slots
    struct Junction {
        int seg_in, seg_out;
        int circle, pass;        // 1-based passage
        bool interior_right;
    };
    std::vector<std::array<Junction, 2>> junctions(d.circles.size());
    for (size_t c = 0; c < d.circles.size(); ++c) {
        for (int pn = 1; pn <= 2; ++pn) {
            int qa = pn == 1 ? 0 : 1, qb = pn == 1 ? 3 : 2;
            auto [sa, ha] = d.circles[c].slots[size_t(qa)];
            auto [sb, hb] = d.circles[c].slots[size_t(qb)];
            Junction j;
            j.circle = int(c);
            j.pass = pn;
            j.seg_in = ha ? sa : sb;
            j.seg_out = ha ? sb : sa;
            int head_slot = ha ? qa : qb;
            bool west = (head_slot == 0 || head_slot == 1);
            bool aligned = west;
            j.interior_right = (pn == 1) == aligned;
            junctions[c][size_t(pn - 1)] = j;
        }
    }
    int seg0 = int(d.circles.size());
    for (size_t c = 0; c < d.circles.size(); ++c) {
        Mat2 S = base_map(tang(int(c)));
        // meridian: from the gamma^{1l} foot to the gamma^{1r} foot
        int e1l = bt_edge_at(btg, int(c), 1, 0), e1r = bt_edge_at(btg, int(c), 1, 1);
        PPoint ql = apply(S, tang(other_end(btg.edges[size_t(e1l)], int(c))));
        PPoint qr = apply(S, tang(other_end(btg.edges[size_t(e1r)], int(c))));
        Complex m = qr.value() - ql.value();
        if (std::abs(m) < 1e-13) throw bad("degenerate circle-cusp meridian");
        M[c] = Mat2{{1.0 / m, 0.0, 0.0, 1.0}} * S;
    }
    for (size_t s = 0; s < d.segments.size(); ++s) {
        int v = seg0 + int(s);
        Mat2 S = base_map(tang(v));
        // use the head junction: the half-meridian from the gamma^0 foot to the
        // passage-arc foot must land at +-1/2
        const FalSegment& sg = d.segments[s];
        int slot = sg.head_slot;
        int side = (slot == 0 || slot == 1) ? 0 : 1;
        int pass = (slot == 0 || slot == 3) ? 1 : 2;
        const Junction& J = junctions[size_t(sg.head_circle)][size_t(pass - 1)];
        int e0 = bt_edge_at(btg, sg.head_circle, 0, side);
        int ep = bt_edge_at(btg, sg.head_circle, pass, side);
        PPoint q0 = apply(S, tang(other_end(btg.edges[size_t(e0)], v)));
        PPoint qp = apply(S, tang(other_end(btg.edges[size_t(ep)], v)));
        Complex delta = qp.value() - q0.value();
        if (std::abs(delta) < 1e-13) throw bad("degenerate strand-cusp half meridian");
        // the top half-meridian carries u = +-1/2 with the sign of its winding
        Complex target = J.interior_right ? Complex(0.5) : Complex(-0.5);
        M[size_t(v)] = Mat2{{target / delta, 0.0, 0.0, 1.0}} * S;
    }

    Assignment x(ps.vars.size(), Complex(0.0));
    // crossing labels from frame pairs; the translation freedom of either view
    // drops out of w = -det(N) / N10^2
    for (const Arc& a : ps.arcs) {
        int e = bt_edge_at(btg, a.fal_circle, a.fal_type, 0);
        const BtEdge& be = btg.edges[size_t(e)];
        Mat2 N = M[size_t(be.ends[1])] * M[size_t(be.ends[0])].inverse_projective();
        if (std::abs(N.a[2]) < 1e-13 * N.norm()) throw bad("arc label read-off failed");
        x[size_t(a.var)] = (N.a[1] * N.a[2] - N.a[0] * N.a[3]) / (N.a[2] * N.a[2]);
    }
    // peripheral labels
    auto foot = [&](int at_vertex, int bt_edge) {
        return apply(M[size_t(at_vertex)],
                     tang(other_end(btg.edges[size_t(bt_edge)], at_vertex)))
            .value();
    };
    for (size_t c = 0; c < d.circles.size(); ++c) {
        // e^{0t} from the developed top feet; the bottom copy is its mirror
        // (the top-bottom reflection fixes the circle-cusp meridian)
        {
            Complex q1 = foot(int(c), bt_edge_at(btg, int(c), 1, 0));
            Complex q2 = foot(int(c), bt_edge_at(btg, int(c), 2, 0));
            const Eps& et = ps.eps[size_t(ps.fal_zero_eps.at(int(c)))];
            const Eps& eb = ps.eps[size_t(ps.fal_zero_eps.at(int(c)) + 1)];
            x[size_t(et.var)] = q2 - q1;
            x[size_t(eb.var)] = std::conj(q2 - q1);
        }
        for (int m = 1; m <= 2; ++m)
            x[size_t(ps.eps[size_t(ps.fal_mu_eps.at({int(c), m}))].var)] = 1.0;
        // half meridians at the two passages: the top route is what the packing
        // develops; the bottom one differs by the meridian winding
        for (int pn = 1; pn <= 2; ++pn) {
            const Junction& J = junctions[c][size_t(pn - 1)];
            const FalSegment& sg = d.segments[size_t(J.seg_in)];
            int slot = sg.head_slot;
            int side = (slot == 0 || slot == 1) ? 0 : 1;
            int v = seg0 + J.seg_in;
            Complex q0 = foot(v, bt_edge_at(btg, int(c), 0, side));
            Complex qp = foot(v, bt_edge_at(btg, int(c), pn, side));
            Complex delta = qp - q0;
            const Eps& et = ps.eps[size_t(ps.fal_half_eps.at({int(c) * 2 + (pn - 1), 1}))];
            const Eps& eb = ps.eps[size_t(ps.fal_half_eps.at({int(c) * 2 + (pn - 1), 0}))];
            x[size_t(et.var)] = delta;
            x[size_t(eb.var)] = delta - Complex(et.w_mu);
        }
    }
    for (size_t s = 0; s < d.segments.size(); ++s) {
        const FalSegment& sg = d.segments[s];
        int v = seg0 + int(s);
        for (int south = 0; south < 2; ++south) {
            const Eps& ep = ps.eps[size_t(ps.fal_long_eps.at({int(s), south == 0 ? 1 : 0}))];
            // feet of the bounding arcs at the two ends on this side: match the
            // eps endpoints by peripheral point
            auto end_foot = [&](int circle, int slot, bool head) -> Complex {
                int side = (slot == 0 || slot == 1) ? 0 : 1;
                int pass = (slot == 0 || slot == 3) ? 1 : 2;
                // north side = strand left; the in-plane attach point is P_O
                // (gamma^0) on the interior side, P_S (passage arc) otherwise
                const Junction& J = junctions[size_t(circle)][size_t(pass - 1)];
                bool o_on_north = !J.interior_right;
                bool want_north = south == 0;
                bool use_zero_arc = (o_on_north == want_north);
                if (d.circles[size_t(circle)].half_twist) use_zero_arc = !use_zero_arc;
                (void)head;
                int e = use_zero_arc ? bt_edge_at(btg, circle, 0, side)
                                     : bt_edge_at(btg, circle, pass, side);
                return foot(v, e);
            };
            Complex zt = end_foot(sg.tail_circle, sg.tail_slot, false);
            Complex zh = end_foot(sg.head_circle, sg.head_slot, true);
            x[size_t(ep.var)] = zh - zt + Complex(ep.w_mu);
        }
    }

    // aux variables: least squares on the linear boundary/gauge equations
    EquationSystem sys = build_system(ps);
    std::vector<const Poly*> rows;
    for (const PolyEquation& e : sys.equations)
        if (e.tag == "boundary" || e.tag == "gauge" || e.tag == "normalization")
            rows.push_back(&e.poly);
    std::vector<int> aux_vars;
    for (size_t v = 0; v < ps.vars.size(); ++v)
        if (ps.vars[v].kind == VarKind::Aux) aux_vars.push_back(int(v));
    std::map<int, int> aux_col;
    for (size_t i = 0; i < aux_vars.size(); ++i) aux_col[aux_vars[i]] = int(i);
    CMat A(int(rows.size()), int(aux_vars.size()));
    std::vector<Complex> b(rows.size(), 0.0);
    for (size_t i = 0; i < rows.size(); ++i) {
        for (const Monomial& mo : rows[i]->terms()) {
            if (mo.exps.empty()) {
                b[i] -= mo.coeff;
            } else {
                int var = mo.exps[0].first;
                auto it = aux_col.find(var);
                if (it == aux_col.end())
                    b[i] -= mo.coeff * x[size_t(var)];
                else
                    A.at(int(i), it->second) += mo.coeff;
            }
        }
    }
    QR qr(A);
    auto sol = qr.solve(b);
    for (size_t i = 0; i < aux_vars.size(); ++i) x[size_t(aux_vars[i])] = sol[i];
    if (aux_residual) {
        auto ax = matvec(A, sol);
        double worst = 0;
        for (size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
        *aux_residual = worst;
    }
    return x;
}

// --- univalence ----------------------------------------------------------------

UnivalenceReport check_univalence(const CirclePacking& pk, const PeripheralStructure& ps) {
    UnivalenceReport out;
    const BowTieGraph& btg = ps.fal->bowtie;
    RegionGraph rg = region_graph(btg);
    size_t nv = pk.circles.size();
    // adjacency and the counterclockwise order of tangencies around each region
    std::vector<std::vector<int>> nbr_btv(nv);  // bt vertices around each face, in order
    for (size_t v = 0; v < nv; ++v) {
        const BtFace& f = btg.faces[size_t(pk.btface_of_circle[v])];
        nbr_btv[v] = f.corner_vertices;
    }
    auto try_filling = [&](const std::vector<int>& fill, UnivalenceReport& rep) {
        rep.order_preserving = true;
        rep.locally_univalent = true;
        // order preservation: tangency points around circle v, oriented by the
        // interior, must match the face walk order
        for (size_t v = 0; v < nv && rep.order_preserving; ++v) {
            const GeneralizedCircle& c = pk.circles[v];
            std::vector<double> angles;
            bool usable = true;
            for (int btv : nbr_btv[v]) {
                PPoint p = pk.tangencies[size_t(btv)];
                if (c.is_line()) {
                    // parameterize the line by signed position along direction
                    Complex dir = c.line_normal() * Complex(0, 1);
                    if (p.is_infinite()) {
                        usable = false;
                        break;
                    }
                    angles.push_back(std::real(std::conj(dir) * p.value()) * fill[v]);
                } else {
                    if (p.is_infinite()) {
                        usable = false;
                        break;
                    }
                    double ang = std::arg(p.value() - c.center());
                    angles.push_back(fill[v] > 0 ? ang : -ang);
                }
            }
            if (!usable || angles.size() < 3) continue;  // lines through infinity
            // cyclic monotonicity
            size_t n = angles.size();
            int drops = 0;
            for (size_t i = 0; i < n; ++i)
                if (angles[(i + 1) % n] < angles[i]) ++drops;
            if (drops > 1) rep.order_preserving = false;
        }
        for (size_t e = 0; e < rg.edges.size() && rep.locally_univalent; ++e) {
            auto [a, b] = rg.edges[e];
            if (!interiors_disjoint(pk.circles[size_t(a)], fill[size_t(a)],
                                    pk.circles[size_t(b)], fill[size_t(b)]))
                rep.locally_univalent = false;
        }
        rep.univalent = rep.order_preserving && rep.locally_univalent;
        if (rep.univalent) {
            rep.univalent_bruteforce = true;
            for (size_t a = 0; a < nv && rep.univalent_bruteforce; ++a)
                for (size_t b = a + 1; b < nv; ++b)
                    if (!interiors_disjoint(pk.circles[a], fill[a], pk.circles[b],
                                            fill[size_t(b)])) {
                        rep.univalent_bruteforce = false;
                        break;
                    }
            rep.univalent = rep.univalent && rep.univalent_bruteforce;
        }
        rep.filling = fill;
    };
    // search over interior fillings (desk scale)
    if (nv > 16) throw bad("univalence search limited to 16 circles");
    UnivalenceReport best;
    for (unsigned mask = 0; mask < (1u << nv); ++mask) {
        std::vector<int> fill(nv);
        for (size_t v = 0; v < nv; ++v) fill[v] = (mask >> v) & 1 ? 1 : -1;
        UnivalenceReport rep;
        try_filling(fill, rep);
        auto score = [](const UnivalenceReport& r) {
            return (r.univalent ? 4 : 0) + (r.locally_univalent ? 2 : 0) +
                   (r.order_preserving ? 1 : 0);
        };
        if (score(rep) > score(best)) best = rep;
        if (best.univalent) break;
    }
    return best;
}

// --- io --------------------------------------------------------------------------

std::string packing_to_json(const CirclePacking& pk, const PeripheralStructure& ps) {
    nlohmann::json j;
    j["circles"] = nlohmann::json::array();
    for (size_t v = 0; v < pk.circles.size(); ++v) {
        const GeneralizedCircle& c = pk.circles[v];
        nlohmann::json jc{{"hermitian", {c.a, c.b.real(), c.b.imag(), c.d}},
                          {"btface", pk.btface_of_circle[v]}};
        if (!c.is_line()) {
            jc["center"] = {c.center().real(), c.center().imag()};
            jc["radius"] = c.radius();
        }
        j["circles"].push_back(jc);
    }
    j["tangencies"] = nlohmann::json::array();
    for (size_t t = 0; t < pk.tangencies.size(); ++t) {
        const PPoint& p = pk.tangencies[t];
        j["tangencies"].push_back(
            {{"vertex", ps.fal->bowtie.vertices[t].id},
             {"point", p.is_infinite()
                           ? nlohmann::json("inf")
                           : nlohmann::json({p.value().real(), p.value().imag()})}});
    }
    return j.dump(1);
}

CirclePacking packing_from_json(const std::string& text, const PeripheralStructure& ps) {
    auto j = nlohmann::json::parse(text);
    CirclePacking pk;
    for (auto& jc : j.at("circles")) {
        GeneralizedCircle c;
        c.a = jc.at("hermitian").at(0).get<double>();
        c.b = Complex(jc.at("hermitian").at(1).get<double>(), jc.at("hermitian").at(2).get<double>());
        c.d = jc.at("hermitian").at(3).get<double>();
        c.normalize();
        pk.circles.push_back(c);
        pk.btface_of_circle.push_back(jc.at("btface").get<int>());
    }
    pk.tangencies.assign(ps.fal->bowtie.vertices.size(), PPoint::infinity());
    if (j.contains("tangencies")) {
        size_t i = 0;
        for (auto& jt : j.at("tangencies")) {
            if (jt.at("point").is_string())
                pk.tangencies[i] = PPoint::infinity();
            else
                pk.tangencies[i] = PPoint::at(Complex(jt.at("point").at(0).get<double>(),
                                                      jt.at("point").at(1).get<double>()));
            ++i;
        }
    } else {
        // recompute from tangent circle pairs
        RegionGraph rg = region_graph(ps.fal->bowtie);
        for (size_t e = 0; e < rg.edges.size(); ++e) {
            auto tp = tangency_point(pk.circles[size_t(rg.edges[e][0])],
                                     pk.circles[size_t(rg.edges[e][1])]);
            if (tp) pk.tangencies[size_t(rg.btvertex_of_edge[e])] = *tp;
        }
    }
    return pk;
}

std::string packing_svg(const CirclePacking& pk, const PeripheralStructure& ps) {
    // view box from finite tangency points
    double lo_x = 1e9, lo_y = 1e9, hi_x = -1e9, hi_y = -1e9;
    auto grow = [&](Complex z) {
        lo_x = std::min(lo_x, z.real());
        hi_x = std::max(hi_x, z.real());
        lo_y = std::min(lo_y, z.imag());
        hi_y = std::max(hi_y, z.imag());
    };
    for (const PPoint& p : pk.tangencies)
        if (!p.is_infinite()) grow(p.value());
    for (const GeneralizedCircle& c : pk.circles)
        if (!c.is_line()) {
            grow(c.center() + c.radius());
            grow(c.center() - c.radius());
            grow(c.center() + Complex(0, c.radius()));
            grow(c.center() - Complex(0, c.radius()));
        }
    if (lo_x > hi_x) {
        lo_x = lo_y = -1;
        hi_x = hi_y = 1;
    }
    double pad = 0.1 * std::max(hi_x - lo_x, hi_y - lo_y) + 0.1;
    lo_x -= pad;
    lo_y -= pad;
    hi_x += pad;
    hi_y += pad;
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' viewBox='" << lo_x << " " << -hi_y << " "
       << (hi_x - lo_x) << " " << (hi_y - lo_y) << "'>\n";
    os << "<g fill='none' stroke='black' stroke-width='" << 0.01 * (hi_x - lo_x) << "'>\n";
    for (size_t v = 0; v < pk.circles.size(); ++v) {
        const GeneralizedCircle& c = pk.circles[v];
        if (c.is_line()) {
            // draw the chord of the viewbox
            Complex n = c.line_normal();
            double off = -c.line_offset();
            Complex dir = n * Complex(0, 1);
            Complex p0 = n * off - dir * 3.0 * (hi_x - lo_x);
            Complex p1 = n * off + dir * 3.0 * (hi_x - lo_x);
            os << "<line x1='" << p0.real() << "' y1='" << -p0.imag() << "' x2='" << p1.real()
               << "' y2='" << -p1.imag() << "'/>\n";
        } else {
            os << "<circle cx='" << c.center().real() << "' cy='" << -c.center().imag()
               << "' r='" << c.radius() << "'/>\n";
        }
    }
    os << "</g>\n<g fill='red'>\n";
    for (size_t t = 0; t < pk.tangencies.size(); ++t) {
        if (pk.tangencies[t].is_infinite()) continue;
        Complex z = pk.tangencies[t].value();
        os << "<circle cx='" << z.real() << "' cy='" << -z.imag() << "' r='"
           << 0.015 * (hi_x - lo_x) << "'/>\n";
        os << "<text x='" << z.real() << "' y='" << -z.imag() << "' font-size='"
           << 0.04 * (hi_x - lo_x) << "'>" << ps.fal->bowtie.vertices[t].id << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace tt
