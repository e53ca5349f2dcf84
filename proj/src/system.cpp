#include "tt/system.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace tt {

using nlohmann::json;

int EquationSystem::var_index(const std::string& id) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i].id == id) return int(i);
    throw std::runtime_error("unknown variable: " + id);
}

namespace {

Complex nu_of(const std::map<std::string, Complex>& nu, const std::string& tube_id) {
    auto it = nu.find(tube_id);
    return it == nu.end() ? Complex(1.0) : it->second;
}

// kappa sign at side i of a cell (between corners i and i+1): +1 when the two
// flanking peripheral edges disagree in traversal direction.
int kappa_at(const Cell& cell, size_t i) {
    size_t n = cell.size();
    return cell.corner_forward[i] == cell.corner_forward[(i + 1) % n] ? -1 : 1;
}

// symbolic 2x2 polynomial matrix
struct PolyMat {
    Poly a, b, c, d;
    static PolyMat identity() {
        PolyMat m;
        m.a = Poly::constant(1.0);
        m.d = Poly::constant(1.0);
        return m;
    }
    PolyMat operator*(const PolyMat& o) const {
        PolyMat r;
        r.a = a * o.a + b * o.c;
        r.b = a * o.b + b * o.d;
        r.c = c * o.a + d * o.c;
        r.d = c * o.b + d * o.d;
        return r;
    }
};

PolyMat token_matrix(const WordToken& t) {
    PolyMat m;
    if (t.is_arc) {
        m.b = Poly::variable(t.var);
        m.c = Poly::constant(1.0);
    } else {
        m.a = Poly::constant(1.0);
        m.d = Poly::constant(1.0);
        m.b = Poly::variable(t.var) * Complex(t.forward ? -1.0 : 1.0);
    }
    return m;
}

}  // namespace

std::vector<Poly> cell_region_polys(const PeripheralStructure& ps, const Cell& cell) {
    size_t n = cell.size();
    std::vector<Poly> out;
    if (n >= 3) {
        for (int shift : {0, 1, -1}) {
            // paper indexing: corners e_1..e_n, sides c_1..c_n, f_n in
            // zeta_2..zeta_{n-1}; zero-based side index i covers zeta_{i+1}
            Poly f;
            std::vector<int> subset;
            auto sgn = [n](size_t k) { return ((n + k + 1) % 2 == 0) ? 1.0 : -1.0; };
            auto emit = [&](const std::vector<int>& S) {
                std::vector<bool> consumed(n, false);  // u-slots 1..n-1 used by S
                Poly m = Poly::constant(sgn(S.size()));
                for (int i : S) {
                    size_t ii = size_t(((i + shift) % int(n) + int(n)) % int(n));
                    m = m * Poly::variable(ps.arcs[size_t(cell.sides[ii])].var) *
                        Complex(double(kappa_at(cell, ii)));
                    consumed[size_t(i)] = true;
                    consumed[size_t(i + 1)] = true;
                }
                for (size_t j = 1; j <= n - 1; ++j) {
                    if (consumed[j]) continue;
                    size_t jj = size_t(((int(j) + shift) % int(n) + int(n)) % int(n));
                    m = m * Poly::variable(ps.eps[size_t(cell.corners[jj])].var);
                }
                f = f + m;
            };
            emit({});
            // subsets of {1..n-2} with gaps >= 2 (zero-based sides)
            auto rec = [&](auto&& self, int start) -> void {
                for (int i = start; i + 1 <= int(n) - 1; ++i) {
                    subset.push_back(i);
                    emit(subset);
                    self(self, i + 2);
                    subset.pop_back();
                }
            };
            rec(rec, 1);
            out.push_back(std::move(f));
        }
        return out;
    }
    // monogons and bigons: use the projective matrix relation verbatim
    PolyMat M = PolyMat::identity();
    for (size_t i = 0; i < n; ++i) {
        WordToken te{false, ps.eps[size_t(cell.corners[i])].var, cell.corner_forward[i]};
        WordToken ta{true, ps.arcs[size_t(cell.sides[i])].var, true};
        M = token_matrix(te) * M;
        M = token_matrix(ta) * M;
    }
    // proportional to the identity: both off-diagonal entries vanish and the
    // diagonal entries agree
    out.push_back(M.b);
    out.push_back(M.c);
    out.push_back(M.a - M.d);
    return out;
}

Complex eval_shape(const PeripheralStructure& ps, const Cell& cell, size_t i,
                   const Assignment& x) {
    size_t n = cell.size();
    Complex w = x[size_t(ps.arcs[size_t(cell.sides[i])].var)];
    Complex u1 = x[size_t(ps.eps[size_t(cell.corners[i])].var)];
    Complex u2 = x[size_t(ps.eps[size_t(cell.corners[(i + 1) % n])].var)];
    return double(kappa_at(cell, i)) * w / (u1 * u2);
}

EquationSystem build_system(const PeripheralStructure& ps,
                            const std::map<std::string, Complex>& nu) {
    EquationSystem sys;
    sys.vars = ps.vars;
    sys.n_label_vars = ps.n_label_vars;

    // tube consistency: u = dz + w_mu * nu + w_lam * tau + w_xy . tau_xy
    for (const Eps& e : ps.eps) {
        const Tube& tube = ps.tubes[size_t(e.tube)];
        Poly p = Poly::variable(e.var);
        p = p - Poly::variable(ps.point_z[size_t(e.head)]) +
            Poly::variable(ps.point_z[size_t(e.tail)]);
        if (e.w_mu != 0.0) p = p - Poly::constant(e.w_mu * nu_of(nu, tube.id));
        if (e.w_lam != 0 && tube.tau >= 0)
            p = p - Poly::variable(tube.tau) * Complex(double(e.w_lam));
        for (int ax = 0; ax < 2; ++ax)
            if (e.w_xy[ax] != 0 && tube.tau_xy[ax] >= 0)
                p = p - Poly::variable(tube.tau_xy[ax]) * Complex(double(e.w_xy[ax]));
        sys.equations.push_back({std::move(p), "boundary", e.id});
    }

    // normalizations and gauges (meridian rows scale with nu)
    for (const auto& row : ps.normalizations) {
        Poly p;
        for (auto [v, c] : row.terms) p = p + Poly::variable(v) * c;
        Complex rhs = row.rhs;
        if (!row.scale_tube.empty()) rhs *= nu_of(nu, row.scale_tube);
        p = p - Poly::constant(rhs);
        sys.equations.push_back(
            {std::move(p), row.tag.rfind("gauge", 0) == 0 ? "gauge" : "normalization", row.tag});
    }

    if (ps.link) {
        const LinkDiagram& d = *ps.link;
        for (size_t e = 0; e < d.edges.size(); ++e) {
            Poly p = Poly::variable(ps.eps[size_t(ps.old_eps.at({int(e), 1}))].var) -
                     Poly::variable(ps.eps[size_t(ps.old_eps.at({int(e), 0}))].var);
            Complex rhs = double(d.kappa_prime(int(e))) *
                          nu_of(nu, ps.tubes[size_t(ps.eps[size_t(ps.old_eps.at({int(e), 0}))].tube)].id);
            p = p - Poly::constant(rhs);
            sys.equations.push_back({std::move(p), "edge", "u[" + d.edges[e].id + "]"});
        }
        // over/under incidences: u(r) - u(l) = +-1
        std::map<std::pair<int, int>, std::array<int, 2>> pairs;  // (pass, crossing) -> {l, r}
        for (size_t i = 0; i < ps.eps.size(); ++i) {
            const Eps& e = ps.eps[i];
            if (e.kind != EpsKind::OverType) continue;
            pairs[{e.pass, e.crossing}][size_t(e.side)] = int(i);
        }
        for (auto& [key, lr] : pairs) {
            const Strandpass& sp = d.passes[size_t(key.first)];
            Poly p = Poly::variable(ps.eps[size_t(lr[1])].var) -
                     Poly::variable(ps.eps[size_t(lr[0])].var);
            Complex rhs = (sp.over ? 1.0 : -1.0) *
                          nu_of(nu, ps.tubes[size_t(ps.eps[size_t(lr[0])].tube)].id);
            p = p - Poly::constant(rhs);
            sys.equations.push_back({std::move(p), "edge", ps.eps[size_t(lr[0])].id});
        }
    }
    if (ps.fal) {
        // segment edge equation u(e_j^l) = u(e_j^r)
        for (size_t s = 0; s < ps.fal->segments.size(); ++s) {
            Poly p = Poly::variable(ps.eps[size_t(ps.fal_long_eps.at({int(s), 1}))].var) -
                     Poly::variable(ps.eps[size_t(ps.fal_long_eps.at({int(s), 0}))].var);
            sys.equations.push_back({std::move(p), "edge", "u[" + ps.fal->segments[s].id + "]"});
        }
    }

    // region equations
    for (const Cell& cell : ps.cells) {
        auto polys = cell_region_polys(ps, cell);
        const char* tag = cell.kind == CellKind::Vertical ? "vertical" : "region";
        for (size_t k = 0; k < polys.size(); ++k) {
            const char* suffix = cell.size() >= 3 ? (k == 0 ? "" : (k == 1 ? "+" : "-"))
                                                  : (k == 0 ? ".b" : (k == 1 ? ".c" : ".ad"));
            sys.equations.push_back({polys[k], tag, cell.id + suffix});
        }
        MatrixWord w;
        w.cell = cell.id;
        for (size_t i = 0; i < cell.size(); ++i) {
            w.tokens.push_back({false, ps.eps[size_t(cell.corners[i])].var, cell.corner_forward[i]});
            w.tokens.push_back({true, ps.arcs[size_t(cell.sides[i])].var, true});
        }
        sys.words.push_back(std::move(w));
    }
    return sys;
}

Assignment gauge_rescale(const PeripheralStructure& ps, const Assignment& x,
                         const std::map<std::string, Complex>& nu) {
    Assignment y = x;
    for (const Eps& e : ps.eps)
        y[size_t(e.var)] *= nu_of(nu, ps.tubes[size_t(e.tube)].id);
    for (const Arc& a : ps.arcs) {
        Complex f = 1.0;
        for (int end = 0; end < 2; ++end) {
            int t = ps.points[size_t(a.endpoint[end])].tube;
            f *= nu_of(nu, ps.tubes[size_t(t)].id);
        }
        y[size_t(a.var)] *= f;
    }
    // aux variables follow their tubes
    for (size_t p = 0; p < ps.points.size(); ++p)
        y[size_t(ps.point_z[p])] *= nu_of(nu, ps.tubes[size_t(ps.points[p].tube)].id);
    for (const Tube& t : ps.tubes) {
        if (t.tau >= 0) y[size_t(t.tau)] *= nu_of(nu, t.id);
        for (int ax = 0; ax < 2; ++ax)
            if (t.tau_xy[ax] >= 0) y[size_t(t.tau_xy[ax])] *= nu_of(nu, t.id);
    }
    return y;
}

// --- json --------------------------------------------------------------------

std::string EquationSystem::dump_json() const {
    json j;
    j["variables"] = json::array();
    for (const Variable& v : vars)
        j["variables"].push_back({{"id", v.id},
                                  {"kind", v.kind == VarKind::Crossing
                                               ? "w"
                                               : (v.kind == VarKind::EdgeLabel ? "u" : "aux")}});
    j["n_label_vars"] = n_label_vars;
    j["equations"] = json::array();
    for (const PolyEquation& e : equations) {
        json terms = json::array();
        for (const Monomial& m : e.poly.terms()) {
            json exps = json::array();
            for (auto [v, p] : m.exps) exps.push_back({v, p});
            terms.push_back({{"coeff", {m.coeff.real(), m.coeff.imag()}}, {"exps", exps}});
        }
        j["equations"].push_back({{"tag", e.tag}, {"cell", e.cell}, {"terms", terms}});
    }
    j["words"] = json::array();
    for (const MatrixWord& w : words) {
        json toks = json::array();
        for (const WordToken& t : w.tokens)
            toks.push_back({{"arc", t.is_arc}, {"var", t.var}, {"fwd", t.forward}});
        j["words"].push_back({{"cell", w.cell}, {"tokens", toks}});
    }
    return j.dump(1);
}

EquationSystem EquationSystem::load_json(const std::string& text) {
    json j = json::parse(text);
    EquationSystem s;
    for (auto& v : j.at("variables")) {
        std::string k = v.at("kind").get<std::string>();
        s.vars.push_back({v.at("id").get<std::string>(),
                          k == "w" ? VarKind::Crossing
                                   : (k == "u" ? VarKind::EdgeLabel : VarKind::Aux)});
    }
    s.n_label_vars = j.at("n_label_vars").get<int>();
    for (auto& e : j.at("equations")) {
        PolyEquation pe;
        pe.tag = e.at("tag").get<std::string>();
        pe.cell = e.at("cell").get<std::string>();
        for (auto& t : e.at("terms")) {
            Complex c(t.at("coeff").at(0).get<double>(), t.at("coeff").at(1).get<double>());
            std::vector<std::pair<int, int>> exps;
            for (auto& x : t.at("exps")) exps.push_back({x.at(0).get<int>(), x.at(1).get<int>()});
            pe.poly.add_term(c, exps);
        }
        s.equations.push_back(std::move(pe));
    }
    for (auto& w : j.at("words")) {
        MatrixWord mw;
        mw.cell = w.at("cell").get<std::string>();
        for (auto& t : w.at("tokens"))
            mw.tokens.push_back(
                {t.at("arc").get<bool>(), t.at("var").get<int>(), t.at("fwd").get<bool>()});
        s.words.push_back(std::move(mw));
    }
    return s;
}

}  // namespace tt
