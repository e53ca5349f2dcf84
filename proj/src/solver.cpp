#include "tt/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "tt/linalg.hpp"

namespace tt {

void SolverConfig::check() const {
    if (residual_tol <= 0 || dedupe_tol <= 0) throw std::invalid_argument("tolerances must be positive");
    if (dedupe_tol <= residual_tol) throw std::invalid_argument("dedupe_tol must exceed residual_tol");
    if (damping <= 0 || damping > 1) throw std::invalid_argument("damping must lie in (0,1]");
    if (max_starts <= 0 || max_newton_iters <= 0) throw std::invalid_argument("bad iteration limits");
}

static std::array<Complex, 4> word_product(const MatrixWord& w, const Assignment& x) {
    // W(alpha_1 ... alpha_k) = W(alpha_k) ... W(alpha_1)
    std::array<Complex, 4> M{1.0, 0.0, 0.0, 1.0};
    for (const WordToken& t : w.tokens) {
        std::array<Complex, 4> T;
        if (t.is_arc)
            T = {0.0, x[size_t(t.var)], 1.0, 0.0};
        else
            T = {1.0, (t.forward ? -1.0 : 1.0) * x[size_t(t.var)], 0.0, 1.0};
        // M := T * M
        std::array<Complex, 4> R;
        R[0] = T[0] * M[0] + T[1] * M[2];
        R[1] = T[0] * M[1] + T[1] * M[3];
        R[2] = T[2] * M[0] + T[3] * M[2];
        R[3] = T[2] * M[1] + T[3] * M[3];
        M = R;
    }
    return M;
}

Complex word_matrix_defect(const EquationSystem&, const MatrixWord& w, const Assignment& x,
                           std::array<Complex, 4>* mat_out) {
    auto M = word_product(w, x);
    if (mat_out) *mat_out = M;
    double big = 0.0;
    for (auto& e : M) big = std::max(big, std::abs(e));
    if (big == 0.0) return 0.0;  // fully degenerate word
    for (auto& e : M) e /= big;
    Complex lambda = (M[0] + M[3]) / 2.0;
    double d2 = std::norm(M[0] - lambda) + std::norm(M[1]) + std::norm(M[2]) +
                std::norm(M[3] - lambda);
    return std::sqrt(d2);
}

std::vector<double> evaluate(const EquationSystem& sys, const Assignment& x) {
    if (x.size() != sys.vars.size()) throw std::invalid_argument("assignment size mismatch");
    std::vector<double> r;
    r.reserve(sys.equations.size() + sys.words.size());
    for (const PolyEquation& e : sys.equations) r.push_back(std::abs(e.poly.eval(x)));
    for (const MatrixWord& w : sys.words)
        r.push_back(std::abs(word_matrix_defect(sys, w, x)));
    return r;
}

double max_residual(const EquationSystem& sys, const Assignment& x) {
    double m = 0;
    for (double v : evaluate(sys, x)) m = std::max(m, v);
    return m;
}

CMat jacobian(const EquationSystem& sys, const Assignment& x) {
    int n = int(sys.vars.size());
    int mp = int(sys.equations.size());
    CMat J(mp + int(sys.words.size()), n);
    for (int i = 0; i < mp; ++i) {
        for (int v : sys.equations[size_t(i)].poly.variables())
            J.at(i, v) = sys.equations[size_t(i)].poly.derivative(v).eval(x);
    }
    // word rows by central differences
    const double h = 1e-7;
    for (size_t wi = 0; wi < sys.words.size(); ++wi) {
        const MatrixWord& w = sys.words[wi];
        std::vector<int> vars;
        for (const WordToken& t : w.tokens) vars.push_back(t.var);
        std::sort(vars.begin(), vars.end());
        vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
        Assignment y = x;
        for (int v : vars) {
            Complex save = y[size_t(v)];
            y[size_t(v)] = save + h;
            Complex fp = word_matrix_defect(sys, w, y);
            y[size_t(v)] = save - h;
            Complex fm = word_matrix_defect(sys, w, y);
            y[size_t(v)] = save;
            J.at(mp + int(wi), v) = (fp - fm) / (2 * h);
        }
    }
    return J;
}

namespace {

struct Reduced {
    // x = x0 + B y
    Assignment x0;
    CMat B;
    std::vector<const Poly*> nonlinear;
    std::vector<double> lin_residual;
    bool consistent = true;
};

Reduced reduce_linear(const EquationSystem& sys) {
    Reduced rd;
    int n = int(sys.vars.size());
    std::vector<const Poly*> linear;
    for (const PolyEquation& e : sys.equations) {
        bool lin = true;
        for (const Monomial& m : e.poly.terms()) {
            int deg = 0;
            for (auto [v, p] : m.exps) deg += p;
            if (deg > 1) {
                lin = false;
                break;
            }
        }
        (lin ? linear : rd.nonlinear).push_back(&e.poly);
    }
    CMat A(int(linear.size()), n);
    std::vector<Complex> b(linear.size(), 0.0);
    for (size_t i = 0; i < linear.size(); ++i) {
        for (const Monomial& m : linear[i]->terms()) {
            if (m.exps.empty())
                b[i] -= m.coeff;
            else
                A.at(int(i), m.exps[0].first) += m.coeff;
        }
    }
    QR qr(A);
    rd.x0 = qr.solve(b);
    auto ax = matvec(A, rd.x0);
    double worst = 0;
    for (size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(ax[i] - b[i]));
    rd.consistent = worst < 1e-8;
    rd.B = qr.nullspace();
    return rd;
}

}  // namespace

SolutionSet solve_all(const EquationSystem& sys, const SolverConfig& cfg) {
    cfg.check();
    SolutionSet out;
    Reduced rd = reduce_linear(sys);
    if (!rd.consistent) {
        out.diagnostics = "linear subsystem inconsistent: no algebraic solutions";
        return out;
    }
    int k = rd.B.n;  // reduced dimension
    int n = int(sys.vars.size());
    Rng rng(cfg.rng_seed);

    auto expand = [&](const std::vector<Complex>& y) {
        Assignment x = rd.x0;
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < n; ++i) x[size_t(i)] += rd.B.at(i, j) * y[size_t(j)];
        return x;
    };
    auto residual_vec = [&](const Assignment& x) {
        std::vector<Complex> r(rd.nonlinear.size());
        for (size_t i = 0; i < rd.nonlinear.size(); ++i) r[i] = rd.nonlinear[i]->eval(x);
        return r;
    };
    auto norm2 = [](const std::vector<Complex>& v) {
        double s = 0;
        for (auto& c : v) s += std::norm(c);
        return std::sqrt(s);
    };

    std::vector<Assignment> roots;
    auto deflation = [&](const Assignment& x) {
        double f = 1.0;
        for (const Assignment& r : roots) {
            double d = 0;
            for (int i = 0; i < sys.n_label_vars; ++i)
                d = std::max(d, std::abs(x[size_t(i)] - r[size_t(i)]));
            f *= std::min(1.0, d);
        }
        return std::max(f, 1e-12);
    };

    int label_count = 0;
    for (const Variable& v : sys.vars)
        if (v.kind != VarKind::Aux) ++label_count;
    (void)label_count;

    for (int start = 0; start < cfg.max_starts && int(roots.size()) < cfg.max_roots; ++start) {
        out.starts_used = start + 1;
        std::vector<Complex> y(static_cast<size_t>(k));
        for (auto& c : y) c = rng.next_complex(cfg.start_box);
        Assignment x = expand(y);
        auto r = residual_vec(x);
        bool converged = false;
        for (int it = 0; it < cfg.max_newton_iters; ++it) {
            double rn = norm2(r);
            if (rn < cfg.residual_tol * 0.1) {
                converged = true;
                break;
            }
            // Gauss-Newton step in reduced coordinates
            CMat J(int(rd.nonlinear.size()), k);
            for (size_t i = 0; i < rd.nonlinear.size(); ++i) {
                // dP/dy_j = sum_v dP/dx_v * B_{vj}
                for (int v : rd.nonlinear[i]->variables()) {
                    Complex dv = rd.nonlinear[i]->derivative(v).eval(x);
                    if (dv == Complex(0.0)) continue;
                    for (int j = 0; j < k; ++j) J.at(int(i), j) += dv * rd.B.at(v, j);
                }
            }
            std::vector<Complex> rhs(r.size());
            for (size_t i = 0; i < r.size(); ++i) rhs[i] = -r[i];
            QR qr(J);
            auto dy = qr.solve(rhs);
            double step_norm = 0;
            for (auto& c : dy) step_norm = std::max(step_norm, std::abs(c));
            if (!std::isfinite(step_norm) || step_norm > 1e8) break;
            // damped line search on the deflated objective
            double phi0 = rn / deflation(x);
            double lambda = cfg.damping;
            bool accepted = false;
            for (int ls = 0; ls < 12; ++ls) {
                std::vector<Complex> y2 = y;
                for (int j = 0; j < k; ++j) y2[size_t(j)] += lambda * dy[size_t(j)];
                Assignment x2 = expand(y2);
                auto r2 = residual_vec(x2);
                double phi2 = norm2(r2) / deflation(x2);
                if (phi2 < phi0 || norm2(r2) < cfg.residual_tol * 0.1) {
                    y = std::move(y2);
                    x = std::move(x2);
                    r = std::move(r2);
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted) break;
            if (step_norm * lambda < 1e-14) {
                converged = norm2(r) < cfg.residual_tol * 0.1;
                break;
            }
        }
        if (!converged) continue;
        ++out.converged_starts;
        // full residual check over every equation and word
        double res = max_residual(sys, x);
        if (res > cfg.residual_tol) continue;
        bool dup = false;
        for (const Assignment& rt : roots) {
            double d = 0;
            for (int i = 0; i < int(sys.vars.size()); ++i) {
                if (sys.vars[size_t(i)].kind == VarKind::Aux) continue;
                d = std::max(d, std::abs(x[size_t(i)] - rt[size_t(i)]));
            }
            if (d < cfg.dedupe_tol) {
                dup = true;
                break;
            }
        }
        if (dup) continue;
        roots.push_back(x);
        Solution sol;
        sol.values = x;
        sol.residual = res;
        sol.degenerate = false;
        for (int i = 0; i < int(sys.vars.size()); ++i) {
            if (sys.vars[size_t(i)].kind == VarKind::Aux) continue;
            if (std::abs(x[size_t(i)]) < 1e-8) sol.degenerate = true;
        }
        out.solutions.push_back(std::move(sol));
    }

    // canonical order: lexicographic on rounded label values
    std::sort(out.solutions.begin(), out.solutions.end(), [&](const Solution& a, const Solution& b) {
        std::vector<Complex> ka, kb;
        for (int i = 0; i < int(sys.vars.size()); ++i) {
            if (sys.vars[size_t(i)].kind == VarKind::Aux) continue;
            ka.push_back(a.values[size_t(i)]);
            kb.push_back(b.values[size_t(i)]);
        }
        return canonical_key(ka) < canonical_key(kb);
    });
    for (const Solution& s : out.solutions)
        if (!s.degenerate) ++out.nondegenerate_count;
    if (out.solutions.empty() && out.diagnostics.empty())
        out.diagnostics = "no roots converged within max_starts";
    return out;
}

std::string dump_solutions(const EquationSystem& sys, const SolutionSet& s) {
    nlohmann::json j;
    j["starts_used"] = s.starts_used;
    j["converged_starts"] = s.converged_starts;
    j["diagnostics"] = s.diagnostics;
    j["solutions"] = nlohmann::json::array();
    for (const Solution& sol : s.solutions) {
        nlohmann::json labels, aux;
        for (size_t i = 0; i < sys.vars.size(); ++i) {
            auto& dst = sys.vars[i].kind == VarKind::Aux ? aux : labels;
            dst[sys.vars[i].id] = {sol.values[i].real(), sol.values[i].imag()};
        }
        j["solutions"].push_back({{"labels", labels},
                                  {"aux", aux},
                                  {"residual", sol.residual},
                                  {"degenerate", sol.degenerate}});
    }
    return j.dump(1);
}

SolutionSet load_solutions(const EquationSystem& sys, const std::string& text) {
    auto j = nlohmann::json::parse(text);
    SolutionSet s;
    s.starts_used = j.value("starts_used", 0);
    s.converged_starts = j.value("converged_starts", 0);
    s.diagnostics = j.value("diagnostics", "");
    for (auto& js : j.at("solutions")) {
        Solution sol;
        sol.values.assign(sys.vars.size(), 0.0);
        for (size_t i = 0; i < sys.vars.size(); ++i) {
            const auto& src = sys.vars[i].kind == VarKind::Aux ? js.at("aux") : js.at("labels");
            auto& v = src.at(sys.vars[i].id);
            sol.values[i] = Complex(v.at(0).get<double>(), v.at(1).get<double>());
        }
        sol.residual = js.at("residual").get<double>();
        sol.degenerate = js.at("degenerate").get<bool>();
        s.solutions.push_back(std::move(sol));
    }
    for (const Solution& sol : s.solutions)
        if (!sol.degenerate) ++s.nondegenerate_count;
    return s;
}

}  // namespace tt
