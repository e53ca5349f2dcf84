#include "tt/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tt {

std::string canonical_key(const std::vector<Complex>& values, double grid) {
    std::ostringstream os;
    for (const auto& v : values) {
        long long re = llround(v.real() / grid);
        long long im = llround(v.imag() / grid);
        os << re << "," << im << ";";
    }
    return os.str();
}

static void sort_exps(std::vector<std::pair<int, int>>& e) {
    std::sort(e.begin(), e.end());
}

Poly Poly::constant(Complex c) {
    Poly p;
    if (c != Complex(0.0)) p.terms_.push_back({c, {}});
    return p;
}

Poly Poly::variable(int var) {
    Poly p;
    p.terms_.push_back({Complex(1.0), {{var, 1}}});
    return p;
}

Poly& Poly::add_term(Complex coeff, std::vector<std::pair<int, int>> exps) {
    sort_exps(exps);
    terms_.push_back({coeff, std::move(exps)});
    normalize();
    return *this;
}

void Poly::normalize(double drop_tol) {
    std::map<std::vector<std::pair<int, int>>, Complex> acc;
    for (auto& t : terms_) acc[t.exps] += t.coeff;
    terms_.clear();
    for (auto& [e, c] : acc)
        if (std::abs(c) > drop_tol) terms_.push_back({c, e});
}

Poly Poly::operator+(const Poly& o) const {
    Poly r = *this;
    r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
    r.normalize();
    return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (o * Complex(-1.0)); }

Poly Poly::operator*(Complex s) const {
    Poly r;
    if (s == Complex(0.0)) return r;
    r.terms_ = terms_;
    for (auto& t : r.terms_) t.coeff *= s;
    return r;
}

Poly Poly::operator*(const Poly& o) const {
    Poly r;
    for (const auto& a : terms_) {
        for (const auto& b : o.terms_) {
            std::vector<std::pair<int, int>> e = a.exps;
            for (auto [v, p] : b.exps) {
                auto it = std::find_if(e.begin(), e.end(), [v](auto& q) { return q.first == v; });
                if (it == e.end())
                    e.push_back({v, p});
                else
                    it->second += p;
            }
            sort_exps(e);
            r.terms_.push_back({a.coeff * b.coeff, std::move(e)});
        }
    }
    r.normalize();
    return r;
}

Complex Poly::eval(const std::vector<Complex>& x) const {
    Complex s = 0.0;
    for (const auto& t : terms_) {
        Complex m = t.coeff;
        for (auto [v, p] : t.exps) {
            Complex base = x.at(size_t(v));
            for (int i = 0; i < p; ++i) m *= base;
        }
        s += m;
    }
    return s;
}

Poly Poly::derivative(int var) const {
    Poly r;
    for (const auto& t : terms_) {
        for (size_t i = 0; i < t.exps.size(); ++i) {
            if (t.exps[i].first != var) continue;
            Monomial m;
            m.coeff = t.coeff * double(t.exps[i].second);
            m.exps = t.exps;
            if (--m.exps[i].second == 0) m.exps.erase(m.exps.begin() + long(i));
            r.terms_.push_back(std::move(m));
        }
    }
    r.normalize();
    return r;
}

int Poly::degree_in(int var) const {
    int d = 0;
    for (const auto& t : terms_)
        for (auto [v, p] : t.exps)
            if (v == var) d = std::max(d, p);
    return d;
}

std::vector<int> Poly::variables() const {
    std::vector<int> vs;
    for (const auto& t : terms_)
        for (auto [v, p] : t.exps) vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

bool poly_identical(const Poly& a, const Poly& b, double tol) {
    Poly d = a - b;
    d.normalize(tol);
    return d.empty();
}

Poly region_polynomial(int n) {
    if (n < 3) throw std::invalid_argument("region_polynomial: n must be >= 3");
    Poly f3 = Poly::constant(1.0) - Poly::variable(2);
    if (n == 3) return f3;
    Poly f4 = Poly::variable(2) + Poly::variable(3) - Poly::constant(1.0);
    if (n == 4) return f4;
    Poly fm2 = f3, fm1 = f4;
    for (int m = 5; m <= n; ++m) {
        Poly f = -fm1 - Poly::variable(m - 1) * fm2;
        fm2 = fm1;
        fm1 = f;
    }
    return fm1;
}

Poly region_polynomial_closed_form(int n) {
    if (n < 3) throw std::invalid_argument("region_polynomial_closed_form: n must be >= 3");
    Poly f;
    // k = 0 term: the empty product.
    auto sign = [n](int k) { return ((n + k + 1) % 2 == 0) ? 1.0 : -1.0; };
    f = f + Poly::constant(sign(0));
    std::vector<int> idx;
    // Enumerate 1 < i_1 < ... < i_k < n with i_{j+1} - i_j >= 2.
    auto rec = [&](auto&& self, int start) -> void {
        for (int i = start; i <= n - 1; ++i) {
            idx.push_back(i);
            Poly m = Poly::constant(sign(int(idx.size())));
            for (int v : idx) m = m * Poly::variable(v);
            f = f + m;
            self(self, i + 2);
            idx.pop_back();
        }
    };
    rec(rec, 2);
    return f;
}

}  // namespace tt
