#include "tt/words.hpp"

#include <algorithm>
#include <cmath>

namespace tt {

double Mat2::norm() const {
    double s = 0;
    for (const Complex& c : a) s += std::norm(c);
    return std::sqrt(s);
}

bool PPoint::is_infinite(double tol) const {
    return std::abs(den) <= tol * std::max(1.0, std::abs(num));
}

PPoint apply(const Mat2& m, const PPoint& p) {
    PPoint q{m.a[0] * p.num + m.a[1] * p.den, m.a[2] * p.num + m.a[3] * p.den};
    double s = std::max(std::abs(q.num), std::abs(q.den));
    if (s > 1e-300) {
        q.num /= s;
        q.den /= s;
    }
    return q;
}

double pdist(const PPoint& a, const PPoint& b) {
    // chordal metric on CP^1
    double na = std::sqrt(std::norm(a.num) + std::norm(a.den));
    double nb = std::sqrt(std::norm(b.num) + std::norm(b.den));
    if (na == 0 || nb == 0) return 0;
    return std::abs(a.num * b.den - b.num * a.den) / (na * nb);
}

Mat2 word_matrix(const std::vector<WordToken>& tokens, const Assignment& x) {
    Mat2 M = Mat2::id();
    for (const WordToken& t : tokens) {
        Mat2 T = t.is_arc ? Mat2::arc(x[size_t(t.var)])
                          : Mat2::edge((t.forward ? 1.0 : -1.0) * x[size_t(t.var)]);
        M = T * M;
    }
    return M;
}

double projective_defect(const Mat2& A, const Mat2& B) {
    double na = A.norm(), nb = B.norm();
    if (na == 0 || nb == 0) return 0;
    // scale-optimal comparison: min over unit phases of |A/|A| - t B/|B||
    Complex inner = 0;
    for (int i = 0; i < 4; ++i) inner += std::conj(B.a[size_t(i)]) * A.a[size_t(i)];
    inner /= (na * nb);
    double d2 = 2.0 * (1.0 - std::abs(inner));
    return std::sqrt(std::max(0.0, d2));
}

std::optional<ExtendedLabels> extend_labels(const std::vector<WordToken>& tokens,
                                            const Assignment& x) {
    Mat2 M = word_matrix(tokens, x);
    double scale = M.norm();
    if (scale == 0 || std::abs(M.a[2]) < 1e-12 * scale) return std::nullopt;
    ExtendedLabels out;
    out.u_prime = M.a[0] / M.a[2];
    out.u = M.a[3] / M.a[2];
    out.w = M.a[1] / M.a[2] - out.u * out.u_prime;
    return out;
}

std::vector<WordToken> insert_relation(const std::vector<WordToken>& word,
                                       const MatrixWord& relation, size_t position,
                                       bool inverted) {
    std::vector<WordToken> rel = relation.tokens;
    if (inverted) {
        std::reverse(rel.begin(), rel.end());
        for (WordToken& t : rel)
            if (!t.is_arc) t.forward = !t.forward;
        // arc matrices are projective involutions, nothing to flip
    }
    std::vector<WordToken> out;
    position = position % (word.size() + 1);
    out.insert(out.end(), word.begin(), word.begin() + long(position));
    out.insert(out.end(), rel.begin(), rel.end());
    out.insert(out.end(), word.begin() + long(position), word.end());
    return out;
}

Complex cross_ratio(const PPoint& z0, const PPoint& z1, const PPoint& z2, const PPoint& z3,
                    bool* degenerate) {
    auto sub = [](const PPoint& a, const PPoint& b) { return a.num * b.den - b.num * a.den; };
    Complex numer = sub(z0, z1) * sub(z2, z3);
    Complex denom = sub(z0, z2) * sub(z1, z3);
    if (degenerate) *degenerate = false;
    double scale = std::max(std::abs(numer), std::abs(denom));
    if (scale < 1e-280 || std::abs(denom) < 1e-13 * scale) {
        if (degenerate) *degenerate = true;
        return denom == Complex(0.0) ? Complex(INFINITY, 0.0) : numer / denom;
    }
    return numer / denom;
}

// exact Mobius through three projective point: p0 -> 0, p1 -> 1, p2 -> inf
static Mat2 to_zero_one_inf(const PPoint& p0, const PPoint& p1, const PPoint& p2) {
    auto cr = [](const PPoint& a, const PPoint& b) { return a.num * b.den - b.num * a.den; };
    Complex c12 = cr(p1, p2), c10 = cr(p1, p0);
    return {{c12 * p0.den, -c12 * p0.num, c10 * p2.den, -c10 * p2.num}};
}

std::optional<Mat2> fit_mobius(const std::vector<std::pair<PPoint, PPoint>>& pairs,
                               double* residual) {
    if (pairs.size() < 3) return std::nullopt;
    // pick three well-separated source points
    size_t i0 = 0, i1 = 0, i2 = 0;
    double best = -1;
    for (size_t i = 1; i < pairs.size(); ++i) {
        double d = pdist(pairs[i].first, pairs[i0].first);
        if (d > best) {
            best = d;
            i1 = i;
        }
    }
    best = -1;
    for (size_t i = 0; i < pairs.size(); ++i) {
        double d = std::min(pdist(pairs[i].first, pairs[i0].first),
                            pdist(pairs[i].first, pairs[i1].first));
        if (d > best) {
            best = d;
            i2 = i;
        }
    }
    if (i1 == i0 || i2 == i0 || i2 == i1) return std::nullopt;
    Mat2 Tp = to_zero_one_inf(pairs[i0].first, pairs[i1].first, pairs[i2].first);
    Mat2 Tq = to_zero_one_inf(pairs[i0].second, pairs[i1].second, pairs[i2].second);
    Mat2 M = Tq.inverse_projective() * Tp;
    if (residual) {
        double worst = 0;
        for (const auto& [p, q] : pairs) worst = std::max(worst, pdist(apply(M, p), q));
        *residual = worst;
    }
    return M;
}

}  // namespace tt
