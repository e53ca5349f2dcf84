#pragma once

#include <array>
#include <optional>
#include <vector>

#include "tt/structure.hpp"
#include "tt/system.hpp"

namespace tt {

// 2x2 complex matrix acting projectively on CP^1; row major.
struct Mat2 {
    std::array<Complex, 4> a{1.0, 0.0, 0.0, 1.0};
    static Mat2 id() { return {}; }
    static Mat2 arc(Complex w) { return {{0.0, w, 1.0, 0.0}}; }
    static Mat2 edge(Complex u) { return {{1.0, -u, 0.0, 1.0}}; }
    Mat2 operator*(const Mat2& o) const {
        return {{a[0] * o.a[0] + a[1] * o.a[2], a[0] * o.a[1] + a[1] * o.a[3],
                 a[2] * o.a[0] + a[3] * o.a[2], a[2] * o.a[1] + a[3] * o.a[3]}};
    }
    Mat2 inverse_projective() const { return {{a[3], -a[1], -a[2], a[0]}}; }
    double norm() const;
};

// Projective point; infinity is (1, 0).
struct PPoint {
    Complex num = 0.0, den = 1.0;
    static PPoint infinity() { return {1.0, 0.0}; }
    static PPoint at(Complex z) { return {z, 1.0}; }
    bool is_infinite(double tol = 1e-12) const;
    Complex value() const { return num / den; }
};

PPoint apply(const Mat2& m, const PPoint& p);
// projective distance used for dedupe and fit residuals
double pdist(const PPoint& a, const PPoint& b);

// Composite W along a token word (contravariant: last token multiplies on the
// left), using labels from x.
Mat2 word_matrix(const std::vector<WordToken>& tokens, const Assignment& x);

// projective comparison: |A - lambda B| in Frobenius norm after normalizing
double projective_defect(const Mat2& A, const Mat2& B);

// Reads (u, u', w) off a crossing-arc-type word per the normalized form
// (u'  uu'+w ; 1  u). Fails when the lower-left entry vanishes.
struct ExtendedLabels {
    Complex u, u_prime, w;
};
std::optional<ExtendedLabels> extend_labels(const std::vector<WordToken>& tokens,
                                            const Assignment& x);

// Randomized homotopic rewriting: inserts a cell boundary relation (or an
// inverse pair) into a word; used by the invariance tests.
std::vector<WordToken> insert_relation(const std::vector<WordToken>& word,
                                       const MatrixWord& relation, size_t position,
                                       bool inverted);

// cross-ratio of four projective points: (z0-z1)(z2-z3) / ((z0-z2)(z1-z3))
Complex cross_ratio(const PPoint& z0, const PPoint& z1, const PPoint& z2, const PPoint& z3,
                    bool* degenerate = nullptr);

// Least-squares Mobius map through point pairs (exact on three); returns the
// worst residual over all pairs.
std::optional<Mat2> fit_mobius(const std::vector<std::pair<PPoint, PPoint>>& pairs,
                               double* residual = nullptr);

}  // namespace tt
