#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tt/types.hpp"

namespace tt {

// Dense column-major complex matrix, just big enough for the solver.
struct CMat {
    int m = 0, n = 0;
    std::vector<Complex> a;
    CMat() = default;
    CMat(int m_, int n_) : m(m_), n(n_), a(size_t(m_) * size_t(n_)) {}
    Complex& at(int i, int j) { return a[size_t(j) * size_t(m) + size_t(i)]; }
    const Complex& at(int i, int j) const { return a[size_t(j) * size_t(m) + size_t(i)]; }
};

// Householder QR with column pivoting; exposes rank, least-squares solve and a
// nullspace basis. Factorization is destructive on a copy.
class QR {
public:
    explicit QR(const CMat& A, double rank_tol = 1e-11) : r_(A), piv_(size_t(A.n)) {
        int m = r_.m, n = r_.n;
        for (int j = 0; j < n; ++j) piv_[size_t(j)] = j;
        taus_.resize(size_t(std::min(m, n)));
        std::vector<double> colnorm(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) colnorm[size_t(j)] = col_norm(j, 0);
        int kmax = std::min(m, n);
        double first_pivot = 0.0;
        for (int k = 0; k < kmax; ++k) {
            int best = k;
            double bestn = -1.0;
            for (int j = k; j < n; ++j) {
                double cn = col_norm(j, k);
                if (cn > bestn) {
                    bestn = cn;
                    best = j;
                }
            }
            if (best != k) {
                for (int i = 0; i < m; ++i) std::swap(r_.at(i, k), r_.at(i, best));
                std::swap(piv_[size_t(k)], piv_[size_t(best)]);
            }
            if (k == 0) first_pivot = bestn;
            if (bestn <= rank_tol * std::max(first_pivot, 1e-300)) {
                rank_ = k;
                taus_.resize(size_t(k));
                return;
            }
            // Householder vector for column k
            Complex alpha = r_.at(k, k);
            double xnorm = col_norm(k, k);
            double aab = std::abs(alpha);
            Complex phase = aab > 0 ? alpha / aab : Complex(1.0);
            Complex beta = -phase * xnorm;
            Complex denom = alpha - beta;
            if (std::abs(denom) < 1e-300) {
                taus_[size_t(k)] = 0.0;
                continue;
            }
            for (int i = k + 1; i < m; ++i) r_.at(i, k) /= denom;
            taus_[size_t(k)] = (beta - alpha) / beta;
            r_.at(k, k) = beta;
            // apply to remaining columns
            for (int j = k + 1; j < n; ++j) {
                Complex s = r_.at(k, j);
                for (int i = k + 1; i < m; ++i) s += std::conj(r_.at(i, k)) * r_.at(i, j);
                s *= std::conj(taus_[size_t(k)]);
                r_.at(k, j) -= s;
                for (int i = k + 1; i < m; ++i) r_.at(i, j) -= s * r_.at(i, k);
            }
            rank_ = k + 1;
        }
    }

    int rank() const { return rank_; }

    // min ||Ax - b||; free variables set to zero.
    std::vector<Complex> solve(std::vector<Complex> b) const {
        int m = r_.m, n = r_.n;
        apply_qh(b);
        std::vector<Complex> y(size_t(n), 0.0);
        for (int k = rank_ - 1; k >= 0; --k) {
            Complex s = b[size_t(k)];
            for (int j = k + 1; j < rank_; ++j) s -= r_.at(k, j) * y[size_t(j)];
            y[size_t(k)] = s / r_.at(k, k);
        }
        std::vector<Complex> x(size_t(n), 0.0);
        for (int j = 0; j < n; ++j) x[size_t(piv_[size_t(j)])] = y[size_t(j)];
        (void)m;
        return x;
    }

    // basis of the (numerical) nullspace, n x (n - rank)
    CMat nullspace() const {
        int n = r_.n, r = rank_;
        CMat B(n, n - r);
        for (int f = 0; f < n - r; ++f) {
            std::vector<Complex> y(size_t(n), 0.0);
            y[size_t(r + f)] = 1.0;
            for (int k = r - 1; k >= 0; --k) {
                Complex s = -r_.at(k, r + f);
                for (int j = k + 1; j < r; ++j) s -= r_.at(k, j) * y[size_t(j)];
                y[size_t(k)] = s / r_.at(k, k);
            }
            for (int j = 0; j < n; ++j) B.at(piv_[size_t(j)], f) = y[size_t(j)];
        }
        return B;
    }

private:
    double col_norm(int j, int from) const {
        double s = 0;
        for (int i = from; i < r_.m; ++i) s += std::norm(r_.at(i, j));
        return std::sqrt(s);
    }
    void apply_qh(std::vector<Complex>& b) const {
        for (int k = 0; k < int(taus_.size()); ++k) {
            Complex s = b[size_t(k)];
            for (int i = k + 1; i < r_.m; ++i) s += std::conj(r_.at(i, k)) * b[size_t(i)];
            s *= std::conj(taus_[size_t(k)]);
            b[size_t(k)] -= s;
            for (int i = k + 1; i < r_.m; ++i) b[size_t(i)] -= s * r_.at(i, k);
        }
    }
    CMat r_;
    std::vector<int> piv_;
    std::vector<Complex> taus_;
    int rank_ = 0;
};

inline std::vector<Complex> matvec(const CMat& A, const std::vector<Complex>& x) {
    std::vector<Complex> y(size_t(A.m), 0.0);
    for (int j = 0; j < A.n; ++j)
        for (int i = 0; i < A.m; ++i) y[size_t(i)] += A.at(i, j) * x[size_t(j)];
    return y;
}

}  // namespace tt
