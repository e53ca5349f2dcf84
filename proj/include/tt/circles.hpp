#pragma once

#include <optional>
#include <vector>

#include "tt/words.hpp"

namespace tt {

// Generalized circle a|z|^2 + conj(b) z + b conj(z) + d = 0 with a, d real;
// a = 0 is a line. Stored normalized so max(|a|,|b|,|d|) = 1, det < 0.
struct GeneralizedCircle {
    double a = 0.0;
    Complex b{0.0, 0.0};
    double d = 0.0;

    double det() const { return a * d - std::norm(b); }
    bool is_line(double tol = 1e-9) const { return std::abs(a) <= tol; }
    void normalize();
    double eval(const PPoint& p) const;       // homogeneous quadratic form
    double eval_affine(Complex z) const;      // the defining form at z
    Complex center() const { return -b / a; }
    double radius() const { return std::sqrt(std::max(0.0, -det())) / std::abs(a); }
    // line form: direction and offset with unit normal n = b/|b|
    Complex line_normal() const { return b / std::abs(b); }
    double line_offset() const { return d / (2 * std::abs(b)); }

    GeneralizedCircle transformed(const Mat2& m) const;  // image under z -> m(z)
};

std::optional<GeneralizedCircle> circle_through(const PPoint& p, const PPoint& q,
                                                const PPoint& r);

// least-squares fit through >= 3 points; returns worst residual in the chordal
// sense (distance scale of the normalized form)
std::optional<GeneralizedCircle> circumfit(const std::vector<PPoint>& pts, double* residual);

// pencil discriminant; 0 at tangency
double tangency_residual(const GeneralizedCircle& c1, const GeneralizedCircle& c2);
std::optional<PPoint> tangency_point(const GeneralizedCircle& c1, const GeneralizedCircle& c2);

// interior side s: the region where s * (form) < 0
bool interiors_disjoint(const GeneralizedCircle& c1, int s1, const GeneralizedCircle& c2, int s2,
                        double tol = 1e-9);
bool point_in_interior(const GeneralizedCircle& c, int s, const PPoint& p, double tol = 0.0);

}  // namespace tt
