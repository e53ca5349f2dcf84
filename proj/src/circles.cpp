#include "tt/circles.hpp"

#include <algorithm>
#include <cmath>

#include "tt/linalg.hpp"

namespace tt {

void GeneralizedCircle::normalize() {
    double s = std::max({std::abs(a), std::abs(b), std::abs(d)});
    if (s == 0) return;
    a /= s;
    b /= s;
    d /= s;
    if (a < 0 || (a == 0 && d < 0) || (a == 0 && d == 0 && b.real() + b.imag() < 0)) {
        a = -a;
        b = -b;
        d = -d;
    }
}

double GeneralizedCircle::eval(const PPoint& p) const {
    Complex n = p.num, m = p.den;
    return a * std::norm(n) + 2 * std::real(b * std::conj(n) * m) + d * std::norm(m);
}

double GeneralizedCircle::eval_affine(Complex z) const {
    return a * std::norm(z) + 2 * std::real(b * std::conj(z)) + d;
}

GeneralizedCircle GeneralizedCircle::transformed(const Mat2& m) const {
    // z' = m(z): pull the form back along m^{-1}
    Mat2 inv = m.inverse_projective();
    // H' = inv^H H inv, with H = [[a, conj(b)], [b, d]] acting on (z, 1)
    Complex A = inv.a[0], B = inv.a[1], C = inv.a[2], D = inv.a[3];
    // compute inv^H H inv entrywise
    Complex h00 = a, h01 = std::conj(b), h10 = b, h11 = d;
    Complex m00 = (std::conj(A) * h00 + std::conj(C) * h10) * A +
                  (std::conj(A) * h01 + std::conj(C) * h11) * C;
    Complex m01 = (std::conj(A) * h00 + std::conj(C) * h10) * B +
                  (std::conj(A) * h01 + std::conj(C) * h11) * D;
    Complex m11 = (std::conj(B) * h00 + std::conj(D) * h10) * B +
                  (std::conj(B) * h01 + std::conj(D) * h11) * D;
    GeneralizedCircle out;
    out.a = m00.real();
    out.b = std::conj(m01);  // H'[1][0] = conj(H'[0][1])
    out.d = m11.real();
    out.normalize();
    return out;
}

std::optional<GeneralizedCircle> circumfit(const std::vector<PPoint>& pts, double* residual) {
    if (pts.size() < 3) return std::nullopt;
    // real linear system in (a, Re b, Im b, d)
    size_t n = pts.size();
    std::vector<std::array<double, 4>> rows(n);
    for (size_t i = 0; i < n; ++i) {
        Complex zn = pts[i].num, zm = pts[i].den;
        double s = std::sqrt(std::norm(zn) + std::norm(zm));
        zn /= s;
        zm /= s;
        Complex cross = std::conj(zn) * zm;
        rows[i] = {std::norm(zn), 2 * cross.real(), -2 * cross.imag(), std::norm(zm)};
        // with b = br + i bi: 2 Re(b conj(zn) zm) = 2 br Re(cross) - 2 bi Im(cross)
    }
    // nullspace of the n x 4 matrix via normal equations eigen-ish: use simple
    // Gram-Schmidt deflation through the complex QR on a real-encoded matrix
    CMat A(int(n), 4);
    for (size_t i = 0; i < n; ++i)
        for (int j = 0; j < 4; ++j) A.at(int(i), j) = rows[i][size_t(j)];
    QR qr(A, 1e-7);
    GeneralizedCircle c;
    if (qr.rank() >= 4) {
        // full rank: fall back to the exact circle through three spread points
        // and report the worst residual
        auto c3 = circle_through(pts[0], pts[n / 3], pts[(2 * n) / 3]);
        if (!c3) return std::nullopt;
        c = *c3;
    } else {
        CMat N = qr.nullspace();
        c.a = N.at(0, 0).real();
        c.b = Complex(N.at(1, 0).real(), N.at(2, 0).real());
        c.d = N.at(3, 0).real();
        c.normalize();
    }
    if (residual) {
        double worst = 0;
        for (const PPoint& p : pts) {
            Complex zn = p.num, zm = p.den;
            double s = std::sqrt(std::norm(zn) + std::norm(zm));
            PPoint q{zn / s, zm / s};
            worst = std::max(worst, std::abs(c.eval(q)));
        }
        *residual = worst;
    }
    if (c.det() > -1e-14) return std::nullopt;  // empty or point circle
    return c;
}

std::optional<GeneralizedCircle> circle_through(const PPoint& p, const PPoint& q,
                                                const PPoint& r) {
    std::vector<PPoint> pts{p, q, r};
    // solve the 3x4 homogeneous real system directly
    double M[3][4];
    for (int i = 0; i < 3; ++i) {
        Complex zn = pts[size_t(i)].num, zm = pts[size_t(i)].den;
        double s = std::sqrt(std::norm(zn) + std::norm(zm));
        zn /= s;
        zm /= s;
        Complex cross = std::conj(zn) * zm;
        M[i][0] = std::norm(zn);
        M[i][1] = 2 * cross.real();
        M[i][2] = -2 * cross.imag();
        M[i][3] = std::norm(zm);
    }
    // Gaussian elimination with partial pivoting on 3x4
    int piv_col[3] = {-1, -1, -1};
    bool used[4] = {false, false, false, false};
    for (int row = 0; row < 3; ++row) {
        int bc = -1;
        double bv = 1e-12;
        for (int c = 0; c < 4; ++c) {
            if (used[c]) continue;
            if (std::abs(M[row][c]) > bv) {
                bv = std::abs(M[row][c]);
                bc = c;
            }
        }
        if (bc < 0) return std::nullopt;  // degenerate triple
        used[bc] = true;
        piv_col[row] = bc;
        for (int r2 = 0; r2 < 3; ++r2) {
            if (r2 == row) continue;
            double f = M[r2][bc] / M[row][bc];
            for (int c = 0; c < 4; ++c) M[r2][c] -= f * M[row][c];
        }
    }
    int free_col = 0;
    while (free_col < 4 && used[free_col]) ++free_col;
    double sol[4];
    sol[free_col] = 1.0;
    for (int row = 0; row < 3; ++row)
        sol[piv_col[row]] = -M[row][free_col] / M[row][piv_col[row]];
    GeneralizedCircle c;
    c.a = sol[0];
    c.b = Complex(sol[1], sol[2]);
    c.d = sol[3];
    c.normalize();
    if (c.det() > -1e-14) return std::nullopt;
    return c;
}

double tangency_residual(const GeneralizedCircle& c1, const GeneralizedCircle& c2) {
    double B = c1.a * c2.d + c2.a * c1.d - 2 * std::real(c1.b * std::conj(c2.b));
    double disc = B * B - 4 * c1.det() * c2.det();
    double scale = B * B + 4 * std::abs(c1.det() * c2.det());
    return scale > 0 ? std::abs(disc) / scale : 0.0;
}

std::optional<PPoint> tangency_point(const GeneralizedCircle& c1, const GeneralizedCircle& c2) {
    // at tangency the pencil c1 + t c2 degenerates at t = -B / (2 det(c2))
    double B = c1.a * c2.d + c2.a * c1.d - 2 * std::real(c1.b * std::conj(c2.b));
    GeneralizedCircle k;
    double t;
    if (std::abs(c2.det()) >= std::abs(c1.det())) {
        t = -B / (2 * c2.det());
        k.a = c1.a + t * c2.a;
        k.b = c1.b + t * c2.b;
        k.d = c1.d + t * c2.d;
    } else {
        t = -B / (2 * c1.det());
        k.a = c2.a + t * c1.a;
        k.b = c2.b + t * c1.b;
        k.d = c2.d + t * c1.d;
    }
    k.normalize();
    // k is (close to) a point circle a|z - c|^2 vanishing at its own center
    if (!k.is_line(1e-9)) return PPoint::at(-k.b / k.a);
    if (std::abs(k.b) < 1e-9) return std::nullopt;
    // degenerate line pair: the common point is at infinity
    return PPoint::infinity();
}

bool point_in_interior(const GeneralizedCircle& c, int s, const PPoint& p, double tol) {
    return s * c.eval(p) < -tol;
}

bool interiors_disjoint(const GeneralizedCircle& c1, int s1, const GeneralizedCircle& c2, int s2,
                        double tol) {
    auto desc = [&](const GeneralizedCircle& c, int s) {
        struct D {
            bool line;
            Complex center_or_normal;
            double radius_or_offset;
            bool inside;  // interior = bounded side (circles) / normal side (lines)
        } d;
        d.line = c.is_line();
        if (d.line) {
            d.center_or_normal = c.line_normal();
            d.radius_or_offset = c.line_offset();
            // form = 2 Re(conj(z) b) + d = 2|b| (Re(conj(z) n) + offset);
            // interior (s * form < 0) is the side where Re(conj(z) n) < -offset
            // iff s > 0
            d.inside = s < 0;  // flag: interior on the +n side
        } else {
            d.center_or_normal = c.center();
            d.radius_or_offset = c.radius();
            // for a > 0, form < 0 inside the disk; interior = disk iff s > 0
            d.inside = s > 0;
        }
        return d;
    };
    auto d1 = desc(c1, s1), d2 = desc(c2, s2);
    if (!d1.line && !d2.line) {
        double dist = std::abs(d1.center_or_normal - d2.center_or_normal);
        double r1 = d1.radius_or_offset, r2 = d2.radius_or_offset;
        if (d1.inside && d2.inside) return dist >= r1 + r2 - tol;
        if (!d1.inside && !d2.inside) return false;  // two unbounded regions meet
        // one disk, one disk-complement: disjoint iff the disk nests strictly
        const auto& din = d1.inside ? d1 : d2;
        const auto& dout = d1.inside ? d2 : d1;
        return dist + din.radius_or_offset <= dout.radius_or_offset + tol;
    }
    if (d1.line && d2.line) {
        // parallel with opposite interiors and separated
        Complex n1 = d1.center_or_normal, n2 = d2.center_or_normal;
        double align = std::abs(std::conj(n1) * n2);
        if (std::abs(align - 1.0) > 1e-9) return false;  // crossing lines
        // half plane of c: s * 2|b| (Re(conj(z) n) + off) < 0
        double off1 = d1.radius_or_offset, off2 = d2.radius_or_offset;
        Complex rel = std::conj(n1) * n2;
        bool same_dir = rel.real() > 0;
        int side1 = s1 > 0 ? -1 : 1;  // interior where Re(conj(z) n1) compares
        int side2 = s2 > 0 ? -1 : 1;
        if (!same_dir) {
            side2 = -side2;
            off2 = -off2;
        }
        if (side1 == side2) return false;
        // interiors Re < -off (side -1) or Re > -off (side +1)
        double lo = side1 == -1 ? -off1 : -off2;
        double hi = side1 == -1 ? -off2 : -off1;
        return lo <= hi + tol;
    }
    // one line, one circle
    const GeneralizedCircle& lc = d1.line ? c1 : c2;
    int ls = d1.line ? s1 : s2;
    const auto& dl = d1.line ? d1 : d2;
    const auto& dc = d1.line ? d2 : d1;
    int cs = d1.line ? s2 : s1;
    (void)lc;
    (void)ls;
    double signed_dist = std::real(std::conj(dc.center_or_normal) * dl.center_or_normal) +
                         dl.radius_or_offset;
    // interior of the line: where sign of (Re(conj z n) + off) equals -s
    // center's side: sign(signed_dist)
    bool center_in_line_interior = (dl.inside ? signed_dist > 0 : signed_dist < 0);
    if (dc.inside) {
        // disk must avoid the half plane
        return !center_in_line_interior && std::abs(signed_dist) >= dc.radius_or_offset - tol;
    }
    // disk complement vs half plane: they always meet (both unbounded)
    return false;
}

}  // namespace tt
