// Small dense symmetric linear algebra: 2x2/3x3 symmetric eigen-solves in
// closed form, orthonormal tangent frames, and matrix ordering margins.
#pragma once

#include <array>

#include "metastab/vec.hpp"

namespace metastab {

// Real symmetric 3x3 stored as the upper triangle, so symmetry holds by
// construction: entries (a00, a01, a02, a11, a12, a22).
struct SymMatrix3 {
    std::array<double, 6> u{};

    static SymMatrix3 identity() { return {{1, 0, 0, 1, 0, 1}}; }
    static SymMatrix3 diag(double a, double b, double c) { return {{a, 0, 0, b, 0, c}}; }
    static SymMatrix3 scaled_identity(double s) { return diag(s, s, s); }
    // from full row-major entries; (i,j) and (j,i) must agree, upper wins
    static SymMatrix3 from_rows(const std::array<double, 9>& r) {
        return {{r[0], r[1], r[2], r[4], r[5], r[8]}};
    }
    // rank-1 v v^T
    static SymMatrix3 outer(Vec3 v) {
        return {{v.x * v.x, v.x * v.y, v.x * v.z, v.y * v.y, v.y * v.z, v.z * v.z}};
    }

    double operator()(int i, int j) const {
        if (i > j) std::swap(i, j);
        if (i == 0) return u[j];
        if (i == 1) return u[2 + j];  // (1,1)->u[3], (1,2)->u[4]
        return u[5];
    }
    Vec3 apply(Vec3 v) const {
        return {u[0] * v.x + u[1] * v.y + u[2] * v.z,
                u[1] * v.x + u[3] * v.y + u[4] * v.z,
                u[2] * v.x + u[4] * v.y + u[5] * v.z};
    }
    CVec3 apply(CVec3 v) const {
        return {u[0] * v.x + u[1] * v.y + u[2] * v.z,
                u[1] * v.x + u[3] * v.y + u[4] * v.z,
                u[2] * v.x + u[4] * v.y + u[5] * v.z};
    }
    double quad(Vec3 v) const { return dot(apply(v), v); }
    double trace() const { return u[0] + u[3] + u[5]; }
    double det() const {
        return u[0] * (u[3] * u[5] - u[4] * u[4]) - u[1] * (u[1] * u[5] - u[4] * u[2]) +
               u[2] * (u[1] * u[4] - u[3] * u[2]);
    }
    double frobenius() const {
        return std::sqrt(u[0] * u[0] + u[3] * u[3] + u[5] * u[5] +
                         2 * (u[1] * u[1] + u[2] * u[2] + u[4] * u[4]));
    }
};

inline SymMatrix3 operator+(SymMatrix3 a, SymMatrix3 b) {
    SymMatrix3 r;
    for (int i = 0; i < 6; ++i) r.u[i] = a.u[i] + b.u[i];
    return r;
}
inline SymMatrix3 operator-(SymMatrix3 a, SymMatrix3 b) {
    SymMatrix3 r;
    for (int i = 0; i < 6; ++i) r.u[i] = a.u[i] - b.u[i];
    return r;
}
inline SymMatrix3 operator*(double s, SymMatrix3 a) {
    SymMatrix3 r;
    for (int i = 0; i < 6; ++i) r.u[i] = s * a.u[i];
    return r;
}
inline SymMatrix3 operator-(SymMatrix3 a) { return -1.0 * a; }

// Symmetrized J A J^T (J general). Result is exactly symmetric by construction.
SymMatrix3 congruence(const Mat3& J, const SymMatrix3& A);

// Real symmetric 2x2: entries (a00, a01, a11).
struct SymMatrix2 {
    std::array<double, 3> u{};

    static SymMatrix2 identity() { return {{1, 0, 1}}; }
    double operator()(int i, int j) const {
        if (i > j) std::swap(i, j);
        return i == 0 ? (j == 0 ? u[0] : u[1]) : u[2];
    }
    double trace() const { return u[0] + u[2]; }
    double det() const { return u[0] * u[2] - u[1] * u[1]; }
    double frobenius() const {
        return std::sqrt(u[0] * u[0] + 2 * u[1] * u[1] + u[2] * u[2]);
    }
    double quad(double a, double b) const {
        return u[0] * a * a + 2 * u[1] * a * b + u[2] * b * b;
    }
};

inline SymMatrix2 operator-(SymMatrix2 a, SymMatrix2 b) {
    return {{a.u[0] - b.u[0], a.u[1] - b.u[1], a.u[2] - b.u[2]}};
}

// Orthonormal right-handed triple {t1, t2, e} with t1 x t2 = e.
struct TangentFrame {
    Vec3 e, t1, t2;
};

struct Eig2 {
    double l1, l2;            // l1 >= l2
    std::array<double, 2> v1, v2;  // orthonormal
};

struct Eig3 {
    std::array<double, 3> lam;  // descending
    std::array<Vec3, 3> vec;    // orthonormal, vec[i] for lam[i]
};

// Closed-form symmetric 2x2 eigen-decomposition.
Eig2 eig_sym2(const SymMatrix2& M);

// Symmetric 3x3 eigen-decomposition: trigonometric closed form with a Jacobi
// sweep fallback near a degenerate discriminant. Eigenvalues descending.
Eig3 eig_sym3(const SymMatrix3& M);

// Deterministic orthonormal frame for a unit direction e. Tie-breaking picks
// the coordinate axis least aligned with e, projects, normalizes. Continuous
// except across the seams |e_x| = |e_y|, |e_x| = |e_z|, |e_y| = |e_z| where
// the selected axis switches. Throws std::invalid_argument on a (near-)zero
// input.
TangentFrame tangent_frame(Vec3 e);

// lambda_min(A - B): the largest c with A >= B + c I.
double min_eig_margin(const SymMatrix3& A, const SymMatrix3& B);

}  // namespace metastab
