#include "metastab/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace metastab {

SymMatrix3 congruence(const Mat3& J, const SymMatrix3& A) {
    Mat3 Af;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Af(i, j) = A(i, j);
    Mat3 P = J * Af * transpose(J);
    SymMatrix3 r;
    r.u = {P(0, 0), 0.5 * (P(0, 1) + P(1, 0)), 0.5 * (P(0, 2) + P(2, 0)),
           P(1, 1), 0.5 * (P(1, 2) + P(2, 1)), P(2, 2)};
    return r;
}

Eig2 eig_sym2(const SymMatrix2& M) {
    const double a = M.u[0], b = M.u[1], c = M.u[2];
    const double tr = a + c;
    const double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) + 4 * b * b));
    // avoid cancellation: take the larger-magnitude root from the quadratic
    double l1 = 0.5 * (tr + disc);
    double l2 = 0.5 * (tr - disc);
    if (l1 < l2) std::swap(l1, l2);

    Eig2 out;
    out.l1 = l1;
    out.l2 = l2;
    // eigenvector for l1 from the better-conditioned row of (M - l1 I)
    double vx, vy;
    if (std::abs(a - l1) > std::abs(c - l1)) {
        vx = b;
        vy = l1 - a;
    } else {
        vx = l1 - c;
        vy = b;
    }
    double n = std::hypot(vx, vy);
    if (n == 0.0) {
        vx = 1.0;
        vy = 0.0;
        n = 1.0;
    }
    out.v1 = {vx / n, vy / n};
    out.v2 = {-out.v1[1], out.v1[0]};
    return out;
}

namespace {

// Cyclic Jacobi for 3x3 symmetric; converges to machine precision in a few
// sweeps. Used as the robust fallback of eig_sym3.
Eig3 jacobi_sym3(const SymMatrix3& M) {
    double A[3][3] = {{M(0, 0), M(0, 1), M(0, 2)},
                      {M(0, 1), M(1, 1), M(1, 2)},
                      {M(0, 2), M(1, 2), M(2, 2)}};
    double V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::abs(A[0][1]) + std::abs(A[0][2]) + std::abs(A[1][2]);
        if (off == 0.0) break;
        for (int p = 0; p < 2; ++p)
            for (int q = p + 1; q < 3; ++q) {
                if (A[p][q] == 0.0) continue;
                const double theta = (A[q][q] - A[p][p]) / (2 * A[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = A[k][p], akq = A[k][q];
                    A[k][p] = c * akp - s * akq;
                    A[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = A[p][k], aqk = A[q][k];
                    A[p][k] = c * apk - s * aqk;
                    A[q][k] = s * apk + c * aqk;
                }
                A[p][q] = A[q][p] = 0.5 * (A[p][q] + A[q][p]);
                for (int k = 0; k < 3; ++k) {
                    const double vkp = V[k][p], vkq = V[k][q];
                    V[k][p] = c * vkp - s * vkq;
                    V[k][q] = s * vkp + c * vkq;
                }
            }
    }
    Eig3 out;
    int order[3] = {0, 1, 2};
    double lam[3] = {A[0][0], A[1][1], A[2][2]};
    std::sort(order, order + 3, [&](int i, int j) { return lam[i] > lam[j]; });
    for (int i = 0; i < 3; ++i) {
        out.lam[i] = lam[order[i]];
        out.vec[i] = {V[0][order[i]], V[1][order[i]], V[2][order[i]]};
    }
    return out;
}

Vec3 eigvec_for(const SymMatrix3& M, double lam) {
    // rows of (M - lam I); eigenvector orthogonal to two independent rows
    Vec3 r0{M(0, 0) - lam, M(0, 1), M(0, 2)};
    Vec3 r1{M(0, 1), M(1, 1) - lam, M(1, 2)};
    Vec3 r2{M(0, 2), M(1, 2), M(2, 2) - lam};
    Vec3 c01 = cross(r0, r1), c02 = cross(r0, r2), c12 = cross(r1, r2);
    double n01 = dot(c01, c01), n02 = dot(c02, c02), n12 = dot(c12, c12);
    Vec3 best = c01;
    double nb = n01;
    if (n02 > nb) {
        best = c02;
        nb = n02;
    }
    if (n12 > nb) {
        best = c12;
        nb = n12;
    }
    if (nb <= 0.0) return {0, 0, 0};
    return best / std::sqrt(nb);
}

}  // namespace

Eig3 eig_sym3(const SymMatrix3& M) {
    const double scale = std::max(M.frobenius(), 1e-300);
    // p1 = sum of squared off-diagonals
    const double p1 = M.u[1] * M.u[1] + M.u[2] * M.u[2] + M.u[4] * M.u[4];
    if (p1 <= 1e-30 * scale * scale) {
        // already diagonal
        Eig3 out;
        double lam[3] = {M.u[0], M.u[3], M.u[5]};
        Vec3 ax[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        int order[3] = {0, 1, 2};
        std::sort(order, order + 3, [&](int i, int j) { return lam[i] > lam[j]; });
        for (int i = 0; i < 3; ++i) {
            out.lam[i] = lam[order[i]];
            out.vec[i] = ax[order[i]];
        }
        return out;
    }

    // trigonometric form on the shifted matrix K = (M - q I)/p
    const double q = M.trace() / 3.0;
    const double p2 = (M.u[0] - q) * (M.u[0] - q) + (M.u[3] - q) * (M.u[3] - q) +
                      (M.u[5] - q) * (M.u[5] - q) + 2 * p1;
    const double p = std::sqrt(p2 / 6.0);
    SymMatrix3 K = M;
    K.u[0] -= q;
    K.u[3] -= q;
    K.u[5] -= q;
    for (auto& v : K.u) v /= p;
    double r = K.det() / 2.0;  // in [-1, 1] up to roundoff
    r = std::clamp(r, -1.0, 1.0);

    // discriminant of the depressed cubic is degenerate when |r| ~ 1
    // (repeated eigenvalues); hand off to Jacobi there.
    if (1.0 - std::abs(r) < 1e-12) return jacobi_sym3(M);

    const double phi = std::acos(r) / 3.0;
    Eig3 out;
    out.lam[0] = q + 2 * p * std::cos(phi);
    out.lam[2] = q + 2 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    out.lam[1] = 3 * q - out.lam[0] - out.lam[2];

    for (int i = 0; i < 3; ++i) out.vec[i] = eigvec_for(M, out.lam[i]);
    // middle eigenvector via orthogonality when extraction is ill-conditioned
    if (dot(out.vec[1], out.vec[1]) < 0.25) out.vec[1] = cross(out.vec[2], out.vec[0]);

    // verify; fall back to Jacobi if cross-product extraction degraded
    for (int i = 0; i < 3; ++i) {
        Vec3 res = M.apply(out.vec[i]) - out.lam[i] * out.vec[i];
        if (norm(res) > 1e-11 * scale || std::abs(norm(out.vec[i]) - 1.0) > 1e-8)
            return jacobi_sym3(M);
    }
    return out;
}

TangentFrame tangent_frame(Vec3 e) {
    const double n = norm(e);
    if (n < 1e-14) throw std::invalid_argument("tangent_frame: zero direction");
    e = e / n;
    // axis least aligned with e; ties resolved by index order (x, then y)
    int k = 0;
    double best = std::abs(e.x);
    if (std::abs(e.y) < best) {
        k = 1;
        best = std::abs(e.y);
    }
    if (std::abs(e.z) < best) k = 2;
    Vec3 a{0, 0, 0};
    a[k] = 1.0;
    Vec3 t1 = normalized(a - dot(a, e) * e);
    Vec3 t2 = cross(e, t1);  // => t1 x t2 = e
    return {e, t1, t2};
}

double min_eig_margin(const SymMatrix3& A, const SymMatrix3& B) {
    return eig_sym3(A - B).lam[2];
}

}  // namespace metastab
