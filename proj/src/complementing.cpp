#include "metastab/complementing.hpp"

#include <cmath>
#include <stdexcept>

namespace metastab {

CauchyPair CauchyPair::make(const SymMatrix3& a1, const SymMatrix3& a2, Vec3 e) {
    if (std::abs(norm(e) - 1.0) > 1e-12)
        throw std::invalid_argument("CauchyPair: direction must be unit");
    if (eig_sym3(a1).lam[2] <= 0.0 || eig_sym3(a2).lam[2] <= 0.0)
        throw std::invalid_argument("CauchyPair: matrices must be positive definite");
    return {a1, a2, e};
}

double cauchy_form(const SymMatrix3& A, Vec3 e, Vec3 xi) {
    const Vec3 Ae = A.apply(e);
    return dot(Ae, e) * A.quad(xi) - dot(Ae, xi) * dot(Ae, xi);
}

SymMatrix2 restriction_matrix(const SymMatrix3& A, const TangentFrame& frame) {
    const double a = A.quad(frame.e);
    const Vec3 At1 = A.apply(frame.t1), At2 = A.apply(frame.t2), Ae = A.apply(frame.e);
    const double g11 = dot(At1, frame.t1), g12 = dot(At1, frame.t2), g22 = dot(At2, frame.t2);
    const double b1 = dot(Ae, frame.t1), b2 = dot(Ae, frame.t2);
    return {{a * g11 - b1 * b1, a * g12 - b1 * b2, a * g22 - b2 * b2}};
}

CauchyVerdict check_complementing(const CauchyPair& pair) {
    const TangentFrame fr = tangent_frame(pair.e);
    const SymMatrix2 m1 = restriction_matrix(pair.a1, fr);
    const SymMatrix2 m2 = restriction_matrix(pair.a2, fr);
    const SymMatrix2 Q = m2 - m1;
    const double scale = m1.frobenius() + m2.frobenius();
    const double d = Q.det();

    CauchyVerdict v;
    v.margin = d / (scale * scale);
    if (d > 1e-12 * scale * scale) {
        v.status = CauchyStatus::Satisfied;
        return v;
    }
    v.status = CauchyStatus::Violated;

    // Null direction of the quadratic form of Q, lifted to 3-space. With
    // l1 >= 0 >= l2:  xi = sqrt(l1) v2 + sqrt(-l2) v1 gives xi^T Q xi = 0.
    const Eig2 eg = eig_sym2(Q);
    double c1 = std::sqrt(std::max(0.0, -eg.l2));  // along v1
    double c2 = std::sqrt(std::max(0.0, eg.l1));   // along v2
    double wu, wv;
    if (c1 == 0.0 && c2 == 0.0) {
        wu = 1.0;  // Q == 0: every tangent is a witness; report t1
        wv = 0.0;
    } else {
        wu = c1 * eg.v1[0] + c2 * eg.v2[0];
        wv = c1 * eg.v1[1] + c2 * eg.v2[1];
        const double n = std::hypot(wu, wv);
        wu /= n;
        wv /= n;
    }
    v.witness = normalized(wu * fr.t1 + wv * fr.t2);
    return v;
}

ModeOracleResult mode_oracle(const CauchyPair& pair, Vec3 xi, double tol) {
    if (std::abs(norm(xi) - 1.0) > 1e-10)
        throw std::invalid_argument("mode_oracle: xi must be unit");
    if (std::abs(dot(xi, pair.e)) > 1e-10)
        throw std::invalid_argument("mode_oracle: xi must be tangent to e");

    ModeOracleResult r;
    const SymMatrix3* As[2] = {&pair.a1, &pair.a2};
    complexd lam[2];
    double s[2];
    for (int j = 0; j < 2; ++j) {
        const double a = As[j]->quad(pair.e);
        const double b = dot(As[j]->apply(pair.e), xi);
        const double c = As[j]->quad(xi);
        const double disc = a * c - b * b;
        if (disc <= 0.0)
            throw std::invalid_argument("mode_oracle: degenerate (non-elliptic) matrix");
        s[j] = std::sqrt(disc);
        lam[j] = complexd(-s[j], -b) / a;  // (-i b - s)/a
    }
    r.decay_rate_1 = lam[0];
    r.decay_rate_2 = lam[1];
    r.s1 = s[0];
    r.s2 = s[1];
    r.nontrivial_mode_exists = std::abs(s[0] - s[1]) <= tol * (s[0] + s[1]);
    return r;
}

namespace {

double q_gap(const CauchyPair& pair, Vec3 xi) {
    return cauchy_form(pair.a2, pair.e, xi) - cauchy_form(pair.a1, pair.e, xi);
}

bool mode_at(const CauchyPair& pair, Vec3 xi, double tol) {
    return mode_oracle(pair, normalized(xi), tol).nontrivial_mode_exists;
}

}  // namespace

bool mode_oracle_scan(const CauchyPair& pair, int n_grid, double tol) {
    const TangentFrame fr = tangent_frame(pair.e);
    auto dir = [&](double phi) -> Vec3 {
        return std::cos(phi) * fr.t1 + std::sin(phi) * fr.t2;
    };

    // s1 = s2 iff q2 - q1 = 0; bisection on sign changes of the gap over the
    // half-circle (gap is even in xi).
    double prev_gap = q_gap(pair, dir(0.0));
    if (mode_at(pair, dir(0.0), tol)) return true;
    for (int i = 1; i <= n_grid; ++i) {
        const double phi = M_PI * double(i) / double(n_grid);
        const double g = q_gap(pair, dir(phi));
        if (mode_at(pair, dir(phi), tol)) return true;
        if ((g < 0) != (prev_gap < 0)) {
            double lo = M_PI * double(i - 1) / double(n_grid), hi = phi;
            double glo = prev_gap;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = q_gap(pair, dir(mid));
                if ((gm < 0) == (glo < 0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            if (mode_at(pair, dir(0.5 * (lo + hi)), tol)) return true;
        }
        prev_gap = g;
    }

    // refinement around the eigen-directions of the criterion's Q (covers
    // grazing zeros with no sign change)
    const SymMatrix2 Q = restriction_matrix(pair.a2, fr) - restriction_matrix(pair.a1, fr);
    const Eig2 eg = eig_sym2(Q);
    const double c1 = std::sqrt(std::max(0.0, -eg.l2));
    const double c2 = std::sqrt(std::max(0.0, eg.l1));
    Vec3 cand[3];
    int nc = 0;
    if (c1 != 0.0 || c2 != 0.0) {
        cand[nc++] = (c1 * eg.v1[0] + c2 * eg.v2[0]) * fr.t1 +
                     (c1 * eg.v1[1] + c2 * eg.v2[1]) * fr.t2;
        cand[nc++] = (c1 * eg.v1[0] - c2 * eg.v2[0]) * fr.t1 +
                     (c1 * eg.v1[1] - c2 * eg.v2[1]) * fr.t2;
    } else {
        cand[nc++] = fr.t1;
    }
    for (int i = 0; i < nc; ++i)
        if (norm(cand[i]) > 1e-14 && mode_at(pair, cand[i], tol)) return true;
    return false;
}

}  // namespace metastab
