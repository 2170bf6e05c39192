// Decides the Cauchy complementing condition for a pair of positive symmetric
// matrices and an interface direction, two independent ways: the exact
// algebraic criterion (2x2 determinant on the tangent plane) and a brute-force
// half-space exponential-mode oracle.
#pragma once

#include <optional>

#include "metastab/algebra.hpp"

namespace metastab {

struct CauchyPair {
    SymMatrix3 a1, a2;  // both positive definite
    Vec3 e;             // unit direction

    // Throws std::invalid_argument if a1/a2 are not positive definite or e is
    // not a unit vector.
    static CauchyPair make(const SymMatrix3& a1, const SymMatrix3& a2, Vec3 e);
};

enum class CauchyStatus { Satisfied, Violated };

struct CauchyVerdict {
    CauchyStatus status = CauchyStatus::Violated;
    // det Q / scale^2 with Q = M_{A2} - M_{A1} and scale = |M_{A1}| + |M_{A2}|.
    double margin = 0.0;
    // unit tangent with q_{A2} = q_{A1}, present iff Violated
    std::optional<Vec3> witness;

    bool satisfied() const { return status == CauchyStatus::Satisfied; }
};

// q_A(e, xi) = <A e, e><A xi, xi> - <A e, xi>^2. Nonnegative for A psd.
double cauchy_form(const SymMatrix3& A, Vec3 e, Vec3 xi);

// Representation of xi -> q_A(e, xi) on the tangent plane of `frame`:
// M_A = <A e, e> G - g g^T with G_ij = <A t_i, t_j>, g_i = <A e, t_i>.
SymMatrix2 restriction_matrix(const SymMatrix3& A, const TangentFrame& frame);

// Exact criterion: Satisfied iff det(M_{A2} - M_{A1}) > 1e-12 * scale^2.
// Exact zero and tiny positive determinants are reported Violated with the
// margin recorded, so callers can distinguish degenerate from robustly
// violated.
CauchyVerdict check_complementing(const CauchyPair& pair);

struct ModeOracleResult {
    bool nontrivial_mode_exists = false;
    complexd decay_rate_1{0, 0}, decay_rate_2{0, 0};  // strictly negative real parts
    double s1 = 0, s2 = 0;                            // sqrt(a c - b^2) per side
};

// Half-space mode construction from the definition: with u_j = e^{i<y,xi>}
// v_j(t), div(A_j grad u_j) = 0 reduces to a_j v'' + 2 i b_j v' - c_j v = 0,
// whose bounded root is lambda_j = (-i b_j - s_j)/a_j, s_j = sqrt(a_j c_j -
// b_j^2) > 0. Matching values and conormal derivatives on {t = 0} admits a
// nontrivial bounded solution iff s_1 = s_2. Implemented independently of
// check_complementing (no shared intermediates beyond the inputs).
// Pre: xi unit and tangent to e (1e-10). Throws on violated preconditions.
ModeOracleResult mode_oracle(const CauchyPair& pair, Vec3 xi, double tol);

// Scan helper used by the audit and the agreement harness: searches a tangent
// grid (n_grid directions) plus candidate null directions of the criterion's
// quadratic form, with bisection refinement on sign changes of q2 - q1.
// Returns true iff a nontrivial mode was found.
bool mode_oracle_scan(const CauchyPair& pair, int n_grid, double tol);

}  // namespace metastab
