// Vector spherical harmonics: orthonormal scalar harmonics Y_nm, the tangent
// basis fields B = grad_S Y and C = B x rhat, and numeric plane-wave
// projection onto the (M, N) multipole families.
#pragma once

#include <vector>

#include "metastab/vec.hpp"

namespace metastab {

struct AngularBasis {
    complexd Y{0, 0};  // orthonormal spherical harmonic
    CVec3 B{}, C{};    // tangent basis; |B|^2 and |C|^2 integrate to n(n+1)
    Vec3 rhat{};
};

// Evaluates Y_nm and the tangent vectors at direction xhat (need not be
// normalized). Requires n >= 1, |m| <= n.
AngularBasis vsh_basis(int n, int m, Vec3 direction);

// Normalized associated Legendre bar-P_n^m(cos theta) (Condon-Shortley
// included), m >= 0.
double legendre_norm(int n, int m, double cos_theta);

// Multipole coefficients of the canonical plane wave  E = xhat e^{ikz}:
// E = sum_n sum_{m=+-1} [ p_nm j_n(kr) C_nm + q_nm N_nm ].
// Computed by numeric angular projection at a well-conditioned radius; exact
// to quadrature accuracy and independent of any analytic convention table.
struct PlaneWaveModeCoeffs {
    complexd p_plus{0, 0}, p_minus{0, 0};  // C-channel (TE), m = +1 / -1
    complexd q_plus{0, 0}, q_minus{0, 0};  // B-channel (TM)
};
PlaneWaveModeCoeffs plane_wave_coeffs(int n, double k);

}  // namespace metastab
