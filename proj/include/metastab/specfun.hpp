// Complex-argument spherical Bessel/Hankel functions and Gauss-Legendre
// quadrature: the numerical kernel of the radiating-sphere solver and the
// inequality checks.
#pragma once

#include <vector>

#include "metastab/vec.hpp"

namespace metastab {

struct BesselEval {
    int order = 0;
    complexd z{0, 0};
    complexd value{0, 0};
    complexd derivative{0, 0};
};

// j_n by downward (Miller) recurrence normalized at j_0 = sin z / z; Taylor
// series for |z| < 0.5. Derivative via f' = f_{n-1} - (n+1)/z f.
// Throws std::domain_error for n > 5000 (overflow regime) or n < 0.
BesselEval sph_bessel_j(int n, complexd z);
// y_n by upward recurrence from y_0 = -cos z / z. Throws for z = 0.
BesselEval sph_bessel_y(int n, complexd z);
// h1_n = j_n + i y_n.
BesselEval sph_hankel1(int n, complexd z);

// Riccati-Bessel style derivative factor Z_n(z) = (z f_n(z))'/z = f_n' + f_n/z.
complexd riccati_z_factor(const BesselEval& f);

struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum to 2
};

// Newton-on-Legendre nodes and weights; cached per order behind an immutable
// table. Valid orders 1..512.
const QuadratureRule& gauss_legendre(int order);

// integral of f over [a, b] with the given rule
template <typename F>
auto integrate(const QuadratureRule& q, double a, double b, F&& f) {
    using R = decltype(f(a));
    R acc{};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < q.order; ++i) acc += q.weights[i] * f(mid + half * q.nodes[i]);
    return half * acc;
}

}  // namespace metastab
