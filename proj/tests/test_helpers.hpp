// Shared generators and independent oracles for the test suites. Everything
// here is deliberately naive (brute force) so it cannot share failure modes
// with the library code it checks.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "metastab/algebra.hpp"

namespace testing_helpers {

using metastab::SymMatrix3;
using metastab::Vec3;

inline Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    while (true) {
        Vec3 v{g(rng), g(rng), g(rng)};
        double n = metastab::norm(v);
        if (n > 1e-6) return v / n;
    }
}

// random rotation via QR-free Gram-Schmidt of Gaussian vectors
inline std::array<Vec3, 3> random_rotation(std::mt19937_64& rng) {
    Vec3 a = random_unit(rng);
    Vec3 b;
    do {
        b = random_unit(rng);
        b = b - metastab::dot(a, b) * a;
    } while (metastab::norm(b) < 1e-3);
    b = metastab::normalized(b);
    Vec3 c = metastab::cross(a, b);
    return {a, b, c};
}

// random SPD with eigenvalues log-uniform in [lo, hi]
inline SymMatrix3 random_spd(std::mt19937_64& rng, double lo = 0.1, double hi = 10.0) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    auto rot = random_rotation(rng);
    double lam[3] = {std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
    SymMatrix3 m{};
    for (int k = 0; k < 3; ++k) {
        SymMatrix3 o = SymMatrix3::outer(rot[k]);
        for (int i = 0; i < 6; ++i) m.u[i] += lam[k] * o.u[i];
    }
    return m;
}

inline SymMatrix3 random_psd(std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g;
    Vec3 r1{g(rng), g(rng), g(rng)}, r2{g(rng), g(rng), g(rng)}, r3{g(rng), g(rng), g(rng)};
    SymMatrix3 m{};
    for (Vec3 v : {r1, r2, r3}) {
        SymMatrix3 o = SymMatrix3::outer(v);
        for (int i = 0; i < 6; ++i) m.u[i] += scale * o.u[i];
    }
    return m;
}

// Characteristic-polynomial roots of a symmetric 3x3 by bisection on
// sign changes of p(x) = det(M - x I); independent of eig_sym3.
inline std::array<double, 3> charpoly_roots(const SymMatrix3& M) {
    auto p = [&](double x) {
        SymMatrix3 K = M;
        K.u[0] -= x;
        K.u[3] -= x;
        K.u[5] -= x;
        return K.det();
    };
    const double b = M.frobenius() + 1.0;
    // p is a downward cubic: p(-inf) = +inf, p(+inf) = -inf
    std::array<double, 3> roots{};
    int found = 0;
    const int N = 20000;
    double prev = p(-b), prevx = -b;
    for (int i = 1; i <= N && found < 3; ++i) {
        const double x = -b + 2 * b * double(i) / N;
        const double v = p(x);
        if ((v < 0) != (prev < 0) || v == 0.0) {
            double lo = prevx, hi = x;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((p(mid) < 0) == (p(lo) < 0))
                    lo = mid;
                else
                    hi = mid;
            }
            roots[found++] = 0.5 * (lo + hi);
        }
        prev = v;
        prevx = x;
    }
    // multiple roots may be missed by sign scanning; fill from trace identities
    if (found == 2) roots[2] = M.trace() - roots[0] - roots[1];
    if (found == 1) {
        // double root case: remaining two share (trace - r)/2
        roots[1] = roots[2] = 0.5 * (M.trace() - roots[0]);
        found = 3;
    }
    std::sort(roots.begin(), roots.end(), std::greater<double>());
    return roots;
}

}  // namespace testing_helpers
