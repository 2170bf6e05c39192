// Numeric verification of two analytic inequalities: the weighted anti-curl
// (Poincare) bound on the unit ball via the explicit star-shaped primitive,
// and the H^{-1/2} trace estimate for H(div) fields via its half-space
// Fourier form on a periodic slab.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "metastab/vec.hpp"

namespace metastab {

// Closed-form test field on the unit ball (anti-curl input, divergence-free)
// or on the slab [-pi,pi]^2 x [0,pi] (trace input).
struct TestField {
    std::string name;
    std::function<Vec3(Vec3)> value;
    std::function<Vec3(Vec3)> curl;      // optional analytic curl (may be null)
    std::function<double(Vec3)> divergence;  // optional analytic divergence
};

// F(x) = -int_0^1 t x x f(t x) dt, evaluated by Gauss-Legendre of the given
// order. For divergence-free f this is a curl-primitive: curl F = f.
Vec3 anti_curl(const std::function<Vec3(Vec3)>& f, Vec3 x, int quad_order);

// Quadrature-convergence estimate: relative change of anti_curl under
// order-doubling. Callers treat values above a tolerance as non-converged.
double anti_curl_order_doubling_error(const std::function<Vec3(Vec3)>& f, Vec3 x, int quad_order);

// int_{B1} |F|^2 / int_{B1} (1-|x|)^alpha |f|^2, product Gauss quadrature in
// spherical coordinates (n_r x n_theta x n_phi), anti-curl at quad_order.
// Throws std::invalid_argument for alpha outside [0, 2) unless
// allow_any_alpha (the sharpness sweep runs alpha = 2.5 on purpose), and
// std::domain_error on a vanishing denominator.
double weighted_ratio(const std::function<Vec3(Vec3)>& f, double alpha, int n_r = 40,
                      int n_theta = 24, int n_phi = 48, int quad_order = 64,
                      bool allow_any_alpha = false);

struct TraceCheck {
    double lhs = 0;         // sum |hat u_3(xi', 0)|^2 (1+|xi'|^2)^{-1/2}
    double u_l2 = 0;        // ||u||_{L2(slab)}
    double div_l2 = 0;      // ||div u||_{L2(slab)}
    double ratio = 0;       // lhs / (u_l2 (u_l2 + div_l2))
};

// Discrete half-space trace functional on the periodic slab
// [-pi,pi]^2 x [0, pi] with an N^3 grid: the bottom-face trace of u_3 goes
// through a 2-D DFT; the right-hand factors by grid sums. The field must be
// supported away from the lateral and top boundaries (checked; throws
// std::invalid_argument otherwise).
TraceCheck trace_estimate_check(const TestField& u, int grid_n);

// Built-in corpora used by tests, the CLI and the acceptance suite.
std::vector<TestField> anti_curl_polynomial_corpus();
// Divergence-free azimuthal shell concentrating near |x| = 1 as k grows.
TestField boundary_concentrated_field(int k);
// Same concentrating shell riding on a fixed rigid-rotation component. The
// anchor pins the ratio scale, so a bounded ratio shows up as a flat sampled
// curve rather than a decaying one.
TestField anchored_boundary_family(int k);
// 20 smooth slab fields: centered bumps of assorted widths/centers plus the
// oscillatory family (0, 0, phi cos(k x1)).
std::vector<TestField> trace_corpus();
TestField oscillatory_slab_field(int k);

}  // namespace metastab
