#include <doctest.h>

#include <random>

#include "metastab/estimates.hpp"
#include "test_helpers.hpp"

using namespace metastab;
using namespace testing_helpers;

namespace {

Vec3 fd_curl_real(const std::function<Vec3(Vec3)>& f, Vec3 x, double h) {
    auto d = [&](int comp, int axis) {
        Vec3 xp = x, xm = x;
        xp[axis] += h;
        xm[axis] -= h;
        return (f(xp)[comp] - f(xm)[comp]) / (2 * h);
    };
    return {d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)};
}

}  // namespace

TEST_CASE("anti_curl closed forms") {
    SUBCASE("constant field (0,0,1)") {
        auto f = [](Vec3) { return Vec3{0, 0, 1}; };
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-0.55, 0.55);
        for (int k = 0; k < 50; ++k) {
            const Vec3 x{u(rng), u(rng), u(rng)};
            const Vec3 F = anti_curl(f, x, 16);
            CHECK(norm(F - Vec3{-x.y / 2, x.x / 2, 0}) <= 1e-14);
            CHECK(norm(fd_curl_real([&](Vec3 y) { return anti_curl(f, y, 16); }, x, 1e-5) -
                       Vec3{0, 0, 1}) <= 1e-9);
        }
    }
    SUBCASE("linear field (0,0,x1)") {
        auto f = [](Vec3 y) { return Vec3{0, 0, y.x}; };
        const Vec3 x{0.3, -0.4, 0.1};
        const Vec3 F = anti_curl(f, x, 16);
        CHECK(norm(F - Vec3{-x.x * x.y / 3, x.x * x.x / 3, 0}) <= 1e-14);
    }
    SUBCASE("linearity") {
        auto f = [](Vec3 y) { return Vec3{-y.y, y.x, 0}; };
        auto g = [](Vec3 y) { return Vec3{y.y * y.y * y.y, 0, y.x}; };
        const double a = 1.7, b = -0.6;
        auto combo = [&](Vec3 y) { return a * f(y) + b * g(y); };
        const Vec3 x{0.2, 0.5, -0.3};
        const Vec3 lhs = anti_curl(combo, x, 32);
        const Vec3 rhs = a * anti_curl(f, x, 32) + b * anti_curl(g, x, 32);
        CHECK(norm(lhs - rhs) <= 1e-12 * (norm(rhs) + 1.0));
    }
    SUBCASE("polynomial corpus: curl reconstruction to 1e-6 and quadrature exactness") {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-0.6, 0.6);
        for (const TestField& tf : anti_curl_polynomial_corpus()) {
            CAPTURE(tf.name);
            double fmax = 0;
            for (int k = 0; k < 50; ++k) {
                const Vec3 x{u(rng), u(rng), u(rng)};
                fmax = std::max(fmax, norm(tf.value(x)));
            }
            double worst = 0;
            for (int k = 0; k < 200; ++k) {
                const Vec3 x{u(rng), u(rng), u(rng)};
                const Vec3 rec = fd_curl_real(
                    [&](Vec3 y) { return anti_curl(tf.value, y, 64); }, x, 1e-4);
                worst = std::max(worst, norm(rec - tf.value(x)));
                // degree <= 3 integrand in t: order-4 quadrature already exact
                CHECK(norm(anti_curl(tf.value, x, 4) - anti_curl(tf.value, x, 64)) <= 1e-13);
            }
            CHECK(worst <= 1e-6 * (fmax + 1e-30));
            // divergence-free input invariant
            for (int k = 0; k < 20; ++k) {
                const Vec3 x{u(rng), u(rng), u(rng)};
                double dv = 0;
                for (int c = 0; c < 3; ++c) {
                    Vec3 xp = x, xm = x;
                    xp[c] += 1e-5;
                    xm[c] -= 1e-5;
                    dv += (tf.value(xp)[c] - tf.value(xm)[c]) / 2e-5;
                }
                CHECK(std::abs(dv) <= 1e-10 * (fmax + 1.0));
            }
        }
    }
    SUBCASE("order-doubling convergence report") {
        auto smooth = [](Vec3 y) { return Vec3{std::sin(3 * y.z), 0, std::cos(3 * y.x)}; };
        CHECK(anti_curl_order_doubling_error(smooth, {0.4, 0.2, -0.3}, 32) <= 1e-12);
        CHECK(anti_curl_order_doubling_error(smooth, {0.4, 0.2, -0.3}, 2) > 1e-12);
    }
}

TEST_CASE("weighted_ratio") {
    SUBCASE("constant field sanity: ratio < 1 at alpha = 0") {
        auto f = [](Vec3) { return Vec3{0, 0, 1}; };
        const double r = weighted_ratio(f, 0.0);
        // |F|^2 = (x1^2+x2^2)/4; ratio = int (r sin)^2/4 / int 1 = (2/5)/4 = 1/10
        CHECK(r == doctest::Approx(0.1).epsilon(1e-6));
        CHECK(r < 1.0);
    }
    SUBCASE("monotone nondecreasing in alpha for fixed f") {
        const TestField f = boundary_concentrated_field(4);
        double prev = 0;
        for (double alpha : {0.0, 0.5, 1.0, 1.5}) {
            const double r = weighted_ratio(f.value, alpha, 32, 16, 24, 32);
            CHECK(r >= prev * (1.0 - 1e-12));
            prev = r;
        }
    }
    SUBCASE("bounded across concentration levels for alpha < 2") {
        // desk-scale version of the boundedness sweep (full sweep in
        // acceptance); the anchored family keeps the sampled curve flat
        std::vector<double> ratios;
        for (int k : {2, 8, 32}) {
            const TestField f = anchored_boundary_family(k);
            ratios.push_back(weighted_ratio(f.value, 1.5, 64, 12, 16, 96));
        }
        const double lo = *std::min_element(ratios.begin(), ratios.end());
        const double hi = *std::max_element(ratios.begin(), ratios.end());
        CHECK(hi / lo < 2.0);
        // the bare shell ratios stay under a fixed roof as well (no blow-up)
        for (int k : {2, 8, 32}) {
            const TestField f = boundary_concentrated_field(k);
            CHECK(weighted_ratio(f.value, 1.5, 64, 12, 16, 96) < 1.0);
        }
    }
    SUBCASE("alpha = 2.5 sharpness sweep runs and reports growth") {
        double r8 = weighted_ratio(boundary_concentrated_field(8).value, 2.5, 48, 16, 24, 32,
                                   /*allow_any_alpha=*/true);
        double r2 = weighted_ratio(boundary_concentrated_field(2).value, 2.5, 48, 16, 24, 32,
                                   true);
        CHECK(r8 > r2);  // growing ratio reported, divergence not asserted
        CHECK_THROWS_AS(weighted_ratio(boundary_concentrated_field(2).value, 2.5),
                        std::invalid_argument);
    }
    SUBCASE("zero denominator") {
        auto zero = [](Vec3) { return Vec3{0, 0, 0}; };
        CHECK_THROWS_AS(weighted_ratio(zero, 1.0, 8, 8, 8, 8), std::domain_error);
    }
}

TEST_CASE("trace_estimate_check") {
    SUBCASE("refinement stability for a centered bump") {
        const TestField u = trace_corpus().front();
        const TraceCheck coarse = trace_estimate_check(u, 32);
        const TraceCheck fine = trace_estimate_check(u, 64);
        CHECK(std::abs(coarse.lhs - fine.lhs) <= 0.01 * fine.lhs);
        CHECK(std::abs(coarse.u_l2 - fine.u_l2) <= 0.01 * fine.u_l2);
    }
    SUBCASE("zero-trace field gives lhs ~ 0") {
        TestField u;
        u.name = "high_bump";
        const Vec3 c{0, 0, 1.6};
        const double s = 0.28;
        u.value = [c, s](Vec3 x) {
            const Vec3 d = x - c;
            return Vec3{0, 0, std::exp(-dot(d, d) / (s * s))};
        };
        u.divergence = [c, s](Vec3 x) {
            const Vec3 d = x - c;
            return std::exp(-dot(d, d) / (s * s)) * (-2.0 * d.z / (s * s));
        };
        const TraceCheck t = trace_estimate_check(u, 32);
        CHECK(t.lhs <= 1e-12 * t.u_l2 * t.u_l2);
    }
    SUBCASE("tangential translation invariance of the lhs") {
        auto make = [](double shift) {
            TestField u;
            u.name = "shifted";
            const double s = 0.4;
            u.value = [shift, s](Vec3 x) {
                double x1 = std::remainder(x.x - shift, 2 * M_PI);
                const Vec3 d{x1, x.y, x.z - 0.6};
                return Vec3{0, 0, std::exp(-dot(d, d) / (s * s))};
            };
            u.divergence = [shift, s](Vec3 x) {
                double x1 = std::remainder(x.x - shift, 2 * M_PI);
                const Vec3 d{x1, x.y, x.z - 0.6};
                return std::exp(-dot(d, d) / (s * s)) * (-2.0 * d.z / (s * s));
            };
            return u;
        };
        const TraceCheck a = trace_estimate_check(make(0.0), 32);
        // shift by a whole number of grid cells so the discrete trace is a
        // permutation; lhs must be bit-level stable
        const TraceCheck b = trace_estimate_check(make(2 * M_PI * 4 / 32), 32);
        CHECK(std::abs(a.lhs - b.lhs) <= 1e-10 * a.lhs);
    }
    SUBCASE("oscillatory family has bounded ratio in k") {
        double worst = 0;
        for (int k : {1, 4, 8}) {
            const TraceCheck t = trace_estimate_check(oscillatory_slab_field(k), 32);
            worst = std::max(worst, t.ratio);
        }
        const TraceCheck t12 = trace_estimate_check(oscillatory_slab_field(12), 32);
        CHECK(t12.ratio <= 2.0 * worst + 1e-12);
    }
    SUBCASE("support clearance enforced") {
        TestField bad;
        bad.name = "touches_wall";
        bad.value = [](Vec3 x) { return Vec3{0, 0, std::cos(x.x / 2)}; };  // nonzero at x1 = pi
        bad.divergence = [](Vec3) { return 0.0; };
        CHECK_THROWS_AS(trace_estimate_check(bad, 32), std::invalid_argument);
        const TestField ok = trace_corpus().front();
        CHECK_THROWS_AS(trace_estimate_check(ok, 20), std::invalid_argument);  // not power of two
    }
    SUBCASE("corpus has 20 fields") { CHECK(trace_corpus().size() == 20); }
}
