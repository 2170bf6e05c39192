#include <doctest.h>

#include <cmath>
#include <random>

#include "metastab/specfun.hpp"

using namespace metastab;

namespace {

// Wronskian test grid: log-spaced moduli in [1e-2, 1e3], phases up to 3pi/4
// (the negative-index branch region). The identity j y' - j' y = 1/z^2 loses
// e^{2 Im z} digits to cancellation for any algorithm that evaluates j and y
// separately, so |Im z| is capped at 5 here; the full box is covered by the
// forward-relative check below.
std::vector<complexd> wronskian_grid() {
    std::vector<complexd> zs;
    const double args[8] = {0, M_PI / 8, M_PI / 4, 3 * M_PI / 8, -M_PI / 8, -3 * M_PI / 8,
                            3 * M_PI / 4, -3 * M_PI / 4};
    for (int i = 0; i < 25 && zs.size() < 200; ++i) {
        const double r = std::pow(10.0, -2.0 + 5.0 * i / 24.0);
        for (double a : args) {
            complexd z = std::polar(r, a);
            if (std::abs(z.imag()) > 5.0) z = complexd(z.real(), z.imag() > 0 ? 5.0 : -5.0);
            if (std::abs(z) < 1e-2) z += complexd(z.real() > 0 ? 1e-2 : -1e-2, 0);
            zs.push_back(z);
        }
    }
    return zs;
}

}  // namespace

TEST_CASE("spherical bessel closed forms") {
    const BesselEval j0 = sph_bessel_j(0, complexd(1, 0));
    CHECK(j0.value.real() == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
    const BesselEval j1 = sph_bessel_j(1, complexd(1, 0));
    CHECK(j1.value.real() ==
          doctest::Approx(std::sin(1.0) - std::cos(1.0)).epsilon(1e-13));  // sin z/z^2 - cos z/z
    const BesselEval y0 = sph_bessel_y(0, complexd(1, 0));
    CHECK(y0.value.real() == doctest::Approx(-std::cos(1.0)).epsilon(1e-14));
    // h1_0(1) = (sin 1 - i cos 1) = -i e^{i}
    const BesselEval h0 = sph_hankel1(0, complexd(1, 0));
    CHECK(h0.value.real() == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
    CHECK(h0.value.imag() == doctest::Approx(-std::cos(1.0)).epsilon(1e-14));
}

TEST_CASE("series/recurrence consistency at small argument") {
    // reference values either side of the |z| = 0.5 method switch (30-digit
    // independent evaluation, frozen)
    const complexd lo_ref{2.9745008755576403e-06, 2.963644044228178e-09};
    const complexd hi_ref{2.980432875357071e-06, 2.968357615100014e-09};
    CHECK(std::abs(sph_bessel_j(5, complexd(0.4999, 0.0001)).value - lo_ref) <=
          1e-12 * std::abs(lo_ref));
    CHECK(std::abs(sph_bessel_j(5, complexd(0.5001, 0.0001)).value - hi_ref) <=
          1e-12 * std::abs(hi_ref));
    for (int n : {0, 1, 2, 5}) {
        // central difference of the value matches the reported derivative
        const complexd z{0.3, 0.1};
        const double h = 1e-6;
        const complexd fd =
            (sph_bessel_j(n, z + h).value - sph_bessel_j(n, z - h).value) / (2 * h);
        CHECK(std::abs(fd - sph_bessel_j(n, z).derivative) <=
              1e-8 * (std::abs(fd) + 1e-300));
    }
    CHECK(sph_bessel_j(0, complexd(0, 0)).value == complexd(1, 0));
    CHECK(sph_bessel_j(3, complexd(0, 0)).value == complexd(0, 0));
}

TEST_CASE("parity: j_n(-z) = (-1)^n j_n(z)") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const complexd z{u(rng) * 3, u(rng)};
        if (std::abs(z) < 1e-2) continue;
        for (int n : {0, 1, 2, 3, 7}) {
            const complexd a = sph_bessel_j(n, -z).value;
            const complexd b = (n % 2 ? -1.0 : 1.0) * sph_bessel_j(n, z).value;
            CHECK(std::abs(a - b) <= 1e-12 * (std::abs(b) + 1e-300));
        }
    }
}

TEST_CASE("wronskian identity j y' - j' y = 1/z^2") {
    for (const complexd& z : wronskian_grid()) {
        for (int n : {0, 1, 2, 5, 12}) {
            const BesselEval j = sph_bessel_j(n, z);
            const BesselEval y = sph_bessel_y(n, z);
            const complexd w = j.value * y.derivative - j.derivative * y.value;
            const complexd expect = 1.0 / (z * z);
            CHECK(std::abs(w - expect) <= 1e-10 * std::abs(expect));
        }
    }
    // frozen spot check
    const complexd z{2, 3};
    const BesselEval j = sph_bessel_j(3, z);
    const BesselEval y = sph_bessel_y(3, z);
    CHECK(std::abs(j.value * y.derivative - j.derivative * y.value - 1.0 / (z * z)) <=
          1e-10 * std::abs(1.0 / (z * z)));
}

TEST_CASE("wronskian, forward-relative over the full argument box") {
    // over the whole |z| in [1e-2, 1e3], |arg z| <= 3pi/4 box (moduli capped
    // so e^{2 Im z} stays within double range), the identity holds relative
    // to the size of the products being cancelled
    const double args[6] = {0, M_PI / 4, 3 * M_PI / 4, -M_PI / 8, -3 * M_PI / 8, -3 * M_PI / 4};
    for (int i = 0; i < 25; ++i) {
        const double r = std::pow(10.0, -2.0 + 5.0 * i / 24.0);
        for (double a : args) {
            complexd z = std::polar(r, a);
            if (std::abs(z.imag()) > 250.0)
                z = complexd(z.real(), z.imag() > 0 ? 250.0 : -250.0);
            for (int n : {0, 2, 6}) {
                const BesselEval j = sph_bessel_j(n, z);
                const BesselEval y = sph_bessel_y(n, z);
                const complexd w = j.value * y.derivative - j.derivative * y.value;
                const double product_scale = std::abs(j.value * y.derivative) +
                                             std::abs(j.derivative * y.value) +
                                             std::abs(1.0 / (z * z));
                CHECK(std::abs(w - 1.0 / (z * z)) <= 1e-12 * product_scale);
            }
        }
    }
}

TEST_CASE("three-term recurrence consistency") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.5, 30.0);
    std::uniform_real_distribution<double> v(-3.0, 3.0);
    for (int k = 0; k < 60; ++k) {
        const complexd z{u(rng), v(rng)};
        for (int n : {1, 2, 4, 9}) {
            auto rec = [&](auto f) {
                const complexd a = f(n - 1, z).value + f(n + 1, z).value;
                const complexd b = (double(2 * n + 1) / z) * f(n, z).value;
                const double scale = std::abs(a) + std::abs(b) + 1e-300;
                CHECK(std::abs(a - b) <= 1e-9 * scale);
            };
            rec([](int n, complexd z) { return sph_bessel_j(n, z); });
            rec([](int n, complexd z) { return sph_bessel_y(n, z); });
            rec([](int n, complexd z) { return sph_hankel1(n, z); });
        }
    }
}

TEST_CASE("order range errors") {
    CHECK_THROWS_AS(sph_bessel_j(5001, complexd(1, 0)), std::domain_error);
    CHECK_THROWS_AS(sph_bessel_y(0, complexd(0, 0)), std::domain_error);
}

TEST_CASE("gauss-legendre") {
    SUBCASE("order 1: node 0, weight 2") {
        const QuadratureRule& q = gauss_legendre(1);
        CHECK(q.nodes[0] == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(q.weights[0] == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("order 2: nodes +-1/sqrt(3), weights 1") {
        const QuadratureRule& q = gauss_legendre(2);
        CHECK(std::abs(q.nodes[0]) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
        CHECK(q.weights[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(q.weights[1] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("degree exactness: int x^6 = 2/7 at order 4") {
        const double v = integrate(gauss_legendre(4), -1.0, 1.0,
                                   [](double x) { return std::pow(x, 6); });
        CHECK(std::abs(v - 2.0 / 7.0) <= 1e-14);
    }
    SUBCASE("exact for polynomials up to degree 2 order - 1") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int order : {3, 8, 17, 64}) {
            std::vector<double> coef(2 * order);
            for (auto& c : coef) c = u(rng);
            auto poly = [&](double x) {
                double acc = 0, p = 1;
                for (double c : coef) {
                    acc += c * p;
                    p *= x;
                }
                return acc;
            };
            double exact = 0;
            for (size_t k = 0; k < coef.size(); k += 2) exact += 2.0 * coef[k] / double(k + 1);
            const double got = integrate(gauss_legendre(order), -1.0, 1.0, poly);
            CHECK(std::abs(got - exact) <= 1e-13 * (std::abs(exact) + 1.0));
        }
    }
    SUBCASE("geometric convergence on exp") {
        const double exact = std::exp(1.0) - std::exp(-1.0);
        double prev_err = 1e300;
        for (int order : {2, 4, 6, 8, 10}) {
            const double err = std::abs(
                integrate(gauss_legendre(order), -1.0, 1.0, [](double x) { return std::exp(x); }) -
                exact);
            CHECK(err <= 0.5 * prev_err + 1e-16);
            prev_err = err;
        }
    }
    SUBCASE("order bounds") {
        CHECK_THROWS_AS(gauss_legendre(0), std::domain_error);
        CHECK_THROWS_AS(gauss_legendre(513), std::domain_error);
    }
}
