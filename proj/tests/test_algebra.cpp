#include <doctest.h>

#include <random>

#include "metastab/algebra.hpp"
#include "test_helpers.hpp"

using namespace metastab;
using namespace testing_helpers;

TEST_CASE("eig_sym2 closed form") {
    SUBCASE("identity") {
        Eig2 e = eig_sym2(SymMatrix2::identity());
        CHECK(e.l1 == doctest::Approx(1.0));
        CHECK(e.l2 == doctest::Approx(1.0));
    }
    SUBCASE("diag(3, -3/4)") {
        Eig2 e = eig_sym2({{3.0, 0.0, -0.75}});
        CHECK(e.l1 == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(e.l2 == doctest::Approx(-0.75).epsilon(1e-14));
    }
    SUBCASE("symmetric swap matrix [[0,1],[1,0]]") {
        Eig2 e = eig_sym2({{0.0, 1.0, 0.0}});
        CHECK(e.l1 == doctest::Approx(1.0));
        CHECK(e.l2 == doctest::Approx(-1.0));
    }
    SUBCASE("residuals and orthonormality on random matrices") {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> g;
        for (int k = 0; k < 500; ++k) {
            SymMatrix2 M{{g(rng), g(rng), g(rng)}};
            Eig2 e = eig_sym2(M);
            const double s = M.frobenius() + 1e-30;
            // M v = lambda v
            CHECK(std::abs(M.u[0] * e.v1[0] + M.u[1] * e.v1[1] - e.l1 * e.v1[0]) <= 1e-12 * s);
            CHECK(std::abs(M.u[1] * e.v1[0] + M.u[2] * e.v1[1] - e.l1 * e.v1[1]) <= 1e-12 * s);
            CHECK(std::abs(M.u[0] * e.v2[0] + M.u[1] * e.v2[1] - e.l2 * e.v2[0]) <= 1e-12 * s);
            CHECK(std::abs(e.v1[0] * e.v2[0] + e.v1[1] * e.v2[1]) <= 1e-14);
            // trace / det identities
            CHECK(e.l1 + e.l2 == doctest::Approx(M.trace()).epsilon(1e-10));
            CHECK(e.l1 * e.l2 == doctest::Approx(M.det()).epsilon(1e-10).scale(s * s));
        }
    }
}

TEST_CASE("eig_sym3") {
    SUBCASE("identity and diagonal") {
        Eig3 e = eig_sym3(SymMatrix3::identity());
        CHECK(e.lam[0] == doctest::Approx(1.0));
        CHECK(e.lam[2] == doctest::Approx(1.0));
        e = eig_sym3(SymMatrix3::diag(4.0, 0.25, 1.0));
        CHECK(e.lam[0] == doctest::Approx(4.0));
        CHECK(e.lam[1] == doctest::Approx(1.0));
        CHECK(e.lam[2] == doctest::Approx(0.25));
    }
    SUBCASE("random symmetric: residuals and charpoly-root oracle") {
        std::mt19937_64 rng(202);
        std::normal_distribution<double> g;
        for (int k = 0; k < 300; ++k) {
            SymMatrix3 M{{g(rng), g(rng), g(rng), g(rng), g(rng), g(rng)}};
            Eig3 e = eig_sym3(M);
            const double s = M.frobenius() + 1e-30;
            for (int i = 0; i < 3; ++i) {
                CHECK(norm(M.apply(e.vec[i]) - e.lam[i] * e.vec[i]) <= 1e-10 * s);
                for (int j = i + 1; j < 3; ++j)
                    CHECK(std::abs(dot(e.vec[i], e.vec[j])) <= 1e-9);
            }
            auto roots = charpoly_roots(M);
            for (int i = 0; i < 3; ++i)
                CHECK(e.lam[i] == doctest::Approx(roots[i]).epsilon(1e-7).scale(s));
        }
    }
    SUBCASE("near-degenerate spectra") {
        std::mt19937_64 rng(77);
        for (int k = 0; k < 200; ++k) {
            auto rot = random_rotation(rng);
            double lam[3] = {2.0, 2.0 + (k % 7) * 1e-14, -1.0};
            SymMatrix3 M{};
            for (int i = 0; i < 3; ++i) {
                SymMatrix3 o = SymMatrix3::outer(rot[i]);
                for (int j = 0; j < 6; ++j) M.u[j] += lam[i] * o.u[j];
            }
            Eig3 e = eig_sym3(M);
            const double s = M.frobenius();
            for (int i = 0; i < 3; ++i)
                CHECK(norm(M.apply(e.vec[i]) - e.lam[i] * e.vec[i]) <= 1e-10 * s);
        }
    }
    SUBCASE("trace and det identities") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g;
        for (int k = 0; k < 200; ++k) {
            SymMatrix3 M{{g(rng), g(rng), g(rng), g(rng), g(rng), g(rng)}};
            Eig3 e = eig_sym3(M);
            const double s = M.frobenius() + 1e-30;
            CHECK(e.lam[0] + e.lam[1] + e.lam[2] ==
                  doctest::Approx(M.trace()).epsilon(1e-10).scale(s));
            CHECK(e.lam[0] * e.lam[1] * e.lam[2] ==
                  doctest::Approx(M.det()).epsilon(1e-10).scale(s * s * s));
        }
    }
}

TEST_CASE("tangent_frame") {
    SUBCASE("axis-aligned") {
        TangentFrame f = tangent_frame({0, 0, 1});
        CHECK(norm(f.t1 - Vec3{1, 0, 0}) <= 1e-15);
        CHECK(norm(f.t2 - Vec3{0, 1, 0}) <= 1e-15);
    }
    SUBCASE("orthogonality forced") {
        TangentFrame f = tangent_frame({1, 0, 0});
        CHECK(std::abs(dot(f.t1, f.e)) <= 1e-14);
        CHECK(std::abs(dot(f.t2, f.e)) <= 1e-14);
        CHECK(norm(cross(f.t1, f.t2) - f.e) <= 1e-14);
    }
    SUBCASE("orthonormal right-handed property on random directions") {
        std::mt19937_64 rng(42);
        for (int k = 0; k < 1000; ++k) {
            Vec3 e = random_unit(rng);
            TangentFrame f = tangent_frame(e);
            CHECK(std::abs(norm(f.t1) - 1.0) <= 1e-14);
            CHECK(std::abs(norm(f.t2) - 1.0) <= 1e-14);
            CHECK(std::abs(dot(f.t1, f.t2)) <= 1e-14);
            CHECK(std::abs(dot(f.t1, f.e)) <= 1e-14);
            CHECK(norm(cross(f.t1, f.t2) - f.e) <= 1e-14);
        }
    }
    SUBCASE("deterministic") {
        Vec3 e = normalized({0.3, -0.2, 0.9});
        TangentFrame a = tangent_frame(e), b = tangent_frame(e);
        CHECK(norm(a.t1 - b.t1) == 0.0);
        CHECK(norm(a.t2 - b.t2) == 0.0);
    }
    SUBCASE("zero vector rejected") {
        CHECK_THROWS_AS(tangent_frame({0, 0, 0}), std::invalid_argument);
    }
}

TEST_CASE("min_eig_margin") {
    CHECK(min_eig_margin(SymMatrix3::scaled_identity(2.0), SymMatrix3::identity()) ==
          doctest::Approx(1.0));
    CHECK(min_eig_margin(SymMatrix3::identity(), SymMatrix3::scaled_identity(2.0)) ==
          doctest::Approx(-1.0));
    CHECK(min_eig_margin(SymMatrix3::diag(3, 2, 2), SymMatrix3::identity()) ==
          doctest::Approx(1.0));

    // lambda_min(M) + lambda_min(-M) <= 0 always
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    for (int k = 0; k < 300; ++k) {
        SymMatrix3 A{{g(rng), g(rng), g(rng), g(rng), g(rng), g(rng)}};
        SymMatrix3 B{{g(rng), g(rng), g(rng), g(rng), g(rng), g(rng)}};
        CHECK(min_eig_margin(A, B) + min_eig_margin(B, A) <= 1e-12);
    }
}
