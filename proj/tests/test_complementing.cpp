#include <doctest.h>

#include <random>

#include "metastab/complementing.hpp"
#include "test_helpers.hpp"

using namespace metastab;
using namespace testing_helpers;

TEST_CASE("cauchy_form") {
    Vec3 e3{0, 0, 1};
    CHECK(cauchy_form(SymMatrix3::identity(), e3, {1, 0, 0}) == doctest::Approx(1.0));
    CHECK(cauchy_form(SymMatrix3::diag(4, 0.25, 1), e3, {1, 2, 0}) == doctest::Approx(5.0));
    CHECK(cauchy_form(SymMatrix3::scaled_identity(2.0), e3, {1, 0, 0}) == doctest::Approx(4.0));

    SUBCASE("nonnegative for psd A (Cauchy-Schwarz)") {
        std::mt19937_64 rng(31);
        std::normal_distribution<double> g;
        for (int k = 0; k < 500; ++k) {
            SymMatrix3 A = random_psd(rng);
            Vec3 e = random_unit(rng), xi{g(rng), g(rng), g(rng)};
            CHECK(cauchy_form(A, e, xi) >= -1e-10 * A.frobenius() * A.frobenius());
        }
    }
}

TEST_CASE("restriction_matrix") {
    Vec3 e3{0, 0, 1};
    TangentFrame fr = tangent_frame(e3);
    SUBCASE("identity -> identity") {
        SymMatrix2 M = restriction_matrix(SymMatrix3::identity(), fr);
        CHECK(M.u[0] == doctest::Approx(1.0));
        CHECK(M.u[1] == doctest::Approx(0.0));
        CHECK(M.u[2] == doctest::Approx(1.0));
    }
    SUBCASE("diag(4,1/4,1) with axis frame -> diag(4,1/4)") {
        SymMatrix2 M = restriction_matrix(SymMatrix3::diag(4, 0.25, 1), fr);
        CHECK(M.u[0] == doctest::Approx(4.0));
        CHECK(M.u[1] == doctest::Approx(0.0));
        CHECK(M.u[2] == doctest::Approx(0.25));
    }
    SUBCASE("2I -> 4I (q scales as c^2)") {
        SymMatrix2 M = restriction_matrix(SymMatrix3::scaled_identity(2.0), fr);
        CHECK(M.u[0] == doctest::Approx(4.0));
        CHECK(M.u[2] == doctest::Approx(4.0));
    }
    SUBCASE("represents the cauchy form on the tangent plane") {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> g;
        for (int k = 0; k < 300; ++k) {
            SymMatrix3 A = random_spd(rng);
            Vec3 e = random_unit(rng);
            TangentFrame f = tangent_frame(e);
            SymMatrix2 M = restriction_matrix(A, f);
            const double u = g(rng), v = g(rng);
            const Vec3 xi = u * f.t1 + v * f.t2;
            const double s = A.frobenius() * A.frobenius() * (u * u + v * v) + 1e-30;
            CHECK(std::abs(M.quad(u, v) - cauchy_form(A, e, xi)) <= 1e-12 * s);
        }
    }
    SUBCASE("positive definite whenever A is (strict Cauchy-Schwarz)") {
        std::mt19937_64 rng(23);
        for (int k = 0; k < 300; ++k) {
            SymMatrix3 A = random_spd(rng);
            TangentFrame f = tangent_frame(random_unit(rng));
            SymMatrix2 M = restriction_matrix(A, f);
            CHECK(eig_sym2(M).l2 > 0.0);
        }
    }
}

TEST_CASE("check_complementing") {
    Vec3 e3{0, 0, 1};
    SUBCASE("A2 = 2I > I = A1: satisfied for any direction") {
        std::mt19937_64 rng(3);
        for (int k = 0; k < 50; ++k) {
            auto pair = CauchyPair::make(SymMatrix3::identity(),
                                         SymMatrix3::scaled_identity(2.0), random_unit(rng));
            CHECK(check_complementing(pair).satisfied());
        }
    }
    SUBCASE("constructed failing pair has the (1,2,0) witness") {
        auto pair =
            CauchyPair::make(SymMatrix3::identity(), SymMatrix3::diag(4, 0.25, 1), e3);
        CauchyVerdict v = check_complementing(pair);
        REQUIRE_FALSE(v.satisfied());
        REQUIRE(v.witness.has_value());
        Vec3 w = *v.witness;
        CHECK(std::abs(dot(w, e3)) <= 1e-12);
        Vec3 expect = normalized({1, 2, 0});
        CHECK(std::abs(std::abs(dot(w, expect)) - 1.0) <= 1e-12);
        // q2 = q1 at the witness
        const double q1 = cauchy_form(pair.a1, e3, w), q2 = cauchy_form(pair.a2, e3, w);
        CHECK(std::abs(q2 - q1) <= 1e-9 * (std::abs(q1) + std::abs(q2) + 1.0));
    }
    SUBCASE("equal pair always violated, any witness tangent works") {
        auto pair = CauchyPair::make(SymMatrix3::identity(), SymMatrix3::identity(), e3);
        CauchyVerdict v = check_complementing(pair);
        CHECK_FALSE(v.satisfied());
        REQUIRE(v.witness.has_value());
        CHECK(std::abs(dot(*v.witness, e3)) <= 1e-12);
    }
    SUBCASE("witness invariants on random violated pairs") {
        std::mt19937_64 rng(19);
        int violated = 0;
        for (int k = 0; k < 2000 && violated < 300; ++k) {
            SymMatrix3 A1 = random_spd(rng), A2 = random_spd(rng);
            Vec3 e = random_unit(rng);
            auto v = check_complementing(CauchyPair::make(A1, A2, e));
            if (v.satisfied()) continue;
            ++violated;
            REQUIRE(v.witness.has_value());
            Vec3 w = *v.witness;
            CHECK(std::abs(norm(w) - 1.0) <= 1e-12);
            CHECK(std::abs(dot(w, e)) <= 1e-12);
            const double q1 = cauchy_form(A1, e, w), q2 = cauchy_form(A2, e, w);
            const double scale = A1.frobenius() * A1.frobenius() +
                                 A2.frobenius() * A2.frobenius();
            CHECK(std::abs(q2 - q1) <= 1e-9 * scale);
        }
        CHECK(violated >= 100);  // the draw produces plenty of violated pairs
    }
    SUBCASE("sufficiency: A2 = A1 + PSD + cI is always satisfied") {
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> cdist(std::log(1e-3), std::log(10.0));
        for (int k = 0; k < 500; ++k) {
            SymMatrix3 A1 = random_spd(rng);
            SymMatrix3 A2 = A1 + random_psd(rng) +
                            SymMatrix3::scaled_identity(std::exp(cdist(rng)));
            auto v = check_complementing(CauchyPair::make(A1, A2, random_unit(rng)));
            CHECK(v.satisfied());
        }
    }
    SUBCASE("scaling invariance of the status") {
        std::mt19937_64 rng(55);
        for (int k = 0; k < 200; ++k) {
            SymMatrix3 A1 = random_spd(rng), A2 = random_spd(rng);
            Vec3 e = random_unit(rng);
            for (double t : {1e-3, 0.37, 42.0}) {
                auto v0 = check_complementing(CauchyPair::make(A1, A2, e));
                auto v1 = check_complementing(CauchyPair::make(t * A1, t * A2, e));
                CHECK(v0.status == v1.status);
            }
        }
    }
    SUBCASE("frame invariance: rotating the frame leaves verdict and margin") {
        // check_complementing builds its own frame; equivalent statement:
        // the margin is invariant under rotating the whole configuration.
        std::mt19937_64 rng(71);
        for (int k = 0; k < 200; ++k) {
            SymMatrix3 A1 = random_spd(rng), A2 = random_spd(rng);
            Vec3 e = random_unit(rng);
            auto v0 = check_complementing(CauchyPair::make(A1, A2, e));
            auto R = random_rotation(rng);
            Mat3 Q;
            for (int i = 0; i < 3; ++i) {
                Q(i, 0) = R[0][i];
                Q(i, 1) = R[1][i];
                Q(i, 2) = R[2][i];
            }
            // rows of Q are the rotated basis: Q maps x -> coordinates; use
            // congruence to rotate the matrices and the direction together.
            SymMatrix3 B1 = congruence(Q, A1), B2 = congruence(Q, A2);
            Vec3 er = Q * e;
            auto v1 = check_complementing(CauchyPair::make(B1, B2, normalized(er)));
            CHECK(v0.status == v1.status);
            CHECK(v0.margin == doctest::Approx(v1.margin).epsilon(1e-9));
        }
    }
    SUBCASE("non-positive-definite inputs rejected at construction") {
        CHECK_THROWS_AS(CauchyPair::make(SymMatrix3::diag(1, 1, -1),
                                         SymMatrix3::identity(), Vec3{0, 0, 1}),
                        std::invalid_argument);
        CHECK_THROWS_AS(CauchyPair::make(SymMatrix3::identity(), SymMatrix3::identity(),
                                         Vec3{0, 0, 2}),
                        std::invalid_argument);
    }
}

TEST_CASE("mode_oracle") {
    Vec3 e3{0, 0, 1};
    SUBCASE("I vs 2I along e1: s1=1, s2=2, no mode") {
        auto pair = CauchyPair::make(SymMatrix3::identity(), SymMatrix3::scaled_identity(2.0), e3);
        auto r = mode_oracle(pair, {1, 0, 0}, 1e-9);
        CHECK(r.s1 == doctest::Approx(1.0));
        CHECK(r.s2 == doctest::Approx(2.0));
        CHECK_FALSE(r.nontrivial_mode_exists);
        CHECK(r.decay_rate_1.real() < 0.0);
        CHECK(r.decay_rate_2.real() < 0.0);
    }
    SUBCASE("failing pair at the witness direction: mode exists") {
        auto pair = CauchyPair::make(SymMatrix3::identity(), SymMatrix3::diag(4, 0.25, 1), e3);
        auto r = mode_oracle(pair, normalized({1, 2, 0}), 1e-9);
        CHECK(r.nontrivial_mode_exists);
        CHECK(r.s1 == doctest::Approx(r.s2).epsilon(1e-12));
    }
    SUBCASE("identical matrices: mode for every tangent direction") {
        std::mt19937_64 rng(13);
        for (int k = 0; k < 100; ++k) {
            SymMatrix3 A = random_spd(rng);
            Vec3 e = random_unit(rng);
            auto pair = CauchyPair::make(A, A, e);
            TangentFrame f = tangent_frame(e);
            std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
            const double phi = u(rng);
            Vec3 xi = std::cos(phi) * f.t1 + std::sin(phi) * f.t2;
            CHECK(mode_oracle(pair, xi, 1e-9).nontrivial_mode_exists);
        }
    }
    SUBCASE("discriminant equals the cauchy form for unit tangent xi") {
        std::mt19937_64 rng(29);
        for (int k = 0; k < 300; ++k) {
            SymMatrix3 A1 = random_spd(rng), A2 = random_spd(rng);
            Vec3 e = random_unit(rng);
            TangentFrame f = tangent_frame(e);
            std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
            const double phi = u(rng);
            Vec3 xi = std::cos(phi) * f.t1 + std::sin(phi) * f.t2;
            auto pair = CauchyPair::make(A1, A2, e);
            auto r = mode_oracle(pair, xi, 1e-9);
            const double s = A1.frobenius() * A1.frobenius() + 1.0;
            CHECK(std::abs(r.s1 * r.s1 - cauchy_form(A1, e, xi)) <= 1e-12 * s * s);
            CHECK(std::abs(r.s2 * r.s2 - cauchy_form(A2, e, xi)) <=
                  1e-12 * (A2.frobenius() * A2.frobenius() + 1.0) *
                      (A2.frobenius() * A2.frobenius() + 1.0));
        }
    }
    SUBCASE("rejects non-tangent directions") {
        auto pair = CauchyPair::make(SymMatrix3::identity(), SymMatrix3::scaled_identity(2.0), e3);
        CHECK_THROWS_AS(mode_oracle(pair, {0, 0, 1}, 1e-9), std::invalid_argument);
        CHECK_THROWS_AS(mode_oracle(pair, {1, 1, 0}, 1e-9), std::invalid_argument);
    }
}

TEST_CASE("criterion/oracle agreement on random triples") {
    // smaller version of acceptance criterion 1 (full 10k run lives there)
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 1500; ++k) {
        SymMatrix3 A1 = random_spd(rng), A2 = random_spd(rng);
        Vec3 e = random_unit(rng);
        auto pair = CauchyPair::make(A1, A2, e);
        const bool violated = !check_complementing(pair).satisfied();
        const bool mode = mode_oracle_scan(pair, 720, 1e-9);
        CHECK(violated == mode);
    }
}
