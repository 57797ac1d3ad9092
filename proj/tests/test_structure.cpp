#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>

#include "sls2/mat2.hpp"
#include "sls2/matrix_set.hpp"
#include "sls2/structure.hpp"

#include "support/oracles.hpp"

using namespace sls2;

namespace {
const double kPi = 3.14159265358979323846;

cplx phase(double t) { return std::polar(1.0, t); }
}

TEST_CASE("root_of_unity_order finds minimal orders") {
    const auto r3 = root_of_unity_order(2.0 * kPi / 3.0);
    CHECK(r3.is_root);
    CHECK(r3.order == 3);
    CHECK(r3.margin < 1e-12);

    const auto r2 = root_of_unity_order(kPi);
    CHECK(r2.is_root);
    CHECK(r2.order == 2);

    const auto r1 = root_of_unity_order(0.0);
    CHECK(r1.is_root);
    CHECK(r1.order == 1);

    // 10pi/4 wraps to order 4, not 2.
    const auto r4 = root_of_unity_order(10.0 * kPi / 4.0);
    CHECK(r4.is_root);
    CHECK(r4.order == 4);

    const auto r12 = root_of_unity_order(-2.0 * kPi * 5.0 / 12.0);
    CHECK(r12.is_root);
    CHECK(r12.order == 12);
}

TEST_CASE("root_of_unity_order rejects irrational angles with a reported margin") {
    const auto r = root_of_unity_order(1.0, 4096, 1e-9);
    CHECK_FALSE(r.is_root);
    CHECK(r.margin > 1e-9);
    // best near-miss within q <= 4096 for angle 1: q = 710 (|710 - 226 pi| ~ 2e-4)
    CHECK(r.margin < 1e-2);

    const auto s = root_of_unity_order(std::sqrt(2.0), 64, 1e-9);
    CHECK_FALSE(s.is_root);
    CHECK(s.margin > 1e-3);
}

TEST_CASE("root order scales with the tolerance, never below it") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> qd(1, 24);
    for (int k = 0; k < 200; ++k) {
        const int q = qd(rng);
        const int p = 1 + static_cast<int>(rng() % static_cast<unsigned>(q));
        const double angle = 2.0 * kPi * double(p) / double(q);
        const auto r = root_of_unity_order(angle, 64, 1e-9);
        REQUIRE(r.is_root);
        CHECK(q % r.order == 0); // reported order divides q (it is q/gcd(p,q))
        CHECK(std::abs(phase(r.order * angle) - cplx(1.0)) < 1e-9);
    }
}

TEST_CASE("common_eigenvector agrees with a brute-force oracle") {
    std::mt19937_64 rng(32);
    int with = 0, without = 0;
    for (int k = 0; k < 200; ++k) {
        MatrixSet set;
        const bool plant = k % 2 == 0;
        const Mat2 v = oracle::random_unitary(rng);
        const int n = 2 + static_cast<int>(rng() % 2);
        for (int j = 0; j < n; ++j) {
            Mat2 a = plant ? oracle::random_triangular(rng) : oracle::random_matrix(rng);
            if (plant) a = v * a * v.adjoint();
            set.members.push_back(a);
        }
        const auto mine = common_eigenvector(set);
        const auto ref = oracle::common_eigenvector(set);
        CHECK(mine.has_value() == ref.has_value());
        if (mine) {
            ++with;
            // The returned direction must be an eigenvector of every member.
            for (const Mat2& a : set.members) {
                const Vec2 av = a * *mine;
                const cplx lambda = inner(av, *mine);
                CHECK((av - *mine * lambda).norm() < 1e-8 * std::max(1.0, operator_norm(a)));
            }
        } else {
            ++without;
        }
    }
    CHECK(with >= 90); // planted cases must be found
    CHECK(without >= 90);
}

TEST_CASE("simultaneous diagonalizability") {
    const Mat2 d1 = Mat2::diag(phase(0.3), phase(1.1));
    const Mat2 d2 = Mat2::diag(phase(-0.7), phase(0.2));
    const Mat2 v = unitary_from_first_column(Vec2{cplx(0.6, 0.3), cplx(-0.2, 0.5)});

    MatrixSet commuting;
    commuting.members = {v * d1 * v.adjoint(), v * d2 * v.adjoint()};
    CHECK(is_simultaneously_diagonalizable(commuting));

    MatrixSet with_shear;
    with_shear.members = {Mat2{1.0, 1.0, 0.0, 1.0}, d1};
    CHECK_FALSE(is_simultaneously_diagonalizable(with_shear)); // defective member

    MatrixSet noncommuting;
    noncommuting.members = {d1, v * d2 * v.adjoint()};
    CHECK_FALSE(is_simultaneously_diagonalizable(noncommuting));
}

TEST_CASE("analyze reports determinants, angles, and witnesses") {
    // Jordan member first: defective with unit determinant.
    MatrixSet set;
    set.members = {Mat2{cplx(0.0, 1.0), 1.0, 0.0, cplx(0.0, 1.0)},
                   Mat2::diag(phase(0.4), phase(-0.4)),
                   Mat2::diag(0.5, 0.25)};
    const auto rep = analyze(set);

    REQUIRE(rep.det_modulus.size() == 3);
    CHECK(rep.det_modulus[0] == doctest::Approx(1.0));
    CHECK(rep.det_modulus[1] == doctest::Approx(1.0));
    CHECK(rep.det_modulus[2] == doctest::Approx(0.125));
    CHECK(rep.unit_det_indices == std::vector<int>{0, 1});
    REQUIRE(rep.jordan_member.has_value());
    CHECK(*rep.jordan_member == 0);
    CHECK_FALSE(rep.unit_det_simdiag);
    CHECK(rep.common_eigenvector.has_value()); // e0 works for all three

    // Angles are reported in [0, 2pi).
    for (const auto& pair : rep.eigen_angles) {
        for (double t : pair) {
            CHECK(t >= 0.0);
            CHECK(t < 2.0 * kPi);
        }
    }
}

TEST_CASE("analyze finds a non-commuting diagonalizable unit-determinant pair") {
    const Mat2 d = Mat2::diag(phase(0.9), phase(-0.9));
    const Mat2 v = unitary_from_first_column(Vec2{cplx(0.8, 0.1), cplx(0.3, -0.5)});
    MatrixSet set;
    set.members = {Mat2::diag(0.5, 0.5), d, v * d * v.adjoint()};
    const auto rep = analyze(set);
    CHECK_FALSE(rep.jordan_member.has_value());
    REQUIRE(rep.nondiag_pair.has_value());
    CHECK(rep.nondiag_pair->first == 1);
    CHECK(rep.nondiag_pair->second == 2);
    CHECK(rep.unit_det_indices == std::vector<int>{1, 2});
}

TEST_CASE("structure detection is unitary-conjugation invariant") {
    std::mt19937_64 rng(33);
    for (int k = 0; k < 100; ++k) {
        MatrixSet set;
        for (int j = 0; j < 2; ++j) set.members.push_back(oracle::random_matrix(rng));
        const Mat2 u = oracle::random_unitary(rng);
        MatrixSet rotated;
        for (const Mat2& a : set.members) rotated.members.push_back(u * a * u.adjoint());

        const auto r0 = analyze(set);
        const auto r1 = analyze(rotated);
        CHECK(r0.common_eigenvector.has_value() == r1.common_eigenvector.has_value());
        CHECK(r0.unit_det_indices == r1.unit_det_indices);
        CHECK(r0.jordan_member.has_value() == r1.jordan_member.has_value());
        for (std::size_t j = 0; j < set.members.size(); ++j)
            CHECK(r0.det_modulus[j] == doctest::Approx(r1.det_modulus[j]).epsilon(1e-10));
    }
}
