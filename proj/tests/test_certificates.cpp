#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "sls2/certificates.hpp"
#include "sls2/errors.hpp"
#include "sls2/mat2.hpp"
#include "sls2/matrix_set.hpp"

#include "support/oracles.hpp"

using namespace sls2;

namespace {

cplx phase(double t) { return std::polar(1.0, t); }

MatrixSet swap_and_flip() {
    MatrixSet set;
    set.members = {Mat2{0.0, 1.0, 1.0, 0.0}, Mat2::diag(1.0, -1.0)};
    return set;
}

// All words of the given length, in time order, via an index odometer.
void for_each_word(int n_members, int length, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> word(static_cast<std::size_t>(length), 0);
    while (true) {
        fn(word);
        int pos = 0;
        while (pos < length && ++word[static_cast<std::size_t>(pos)] == n_members) {
            word[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == length) return;
    }
}

Mat2 product_of(const MatrixSet& set, const std::vector<int>& word) {
    Mat2 p = Mat2::identity();
    for (int idx : word) p = set.members[static_cast<std::size_t>(idx)] * p;
    return p;
}

} // namespace

TEST_CASE("overlap certificate on a non-commuting unitary pair") {
    const MatrixSet set = swap_and_flip();
    KappaOptions opts;
    opts.resolution = 0.1;
    const auto cert = kappa_certificate(set, opts);

    CHECK(cert.grid_resolution == 0.1);
    CHECK(cert.lipschitz == doctest::Approx(2.0).epsilon(1e-12)); // 1 + max norm, unitaries
    CHECK(cert.kappa_grid > 0.0);
    CHECK(cert.kappa_grid <= 1.0 + 1e-12); // f never exceeds 1 for unitary members
    CHECK(cert.kappa_lower ==
          doctest::Approx(cert.kappa_grid - cert.lipschitz * 0.1).epsilon(1e-12));
    CHECK(cert.kappa_lower > 0.0);
    CHECK(cert.bound == doctest::Approx(1.0 / cert.kappa_lower).epsilon(1e-12));

    // The reported argmin really attains the reported sampled value.
    CHECK(oracle::overlap_value(set, cert.argmin_u, cert.argmin_v) ==
          doctest::Approx(cert.kappa_grid).epsilon(1e-10));
    CHECK(cert.argmin_u.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.argmin_v.norm() == doctest::Approx(1.0).epsilon(1e-12));

    // The certified floor sits below a Monte-Carlo probe of the true minimum.
    CHECK(cert.kappa_lower <= oracle::sampled_overlap_min(set, 20000, 99) + 1e-12);
}

TEST_CASE("refinement only sharpens the sampled minimum") {
    const MatrixSet set = swap_and_flip();
    KappaOptions coarse;
    coarse.resolution = 0.1;
    coarse.refine = false;
    KappaOptions refined = coarse;
    refined.refine = true;

    const auto c0 = kappa_certificate(set, coarse);
    const auto c1 = kappa_certificate(set, refined);
    CHECK(c1.kappa_grid <= c0.kappa_grid + 1e-15);
    // Both floors subtract the same correction from their own sampled minimum.
    CHECK(c1.kappa_lower ==
          doctest::Approx(c1.kappa_grid - c1.lipschitz * 0.1).epsilon(1e-12));
}

TEST_CASE("serial and parallel grid scans agree") {
    const MatrixSet set = swap_and_flip();
    KappaOptions a;
    a.resolution = 0.15;
    a.refine = false;
    a.exec = Exec::Serial;
    KappaOptions b = a;
    b.exec = Exec::Parallel;
    const auto ca = kappa_certificate(set, a);
    const auto cb = kappa_certificate(set, b);
    CHECK(ca.kappa_grid == cb.kappa_grid);
    CHECK((ca.argmin_u - cb.argmin_u).norm() == 0.0);
    CHECK((ca.argmin_v - cb.argmin_v).norm() == 0.0);
}

TEST_CASE("overlap certificate refuses sets with a common eigenvector") {
    MatrixSet triangular;
    triangular.members = {Mat2{0.9, 1.0, 0.0, 0.8}, Mat2{0.5, 2.0, 0.0, 1.0}};
    CHECK_THROWS_AS(kappa_certificate(triangular), CommonEigenvectorExists);

    MatrixSet empty;
    CHECK_THROWS_AS(kappa_certificate(empty), CommonEigenvectorExists);
}

TEST_CASE("overlap certificate refuses resolutions the correction swallows") {
    const MatrixSet set = swap_and_flip();
    KappaOptions opts;
    opts.resolution = 0.5; // correction 2 * 0.5 = 1 >= any unitary-family floor
    CHECK_THROWS_AS(kappa_certificate(set, opts), ResolutionTooCoarse);

    opts.resolution = 0.0;
    CHECK_THROWS_AS(kappa_certificate(set, opts), ResolutionTooCoarse);
}

TEST_CASE("certified floor passes the product-inequality spot check, inflated floors fail") {
    const MatrixSet set = swap_and_flip();
    KappaOptions opts;
    opts.resolution = 0.1;
    const auto cert = kappa_certificate(set, opts);
    CHECK(verify_bee(set, cert.kappa_lower, 200));
    CHECK_FALSE(verify_bee(set, 2.0, 50)); // unitary members cannot double a product norm
}

TEST_CASE("triangular boundedness certificate on a frozen pair") {
    MatrixSet set;
    set.members = {Mat2{0.5, 1.0, 0.0, 1.0}, Mat2::diag(phase(1.0), 1.0)};
    const auto cert = bdd_certificate(set);
    CHECK(cert.lambda == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(cert.bound_m == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cert.bound == doctest::Approx(5.0).epsilon(1e-15));

    // Exhaustive check: every product of up to 10 members stays below the bound.
    for (int len = 1; len <= 10; ++len) {
        double worst = 0.0;
        for_each_word(2, len, [&](const std::vector<int>& word) {
            worst = std::max(worst, operator_norm(product_of(set, word)));
        });
        CHECK(worst <= cert.bound + 1e-9);
    }
}

TEST_CASE("boundedness certificate handles all-diagonal sets with the default margin") {
    MatrixSet set;
    set.members = {Mat2::diag(phase(0.3), phase(-1.2)), Mat2::diag(0.7, phase(2.0))};
    const auto cert = bdd_certificate(set);
    CHECK(cert.lambda == 0.5);
    CHECK(cert.bound_m == 0.0);
    CHECK(cert.bound == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("boundedness certificate hypothesis guards") {
    MatrixSet not_triangular;
    not_triangular.members = {Mat2{0.5, 0.0, 1.0, 0.5}};
    CHECK_THROWS_AS(bdd_certificate(not_triangular), HypothesisViolated);

    MatrixSet expanding_diag;
    expanding_diag.members = {Mat2::diag(1.5, 0.5)};
    CHECK_THROWS_AS(bdd_certificate(expanding_diag), HypothesisViolated);

    MatrixSet shear; // non-diagonal with both diagonal moduli at one
    shear.members = {Mat2{1.0, 1.0, 0.0, 1.0}};
    CHECK_THROWS_AS(bdd_certificate(shear), HypothesisViolated);
}

TEST_CASE("random hypothesis-satisfying sets respect the certificate bound") {
    std::mt19937_64 rng(401);
    std::uniform_real_distribution<double> lam(0.1, 0.9);
    std::uniform_real_distribution<double> mag(0.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 6.2831853);
    for (int k = 0; k < 20; ++k) {
        MatrixSet set;
        const int n = 2 + static_cast<int>(rng() % 2);
        for (int j = 0; j < n; ++j) {
            const double l = lam(rng);
            const bool diag_first = rng() % 2 == 0;
            const cplx d0 = diag_first ? phase(ang(rng)) : std::polar(l, ang(rng));
            const cplx d1 = diag_first ? std::polar(l, ang(rng)) : phase(ang(rng));
            set.members.push_back(Mat2{d0, std::polar(mag(rng), ang(rng)), 0.0, d1});
        }
        const auto cert = bdd_certificate(set);
        for (int len = 1; len <= 8; ++len) {
            for_each_word(n, len, [&](const std::vector<int>& word) {
                CHECK(operator_norm(product_of(set, word)) <= cert.bound + 1e-9);
            });
        }
    }
}

TEST_CASE("linear ceiling on unit-modulus-diagonal triangular sets") {
    std::mt19937_64 rng(402);
    std::uniform_real_distribution<double> mag(0.0, 2.0);
    std::uniform_real_distribution<double> ang(0.0, 6.2831853);
    for (int k = 0; k < 10; ++k) {
        MatrixSet set;
        for (int j = 0; j < 2; ++j) {
            set.members.push_back(
                Mat2{phase(ang(rng)), std::polar(mag(rng), ang(rng)), 0.0, phase(ang(rng))});
        }
        const auto ceiling = linear_ceiling(set);
        CHECK(ceiling.slope == doctest::Approx(max_member_norm(set)).epsilon(1e-12));
        for (int len = 1; len <= 10; ++len) {
            double worst = 0.0;
            for_each_word(2, len, [&](const std::vector<int>& word) {
                worst = std::max(worst, operator_norm(product_of(set, word)));
            });
            CHECK(worst <= ceiling.at(len) + 1e-9);
        }
    }

    MatrixSet growing;
    growing.members = {Mat2::diag(1.5, 1.0)};
    CHECK_THROWS_AS(linear_ceiling(growing), HypothesisViolated);
}
