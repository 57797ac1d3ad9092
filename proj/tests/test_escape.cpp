#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <memory>
#include <random>
#include <vector>

#include "sls2/errors.hpp"
#include "sls2/escape.hpp"
#include "sls2/mat2.hpp"
#include "sls2/structure.hpp"

using namespace sls2;

namespace {

const double kPi = 3.14159265358979323846;

cplx phase(double t) { return std::polar(1.0, t); }

// Model-form members for angles phi (sheared) and psi (diagonal).
Mat2 model_first(double phi) { return Mat2{phase(phi), phase(phi) - 1.0, 0.0, 1.0}; }
Mat2 model_second(double psi) { return Mat2::diag(phase(psi), 1.0); }

Mat2 reconstruct(const NormalizedPair& np, const Mat2& model, cplx ph) {
    return np.to_original * model * np.from_original * ph;
}

} // namespace

TEST_CASE("normalize_pair reproduces a frozen example") {
    // first = [[i, 1], [0, 1]], second = diag(-1, 1): already triangular,
    // shear coefficient vanishes, phi = pi/2, psi = pi.
    const Mat2 first{cplx(0.0, 1.0), 1.0, 0.0, 1.0};
    const Mat2 second = Mat2::diag(-1.0, 1.0);
    const Vec2 v1{1.0, 0.0};
    const auto np = normalize_pair(first, second, v1);

    CHECK(np.phi == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(std::abs(phase(np.psi) - cplx(-1.0)) < 1e-12);
    CHECK(operator_norm(np.a1n - model_first(np.phi)) < 1e-12);
    CHECK(operator_norm(np.a2n - model_second(np.psi)) < 1e-12);
    CHECK(np.reproduction_residual < 1e-12);
    CHECK(operator_norm(reconstruct(np, np.a1n, np.phase_first) - first) < 1e-12);
    CHECK(operator_norm(reconstruct(np, np.a2n, np.phase_second) - second) < 1e-12);
    CHECK(np.conditioning >= 1.0);
}

TEST_CASE("normalize_pair handles rescaled, rotated, and re-based pairs") {
    std::mt19937_64 rng(501);
    std::uniform_real_distribution<double> ang(0.2, 2.9);
    int built = 0;
    for (int k = 0; k < 50; ++k) {
        const double phi = ang(rng);
        const double psi = -ang(rng);
        // Start from model form, apply a random unitary change of basis and
        // member phases; normalization must undo all of it.
        Mat2 a = model_first(phi);
        Mat2 b = model_second(psi);
        const cplx pa = phase(ang(rng));
        const cplx pb = phase(-0.5 * ang(rng));
        const Vec2 col(cplx(0.6, -0.2), cplx(0.3, 0.7));
        const Mat2 u = unitary_from_first_column(col.normalized());
        a = u * a * u.adjoint() * pa;
        b = u * b * u.adjoint() * pb;

        const Vec2 v1{u.m00, u.m10};
        const auto np = normalize_pair(a, b, v1);
        ++built;
        CHECK(std::abs(phase(np.phi) - phase(phi)) < 1e-9);
        CHECK(std::abs(phase(np.psi) - phase(psi)) < 1e-9);
        CHECK(np.reproduction_residual < 1e-9);
        CHECK(operator_norm(reconstruct(np, np.a1n, np.phase_first) - a) < 1e-9);
        CHECK(operator_norm(reconstruct(np, np.a2n, np.phase_second) - b) < 1e-9);
    }
    CHECK(built == 50);
}

TEST_CASE("normalize_pair rejects commuting and near-degenerate pairs") {
    // Two diagonal members commute; the normalized off-diagonal would vanish.
    CHECK_THROWS_AS(normalize_pair(Mat2::diag(phase(1.0), 1.0), Mat2::diag(phase(2.0), 1.0),
                                   Vec2{1.0, 0.0}),
                    DegeneratePair);
    // Second member scalar: its diagonal ratio is one.
    CHECK_THROWS_AS(normalize_pair(Mat2{phase(1.0), 1.0, 0.0, 1.0},
                                   Mat2::diag(-1.0, -1.0), Vec2{1.0, 0.0}),
                    DegeneratePair);
    // First member with unit diagonal ratio cannot reach the model form.
    CHECK_THROWS_AS(normalize_pair(Mat2{1.0, 1.0, 0.0, 1.0}, Mat2::diag(phase(1.0), 1.0),
                                   Vec2{1.0, 0.0}),
                    DegeneratePair);
}

TEST_CASE("greedy step matches the frozen walk start") {
    GreedyState s0; // alpha = 0, theta = 0
    const double phi = 1.0;
    const double psi = std::sqrt(2.0);
    const auto s1 = case2_step(s0, phi, psi, 1000);
    REQUIRE(s1.step_log.size() == 1);
    CHECK(s1.step_log[0].first == 4);  // m: smallest with cos(m sqrt(2)) > 1/2
    CHECK(s1.step_log[0].second == 3); // n: smallest with cos(m sqrt(2) + n) < -1/2
    const cplx beta = phase(3.0 * phi) * (1.0 + cplx(0.0)) - 1.0;
    CHECK(std::abs(s1.alpha - beta) < 1e-12);
    CHECK(std::abs(std::abs(s1.alpha) - 2.0 * std::sin(1.5)) < 1e-12);
    CHECK(s1.theta == doctest::Approx(std::arg(s1.alpha)).epsilon(1e-12));
}

TEST_CASE("greedy steps gain at least one in modulus, for many angle pairs") {
    std::mt19937_64 rng(502);
    std::uniform_real_distribution<double> ang(0.1, 6.2);
    for (int k = 0; k < 50; ++k) {
        const double phi = ang(rng);
        const double psi = ang(rng);
        GreedyState s;
        double prev = 0.0;
        bool capped = false;
        for (int step = 0; step < 40 && !capped; ++step) {
            try {
                s = case2_step(s, phi, psi, 100000);
            } catch (const SearchCapExceeded&) {
                capped = true; // rational-like angles may stall; that is a valid refusal
                break;
            }
            const double cur = std::abs(s.alpha);
            CHECK(cur >= prev + 1.0 - 1e-9);
            prev = cur;
        }
        if (!capped) CHECK(prev >= 40.0 - 1e-6);
    }
}

TEST_CASE("greedy engine emits blocks consistent with its step log") {
    const double phi = 1.0;
    const double psi = std::sqrt(2.0);
    GreedyEngine eng(phi, psi, {0}, {1}, 100000);
    std::vector<int> emitted;
    for (std::int64_t n = 1; n <= 2000; ++n) emitted.push_back(eng.at(n));

    const auto& log = eng.step_log();
    REQUIRE(!log.empty());
    CHECK(log[0] == std::pair<long, long>(4, 3));

    // Replay the log: m copies of block2 (member 1) then n copies of block1.
    std::size_t pos = 0;
    for (const auto& [m, n] : log) {
        for (long i = 0; i < m && pos < emitted.size(); ++i) CHECK(emitted[pos++] == 1);
        for (long i = 0; i < n && pos < emitted.size(); ++i) CHECK(emitted[pos++] == 0);
        if (pos >= emitted.size()) break;
    }

    // Checkpoints are the running block boundaries.
    const auto marks = eng.checkpoints_up_to(2000);
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < marks.size(); ++i) {
        acc += log[i].first + log[i].second;
        CHECK(marks[i] == acc);
    }
    const auto mx = eng.realized_max();
    CHECK(mx.first >= 4);
    CHECK(mx.second >= 3);
}

TEST_CASE("switching sequences: constant, periodic, greedy") {
    const auto c = SwitchingSequence::constant(2);
    CHECK(c.kind() == SwitchingSequence::Kind::Constant);
    for (std::int64_t n = 1; n <= 5; ++n) CHECK(c.at(n) == 2);

    const auto p = SwitchingSequence::periodic({1, 1, 0});
    CHECK(p.kind() == SwitchingSequence::Kind::Periodic);
    const std::vector<int> expect{1, 1, 0, 1, 1, 0, 1};
    for (std::int64_t n = 1; n <= 7; ++n) CHECK(p.at(n) == expect[std::size_t(n - 1)]);
    const auto pmarks = p.checkpoints_up_to(9);
    REQUIRE(pmarks.size() == 3);
    CHECK(pmarks[0] == 3);
    CHECK(pmarks[2] == 9);

    auto eng = std::make_shared<GreedyEngine>(1.0, std::sqrt(2.0), std::vector<int>{0},
                                              std::vector<int>{1}, 100000);
    const auto g = SwitchingSequence::greedy(eng);
    CHECK(g.kind() == SwitchingSequence::Kind::Greedy);
    CHECK(g.at(1) == 1); // first greedy step starts with block2
    CHECK(g.engine() != nullptr);
}

TEST_CASE("periodic witness for two roots of unity matches the frozen shear") {
    // phi = 2 pi / 3 (order 3), psi = pi (order 2).
    const double phi = 2.0 * kPi / 3.0;
    const double psi = kPi;
    const auto np = normalize_pair(model_first(phi), model_second(psi), Vec2{1.0, 0.0});
    const auto w = case1_witness(np, 3, 2, {0, 1});

    CHECK(w.case_tag == CaseTag::BothRoots);
    CHECK(w.sequence.kind() == SwitchingSequence::Kind::Periodic);
    REQUIRE(w.sequence.period_word().size() == 5); // q1 + q2 = 3 + 2

    REQUIRE(w.predicted_period_product.has_value());
    const Mat2 pred = *w.predicted_period_product;
    // Unipotent shear [[1, (1 - e^{i phi})(e^{i psi} - 1)], [0, 1]]:
    // upper-right = -3 + sqrt(3) i for these angles.
    CHECK(std::abs(pred.m00 - cplx(1.0)) < 1e-12);
    CHECK(std::abs(pred.m11 - cplx(1.0)) < 1e-12);
    CHECK(std::abs(pred.m10) < 1e-12);
    CHECK(std::abs(pred.m01 - cplx(-3.0, 1.7320508075688772)) < 1e-12);
    CHECK(w.period_residual < 1e-12);

    // The word really multiplies to the predicted shear in model coordinates.
    Mat2 prod = Mat2::identity();
    for (int idx : w.sequence.period_word()) prod = (idx == 0 ? np.a1n : np.a2n) * prod;
    CHECK(operator_norm(prod - pred) < 1e-12);
    CHECK(w.v0.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("periodic witness rejects non-root angles") {
    const auto np = normalize_pair(model_first(1.0), model_second(kPi), Vec2{1.0, 0.0});
    CHECK_THROWS_AS(case1_witness(np, 3, 2, {0, 1}), NotRootsOfUnity);
}

TEST_CASE("constant witness on a defective unit-determinant member") {
    MatrixSet set;
    set.members = {Mat2{cplx(0.0, 1.0), 1.0, 0.0, cplx(0.0, 1.0)}};
    const auto w = jordan_witness(set, 0);
    CHECK(w.case_tag == CaseTag::Jordan);
    CHECK(w.sequence.kind() == SwitchingSequence::Kind::Constant);

    // [[i, 1], [0, i]] applied to e1 grows like sqrt(n^2 + 1).
    Vec2 v = w.v0;
    for (int n = 1; n <= 50; ++n) {
        v = set.members[0] * v;
        CHECK(v.norm() == doctest::Approx(std::sqrt(double(n) * n + 1.0)).epsilon(1e-10));
    }

    MatrixSet diagonalizable;
    diagonalizable.members = {Mat2::diag(phase(1.0), phase(-1.0))};
    CHECK_THROWS_AS(jordan_witness(diagonalizable, 0), NotJordan);

    MatrixSet shrinking; // defective but determinant modulus below one
    shrinking.members = {Mat2{0.5, 1.0, 0.0, 0.5}};
    CHECK_THROWS_AS(jordan_witness(shrinking, 0), NotJordan);
}

TEST_CASE("mixed witness tracks the derived-pair products at checkpoints") {
    // first: non-root angle 1.0; second: root of unity of order 2. Member
    // phases exercise the phase bookkeeping in the reconstruction.
    const Mat2 a1 = model_first(1.0) * phase(0.7);
    const Mat2 a2 = model_second(kPi) * phase(-0.4);
    const auto w = case3_witness(a1, a2, Vec2{1.0, 0.0}, false, 100000, {0, 1});
    CHECK(w.case_tag == CaseTag::Mixed);
    CHECK(w.sequence.kind() == SwitchingSequence::Kind::Greedy);

    // Derived letters: B1 = A1 (block {0}), B2 = A1 A2 (block {1, 0} in time
    // order). Every expanded index stream must parse back into these blocks.
    std::vector<int> emitted;
    for (std::int64_t n = 1; n <= 3000; ++n) emitted.push_back(w.sequence.at(n));
    std::size_t pos = 0;
    std::int64_t derived_letters = 0;
    while (pos < emitted.size()) {
        if (emitted[pos] == 1) {
            if (pos + 1 >= emitted.size()) break; // block cut off by the buffer edge
            CHECK(emitted[pos + 1] == 0);
            pos += 2;
        } else {
            pos += 1;
        }
        ++derived_letters;
    }
    // Each derived letter expands to one or two original members.
    CHECK(derived_letters >= 1499);
    CHECK(derived_letters <= 3000);

    // At greedy-step boundaries the product matches the derived-pair walk.
    const auto marks = w.sequence.checkpoints_up_to(3000);
    REQUIRE(!marks.empty());
    REQUIRE(w.normalization.has_value());
    const auto& np = *w.normalization;

    GreedyEngine* eng = w.sequence.engine();
    REQUIRE(eng != nullptr);
    const auto& log = eng->step_log();

    Mat2 prod = Mat2::identity();
    std::int64_t done = 0;
    std::size_t mark_index = 0;
    Mat2 b1 = np.a1n;
    Mat2 b2 = np.a2n;
    cplx phase_accum{1.0, 0.0};
    Mat2 walk = Mat2::identity();
    for (std::size_t s = 0; s < log.size() && mark_index < marks.size(); ++s) {
        for (; done < marks[mark_index]; ++done) {
            const int idx = emitted[std::size_t(done)];
            prod = (idx == 0 ? a1 : a2) * prod;
        }
        for (long i = 0; i < log[s].first; ++i) walk = b2 * walk;
        for (long i = 0; i < log[s].second; ++i) walk = b1 * walk;
        // Each derived second-letter carries phase_second, each first-letter
        // phase_first; a step has `first` of the former and `second` of the latter.
        phase_accum *= std::pow(np.phase_second, double(log[s].first));
        phase_accum *= std::pow(np.phase_first, double(log[s].second));

        const Mat2 reconstructed = np.to_original * walk * np.from_original * phase_accum;
        CHECK(operator_norm(reconstructed - prod) <
              1e-8 * std::max(1.0, operator_norm(prod)));
        ++mark_index;
    }
}

TEST_CASE("mixed witness refuses derived pairs that commute") {
    // A1 diagonal makes B1 = A1 and B2 = A1 A2 commute (both diagonal).
    const Mat2 a1 = model_second(1.0);
    const Mat2 a2 = model_second(kPi);
    CHECK_THROWS_AS(case3_witness(a1, a2, Vec2{1.0, 0.0}, false, 100000, {0, 1}),
                    DerivedPairDegenerate);
}

TEST_CASE("witness dispatch prefers the defective member and routes by root status") {
    EscapeOptions opts;

    // Defective member present: constant witness.
    MatrixSet with_jordan;
    with_jordan.members = {Mat2{cplx(0.0, 1.0), 1.0, 0.0, cplx(0.0, 1.0)},
                           Mat2::diag(phase(0.5), 1.0)};
    auto w1 = build_escape_witness(with_jordan, analyze(with_jordan), opts);
    CHECK(w1.case_tag == CaseTag::Jordan);

    // Two roots of unity: periodic witness.
    MatrixSet both_roots;
    both_roots.members = {model_first(2.0 * kPi / 3.0), model_second(kPi)};
    auto w2 = build_escape_witness(both_roots, analyze(both_roots), opts);
    CHECK(w2.case_tag == CaseTag::BothRoots);
    CHECK(w2.pair_indices == std::pair<int, int>(0, 1));

    // Neither a root: greedy witness.
    MatrixSet neither;
    neither.members = {model_first(1.0), model_second(std::sqrt(2.0))};
    auto w3 = build_escape_witness(neither, analyze(neither), opts);
    CHECK(w3.case_tag == CaseTag::NeitherRoot);

    // Exactly one root: mixed witness.
    MatrixSet mixed;
    mixed.members = {model_first(1.0), model_second(kPi)};
    auto w4 = build_escape_witness(mixed, analyze(mixed), opts);
    CHECK(w4.case_tag == CaseTag::Mixed);

    // No common eigenvector: refused.
    MatrixSet spread;
    spread.members = {Mat2{0.0, 1.0, 1.0, 0.0}, Mat2::diag(1.0, -1.0)};
    CHECK_THROWS_AS(build_escape_witness(spread, analyze(spread), opts),
                    NotMarginallyUnstable);

    // Commuting family: no usable pair.
    MatrixSet commuting;
    commuting.members = {Mat2::diag(phase(0.4), 1.0), Mat2::diag(phase(1.3), 1.0)};
    CHECK_THROWS_AS(build_escape_witness(commuting, analyze(commuting), opts),
                    NotMarginallyUnstable);
}

TEST_CASE("root-status overrides redirect the dispatch") {
    // Order 17 exceeds a deliberately small automatic search cap; the pair is
    // routed as mixed until the caller declares the order explicitly.
    MatrixSet set;
    set.members = {model_first(2.0 * kPi / 17.0), model_second(kPi)};

    EscapeOptions opts;
    opts.q_max = 3; // automatic root search only sees orders up to 3
    auto w = build_escape_witness(set, analyze(set), opts);
    CHECK(w.case_tag == CaseTag::Mixed);

    EscapeOptions opts2 = opts;
    opts2.forced_root[0] = 17;
    auto w2 = build_escape_witness(set, analyze(set), opts2);
    CHECK(w2.case_tag == CaseTag::BothRoots);
    CHECK(w2.period_residual < 1e-9);
    CHECK(w2.sequence.period_word().size() == 19);

    // A wrong declared order is caught by the periodic verification.
    EscapeOptions opts3 = opts;
    opts3.forced_root[0] = 5;
    CHECK_THROWS_AS(build_escape_witness(set, analyze(set), opts3), NotRootsOfUnity);

    // Declaring both ratios irrational forces the plain greedy walk.
    EscapeOptions opts4;
    opts4.forced_irrational.insert(0);
    opts4.forced_irrational.insert(1);
    auto w4 = build_escape_witness(set, analyze(set), opts4);
    CHECK(w4.case_tag == CaseTag::NeitherRoot);
}
