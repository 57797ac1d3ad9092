#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sls2/matrix_set.hpp"
#include "sls2/structure.hpp"

namespace sls2 {

// Which construction produced the escape witness.
enum class CaseTag { Jordan, BothRoots, NeitherRoot, Mixed };

// A non-commuting pair with common eigenvector, unit determinants and unit
// spectral radii, conjugated and rescaled to the model form
//   a1n = [[e^{i phi}, e^{i phi} - 1], [0, 1]],  a2n = [[e^{i psi}, 0], [0, 1]].
// The originals are recovered as phase * to_original * a?n * from_original.
struct NormalizedPair {
    double phi = 0.0;
    double psi = 0.0;
    Mat2 a1n;
    Mat2 a2n;
    Mat2 to_original;
    Mat2 from_original;
    cplx phase_first{1.0, 0.0};
    cplx phase_second{1.0, 0.0};
    double conditioning = 1.0;         // |to_original| * |from_original|
    double reproduction_residual = 0.0; // worst relative reconstruction error
};

NormalizedPair normalize_pair(const Mat2& first, const Mat2& second, const Vec2& v1,
                              Tolerance tol = {}); // throws DegeneratePair

// State of the greedy angle walk: the trajectory's first coordinate alpha
// (second coordinate pinned at one), its argument, and the (m, n) block sizes
// chosen so far.
struct GreedyState {
    cplx alpha{0.0, 0.0};
    double theta = 0.0;
    std::vector<std::pair<long, long>> step_log;
};

// One greedy step: the smallest m >= 1 with cos(m psi + theta) > 1/2, then the
// smallest n >= 1 with cos(m psi + n phi + theta) < -1/2, and the update
// alpha <- e^{i n phi} (1 + alpha e^{i m psi}) - 1, which gains at least one in
// modulus. Throws SearchCapExceeded when either search passes search_cap.
GreedyState case2_step(const GreedyState& state, double phi, double psi, long search_cap);

// Emits the switching indices of a greedy walk on demand. Each greedy step
// appends m copies of block2 then n copies of block1 (time order); block2 may
// hold several indices when a derived product letter expands to more than one
// original member.
class GreedyEngine {
public:
    GreedyEngine(double phi, double psi, std::vector<int> block1, std::vector<int> block2,
                 long search_cap);

    int at(std::int64_t n);                                  // 1-based
    std::vector<std::int64_t> checkpoints_up_to(std::int64_t limit); // boundaries of greedy steps
    const std::vector<std::pair<long, long>>& step_log() const { return state_.step_log; }
    std::pair<long, long> realized_max() const;              // componentwise max of step_log
    double phi() const { return phi_; }
    double psi() const { return psi_; }

private:
    void ensure(std::int64_t n);

    double phi_;
    double psi_;
    long cap_;
    std::vector<int> block1_;
    std::vector<int> block2_;
    GreedyState state_;
    std::vector<int> emitted_;
    std::vector<std::int64_t> step_ends_;
};

// Time-ordered switching law sigma: {1, 2, ...} -> member indices.
class SwitchingSequence {
public:
    enum class Kind { Constant, Periodic, Greedy };

    SwitchingSequence() = default; // constant on member 0

    static SwitchingSequence constant(int index);
    static SwitchingSequence periodic(std::vector<int> word);
    static SwitchingSequence greedy(std::shared_ptr<GreedyEngine> engine);

    int at(std::int64_t n) const; // 1-based
    Kind kind() const { return kind_; }
    const std::vector<int>& period_word() const { return word_; }
    std::vector<std::int64_t> checkpoints_up_to(std::int64_t limit) const;
    GreedyEngine* engine() const { return engine_.get(); }

private:
    Kind kind_ = Kind::Constant;
    int constant_index_ = 0;
    std::vector<int> word_;
    std::shared_ptr<GreedyEngine> engine_;
};

// A concrete linearly escaping trajectory: start vector (unit norm, original
// coordinates) plus the switching law driving it.
struct EscapeWitness {
    SwitchingSequence sequence;
    Vec2 v0;
    CaseTag case_tag = CaseTag::Jordan;
    std::pair<int, int> pair_indices{-1, -1};
    std::optional<NormalizedPair> normalization;
    std::optional<Mat2> predicted_period_product; // normalized coordinates, periodic case
    double period_residual = 0.0;
    std::string description;
};

// Constant witness on a defective member with unit determinant; the start
// vector is the second column of the triangularizing unitary.
EscapeWitness jordan_witness(const MatrixSet& set, int member); // throws NotJordan

// Periodic witness when both diagonal ratios are roots of unity of orders
// q1, q2 >= 2: one period multiplies out to a unipotent shear, so norms grow
// linearly along the trajectory of (0, 1).
EscapeWitness case1_witness(const NormalizedPair& np, int q1, int q2,
                            std::pair<int, int> indices,
                            double root_tol = 1e-9); // throws NotRootsOfUnity

// Greedy witness when neither ratio is a root of unity.
EscapeWitness case2_witness(const NormalizedPair& np, long search_cap,
                            std::pair<int, int> indices);

// Mixed case: exactly one ratio is a root of unity. Works on the derived pair
// (B1, B2) = (A1, A1 A2) with A1 relabeled to the non-root member, runs the
// greedy walk there, and expands each B2 letter to (A2 then A1).
EscapeWitness case3_witness(const Mat2& first, const Mat2& second, const Vec2& v1,
                            bool first_is_root, long search_cap, std::pair<int, int> indices,
                            Tolerance tol = {}); // throws DerivedPairDegenerate

struct EscapeOptions {
    long search_cap = 1'000'000;
    int q_max = 4096;
    double root_tol = 1e-9;
    std::map<int, int> forced_root;   // member index -> known root-of-unity order
    std::set<int> forced_irrational;  // member indices known not to be roots
};

// Dispatch on the structure report: a defective unit-determinant member takes
// priority, otherwise the first non-commuting unit-determinant pair is
// normalized and routed by which of its diagonal ratios are roots of unity.
EscapeWitness build_escape_witness(const MatrixSet& set, const StructureReport& report,
                                   const EscapeOptions& opts = {}); // throws NotMarginallyUnstable

} // namespace sls2
