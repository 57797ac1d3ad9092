#include "sls2/escape.hpp"

#include <cmath>
#include <sstream>

#include "sls2/errors.hpp"

namespace sls2 {

namespace {

cplx unit_phase(double angle) { return std::polar(1.0, angle); }

// Relative deviation of the reconstructed member from the original.
double reconstruction_error(const Mat2& original, const Mat2& rebuilt) {
    const double scale = std::max(1.0, operator_norm(original));
    return operator_norm(original - rebuilt) / scale;
}

std::string format_angle(double a) {
    std::ostringstream os;
    os.precision(6);
    os << a;
    return os.str();
}

} // namespace

NormalizedPair normalize_pair(const Mat2& first, const Mat2& second, const Vec2& v1,
                              Tolerance tol) {
    // Triangularize both members in the unitary basis whose first column is v1.
    const Mat2 u = unitary_from_first_column(v1.normalized());
    const auto tri = triangularize_in_basis({first, second}, v1, tol);
    const Mat2& t1 = tri[0];
    const Mat2& t2 = tri[1];

    // Divide out the lower-right entries so both members fix the second
    // coordinate; the diagonal ratios become e^{i phi}, e^{i psi}.
    const cplx c1 = t1.m11;
    const cplx c2 = t2.m11;
    if (std::abs(c1) < 1e-300 || std::abs(c2) < 1e-300)
        throw DegeneratePair("normalize_pair: member is singular");
    const Mat2 m1 = t1 * (cplx(1.0) / c1);
    const Mat2 m2 = t2 * (cplx(1.0) / c2);

    const double phi = std::arg(m1.m00);
    const double psi = std::arg(m2.m00);
    const cplx ephi = m1.m00;
    const cplx epsi = m2.m00;

    const double guard = 10.0 * tol.rel;
    if (std::abs(epsi - cplx(1.0)) <= guard)
        throw DegeneratePair("normalize_pair: second member's diagonal ratio is too close to "
                             "one; the off-diagonal entry cannot be sheared away");
    if (std::abs(ephi - cplx(1.0)) <= guard)
        throw DegeneratePair("normalize_pair: first member's diagonal ratio is too close to one");

    // Shear that makes the second member diagonal: with M = [[l, b], [0, 1]]
    // and S = [[1, s], [0, 1]], S^-1 M S = [[l, b + s(l - 1)], [0, 1]].
    const cplx a = m1.m01;
    const cplx b = m2.m01;
    const cplx s = b / (cplx(1.0) - epsi);
    const cplx a_sheared = a + s * (ephi - cplx(1.0));

    const double a_scale = std::max({1.0, std::abs(a), std::abs(s)});
    if (std::abs(a_sheared) <= tol.rel * a_scale)
        throw DegeneratePair("normalize_pair: pair is simultaneously diagonalizable after the "
                             "shear, so the members commute");

    // Diagonal rescale sending the remaining off-diagonal entry to e^{i phi}-1:
    // with D = diag(d, 1), D^-1 [[l, a'], [0, 1]] D = [[l, a'/d], [0, 1]].
    const cplx d = a_sheared / (ephi - cplx(1.0));

    const Mat2 shear{cplx(1.0), s, cplx(0.0), cplx(1.0)};
    const Mat2 scale = Mat2::diag(d, cplx(1.0));

    NormalizedPair np;
    np.phi = phi;
    np.psi = psi;
    np.phase_first = c1;
    np.phase_second = c2;
    np.a1n = Mat2{ephi, ephi - cplx(1.0), cplx(0.0), cplx(1.0)};
    np.a2n = Mat2::diag(epsi, cplx(1.0));
    np.to_original = u * shear * scale;
    np.from_original = np.to_original.inverse();
    np.conditioning = operator_norm(np.to_original) * operator_norm(np.from_original);

    const Mat2 rebuilt1 = (np.to_original * np.a1n * np.from_original) * c1;
    const Mat2 rebuilt2 = (np.to_original * np.a2n * np.from_original) * c2;
    np.reproduction_residual =
        std::max(reconstruction_error(first, rebuilt1), reconstruction_error(second, rebuilt2));
    return np;
}

GreedyState case2_step(const GreedyState& state, double phi, double psi, long search_cap) {
    // First arc search: rotate the first coordinate until it points into the
    // cos > 1/2 arc, so that adding one keeps the modulus from collapsing.
    long m = 0;
    for (long k = 1; k <= search_cap; ++k) {
        if (std::cos(state.theta + double(k) * psi) > 0.5) {
            m = k;
            break;
        }
    }
    if (m == 0)
        throw SearchCapExceeded("greedy step: no rotation count within cap " +
                                std::to_string(search_cap) + " lands in the forward arc");

    // Second arc search: rotate the shifted coordinate into the cos < -1/2 arc,
    // where subtracting one pushes the modulus up by at least one.
    const double base = state.theta + double(m) * psi;
    long n = 0;
    for (long k = 1; k <= search_cap; ++k) {
        if (std::cos(base + double(k) * phi) < -0.5) {
            n = k;
            break;
        }
    }
    if (n == 0)
        throw SearchCapExceeded("greedy step: no rotation count within cap " +
                                std::to_string(search_cap) + " lands in the backward arc");

    GreedyState next;
    next.alpha = unit_phase(double(n) * phi) * (cplx(1.0) + state.alpha * unit_phase(double(m) * psi)) -
                 cplx(1.0);
    next.theta = (std::abs(next.alpha) == 0.0) ? 0.0 : std::arg(next.alpha);
    next.step_log = state.step_log;
    next.step_log.emplace_back(m, n);
    return next;
}

GreedyEngine::GreedyEngine(double phi, double psi, std::vector<int> block1, std::vector<int> block2,
                           long search_cap)
    : phi_(phi), psi_(psi), cap_(search_cap), block1_(std::move(block1)),
      block2_(std::move(block2)) {}

void GreedyEngine::ensure(std::int64_t n) {
    while (std::int64_t(emitted_.size()) < n) {
        const GreedyState next = case2_step(state_, phi_, psi_, cap_);
        const auto [m, cnt] = next.step_log.back();
        for (long k = 0; k < m; ++k)
            emitted_.insert(emitted_.end(), block2_.begin(), block2_.end());
        for (long k = 0; k < cnt; ++k)
            emitted_.insert(emitted_.end(), block1_.begin(), block1_.end());
        step_ends_.push_back(std::int64_t(emitted_.size()));
        state_ = next;
    }
}

int GreedyEngine::at(std::int64_t n) {
    ensure(n);
    return emitted_[std::size_t(n - 1)];
}

std::vector<std::int64_t> GreedyEngine::checkpoints_up_to(std::int64_t limit) {
    ensure(limit);
    std::vector<std::int64_t> out;
    for (std::int64_t end : step_ends_) {
        if (end > limit) break;
        out.push_back(end);
    }
    return out;
}

std::pair<long, long> GreedyEngine::realized_max() const {
    std::pair<long, long> mx{0, 0};
    for (const auto& [m, n] : state_.step_log) {
        mx.first = std::max(mx.first, m);
        mx.second = std::max(mx.second, n);
    }
    return mx;
}

SwitchingSequence SwitchingSequence::constant(int index) {
    SwitchingSequence s;
    s.kind_ = Kind::Constant;
    s.constant_index_ = index;
    return s;
}

SwitchingSequence SwitchingSequence::periodic(std::vector<int> word) {
    SwitchingSequence s;
    s.kind_ = Kind::Periodic;
    s.word_ = std::move(word);
    return s;
}

SwitchingSequence SwitchingSequence::greedy(std::shared_ptr<GreedyEngine> engine) {
    SwitchingSequence s;
    s.kind_ = Kind::Greedy;
    s.engine_ = std::move(engine);
    return s;
}

int SwitchingSequence::at(std::int64_t n) const {
    switch (kind_) {
    case Kind::Constant:
        return constant_index_;
    case Kind::Periodic:
        return word_[std::size_t((n - 1) % std::int64_t(word_.size()))];
    case Kind::Greedy:
        return engine_->at(n);
    }
    return constant_index_;
}

std::vector<std::int64_t> SwitchingSequence::checkpoints_up_to(std::int64_t limit) const {
    std::vector<std::int64_t> out;
    switch (kind_) {
    case Kind::Constant:
        for (std::int64_t n = 1; n <= limit; ++n) out.push_back(n);
        break;
    case Kind::Periodic: {
        const auto period = std::int64_t(word_.size());
        for (std::int64_t n = period; n <= limit; n += period) out.push_back(n);
        break;
    }
    case Kind::Greedy:
        out = engine_->checkpoints_up_to(limit);
        break;
    }
    return out;
}

EscapeWitness jordan_witness(const MatrixSet& set, int member) {
    if (member < 0 || member >= set.size())
        throw NotJordan("member index out of range");
    const Mat2& a = set.members[std::size_t(member)];
    const auto ed = eigen(a, set.tol);
    if (ed.diagonalizable)
        throw NotJordan("member " + std::to_string(member) + " is diagonalizable");
    if (std::abs(std::abs(a.det()) - 1.0) > set.tol.scaled(std::abs(a.det())))
        throw NotJordan("member " + std::to_string(member) +
                        " is defective but its determinant is off the unit circle");

    const Mat2 u = unitary_from_first_column(ed.vectors[0].normalized());

    EscapeWitness w;
    w.sequence = SwitchingSequence::constant(member);
    w.v0 = Vec2{u.m01, u.m11}.normalized();
    w.case_tag = CaseTag::Jordan;
    w.pair_indices = {member, member};
    w.description = "constant switching on defective member " + std::to_string(member) +
                    "; starting from the second column of its triangularizing basis the norm "
                    "grows like the step count times the nilpotent entry";
    return w;
}

EscapeWitness case1_witness(const NormalizedPair& np, int q1, int q2,
                            std::pair<int, int> indices, double root_tol) {
    if (q1 < 2 || q2 < 2)
        throw NotRootsOfUnity("periodic witness needs both diagonal ratios to have order >= 2");
    if (std::abs(2.0 * std::sin(0.5 * double(q1) * np.phi)) > root_tol)
        throw NotRootsOfUnity("first diagonal ratio is not a root of unity of order " +
                              std::to_string(q1));
    if (std::abs(2.0 * std::sin(0.5 * double(q2) * np.psi)) > root_tol)
        throw NotRootsOfUnity("second diagonal ratio is not a root of unity of order " +
                              std::to_string(q2));

    // One period multiplies out (latest letter leftmost) to
    //   A1 A2 A1^{q1-1} A2^{q2-1} = A1 A2 A1^{-1} A2^{-1},
    // a unipotent shear whose off-diagonal entry is (1 - e^{i phi})(e^{i psi} - 1).
    std::vector<int> word;
    word.reserve(std::size_t(q1 + q2));
    for (int k = 0; k < q2 - 1; ++k) word.push_back(indices.second);
    for (int k = 0; k < q1 - 1; ++k) word.push_back(indices.first);
    word.push_back(indices.second);
    word.push_back(indices.first);

    const cplx ephi = np.a1n.m00;
    const cplx epsi = np.a2n.m00;
    const Mat2 predicted{cplx(1.0), (cplx(1.0) - ephi) * (epsi - cplx(1.0)), cplx(0.0), cplx(1.0)};

    Mat2 actual = Mat2::identity();
    for (int idx : word) actual = (idx == indices.first ? np.a1n : np.a2n) * actual;

    EscapeWitness w;
    w.sequence = SwitchingSequence::periodic(word);
    w.v0 = (np.to_original * Vec2{cplx(0.0), cplx(1.0)}).normalized();
    w.case_tag = CaseTag::BothRoots;
    w.pair_indices = indices;
    w.normalization = np;
    w.predicted_period_product = predicted;
    w.period_residual = operator_norm(actual - predicted);
    w.description = "periodic witness on members (" + std::to_string(indices.first) + ", " +
                    std::to_string(indices.second) + "): diagonal ratios have orders " +
                    std::to_string(q1) + " and " + std::to_string(q2) +
                    ", so one period of length " + std::to_string(q1 + q2) +
                    " acts as a unipotent shear";
    return w;
}

EscapeWitness case2_witness(const NormalizedPair& np, long search_cap,
                            std::pair<int, int> indices) {
    auto engine = std::make_shared<GreedyEngine>(np.phi, np.psi, std::vector<int>{indices.first},
                                                 std::vector<int>{indices.second}, search_cap);

    EscapeWitness w;
    w.sequence = SwitchingSequence::greedy(std::move(engine));
    w.v0 = (np.to_original * Vec2{cplx(0.0), cplx(1.0)}).normalized();
    w.case_tag = CaseTag::NeitherRoot;
    w.pair_indices = indices;
    w.normalization = np;
    w.description = "greedy witness on members (" + std::to_string(indices.first) + ", " +
                    std::to_string(indices.second) + "): neither diagonal ratio (angles " +
                    format_angle(np.phi) + ", " + format_angle(np.psi) +
                    ") is a root of unity; each greedy block grows the leading coordinate by "
                    "at least one";
    return w;
}

EscapeWitness case3_witness(const Mat2& first, const Mat2& second, const Vec2& v1,
                            bool first_is_root, long search_cap, std::pair<int, int> indices,
                            Tolerance tol) {
    // Relabel so c1 is the member whose ratio is NOT a root of unity.
    const Mat2& c1 = first_is_root ? second : first;
    const Mat2& c2 = first_is_root ? first : second;
    const int idx1 = first_is_root ? indices.second : indices.first;
    const int idx2 = first_is_root ? indices.first : indices.second;

    // Derived pair: b1 = c1 and b2 = c1 * c2 (apply c2 first, then c1). Its
    // diagonal ratio angles are phi and phi + psi, and neither is a root of
    // unity when phi is not and psi is, so the greedy walk applies.
    const Mat2 b1 = c1;
    const Mat2 b2 = c1 * c2;
    const Mat2 bracket = b1 * b2 - b2 * b1;
    const double bscale = std::max(1.0, operator_norm(b1) * operator_norm(b2));
    if (operator_norm(bracket) <= tol.rel * bscale)
        throw DerivedPairDegenerate("derived pair commutes; the original members must commute too");

    const NormalizedPair np = normalize_pair(b1, b2, v1, tol);

    auto engine = std::make_shared<GreedyEngine>(np.phi, np.psi, std::vector<int>{idx1},
                                                 std::vector<int>{idx2, idx1}, search_cap);

    EscapeWitness w;
    w.sequence = SwitchingSequence::greedy(std::move(engine));
    w.v0 = (np.to_original * Vec2{cplx(0.0), cplx(1.0)}).normalized();
    w.case_tag = CaseTag::Mixed;
    w.pair_indices = indices;
    w.normalization = np;
    w.description = "mixed witness on members (" + std::to_string(indices.first) + ", " +
                    std::to_string(indices.second) + "): member " + std::to_string(idx2) +
                    " has a root-of-unity ratio, so the greedy walk runs on the derived pair "
                    "(A, A*B) and every derived letter expands to at most two original steps";
    return w;
}

EscapeWitness build_escape_witness(const MatrixSet& set, const StructureReport& report,
                                   const EscapeOptions& opts) {
    if (!report.common_eigenvector)
        throw NotMarginallyUnstable("set has no common eigenvector; the escape constructions "
                                    "need simultaneously triangularizable members");

    if (report.jordan_member) {
        EscapeWitness w = jordan_witness(set, *report.jordan_member);
        if (report.nondiag_pair)
            w.description += "; a non-commuting unit-determinant pair (" +
                             std::to_string(report.nondiag_pair->first) + ", " +
                             std::to_string(report.nondiag_pair->second) +
                             ") would also witness escape";
        return w;
    }

    if (!report.nondiag_pair)
        throw NotMarginallyUnstable("set has no defective unit-determinant member and no "
                                    "non-commuting unit-determinant pair");

    const auto [i, j] = *report.nondiag_pair;
    const Mat2& a1 = set.members[std::size_t(i)];
    const Mat2& a2 = set.members[std::size_t(j)];
    const Vec2 v1 = report.common_eigenvector->normalized();

    const NormalizedPair np = normalize_pair(a1, a2, v1, set.tol);

    auto root_status = [&](int member, double angle) -> std::optional<int> {
        if (auto it = opts.forced_root.find(member); it != opts.forced_root.end())
            return it->second;
        if (opts.forced_irrational.count(member)) return std::nullopt;
        const auto r = root_of_unity_order(angle, opts.q_max, opts.root_tol);
        if (r.is_root) return r.order;
        return std::nullopt;
    };

    const std::optional<int> q1 = root_status(i, np.phi);
    const std::optional<int> q2 = root_status(j, np.psi);

    if (q1 && q2) return case1_witness(np, *q1, *q2, {i, j}, opts.root_tol);
    if (!q1 && !q2) return case2_witness(np, opts.search_cap, {i, j});
    return case3_witness(a1, a2, v1, q1.has_value(), opts.search_cap, {i, j}, set.tol);
}

} // namespace sls2
