#include "sls2/structure.hpp"

#include <cmath>

#include "sls2/errors.hpp"

namespace sls2 {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

bool accepts_eigenvector(const Mat2& a, const Vec2& w, Tolerance tol) {
    Vec2 image = a * w;
    cplx mu = inner(image, w); // w is unit, so this is the Rayleigh quotient
    Vec2 residual = image - w * mu;
    return residual.norm() <= tol.for_matrix(a);
}

} // namespace

RootOfUnityResult root_of_unity_order(double angle, int q_max, double tol) {
    RootOfUnityResult out;
    out.margin = 2.0;
    for (int q = 1; q <= q_max; ++q) {
        // |e^{i q angle} - 1| = 2 |sin(q angle / 2)|
        double dist = 2.0 * std::abs(std::sin(0.5 * double(q) * angle));
        if (dist <= tol) {
            out.is_root = true;
            out.order = q;
            out.margin = dist;
            return out;
        }
        out.margin = std::min(out.margin, dist);
    }
    return out;
}

std::optional<Vec2> common_eigenvector(const MatrixSet& set) {
    if (set.members.empty()) return Vec2{1.0, 0.0};

    std::vector<EigenData> eigs;
    eigs.reserve(set.members.size());
    for (const Mat2& a : set.members) eigs.push_back(eigen(a, set.tol));

    int first_non_scalar = -1;
    for (int j = 0; j < set.size(); ++j) {
        if (!eigs[j].scalar) { first_non_scalar = j; break; }
    }
    if (first_non_scalar < 0) return Vec2{1.0, 0.0};

    for (const Vec2& candidate : eigs[first_non_scalar].vectors) {
        bool ok = true;
        for (int j = 0; j < set.size() && ok; ++j) {
            if (eigs[j].scalar) continue;
            ok = accepts_eigenvector(set.members[j], candidate, set.tol);
        }
        if (ok) return candidate;
    }
    return std::nullopt;
}

bool is_simultaneously_diagonalizable(const MatrixSet& set) {
    for (const Mat2& a : set.members) {
        if (!eigen(a, set.tol).diagonalizable) return false;
    }
    for (int j = 0; j < set.size(); ++j) {
        for (int k = j + 1; k < set.size(); ++k) {
            const Mat2& a = set.members[j];
            const Mat2& b = set.members[k];
            Mat2 commutator = a * b - b * a;
            double bound = set.tol.rel * std::max(1.0, operator_norm(a) * operator_norm(b));
            if (operator_norm(commutator) > bound) return false;
        }
    }
    return true;
}

StructureReport analyze(const MatrixSet& set) {
    StructureReport report;
    report.common_eigenvector = common_eigenvector(set);

    std::vector<EigenData> eigs;
    eigs.reserve(set.members.size());
    for (const Mat2& a : set.members) {
        EigenData e = eigen(a, set.tol);
        std::array<double, 2> angles{};
        for (int i = 0; i < 2; ++i) {
            double arg = std::arg(e.values[i]);
            if (arg < 0.0) arg += two_pi;
            angles[i] = arg;
        }
        report.eigen_angles.push_back(angles);
        report.det_modulus.push_back(std::abs(a.det()));
        eigs.push_back(std::move(e));
    }

    for (int j = 0; j < set.size(); ++j) {
        if (std::abs(report.det_modulus[j] - 1.0) <= set.tol.rel) {
            report.unit_det_indices.push_back(j);
        }
    }

    MatrixSet unit_subset{{}, set.tol};
    for (int j : report.unit_det_indices) unit_subset.members.push_back(set.members[j]);
    report.unit_det_simdiag = is_simultaneously_diagonalizable(unit_subset);

    for (int j : report.unit_det_indices) {
        if (!eigs[j].diagonalizable) { report.jordan_member = j; break; }
    }

    if (!report.unit_det_simdiag) {
        const auto& idx = report.unit_det_indices;
        for (std::size_t a = 0; a < idx.size() && !report.nondiag_pair; ++a) {
            if (!eigs[idx[a]].diagonalizable) continue;
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                if (!eigs[idx[b]].diagonalizable) continue;
                MatrixSet pair{{set.members[idx[a]], set.members[idx[b]]}, set.tol};
                if (!is_simultaneously_diagonalizable(pair)) {
                    report.nondiag_pair = std::make_pair(idx[a], idx[b]);
                    break;
                }
            }
        }
    }
    return report;
}

} // namespace sls2
