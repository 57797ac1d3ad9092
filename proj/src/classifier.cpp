#include "sls2/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sls2/errors.hpp"

namespace sls2 {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

// Largest depth whose exact enumeration cost (layers two and deeper) fits the
// budget; mirrors the enumerator's own upfront accounting.
int feasible_depth(int members, int requested, std::size_t budget) {
    if (members <= 1) return requested;
    int depth = 1;
    std::size_t total = 0;
    std::size_t layer = std::size_t(members);
    for (int n = 2; n <= requested; ++n) {
        if (layer > budget / std::size_t(members)) break; // next layer alone overflows
        layer *= std::size_t(members);
        if (total > budget - layer) break;
        total += layer;
        depth = n;
    }
    return depth;
}

Vec2 orthocomplement(const Vec2& v) { return Vec2{-std::conj(v.x1), std::conj(v.x0)}; }

// Second basis vector for the triangular-coordinates bound: a shared
// eigendirection of the unit-determinant members independent from v1, or the
// orthocomplement when that subset is empty or scalar.
Vec2 second_basis_vector(const MatrixSet& set, const StructureReport& report, const Vec2& v1) {
    for (int idx : report.unit_det_indices) {
        const auto ed = eigen(set.members[std::size_t(idx)], set.tol);
        if (ed.scalar || !ed.diagonalizable || ed.vectors.size() < 2) continue;
        const Vec2 e0 = ed.vectors[0].normalized();
        const Vec2 e1 = ed.vectors[1].normalized();
        return std::abs(inner(e0, v1)) <= std::abs(inner(e1, v1)) ? e0 : e1;
    }
    return orthocomplement(v1);
}

} // namespace

std::string to_string(Regime r) {
    switch (r) {
    case Regime::ExponentiallyStable: return "ExponentiallyStable";
    case Regime::ExponentiallyUnstable: return "ExponentiallyUnstable";
    case Regime::MarginallyStable: return "MarginallyStable";
    case Regime::MarginallyUnstable: return "MarginallyUnstable";
    case Regime::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

std::optional<double> structural_growth_rate(const MatrixSet& set,
                                             const StructureReport& report) {
    if (!report.common_eigenvector) return std::nullopt;
    double rho = 0.0;
    for (const Mat2& a : set.members) rho = std::max(rho, spectral_radius(a));
    return rho;
}

Verdict classify(const MatrixSet& set, const ClassifyOptions& opts) {
    if (set.size() == 0) throw Error("classify: the set has no members");

    Verdict v;
    v.structure = analyze(set);

    if (const auto rho = structural_growth_rate(set, v.structure)) {
        // Shared eigenvector: every member is upper-triangular in one unitary
        // basis, so the joint growth rate equals the largest member eigenvalue
        // modulus and the bracket is exact.
        v.structural_rho = *rho;
        v.jsr.lower = *rho;
        v.jsr.upper = *rho;
        v.jsr.depth = 0;
        v.jsr.exact = true;
        v.margins["structural_rho"] = fmt(*rho);

        if (*rho < 1.0 - opts.structural_band) {
            v.regime = Regime::ExponentiallyStable;
            v.margins["stability_margin"] = fmt(1.0 - *rho);
            return v;
        }
        if (*rho > 1.0 + opts.structural_band) {
            v.regime = Regime::ExponentiallyUnstable;
            v.margins["instability_margin"] = fmt(*rho - 1.0);
            return v;
        }

        const Vec2 v1 = v.structure.common_eigenvector->normalized();
        if (v.structure.jordan_member || v.structure.nondiag_pair) {
            // The unit-determinant members do not diagonalize together, so the
            // set escapes linearly; produce the trajectory and the matching
            // upper ceiling.
            try {
                v.witness = build_escape_witness(set, v.structure, opts.escape);
                const auto tri = triangularize_in_basis(set.members, v1, set.tol);
                v.ceiling = linear_ceiling(MatrixSet{tri, set.tol});
                v.regime = Regime::MarginallyUnstable;
                v.margins["ceiling_slope"] = fmt(v.ceiling->slope);
                if (v.structure.jordan_member && v.structure.nondiag_pair)
                    v.margins["witness_choice"] =
                        "defective member preferred over non-commuting pair";
            } catch (const Error& e) {
                v.regime = Regime::Inconclusive;
                v.margins["witness_failure"] = e.what();
            }
            return v;
        }

        // Unit-determinant members diagonalize together: bounded products,
        // with the bound certified in the (v1, v2) coordinates.
        try {
            const Vec2 v2 = second_basis_vector(set, v.structure, v1);
            const Mat2 basis{v1.x0, v2.x0, v1.x1, v2.x1};
            const Mat2 basis_inv = basis.inverse();
            const double cond = operator_norm(basis) * operator_norm(basis_inv);

            std::vector<Mat2> tri;
            tri.reserve(set.members.size());
            for (const Mat2& a : set.members) {
                Mat2 b = basis_inv * a * basis;
                const double guard = set.tol.rel * std::max(1.0, max_abs_entry(b) * cond);
                if (std::abs(b.m10) > guard)
                    throw HypothesisViolated(
                        "chosen basis does not make every member upper-triangular");
                b.m10 = cplx(0.0);
                tri.push_back(b);
            }
            v.bdd = bdd_certificate(MatrixSet{tri, set.tol});
            v.bdd->basis_note = "columns of the reported basis matrix";
            v.bdd_basis = basis;
            v.regime = Regime::MarginallyStable;
            v.margins["bdd_bound"] = fmt(v.bdd->bound);
            v.margins["basis_conditioning"] = fmt(cond);
            v.margins["bdd_bound_original_coords"] = fmt(v.bdd->bound * cond);
        } catch (const Error& e) {
            v.regime = Regime::Inconclusive;
            v.margins["bdd_failure"] = e.what();
        }
        return v;
    }

    // No shared eigenvector: classify through the enumerated bracket.
    EnumerationOptions eo = opts.enum_opts;
    const int usable = feasible_depth(set.size(), eo.depth, eo.budget);
    if (usable < eo.depth) {
        v.margins["enumeration_depth_reduced"] =
            "requested " + std::to_string(eo.depth) + ", used " + std::to_string(usable);
        eo.depth = usable;
    }
    v.jsr = jsr_bounds(set, eo);
    v.margins["bracket"] = "[" + fmt(v.jsr.lower) + ", " + fmt(v.jsr.upper) + "]";

    if (v.jsr.upper < 1.0 - opts.band) {
        v.regime = Regime::ExponentiallyStable;
        v.margins["stability_margin"] = fmt(1.0 - v.jsr.upper);
        return v;
    }
    if (v.jsr.lower > 1.0 + opts.band) {
        v.regime = Regime::ExponentiallyUnstable;
        v.margins["instability_margin"] = fmt(v.jsr.lower - 1.0);
        return v;
    }

    const bool pinned = v.jsr.lower >= 1.0 - opts.band && v.jsr.upper <= 1.0 + opts.band;
    if (pinned || opts.assert_unit_jsr) {
        if (!pinned) v.margins["assert_unit_jsr"] = "bracket not pinned; caller asserted rate one";
        KappaOptions ko = opts.kappa;
        for (int attempt = 0; attempt <= opts.kappa_retries; ++attempt) {
            try {
                v.kappa = kappa_certificate(set, ko);
                break;
            } catch (const ResolutionTooCoarse& e) {
                if (attempt == opts.kappa_retries) {
                    v.margins["kappa_failure"] = e.what();
                    break;
                }
                ko.resolution *= 0.5;
            } catch (const Error& e) {
                v.margins["kappa_failure"] = e.what();
                break;
            }
        }
        if (v.kappa) {
            v.regime = Regime::MarginallyStable;
            v.margins["kappa_lower"] = fmt(v.kappa->kappa_lower);
            v.margins["kappa_bound"] = fmt(v.kappa->bound);
            v.margins["grid_resolution"] = fmt(v.kappa->grid_resolution);
        } else {
            v.regime = Regime::Inconclusive;
        }
        return v;
    }

    v.regime = Regime::Inconclusive;
    v.margins["note"] = "bracket straddles one wider than the band; deepen the enumeration or "
                        "pass the unit-rate assertion";
    return v;
}

} // namespace sls2
