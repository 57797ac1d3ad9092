#include "sls2/mat2.hpp"

#include <algorithm>

#include "sls2/errors.hpp"

namespace sls2 {

namespace {

// Rotate a unit vector's phase so its first component above the noise floor
// is real and nonnegative. Keeps eigenvector reporting deterministic.
Vec2 canonical_phase(const Vec2& v) {
    double a0 = std::abs(v.x0);
    double a1 = std::abs(v.x1);
    cplx lead = a0 >= 1e-12 * (a0 + a1) ? v.x0 : v.x1;
    double mag = std::abs(lead);
    if (mag == 0.0) return v;
    cplx rot = std::conj(lead) / mag;
    return {v.x0 * rot, v.x1 * rot};
}

} // namespace

std::array<cplx, 2> eigenvalues(const Mat2& a) {
    cplx tr = a.trace();
    cplx dt = a.det();
    // tr^2 - 4 det rewritten as (m00 - m11)^2 + 4 m01 m10: near-scalar inputs
    // then build the discriminant from small quantities instead of cancelling
    // two large ones, keeping the eigenvalues of normal matrices at full
    // precision.
    cplx gap = a.m00 - a.m11;
    cplx s = std::sqrt(gap * gap + 4.0 * a.m01 * a.m10);
    // Pick the sqrt branch aligned with the trace so tr + s does not cancel.
    if (std::real(std::conj(tr) * s) < 0.0) s = -s;
    cplx l0 = 0.5 * (tr + s);
    cplx l1 = std::abs(l0) > 0.0 ? dt / l0 : 0.5 * (tr - s);
    if (std::abs(l1) > std::abs(l0) ||
        (std::abs(l1) == std::abs(l0) && std::arg(l1) < std::arg(l0))) {
        std::swap(l0, l1);
    }
    return {l0, l1};
}

EigenData eigen(const Mat2& a, Tolerance tol) {
    EigenData out;
    out.values = eigenvalues(a);
    double eps = tol.for_matrix(a);

    auto vector_for = [&](cplx lambda) {
        // Columns of adj(A - lambda I) span the kernel of A - lambda I.
        Vec2 c0{a.m11 - lambda, -a.m10};
        Vec2 c1{-a.m01, a.m00 - lambda};
        Vec2 pick = c0.norm_sq() >= c1.norm_sq() ? c0 : c1;
        return canonical_phase(pick.normalized());
    };

    if (std::abs(out.values[0] - out.values[1]) > eps) {
        out.vectors = {vector_for(out.values[0]), vector_for(out.values[1])};
        return out;
    }

    cplx lambda = 0.5 * (out.values[0] + out.values[1]);
    Mat2 residual = a - Mat2::diag(lambda, lambda);
    if (max_abs_entry(residual) <= eps) {
        out.scalar = true;
        out.vectors = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}};
        return out;
    }

    // Defective: (A - lambda I)^2 = 0 by Cayley-Hamilton, so the columns of
    // the residual itself span the one-dimensional eigenspace.
    out.diagonalizable = false;
    Vec2 c0{residual.m00, residual.m10};
    Vec2 c1{residual.m01, residual.m11};
    Vec2 pick = c0.norm_sq() >= c1.norm_sq() ? c0 : c1;
    out.vectors = {canonical_phase(pick.normalized())};
    return out;
}

Mat2 unitary_from_first_column(const Vec2& u1) {
    Vec2 u = u1.normalized();
    return {u.x0, -std::conj(u.x1), u.x1, std::conj(u.x0)};
}

std::vector<Mat2> triangularize_in_basis(const std::vector<Mat2>& members, const Vec2& v1,
                                         Tolerance tol) {
    Mat2 u = unitary_from_first_column(v1);
    Mat2 uh = u.adjoint();
    std::vector<Mat2> out;
    out.reserve(members.size());
    for (std::size_t j = 0; j < members.size(); ++j) {
        Mat2 t = uh * members[j] * u;
        if (std::abs(t.m10) > tol.for_matrix(members[j])) {
            throw NotCommonEigenvector("member " + std::to_string(j) +
                                       " is not triangular in the requested basis");
        }
        t.m10 = 0.0;
        out.push_back(t);
    }
    return out;
}

} // namespace sls2
