#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace sls2 {

using cplx = std::complex<double>;

struct Vec2 {
    cplx x0{};
    cplx x1{};

    Vec2() = default;
    Vec2(cplx a, cplx b) : x0(a), x1(b) {}

    Vec2 operator+(const Vec2& o) const { return {x0 + o.x0, x1 + o.x1}; }
    Vec2 operator-(const Vec2& o) const { return {x0 - o.x0, x1 - o.x1}; }
    Vec2 operator*(cplx s) const { return {x0 * s, x1 * s}; }

    double norm_sq() const { return std::norm(x0) + std::norm(x1); }
    double norm() const { return std::sqrt(norm_sq()); }
    Vec2 normalized() const {
        double n = norm();
        return n > 0 ? Vec2{x0 / n, x1 / n} : Vec2{};
    }
};

// <a, b> = b* a, linear in the first argument.
inline cplx inner(const Vec2& a, const Vec2& b) {
    return a.x0 * std::conj(b.x0) + a.x1 * std::conj(b.x1);
}

// Row-major 2x2 complex matrix.
struct Mat2 {
    cplx m00{}, m01{}, m10{}, m11{};

    Mat2() = default;
    Mat2(cplx a, cplx b, cplx c, cplx d) : m00(a), m01(b), m10(c), m11(d) {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(cplx a, cplx d) { return {a, 0.0, 0.0, d}; }

    Mat2 operator+(const Mat2& o) const { return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11}; }
    Mat2 operator-(const Mat2& o) const { return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11}; }
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    Mat2 operator*(cplx s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
    Vec2 operator*(const Vec2& v) const {
        return {m00 * v.x0 + m01 * v.x1, m10 * v.x0 + m11 * v.x1};
    }

    Mat2 adjoint() const {
        return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
    }
    cplx trace() const { return m00 + m11; }
    cplx det() const { return m00 * m11 - m01 * m10; }
    Mat2 inverse() const {
        cplx d = det();
        return {m11 / d, -m01 / d, -m10 / d, m00 / d};
    }
};

inline double frobenius_sq(const Mat2& a) {
    return std::norm(a.m00) + std::norm(a.m01) + std::norm(a.m10) + std::norm(a.m11);
}

inline double max_abs_entry(const Mat2& a) {
    return std::max(std::max(std::abs(a.m00), std::abs(a.m01)),
                    std::max(std::abs(a.m10), std::abs(a.m11)));
}

// Largest singular value. The squared singular values are the eigenvalues of
// the Hermitian Gram matrix G = A*A = [[p, q], [conj(q), r]], and
//   s_max^2 = (p + r)/2 + sqrt(((p - r)/2)^2 + |q|^2).
// The discriminant is a sum of squares, so near-unitary inputs keep full
// precision (the trace/determinant form loses half the digits there).
inline double operator_norm(const Mat2& a) {
    double p = std::norm(a.m00) + std::norm(a.m10);
    double r = std::norm(a.m01) + std::norm(a.m11);
    cplx q = std::conj(a.m00) * a.m01 + std::conj(a.m10) * a.m11;
    double h = 0.5 * (p - r);
    return std::sqrt(0.5 * (p + r) + std::hypot(h, std::abs(q)));
}

// Operator norm of an upper triangular matrix [[a, b], [0, c]] in closed form:
//   |A|^2 = (|a|^2+|b|^2+|c|^2)/2 + sqrt((|a|^2-|c|^2)^2 + |b|^2 (2|a|^2+|b|^2+2|c|^2))/2.
// Depends only on entry moduli, and is strictly increasing in |b|.
inline double triangular_norm(const Mat2& a) {
    double p = std::norm(a.m00);
    double q = std::norm(a.m01);
    double r = std::norm(a.m11);
    double root = std::sqrt((p - r) * (p - r) + q * (2.0 * p + q + 2.0 * r));
    return std::sqrt(0.5 * (p + q + r) + 0.5 * root);
}

// Entrywise absolute values (moduli).
inline Mat2 entrywise_abs(const Mat2& a) {
    return {std::abs(a.m00), std::abs(a.m01), std::abs(a.m10), std::abs(a.m11)};
}

// Both eigenvalues, largest modulus first (ties broken by argument).
std::array<cplx, 2> eigenvalues(const Mat2& a);

inline double spectral_radius(const Mat2& a) {
    return std::abs(eigenvalues(a)[0]);
}

// Relative tolerance scaled by max(1, |A|); every structural decision in the
// library goes through this policy.
struct Tolerance {
    double rel = 1e-9;
    double scaled(double scale) const { return rel * std::max(1.0, scale); }
    double for_matrix(const Mat2& a) const { return scaled(operator_norm(a)); }
};

struct EigenData {
    std::array<cplx, 2> values{};
    std::vector<Vec2> vectors;   // unit, same order as values; one entry if defective
    bool diagonalizable = true;
    bool scalar = false;
};

// Eigenvalues by the stabilized quadratic formula; eigenvectors from the
// adjugate of A - lambda I (larger-norm column, first column on ties).
// Equal eigenvalues (within tol.scaled(max(1,|A|))) with a nonzero residual
// matrix mark the matrix as defective; a vanishing residual marks it scalar.
EigenData eigen(const Mat2& a, Tolerance tol = {});

// Unitary whose first column is u1 (normalized); second column is the
// canonical orthogonal complement (-conj(u1.x1), conj(u1.x0)).
Mat2 unitary_from_first_column(const Vec2& u1);

// Conjugate every member by the unitary sending e0 to v1's direction, check
// the results are upper triangular (lower-left at most tol * max(1, |A|)),
// and zero the lower-left entry. Throws NotCommonEigenvector otherwise.
std::vector<Mat2> triangularize_in_basis(const std::vector<Mat2>& members, const Vec2& v1,
                                         Tolerance tol = {});

} // namespace sls2
