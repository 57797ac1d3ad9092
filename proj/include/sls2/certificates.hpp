#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "sls2/matrix_set.hpp"
#include "sls2/spectral.hpp"

namespace sls2 {

// Certified positive floor for f(u, v) = max over X in {I} union set of
// |<X u, v>| on the product of the two phase-quotiented unit spheres.
// kappa_grid is the best sampled value, kappa_lower subtracts the Lipschitz
// correction L * resolution with L = 1 + max_j |A_j|, and bound is the
// resulting uniform product-norm bound kappa_lower^-1 * max_j |A_j|.
struct KappaCertificate {
    double kappa_lower = 0.0;
    double kappa_grid = 0.0;
    Vec2 argmin_u;
    Vec2 argmin_v;
    double bound = 0.0;
    double grid_resolution = 0.0;
    double lipschitz = 0.0;
};

struct KappaOptions {
    double resolution = 0.05;
    bool refine = true; // local descent from the best grid cell
    Exec exec = Exec::Parallel;
};

// Throws CommonEigenvectorExists when the floor is necessarily zero, and
// ResolutionTooCoarse when the Lipschitz correction swallows the sampled
// minimum (kappa_lower would be zero).
KappaCertificate kappa_certificate(const MatrixSet& set, const KappaOptions& opts = {});

// Spot-check of the two-sided product inequality
//   max over X of |B1 X B2| >= kappa * |B1| * |B2| - tol_abs
// on `trials` pseudorandom pairs. Returns false on the first violation.
bool verify_bee(const MatrixSet& set, double kappa, int trials, std::uint64_t seed = 20260817,
                double tol = 1e-9);

// Uniform product-norm bound 1 + 2M / (1 - lambda) for upper triangular sets
// whose diagonal moduli stay at or below one and whose non-diagonal members
// each have a diagonal entry bounded away from the unit circle.
struct BddCertificate {
    double lambda = 0.5; // largest of the non-diagonal members' smaller diagonal moduli
    double bound_m = 0.0;  // largest upper-right modulus across the set
    double bound = 1.0;
    std::string basis_note;
};

BddCertificate bdd_certificate(const MatrixSet& tri_set); // throws HypothesisViolated

// For upper triangular sets with diagonal moduli <= 1 + tol, every product of
// n members has norm at most 1 + n * slope with slope = max_j |A_j|.
struct LinearCeiling {
    double slope = 0.0;
    double at(std::int64_t n) const { return 1.0 + double(n) * slope; }
};

LinearCeiling linear_ceiling(const MatrixSet& tri_set); // throws HypothesisViolated

} // namespace sls2
