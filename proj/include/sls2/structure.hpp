#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "sls2/matrix_set.hpp"

namespace sls2 {

struct RootOfUnityResult {
    bool is_root = false;
    int order = 0;     // smallest q with e^{i q angle} = 1, when is_root
    double margin = 0; // |e^{i q angle} - 1| at the accepted order, or the
                       // minimum over all candidate orders at rejection
};

// Smallest q in [1, q_max] with |e^{i q angle} - 1| <= tol.
RootOfUnityResult root_of_unity_order(double angle, int q_max = 4096, double tol = 1e-9);

struct StructureReport {
    std::optional<Vec2> common_eigenvector;
    std::vector<int> unit_det_indices;          // ||det A_j| - 1| <= tol
    bool unit_det_simdiag = true;               // of the unit-determinant subset
    std::optional<int> jordan_member;           // first defective unit-det member
    std::optional<std::pair<int, int>> nondiag_pair; // first non-commuting diagonalizable unit-det pair
    std::vector<std::array<double, 2>> eigen_angles; // per member, arguments in [0, 2pi)
    std::vector<double> det_modulus;            // per member, |det A_j|
};

// A unit vector that every member maps to a multiple of itself, if one
// exists. Scalar members accept any vector; candidates are taken from the
// first non-scalar member's eigenvectors in order, and the first one accepted
// by all other members wins. An all-scalar set yields e0.
std::optional<Vec2> common_eigenvector(const MatrixSet& set);

// Every member diagonalizable and all pairs commuting within
// tol * |A| * |B|. Empty sets qualify.
bool is_simultaneously_diagonalizable(const MatrixSet& set);

StructureReport analyze(const MatrixSet& set);

} // namespace sls2
