#pragma once

#include <vector>

#include "sls2/mat2.hpp"

namespace sls2 {

// A finite set of 2x2 complex matrices driving the switching recursion
// v_{n+1} = A_{sigma(n+1)} v_n, together with the tolerance policy used for
// every structural decision about it.
struct MatrixSet {
    std::vector<Mat2> members;
    Tolerance tol{};

    int size() const { return static_cast<int>(members.size()); }
};

// max_j |A_j|; 0 for an empty set.
inline double max_member_norm(const MatrixSet& set) {
    double m = 0.0;
    for (const Mat2& a : set.members) m = std::max(m, operator_norm(a));
    return m;
}

} // namespace sls2
