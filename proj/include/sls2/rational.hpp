#pragma once

#include <cstdint>

namespace sls2 {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double error = 0.0; // |x - num/den|
};

// Best rational approximation of x with denominator at most max_den, computed
// from the continued fraction expansion (convergents and intermediate
// fractions). Deterministic for all finite x.
Rational best_rational(double x, std::int64_t max_den);

// True when x is within eps of some p/q with 1 <= q <= max_den. Used to screen
// angles (as fractions of a full turn) that are numerically indistinguishable
// from low-order rational multiples of pi.
bool near_rational(double x, std::int64_t max_den, double eps);

} // namespace sls2
