#pragma once

#include <cstddef>
#include <vector>

#include "sls2/matrix_set.hpp"

namespace sls2 {

enum class Exec { Serial, Parallel };

struct EnumerationOptions {
    int depth = 12;
    std::size_t budget = 2'000'000; // matrix multiplications
    bool fast = false;              // prune words that cannot raise the lower bound
    Exec exec = Exec::Parallel;
};

// values[n-1] = b_n = max over words of length n of |A_{i_n} ... A_{i_1}|.
struct RateSequence {
    std::vector<double> values;
    int depth = 0;
    bool exact = true;
};

// lower = max over enumerated words of spectral_radius(P_w)^(1/|w|)
// upper = min over n <= depth of b_n^(1/n)
// witness_word holds the word attaining `lower`, in time order (sigma(1) first).
struct JsrBounds {
    double lower = 0.0;
    double upper = 0.0;
    int depth = 0;
    std::vector<int> witness_word;
    bool exact = true;
};

// Exhaustive breadth-first product enumeration. Layer n is built from layer
// n-1 by multiplying every member on the left, so word index digits (base N,
// most significant first) read off the switching sequence in time order.
// Throws WorkBudgetExceeded when the enumeration needs more multiplications
// than the budget allows (exact mode counts the full N^n layers up front).
RateSequence rate_sequence(const MatrixSet& set, const EnumerationOptions& opts = {});

JsrBounds jsr_bounds(const MatrixSet& set, const EnumerationOptions& opts = {});

// True when the enumeration bracket is consistent with joint spectral radius
// one: [lower, upper] meets [1-band, 1+band] and lower <= 1+band. Necessary,
// not sufficient; the classifier records how the gate was satisfied.
bool assert_unit_jsr(const MatrixSet& set, const EnumerationOptions& opts, double band,
                     JsrBounds* bounds_out = nullptr);

} // namespace sls2
