#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sls2 {

// Base class for all contract violations raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The supplied vector is not an eigenvector of every member.
struct NotCommonEigenvector : Error {
    using Error::Error;
};

// Exhaustive word enumeration would exceed the configured multiplication budget.
struct WorkBudgetExceeded : Error {
    std::size_t required = 0;
    std::size_t budget = 0;
    WorkBudgetExceeded(std::size_t required_, std::size_t budget_)
        : Error("word enumeration needs " + std::to_string(required_) +
                " matrix multiplications, budget is " + std::to_string(budget_)),
          required(required_), budget(budget_) {}
};

// The overlap certificate is refused because the set has a common eigenvector.
struct CommonEigenvectorExists : Error {
    using Error::Error;
};

// The grid was too coarse to certify a positive overlap lower bound.
struct ResolutionTooCoarse : Error {
    using Error::Error;
};

// A certificate's structural hypothesis does not hold for the given set.
struct HypothesisViolated : Error {
    using Error::Error;
};

// The designated member is not a defective (non-diagonalizable) unit-determinant matrix.
struct NotJordan : Error {
    using Error::Error;
};

// The pair degenerates under normalization (e.g. it is simultaneously diagonalizable).
struct DegeneratePair : Error {
    using Error::Error;
};

// The periodic construction requires both diagonal ratios to be roots of unity.
struct NotRootsOfUnity : Error {
    using Error::Error;
};

// The greedy angle search exceeded its iteration cap.
struct SearchCapExceeded : Error {
    using Error::Error;
};

// The derived pair built for the mixed case commutes, so the construction cannot proceed.
struct DerivedPairDegenerate : Error {
    using Error::Error;
};

// An escape witness was requested for a set that is not marginally unstable.
struct NotMarginallyUnstable : Error {
    using Error::Error;
};

// Input document malformed; `path` locates the offending field.
struct ParseError : Error {
    std::string path;
    ParseError(const std::string& path_, const std::string& what_)
        : Error(path_ + ": " + what_), path(path_) {}
};

} // namespace sls2
