#pragma once

#include <map>
#include <optional>
#include <string>

#include "sls2/certificates.hpp"
#include "sls2/escape.hpp"
#include "sls2/matrix_set.hpp"
#include "sls2/spectral.hpp"
#include "sls2/structure.hpp"

namespace sls2 {

enum class Regime {
    ExponentiallyStable,
    ExponentiallyUnstable,
    MarginallyStable,
    MarginallyUnstable,
    Inconclusive,
};

std::string to_string(Regime r);

struct ClassifyOptions {
    EnumerationOptions enum_opts{};
    double band = 1e-2;            // bracket band around one for enumerated bounds
    double structural_band = 1e-6; // band when the growth rate is known exactly
    KappaOptions kappa{};
    EscapeOptions escape{};
    bool assert_unit_jsr = false;  // caller vouches that the joint growth rate is one
    int kappa_retries = 2;         // halve the grid resolution this many times if too coarse
};

// Full classification result. Which optional fields are present depends on the
// regime: marginal stability carries either a grid certificate (kappa) or a
// triangular-coordinates bound (bdd + bdd_basis); marginal instability carries
// an escaping trajectory plus a linear ceiling. margins holds human-readable
// diagnostic numbers keyed by name.
struct Verdict {
    Regime regime = Regime::Inconclusive;
    JsrBounds jsr;
    StructureReport structure;
    std::optional<double> structural_rho; // exact joint growth rate, if certified
    std::optional<KappaCertificate> kappa;
    std::optional<BddCertificate> bdd;
    std::optional<Mat2> bdd_basis;        // columns: the basis in which bdd holds
    std::optional<EscapeWitness> witness;
    std::optional<LinearCeiling> ceiling;
    std::map<std::string, std::string> margins;
};

// When every member shares an eigenvector the joint growth rate equals the
// largest member eigenvalue modulus; returns nothing otherwise.
std::optional<double> structural_growth_rate(const MatrixSet& set, const StructureReport& report);

Verdict classify(const MatrixSet& set, const ClassifyOptions& opts = {});

} // namespace sls2
