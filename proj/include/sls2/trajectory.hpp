#pragma once

#include <cstdint>
#include <vector>

#include "sls2/escape.hpp"
#include "sls2/matrix_set.hpp"
#include "sls2/spectral.hpp"

namespace sls2 {

// Norm history of one switched trajectory. Norms are tracked through a running
// log so long unstable runs never overflow: norms[n] = exp(log_norms[n]) and
// log_norms stays finite even when norms saturates to infinity.
struct Trajectory {
    Vec2 v0;
    std::vector<double> norms;      // norms[n] = |v_n|, n = 0..steps
    std::vector<double> log_norms;  // log_norms[n] = log |v_n|
    std::vector<std::int64_t> checkpoints; // construction-specific markers
    bool died = false;              // hit the zero vector (norms stay zero after)
};

Trajectory simulate(const MatrixSet& set, const SwitchingSequence& seq, const Vec2& v0,
                    std::int64_t steps);

enum class Growth { Bounded, Linear, Exponential, Undetermined };

// Decision thresholds for classify_growth. Ratios are multiplicative; drifts
// and rates live on the log scale.
struct GrowthBands {
    double growth_ratio_max = 1e3; // bounded: total excursion of |v_n|
    double drift_max = 0.2;        // bounded/linear: allowed tail drift in log units
    double linear_band_ratio = 1e3; // linear: excursion of |v_n| / n
    double rate_tol = 1e-4;        // exponential / decay threshold on the fitted rate
};

struct GrowthReport {
    Growth verdict = Growth::Undetermined;
    double fitted_rate = 0.0;   // least-squares slope of log |v_n| over the tail
    double whole_ratio = 1.0;   // max/min of |v_n| over the full run
    double drift = 0.0;         // tail half-to-half mean shift of log |v_n|
    double linear_ratio = 1.0;  // max/min of |v_n| / n over the tail
    double linear_drift = 0.0;  // tail half-to-half mean shift of log(|v_n| / n)
    bool died = false;
};

GrowthReport classify_growth(const Trajectory& traj, const GrowthBands& bands = {});

// Which normalization of the word-norm sequence b_n stays inside a fixed
// multiplicative band around one: b_n / rho^n (plain) or b_n / (n rho^n)
// (per-step). Exactly one of them should, depending on whether the set is
// marginally stable or marginally unstable at growth rate rho.
enum class NormalizedForm { Plain, PerStep, Both, Neither };

struct CorollaryReport {
    RateSequence rates;
    double rho_hat = 1.0;
    std::vector<double> plain;    // b_n / rho^n, n = 1..depth
    std::vector<double> per_step; // b_n / (n rho^n)
    int window_lo = 0;            // inclusive, in n
    int window_hi = 0;
    double band_lo = 0.1;
    double band_hi = 10.0;
    bool plain_in_band = false;
    bool per_step_in_band = false;
    NormalizedForm verdict = NormalizedForm::Neither;
};

// Enumerates word norms to opts.depth and reports which normalized form stays
// in the band over the window n in [max(4, depth/4), depth].
CorollaryReport corollary_check(const MatrixSet& set, double rho_hat,
                                const EnumerationOptions& opts = {});

} // namespace sls2
