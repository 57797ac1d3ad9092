#include "sls2/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sls2 {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double mean(const std::vector<double>& xs, std::size_t lo, std::size_t hi) { // [lo, hi)
    if (hi <= lo) return 0.0;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += xs[i];
    return s / double(hi - lo);
}

// Least-squares slope of ys against its index over [lo, hi).
double fitted_slope(const std::vector<double>& ys, std::size_t lo, std::size_t hi) {
    if (hi <= lo + 1) return 0.0;
    const double n = double(hi - lo);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
        const double x = double(i);
        sx += x;
        sy += ys[i];
        sxx += x * x;
        sxy += x * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

} // namespace

Trajectory simulate(const MatrixSet& set, const SwitchingSequence& seq, const Vec2& v0,
                    std::int64_t steps) {
    Trajectory traj;
    traj.v0 = v0;
    traj.norms.reserve(std::size_t(steps) + 1);
    traj.log_norms.reserve(std::size_t(steps) + 1);

    Vec2 unit = v0;
    double log_norm = std::log(v0.norm());
    if (!(v0.norm() > 0.0)) {
        traj.died = true;
        log_norm = kNegInf;
    } else {
        unit = v0.normalized();
    }
    traj.norms.push_back(traj.died ? 0.0 : std::exp(log_norm));
    traj.log_norms.push_back(log_norm);

    for (std::int64_t n = 1; n <= steps; ++n) {
        if (!traj.died) {
            const int idx = seq.at(n);
            const Vec2 w = set.members[std::size_t(idx)] * unit;
            const double r = w.norm();
            if (r < 1e-300) {
                traj.died = true;
                log_norm = kNegInf;
            } else {
                log_norm += std::log(r);
                unit = w * (1.0 / r);
            }
        }
        traj.norms.push_back(traj.died ? 0.0 : std::exp(log_norm));
        traj.log_norms.push_back(log_norm);
    }

    traj.checkpoints = seq.checkpoints_up_to(steps);
    return traj;
}

GrowthReport classify_growth(const Trajectory& traj, const GrowthBands& bands) {
    GrowthReport rep;
    rep.died = traj.died;
    if (traj.died) {
        rep.verdict = Growth::Bounded;
        return rep;
    }

    const std::size_t steps = traj.log_norms.size() - 1;
    if (steps < 4) {
        rep.verdict = Growth::Undetermined;
        return rep;
    }

    // Total excursion over the full run (n >= 1).
    double lo = traj.log_norms[1], hi = traj.log_norms[1];
    for (std::size_t n = 1; n <= steps; ++n) {
        lo = std::min(lo, traj.log_norms[n]);
        hi = std::max(hi, traj.log_norms[n]);
    }
    rep.whole_ratio = std::exp(hi - lo);

    // Tail window and its half-to-half drift.
    const std::size_t wlo = std::max<std::size_t>(1, steps / 2);
    const std::size_t whi = steps + 1; // exclusive
    const std::size_t mid = wlo + (whi - wlo) / 2;
    rep.drift = mean(traj.log_norms, mid, whi) - mean(traj.log_norms, wlo, mid);

    if (hi - lo <= std::log(bands.growth_ratio_max) && std::abs(rep.drift) <= bands.drift_max) {
        rep.verdict = Growth::Bounded;
        rep.fitted_rate = fitted_slope(traj.log_norms, wlo, whi);
        return rep;
    }

    rep.fitted_rate = fitted_slope(traj.log_norms, wlo, whi);
    if (rep.fitted_rate <= -bands.rate_tol) {
        rep.verdict = Growth::Bounded; // decaying, hence bounded above
        return rep;
    }

    // Linear test on |v_n| / n, done in the log domain to dodge overflow.
    std::vector<double> per_step(traj.log_norms.size(), 0.0);
    for (std::size_t n = 1; n <= steps; ++n)
        per_step[n] = traj.log_norms[n] - std::log(double(n));
    double plo = per_step[wlo], phi = per_step[wlo];
    for (std::size_t n = wlo; n <= steps; ++n) {
        plo = std::min(plo, per_step[n]);
        phi = std::max(phi, per_step[n]);
    }
    rep.linear_ratio = std::exp(phi - plo);
    rep.linear_drift = mean(per_step, mid, whi) - mean(per_step, wlo, mid);
    if (phi - plo <= std::log(bands.linear_band_ratio) &&
        std::abs(rep.linear_drift) <= bands.drift_max) {
        rep.verdict = Growth::Linear;
        return rep;
    }

    if (rep.fitted_rate >= bands.rate_tol) {
        rep.verdict = Growth::Exponential;
        return rep;
    }

    rep.verdict = Growth::Undetermined;
    return rep;
}

CorollaryReport corollary_check(const MatrixSet& set, double rho_hat,
                                const EnumerationOptions& opts) {
    CorollaryReport rep;
    rep.rates = rate_sequence(set, opts);
    rep.rho_hat = rho_hat;

    const int depth = rep.rates.depth;
    rep.window_lo = std::max(4, depth / 4);
    rep.window_hi = depth;

    rep.plain.resize(std::size_t(depth), 0.0);
    rep.per_step.resize(std::size_t(depth), 0.0);
    const double log_rho = std::log(rho_hat);
    for (int n = 1; n <= depth; ++n) {
        const double bn = rep.rates.values[std::size_t(n - 1)];
        const double log_plain = std::log(bn) - double(n) * log_rho;
        rep.plain[std::size_t(n - 1)] = std::exp(log_plain);
        rep.per_step[std::size_t(n - 1)] = std::exp(log_plain - std::log(double(n)));
    }

    auto in_band = [&](const std::vector<double>& xs) {
        for (int n = rep.window_lo; n <= rep.window_hi; ++n) {
            const double x = xs[std::size_t(n - 1)];
            if (!(x >= rep.band_lo && x <= rep.band_hi)) return false;
        }
        return true;
    };
    rep.plain_in_band = in_band(rep.plain);
    rep.per_step_in_band = in_band(rep.per_step);

    if (rep.plain_in_band && rep.per_step_in_band) rep.verdict = NormalizedForm::Both;
    else if (rep.plain_in_band) rep.verdict = NormalizedForm::Plain;
    else if (rep.per_step_in_band) rep.verdict = NormalizedForm::PerStep;
    else rep.verdict = NormalizedForm::Neither;
    return rep;
}

} // namespace sls2
