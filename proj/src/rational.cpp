#include "sls2/rational.hpp"

#include <cmath>
#include <cstdlib>

namespace sls2 {

Rational best_rational(double x, std::int64_t max_den) {
    // Walk the continued fraction of x, keeping the usual convergent
    // recurrence p_k = a_k p_{k-1} + p_{k-2} (same for q). When the next
    // convergent's denominator would overshoot max_den, clamp the last
    // partial quotient to the largest admissible semiconvergent.
    double frac = x;
    std::int64_t p_prev = 0, q_prev = 1; // convergent k-2
    std::int64_t p_cur = 1, q_cur = 0;   // convergent k-1 (before first step)
    Rational best{0, 1, std::abs(x)};

    for (int iter = 0; iter < 64; ++iter) {
        double floor_f = std::floor(frac);
        if (floor_f > 9e18 || floor_f < -9e18) break;
        std::int64_t a = static_cast<std::int64_t>(floor_f);

        std::int64_t q_next = a * q_cur + q_prev;
        if (q_next > max_den || q_next < 0) {
            // Largest t with t*q_cur + q_prev <= max_den gives the best
            // semiconvergent on this side.
            if (q_cur > 0) {
                std::int64_t t = (max_den - q_prev) / q_cur;
                if (t > 0) {
                    std::int64_t p_semi = t * p_cur + p_prev;
                    std::int64_t q_semi = t * q_cur + q_prev;
                    double err = std::abs(x - double(p_semi) / double(q_semi));
                    if (err < best.error) best = {p_semi, q_semi, err};
                }
            }
            break;
        }

        std::int64_t p_next = a * p_cur + p_prev;
        p_prev = p_cur; q_prev = q_cur;
        p_cur = p_next; q_cur = q_next;

        double err = std::abs(x - double(p_cur) / double(q_cur));
        if (q_cur >= 1 && err < best.error) best = {p_cur, q_cur, err};
        if (err == 0.0) break;

        double rem = frac - double(a);
        if (rem <= 0.0) break;
        frac = 1.0 / rem;
        if (!std::isfinite(frac)) break;
    }
    return best;
}

bool near_rational(double x, std::int64_t max_den, double eps) {
    return best_rational(x, max_den).error <= eps;
}

} // namespace sls2
