#include "sls2/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "sls2/errors.hpp"
#include "sls2/structure.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sls2 {

namespace {

constexpr double pi = 3.1415926535897932384626433832795;
constexpr double two_pi = 2.0 * pi;

// A unit vector in C^2 modulo phase is a point on a round sphere (chart:
// colatitude theta, azimuth az, representative (cos(theta/2),
// e^{i az} sin(theta/2)), first coordinate real nonnegative). Euclidean
// distance modulo phase between representatives is 2 sin(angle/4), at most
// half the great-circle angle, so a grid with great-circle covering radius
// `spacing` covers the quotient sphere within spacing/2.
Vec2 sphere_point(double theta, double az) {
    return {std::cos(0.5 * theta), std::polar(std::sin(0.5 * theta), az)};
}

// Latitude-ring grid with great-circle covering radius <= spacing: ring
// colatitudes are Delta/2, 3 Delta/2, ... with Delta <= spacing, and ring i
// carries ceil(2 pi sin(theta_i) / Delta) equally spaced azimuths, so any
// point is within Delta/2 of a ring and within Delta/2 along it.
std::vector<Vec2> quotient_sphere_grid(double spacing) {
    std::vector<Vec2> grid;
    int rings = static_cast<int>(std::ceil(pi / spacing));
    double delta = pi / rings;
    for (int i = 0; i < rings; ++i) {
        double theta = (i + 0.5) * delta;
        int slots = std::max(1, static_cast<int>(std::ceil(two_pi * std::sin(theta) / delta)));
        for (int k = 0; k < slots; ++k) {
            grid.push_back(sphere_point(theta, two_pi * k / slots));
        }
    }
    return grid;
}

double overlap_max(const std::vector<Mat2>& family, const Vec2& u, const Vec2& v) {
    double best = std::norm(inner(u, v)); // identity term
    for (const Mat2& x : family) {
        best = std::max(best, std::norm(inner(x * u, v)));
    }
    return std::sqrt(best);
}

struct GridMin {
    double value = 2.0;
    std::size_t u_index = 0;
    std::size_t v_index = 0;

    void consider(double f, std::size_t ui, std::size_t vi) {
        if (f < value || (f == value && (ui < u_index || (ui == u_index && vi < v_index)))) {
            value = f;
            u_index = ui;
            v_index = vi;
        }
    }
    void merge(const GridMin& o) { consider(o.value, o.u_index, o.v_index); }
};

// Scan min over all grid pairs of max_X |<X u, v>|. The inner max is grown
// term by term and abandoned as soon as it reaches the best minimum seen so
// far, which prunes almost every pair after one inner product.
GridMin scan_pairs(const std::vector<Mat2>& family, const std::vector<Vec2>& grid, Exec exec) {
    const std::size_t n = grid.size();
    GridMin global;

    auto scan_u = [&family, &grid, n](std::size_t ui, GridMin& local) {
        const Vec2& u = grid[ui];
        // Images of u under the identity and each member, best discriminator first.
        std::vector<Vec2> images;
        images.reserve(family.size() + 1);
        images.push_back(u);
        for (const Mat2& x : family) images.push_back(x * u);
        double cap_sq = local.value * local.value;
        for (std::size_t vi = 0; vi < n; ++vi) {
            const Vec2& v = grid[vi];
            double worst = 0.0;
            for (const Vec2& w : images) {
                worst = std::max(worst, std::norm(inner(w, v)));
                if (worst >= cap_sq) break;
            }
            if (worst < cap_sq) {
                local.consider(std::sqrt(worst), ui, vi);
                cap_sq = local.value * local.value;
            }
        }
    };

    if (exec == Exec::Serial) {
        for (std::size_t ui = 0; ui < n; ++ui) scan_u(ui, global);
        return global;
    }

#ifdef _OPENMP
#pragma omp parallel
    {
        GridMin local;
#pragma omp for schedule(static) nowait
        for (std::int64_t ui = 0; ui < static_cast<std::int64_t>(n); ++ui) {
            scan_u(static_cast<std::size_t>(ui), local);
        }
#pragma omp critical
        global.merge(local);
    }
#else
    for (std::size_t ui = 0; ui < n; ++ui) scan_u(ui, global);
#endif
    return global;
}

struct ChartPoint {
    double theta_u, az_u, theta_v, az_v;
};

double chart_value(const std::vector<Mat2>& family, const ChartPoint& p) {
    return overlap_max(family, sphere_point(p.theta_u, p.az_u), sphere_point(p.theta_v, p.az_v));
}

// Compass search in the four chart coordinates, shrinking the step until it
// is tiny relative to the grid spacing. Extra samples only sharpen the
// sampled minimum; the covering argument for the certified floor is
// unaffected.
ChartPoint refine_descent(const std::vector<Mat2>& family, ChartPoint p, double step,
                          double& value) {
    value = chart_value(family, p);
    int evals = 0;
    while (step > 1e-4 && evals < 400) {
        bool improved = false;
        ChartPoint best = p;
        double best_value = value;
        const double deltas[8][4] = {
            {step, 0, 0, 0}, {-step, 0, 0, 0}, {0, step, 0, 0}, {0, -step, 0, 0},
            {0, 0, step, 0}, {0, 0, -step, 0}, {0, 0, 0, step}, {0, 0, 0, -step}};
        for (const auto& d : deltas) {
            ChartPoint q{std::clamp(p.theta_u + d[0], 0.0, pi),
                         std::fmod(p.az_u + d[1] + two_pi, two_pi),
                         std::clamp(p.theta_v + d[2], 0.0, pi),
                         std::fmod(p.az_v + d[3] + two_pi, two_pi)};
            double f = chart_value(family, q);
            ++evals;
            if (f < best_value) {
                best_value = f;
                best = q;
                improved = true;
            }
        }
        if (improved) {
            p = best;
            value = best_value;
        } else {
            step *= 0.5;
        }
    }
    return p;
}

void require_upper_triangular(const MatrixSet& set, const char* who) {
    for (std::size_t j = 0; j < set.members.size(); ++j) {
        if (std::abs(set.members[j].m10) > set.tol.for_matrix(set.members[j])) {
            throw HypothesisViolated(std::string(who) + ": member " + std::to_string(j) +
                                     " is not upper triangular");
        }
    }
}

void require_contractive_diagonal(const MatrixSet& set, const char* who) {
    for (std::size_t j = 0; j < set.members.size(); ++j) {
        const Mat2& a = set.members[j];
        if (std::abs(a.m00) > 1.0 + set.tol.rel || std::abs(a.m11) > 1.0 + set.tol.rel) {
            throw HypothesisViolated(std::string(who) + ": member " + std::to_string(j) +
                                     " has a diagonal modulus above one");
        }
    }
}

} // namespace

KappaCertificate kappa_certificate(const MatrixSet& set, const KappaOptions& opts) {
    if (set.members.empty()) throw CommonEigenvectorExists("empty set: every vector is common");
    if (common_eigenvector(set)) {
        throw CommonEigenvectorExists("the set has a common eigenvector, the floor is zero");
    }
    if (!(opts.resolution > 0.0)) throw ResolutionTooCoarse("resolution must be positive");

    // Per-sphere covering radius (Euclidean, modulo phase) is resolution/2,
    // so any (u, v) has a grid pair within `resolution` in the summed metric.
    std::vector<Vec2> grid = quotient_sphere_grid(opts.resolution);
    GridMin grid_min = scan_pairs(set.members, grid, opts.exec);

    KappaCertificate cert;
    cert.grid_resolution = opts.resolution;
    cert.lipschitz = 1.0 + max_member_norm(set);
    cert.kappa_grid = grid_min.value;
    cert.argmin_u = grid[grid_min.u_index];
    cert.argmin_v = grid[grid_min.v_index];

    if (opts.refine) {
        const Vec2& u = cert.argmin_u;
        const Vec2& v = cert.argmin_v;
        ChartPoint start{2.0 * std::acos(std::clamp(std::abs(u.x0), 0.0, 1.0)), std::arg(u.x1),
                         2.0 * std::acos(std::clamp(std::abs(v.x0), 0.0, 1.0)), std::arg(v.x1)};
        if (start.az_u < 0) start.az_u += two_pi;
        if (start.az_v < 0) start.az_v += two_pi;
        double refined_value = 0.0;
        ChartPoint refined = refine_descent(set.members, start, opts.resolution, refined_value);
        if (refined_value < cert.kappa_grid) {
            cert.kappa_grid = refined_value;
            cert.argmin_u = sphere_point(refined.theta_u, refined.az_u);
            cert.argmin_v = sphere_point(refined.theta_v, refined.az_v);
        }
    }

    cert.kappa_lower = std::max(0.0, cert.kappa_grid - cert.lipschitz * opts.resolution);
    if (cert.kappa_lower <= 0.0) {
        throw ResolutionTooCoarse("sampled floor " + std::to_string(cert.kappa_grid) +
                                  " does not survive the Lipschitz correction at resolution " +
                                  std::to_string(opts.resolution));
    }
    cert.bound = max_member_norm(set) / cert.kappa_lower;
    return cert;
}

bool verify_bee(const MatrixSet& set, double kappa, int trials, std::uint64_t seed, double tol) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_matrix = [&]() {
        return Mat2{{gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)},
                    {gauss(rng), gauss(rng)}, {gauss(rng), gauss(rng)}};
    };
    for (int t = 0; t < trials; ++t) {
        Mat2 b1 = random_matrix();
        Mat2 b2 = random_matrix();
        double best = operator_norm(b1 * b2); // identity term
        for (const Mat2& x : set.members) {
            best = std::max(best, operator_norm(b1 * x * b2));
        }
        double floor = kappa * operator_norm(b1) * operator_norm(b2);
        if (best < floor - tol * std::max(1.0, floor)) return false;
    }
    return true;
}

BddCertificate bdd_certificate(const MatrixSet& tri_set) {
    require_upper_triangular(tri_set, "bdd_certificate");
    require_contractive_diagonal(tri_set, "bdd_certificate");

    BddCertificate cert;
    cert.basis_note = "as-given upper-triangular coordinates";
    bool any_non_diagonal = false;
    double lambda = 0.0;
    for (std::size_t j = 0; j < tri_set.members.size(); ++j) {
        const Mat2& a = tri_set.members[j];
        double off = std::abs(a.m01);
        cert.bound_m = std::max(cert.bound_m, off);
        if (off <= tri_set.tol.for_matrix(a)) continue; // diagonal member
        any_non_diagonal = true;
        double smaller_diag = std::min(std::abs(a.m00), std::abs(a.m11));
        if (smaller_diag >= 1.0 - tri_set.tol.rel) {
            throw HypothesisViolated("bdd_certificate: member " + std::to_string(j) +
                                     " is non-diagonal with both diagonal moduli at one");
        }
        lambda = std::max(lambda, smaller_diag);
    }
    cert.lambda = any_non_diagonal ? lambda : 0.5;
    cert.bound = 1.0 + 2.0 * cert.bound_m / (1.0 - cert.lambda);
    return cert;
}

LinearCeiling linear_ceiling(const MatrixSet& tri_set) {
    require_upper_triangular(tri_set, "linear_ceiling");
    require_contractive_diagonal(tri_set, "linear_ceiling");
    return LinearCeiling{max_member_norm(tri_set)};
}

} // namespace sls2
