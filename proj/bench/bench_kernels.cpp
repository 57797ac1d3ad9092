// Times the parallel kernels against their serial reference implementations
// and checks that both produce identical results. Run with --smoke for the
// quick configuration used by the test suite.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sls2/certificates.hpp"
#include "sls2/spectral.hpp"

using namespace sls2;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

Mat2 rotation(double angle) {
    return {cplx(std::cos(angle)), cplx(-std::sin(angle)), cplx(std::sin(angle)),
            cplx(std::cos(angle))};
}

Mat2 phase_mix(double angle) {
    return {std::polar(1.0, angle), cplx(0.0), cplx(0.0), std::polar(1.0, -angle)};
}

} // namespace

int main(int argc, char** argv) {
    const bool smoke = argc > 1 && std::strcmp(argv[1], "--smoke") == 0;

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif

    // Three-member set without a common eigenvector; products stay unitary so
    // neither kernel can shortcut on norm collapse.
    MatrixSet set;
    set.members = {rotation(0.7), phase_mix(1.1), rotation(0.3) * phase_mix(0.5)};

    std::printf("%-22s %10s %12s %12s %9s %6s\n", "kernel", "size", "serial(ms)",
                "parallel(ms)", "speedup", "match");

    {
        EnumerationOptions eo;
        eo.depth = smoke ? 7 : 12;
        eo.budget = 10'000'000;

        JsrBounds serial_bounds, parallel_bounds;
        eo.exec = Exec::Serial;
        const double ts = time_ms([&] { serial_bounds = jsr_bounds(set, eo); });
        eo.exec = Exec::Parallel;
        const double tp = time_ms([&] { parallel_bounds = jsr_bounds(set, eo); });

        const bool match = serial_bounds.lower == parallel_bounds.lower &&
                           serial_bounds.upper == parallel_bounds.upper &&
                           serial_bounds.witness_word == parallel_bounds.witness_word;
        char size[32];
        std::snprintf(size, sizeof size, "3^%d", eo.depth);
        std::printf("%-22s %10s %12.2f %12.2f %8.2fx %6s\n", "word enumeration", size, ts, tp,
                    ts / tp, match ? "ok" : "MISMATCH");
        if (!match) return 1;
    }

    {
        KappaOptions ko;
        ko.resolution = smoke ? 0.1 : 0.03;
        ko.refine = false; // keep the comparison purely on the grid scan

        KappaCertificate serial_cert, parallel_cert;
        ko.exec = Exec::Serial;
        const double ts = time_ms([&] { serial_cert = kappa_certificate(set, ko); });
        ko.exec = Exec::Parallel;
        const double tp = time_ms([&] { parallel_cert = kappa_certificate(set, ko); });

        const bool match = serial_cert.kappa_grid == parallel_cert.kappa_grid &&
                           serial_cert.kappa_lower == parallel_cert.kappa_lower;
        char size[32];
        std::snprintf(size, sizeof size, "res %.3g", ko.resolution);
        std::printf("%-22s %10s %12.2f %12.2f %8.2fx %6s\n", "overlap grid scan", size, ts, tp,
                    ts / tp, match ? "ok" : "MISMATCH");
        if (!match) return 1;
    }

    return 0;
}
