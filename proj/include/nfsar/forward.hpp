#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nfsar/errors.hpp"
#include "nfsar/geometry.hpp"

namespace nfsar {

// Beat-signal contribution of one scatterer observed from aperture node
// (x_a, y_a, 0): reflectivity * exp(-j*2*k*R) with R the one-way distance.
inline Complex point_response(double k, double x_a, double y_a, const PointScatterer& target) {
    detail::require(std::isfinite(k) && k > 0.0, "point_response: k must be finite and positive");
    detail::require(std::isfinite(x_a) && std::isfinite(y_a),
                    "point_response: aperture coordinates must be finite");
    target.validate();
    const double ex = x_a - target.x;
    const double ey = y_a - target.y;
    const double range = std::sqrt(ex * ex + ey * ey + target.z * target.z);
    return target.reflectivity * std::polar(1.0, -2.0 * k * range);
}

// Superposition of point responses over every (k, aperture node) pair.
// Sample order inside each accumulation follows scene order, so results are
// reproducible bit for bit regardless of thread count.
inline SignalCube simulate_cube(const RadarParams& radar, const ApertureGrid& aperture,
                                const Scene& scene) {
    scene.validate();
    SignalCube cube = make_zero_cube(radar, aperture);
    const WavenumberGrid k = build_wavenumber_grid(radar);

    std::vector<double> xs(aperture.nx), ys(aperture.ny);
    for (std::size_t ix = 0; ix < aperture.nx; ++ix) xs[ix] = aperture.x_at(ix);
    for (std::size_t iy = 0; iy < aperture.ny; ++iy) ys[iy] = aperture.y_at(iy);

    const std::int64_t rows = static_cast<std::int64_t>(radar.num_k * aperture.ny);
#pragma omp parallel for schedule(static)
    for (std::int64_t row = 0; row < rows; ++row) {
        const std::size_t ik = static_cast<std::size_t>(row) / aperture.ny;
        const std::size_t iy = static_cast<std::size_t>(row) % aperture.ny;
        const double kk = k[ik];
        Complex* out = cube.samples.data() + static_cast<std::size_t>(row) * aperture.nx;
        for (std::size_t ix = 0; ix < aperture.nx; ++ix) {
            Complex acc{0.0, 0.0};
            for (const auto& target : scene.scatterers) {
                const double ex = xs[ix] - target.x;
                const double ey = ys[iy] - target.y;
                const double range = std::sqrt(ex * ex + ey * ey + target.z * target.z);
                acc += target.reflectivity * std::polar(1.0, -2.0 * kk * range);
            }
            out[ix] = acc;
        }
    }
    return cube;
}

// Test utility, not part of the beat model: adds circular complex Gaussian
// noise with per-component deviation sigma. The draw sequence is fixed by the
// seed; exact values depend on the standard library's normal_distribution.
inline void add_complex_white_noise(SignalCube& cube, double sigma, std::uint64_t seed) {
    detail::require(std::isfinite(sigma) && sigma >= 0.0,
                    "add_complex_white_noise: sigma must be finite and non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& s : cube.samples) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        s += Complex{sigma * re, sigma * im};
    }
}

// Inputs for the start-stop (single-phase-center) approximation check.
struct MonostaticCheck {
    double d = 0.0;      // transmit/receive element separation, m
    double fc = 0.0;     // carrier frequency, Hz
    double range = 0.0;  // standoff distance, m
    double alpha = 0.25; // accepted fraction of a wavelength of path error

    void validate() const {
        detail::require(std::isfinite(d) && d > 0.0,
                        "MonostaticCheck: d must be finite and positive");
        detail::require(std::isfinite(fc) && fc > 0.0,
                        "MonostaticCheck: fc must be finite and positive");
        detail::require(std::isfinite(range) && range > 0.0,
                        "MonostaticCheck: range must be finite and positive");
        detail::require(std::isfinite(alpha) && alpha > 0.0,
                        "MonostaticCheck: alpha must be finite and positive");
    }
};

struct ValidityReport {
    double threshold = 0.0;  // largest separation that still passes, m
    double ratio = 0.0;      // d / threshold
    bool valid = false;      // strict: d < threshold
};

// A separated pair at distance d looks monostatic when the two-way path
// excess d^2/(4R) stays below alpha wavelengths, i.e. d < sqrt(4*alpha*lambda*R).
inline ValidityReport monostatic_validity(const MonostaticCheck& check) {
    check.validate();
    const double lambda = speed_of_light / check.fc;
    ValidityReport report;
    report.threshold = std::sqrt(4.0 * check.alpha * lambda * check.range);
    report.ratio = check.d / report.threshold;
    report.valid = check.d < report.threshold;
    return report;
}

// Far-field onset 2*D^2/lambda for the aperture diagonal D at carrier fc.
// Scenes closer than this are in the near field and need exact-range focusing.
inline double fresnel_distance(const ApertureGrid& aperture, double fc) {
    aperture.validate();
    detail::require(std::isfinite(fc) && fc > 0.0,
                    "fresnel_distance: fc must be finite and positive");
    detail::require(aperture.nx > 1 || aperture.ny > 1,
                    "fresnel_distance: aperture has no extent");
    const double diag = std::hypot(aperture.x_extent(), aperture.y_extent());
    const double lambda = speed_of_light / fc;
    return 2.0 * diag * diag / lambda;
}

struct NyquistReport {
    double limit = 0.0;  // largest admissible spacing, m (quarter of the shortest wavelength)
    bool x_ok = false;
    bool y_ok = false;
};

// Aperture sampling must stay at or below lambda_min/4 to keep the round-trip
// phase unambiguous over the full field of view.
inline NyquistReport nyquist_check(const ApertureGrid& aperture, const RadarParams& radar) {
    aperture.validate();
    radar.validate();
    const double f_max = radar.f0 + radar.bandwidth;
    const double lambda_min = speed_of_light / f_max;
    NyquistReport report;
    report.limit = 0.25 * lambda_min;
    report.x_ok = aperture.dx <= report.limit;
    report.y_ok = aperture.dy <= report.limit;
    return report;
}

}  // namespace nfsar
