#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "nfsar/errors.hpp"

namespace nfsar {

inline constexpr double speed_of_light = 299792458.0;  // m/s

using Complex = std::complex<double>;

// FMCW chirp description. num_k is the number of wavenumber samples retained
// per chirp; the swept band is [f0, f0 + bandwidth].
struct RadarParams {
    double f0 = 0.0;              // start frequency, Hz
    double bandwidth = 0.0;       // swept bandwidth, Hz
    double chirp_duration = 0.0;  // sweep length, s
    std::size_t num_k = 0;        // wavenumber samples per chirp

    double chirp_rate() const { return bandwidth / chirp_duration; }       // Hz/s
    double center_frequency() const { return f0 + 0.5 * bandwidth; }       // Hz

    void validate() const {
        detail::require(std::isfinite(f0) && f0 > 0.0,
                        "RadarParams: f0 must be finite and positive");
        detail::require(std::isfinite(bandwidth) && bandwidth > 0.0,
                        "RadarParams: bandwidth must be finite and positive");
        detail::require(std::isfinite(chirp_duration) && chirp_duration > 0.0,
                        "RadarParams: chirp_duration must be finite and positive");
        detail::require(num_k >= 1, "RadarParams: num_k must be at least 1");
    }
};

// Round-trip wavenumbers 2*pi*f/c for the retained frequency samples,
// strictly ascending. A single-sample grid sits at the start frequency.
struct WavenumberGrid {
    std::vector<double> values;  // rad/m

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

inline WavenumberGrid build_wavenumber_grid(const RadarParams& radar) {
    radar.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    WavenumberGrid grid;
    grid.values.resize(radar.num_k);
    if (radar.num_k == 1) {
        grid.values[0] = two_pi * radar.f0 / speed_of_light;
        return grid;
    }
    const double df = radar.bandwidth / static_cast<double>(radar.num_k - 1);
    for (std::size_t i = 0; i < radar.num_k; ++i) {
        grid.values[i] = two_pi * (radar.f0 + static_cast<double>(i) * df) / speed_of_light;
    }
    return grid;
}

// Planar measurement lattice at z = 0. Node (ix, iy) sits at
// (x0 + ix*dx, y0 + iy*dy); x0/y0 are corner coordinates, not the center.
struct ApertureGrid {
    std::size_t nx = 0;  // samples along x
    std::size_t ny = 0;  // samples along y
    double dx = 0.0;     // m
    double dy = 0.0;     // m
    double x0 = 0.0;     // m, coordinate of ix = 0
    double y0 = 0.0;     // m, coordinate of iy = 0

    std::size_t sample_count() const { return nx * ny; }
    double x_extent() const { return static_cast<double>(nx) * dx; }
    double y_extent() const { return static_cast<double>(ny) * dy; }

    double x_at(std::size_t ix) const { return x0 + static_cast<double>(ix) * dx; }
    double y_at(std::size_t iy) const { return y0 + static_cast<double>(iy) * dy; }

    std::pair<double, double> coordinate(std::size_t ix, std::size_t iy) const {
        detail::require(ix < nx && iy < ny, "ApertureGrid: node index out of range");
        return {x_at(ix), y_at(iy)};
    }

    void validate() const {
        detail::require(nx >= 1 && ny >= 1, "ApertureGrid: nx and ny must be at least 1");
        detail::require(std::isfinite(dx) && dx > 0.0,
                        "ApertureGrid: dx must be finite and positive");
        detail::require(std::isfinite(dy) && dy > 0.0,
                        "ApertureGrid: dy must be finite and positive");
        detail::require(std::isfinite(x0) && std::isfinite(y0),
                        "ApertureGrid: x0 and y0 must be finite");
    }
};

// Ideal point target in front of the aperture plane (z > 0), with a complex
// reflectivity that scales and phase-shifts the echo.
struct PointScatterer {
    double x = 0.0;           // m
    double y = 0.0;           // m
    double z = 0.0;           // m, must be positive
    Complex reflectivity{0.0, 0.0};

    void validate() const {
        detail::require(std::isfinite(x) && std::isfinite(y),
                        "PointScatterer: position must be finite");
        detail::require(std::isfinite(z) && z > 0.0,
                        "PointScatterer: z must be finite and positive");
        detail::require(std::isfinite(reflectivity.real()) && std::isfinite(reflectivity.imag()),
                        "PointScatterer: reflectivity must be finite");
    }
};

struct Scene {
    std::vector<PointScatterer> scatterers;

    void validate() const {
        for (const auto& s : scatterers) s.validate();
    }
};

// Beat-signal samples over (wavenumber, aperture y, aperture x), with ix the
// fastest axis. Slabs at fixed ik are contiguous.
struct SignalCube {
    RadarParams radar;
    ApertureGrid aperture;
    std::vector<Complex> samples;

    std::size_t index(std::size_t ik, std::size_t iy, std::size_t ix) const {
        return (ik * aperture.ny + iy) * aperture.nx + ix;
    }
    Complex& at(std::size_t ik, std::size_t iy, std::size_t ix) {
        return samples[index(ik, iy, ix)];
    }
    const Complex& at(std::size_t ik, std::size_t iy, std::size_t ix) const {
        return samples[index(ik, iy, ix)];
    }

    std::size_t expected_sample_count() const {
        return radar.num_k * aperture.ny * aperture.nx;
    }

    void validate() const {
        radar.validate();
        aperture.validate();
        detail::require(samples.size() == expected_sample_count(),
                        "SignalCube: sample buffer size does not match num_k*ny*nx");
    }
};

inline SignalCube make_zero_cube(const RadarParams& radar, const ApertureGrid& aperture) {
    radar.validate();
    aperture.validate();
    SignalCube cube;
    cube.radar = radar;
    cube.aperture = aperture;
    cube.samples.assign(radar.num_k * aperture.ny * aperture.nx, Complex{0.0, 0.0});
    return cube;
}

// 77 GHz automotive-band preset: 3.84 GHz sweep over 60 us, 64 wavenumber
// samples, 596 x 69 aperture at 0.5 mm x 2 mm pitch, centered on the origin.
inline std::pair<RadarParams, ApertureGrid> default_acquisition() {
    RadarParams radar;
    radar.f0 = 77.0e9;
    radar.bandwidth = 3.84e9;
    radar.chirp_duration = 60.0e-6;
    radar.num_k = 64;

    ApertureGrid aperture;
    aperture.nx = 596;
    aperture.ny = 69;
    aperture.dx = 0.5e-3;
    aperture.dy = 2.0e-3;
    aperture.x0 = -0.5 * static_cast<double>(aperture.nx - 1) * aperture.dx;
    aperture.y0 = -0.5 * static_cast<double>(aperture.ny - 1) * aperture.dy;
    return {radar, aperture};
}

}  // namespace nfsar
