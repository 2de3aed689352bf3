#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "nfsar/errors.hpp"
#include "nfsar/fft.hpp"
#include "nfsar/geometry.hpp"

namespace nfsar {

// Aperture taper applied before the spatial transform. "cosine" is a raised
// cosine over each unpadded axis; a length-1 axis gets weight 1.
enum class Window { none, cosine };

inline std::vector<double> window_weights(Window window, std::size_t n) {
    detail::require(n >= 1, "window_weights: empty axis");
    std::vector<double> w(n, 1.0);
    if (window == Window::cosine && n > 1) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) /
                                        static_cast<double>(n - 1));
        }
    }
    return w;
}

// Angular frequency axis of an n-point DFT over spacing d, in transform bin
// order: bin i carries 2*pi*m/(n*d) with m = i for i <= (n-1)/2 and m = i - n
// past the midpoint. Even n leaves one unpaired bin at -pi/d.
inline std::vector<double> fourier_axis(std::size_t n, double spacing) {
    detail::require(n >= 1, "fourier_axis: n must be at least 1");
    detail::require(std::isfinite(spacing) && spacing > 0.0,
                    "fourier_axis: spacing must be finite and positive");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> axis(n);
    const double step = two_pi / (static_cast<double>(n) * spacing);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = (i <= (n - 1) / 2)
                             ? static_cast<double>(i)
                             : static_cast<double>(i) - static_cast<double>(n);
        axis[i] = step * m;
    }
    return axis;
}

// Per-wavenumber 2D spatial spectra of a signal cube. Slab ik holds the
// unnormalized forward DFT of that wavenumber's aperture samples, zero padded
// to pad_factor times the aperture in each direction. kx is the fastest axis.
struct SpectrumCube {
    RadarParams radar;
    ApertureGrid aperture;       // unpadded sampling lattice
    std::size_t pad_factor = 1;
    WavenumberGrid k;            // ascending, one entry per slab
    std::vector<double> kx_axis; // rad/m, bin order, size nx_pad()
    std::vector<double> ky_axis; // rad/m, bin order, size ny_pad()
    std::vector<Complex> samples;

    std::size_t nx_pad() const { return aperture.nx * pad_factor; }
    std::size_t ny_pad() const { return aperture.ny * pad_factor; }

    std::size_t index(std::size_t ik, std::size_t iky, std::size_t ikx) const {
        return (ik * ny_pad() + iky) * nx_pad() + ikx;
    }
    Complex& at(std::size_t ik, std::size_t iky, std::size_t ikx) {
        return samples[index(ik, iky, ikx)];
    }
    const Complex& at(std::size_t ik, std::size_t iky, std::size_t ikx) const {
        return samples[index(ik, iky, ikx)];
    }
};

// Forward spatial transform of every wavenumber slab. Aperture samples keep
// their grid indices inside the padded block; padding appends zeros. The DFT
// kernel is exp(-j(kx*x + ky*y)) with no normalization.
inline SpectrumCube spatial_fft2(const SignalCube& cube, std::size_t pad_factor,
                                 Window window = Window::none) {
    cube.validate();
    detail::require(pad_factor >= 1, "spatial_fft2: pad_factor must be at least 1");

    SpectrumCube spec;
    spec.radar = cube.radar;
    spec.aperture = cube.aperture;
    spec.pad_factor = pad_factor;
    spec.k = build_wavenumber_grid(cube.radar);
    const std::size_t nxp = spec.nx_pad();
    const std::size_t nyp = spec.ny_pad();
    spec.kx_axis = fourier_axis(nxp, cube.aperture.dx);
    spec.ky_axis = fourier_axis(nyp, cube.aperture.dy);
    spec.samples.assign(cube.radar.num_k * nyp * nxp, Complex{0.0, 0.0});

    const std::vector<double> wx = window_weights(window, cube.aperture.nx);
    const std::vector<double> wy = window_weights(window, cube.aperture.ny);

    for (std::size_t ik = 0; ik < cube.radar.num_k; ++ik) {
        Complex* slab = spec.samples.data() + ik * nyp * nxp;
        for (std::size_t iy = 0; iy < cube.aperture.ny; ++iy) {
            const Complex* src = cube.samples.data() + cube.index(ik, iy, 0);
            Complex* dst = slab + iy * nxp;
            for (std::size_t ix = 0; ix < cube.aperture.nx; ++ix) {
                dst[ix] = src[ix] * (wy[iy] * wx[ix]);
            }
        }
        detail::dft2_unscaled(slab, nyp, nxp, FFTW_FORWARD);
    }
    return spec;
}

// Inverse spatial transform of one slab: kernel exp(+j(kx*x + ky*y)) scaled
// by 1/(ny*nx), the exact inverse of the forward transform above.
inline std::vector<Complex> spatial_ifft2(std::span<const Complex> slab, std::size_t ny,
                                          std::size_t nx) {
    detail::require(ny >= 1 && nx >= 1, "spatial_ifft2: empty slab");
    detail::require(slab.size() == ny * nx,
                    "spatial_ifft2: slab size does not match ny*nx");
    std::vector<Complex> out(slab.begin(), slab.end());
    detail::dft2_unscaled(out.data(), ny, nx, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(ny * nx);
    for (auto& v : out) v *= scale;
    return out;
}

// Out-of-plane wavenumber sqrt(4k^2 - kx^2 - ky^2) of a 2D spectral bin.
// Bins on or outside the circle kx^2 + ky^2 = 4k^2 carry no propagating
// energy and return nothing. On axis the result is exactly 2k.
inline std::optional<double> dispersion_kz(double k, double kx, double ky) {
    detail::require(std::isfinite(k) && k > 0.0, "dispersion_kz: k must be finite and positive");
    detail::require(std::isfinite(kx) && std::isfinite(ky),
                    "dispersion_kz: kx and ky must be finite");
    const double two_k = 2.0 * k;
    const double t = two_k * two_k - (kx * kx + ky * ky);
    if (t <= 0.0) return std::nullopt;
    return std::sqrt(t);
}

}  // namespace nfsar
