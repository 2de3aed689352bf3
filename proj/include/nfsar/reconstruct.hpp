#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "nfsar/errors.hpp"
#include "nfsar/geometry.hpp"
#include "nfsar/spectral.hpp"

namespace nfsar {

struct PixelIndex {
    std::size_t iy = 0;
    std::size_t ix = 0;
};

// Complex reflectivity estimate on one depth plane. Pixel (iy, ix) sits at
// (origin_x + ix*dx, origin_y + iy*dy, z_d); rows are stored ix-fastest.
// The aperture center maps to pixel (ny/2, nx/2).
struct ComplexImage {
    std::size_t nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    double origin_x = 0.0, origin_y = 0.0;  // coordinate of pixel (0, 0)
    double z_d = 0.0;
    std::vector<Complex> values;

    Complex& at(std::size_t iy, std::size_t ix) { return values[iy * nx + ix]; }
    const Complex& at(std::size_t iy, std::size_t ix) const { return values[iy * nx + ix]; }

    double x_at(std::size_t ix) const { return origin_x + static_cast<double>(ix) * dx; }
    double y_at(std::size_t iy) const { return origin_y + static_cast<double>(iy) * dy; }

    PixelIndex nearest_index(double x, double y) const {
        detail::require(std::isfinite(x) && std::isfinite(y),
                        "ComplexImage: query coordinate must be finite");
        const auto clamp_axis = [](double v, double origin, double step, std::size_t n) {
            const double raw = std::round((v - origin) / step);
            const double hi = static_cast<double>(n - 1);
            return static_cast<std::size_t>(std::clamp(raw, 0.0, hi));
        };
        return {clamp_axis(y, origin_y, dy, ny), clamp_axis(x, origin_x, dx, nx)};
    }

    void validate() const {
        detail::require(nx >= 1 && ny >= 1, "ComplexImage: empty image");
        detail::require(std::isfinite(dx) && dx > 0.0 && std::isfinite(dy) && dy > 0.0,
                        "ComplexImage: pixel pitch must be finite and positive");
        detail::require(std::isfinite(origin_x) && std::isfinite(origin_y),
                        "ComplexImage: origin must be finite");
        detail::require(values.size() == nx * ny,
                        "ComplexImage: value buffer size does not match nx*ny");
    }
};

struct Volume {
    std::vector<double> z_values;
    std::vector<ComplexImage> planes;
};

namespace detail {

inline void check_spectrum_shape(const SpectrumCube& spec) {
    spec.aperture.validate();
    spec.radar.validate();
    require(spec.pad_factor >= 1, "SpectrumCube: pad_factor must be at least 1");
    require(spec.k.size() == spec.radar.num_k, "SpectrumCube: wavenumber grid size mismatch");
    require(spec.kx_axis.size() == spec.nx_pad() && spec.ky_axis.size() == spec.ny_pad(),
            "SpectrumCube: frequency axis size mismatch");
    require(spec.samples.size() == spec.radar.num_k * spec.ny_pad() * spec.nx_pad(),
            "SpectrumCube: sample buffer size mismatch");
}

// Copies the periodic raw image into an output window whose center pixel
// (H/2, W/2) is the aperture center node (ny/2, nx/2).
inline ComplexImage recenter_image(const std::vector<Complex>& raw, const SpectrumCube& spec,
                                   double z_d) {
    const std::size_t w = spec.nx_pad();
    const std::size_t h = spec.ny_pad();
    const std::size_t cx = spec.aperture.nx / 2;
    const std::size_t cy = spec.aperture.ny / 2;

    ComplexImage img;
    img.nx = w;
    img.ny = h;
    img.dx = spec.aperture.dx;
    img.dy = spec.aperture.dy;
    img.origin_x = spec.aperture.x0 +
                   (static_cast<double>(cx) - static_cast<double>(w / 2)) * spec.aperture.dx;
    img.origin_y = spec.aperture.y0 +
                   (static_cast<double>(cy) - static_cast<double>(h / 2)) * spec.aperture.dy;
    img.z_d = z_d;
    img.values.resize(w * h);

    for (std::size_t qy = 0; qy < h; ++qy) {
        const std::size_t sy = (qy + cy + h - h / 2) % h;
        const Complex* src = raw.data() + sy * w;
        Complex* dst = img.values.data() + qy * w;
        for (std::size_t qx = 0; qx < w; ++qx) {
            dst[qx] = src[(qx + cx + w - w / 2) % w];
        }
    }
    return img;
}

}  // namespace detail

// Focuses one depth plane from the spatial spectra: each wavenumber slab is
// multiplied by exp(j*filter_sign*z_d*kz), bins with no propagating component
// are dropped, the slab is inverse transformed, and slabs are summed
// coherently over k in ascending order. filter_sign +1 matches the forward
// model's exp(-j*2*k*R) phase; -1 focuses a conjugated cube.
inline ComplexImage rma_plane(const SpectrumCube& spec, double z_d, int filter_sign = 1) {
    detail::check_spectrum_shape(spec);
    detail::require(std::isfinite(z_d) && z_d > 0.0,
                    "rma_plane: z_d must be finite and positive");
    detail::require(filter_sign == 1 || filter_sign == -1,
                    "rma_plane: filter_sign must be +1 or -1");

    const std::size_t w = spec.nx_pad();
    const std::size_t h = spec.ny_pad();
    const double sign = static_cast<double>(filter_sign);

    std::vector<Complex> accum(w * h, Complex{0.0, 0.0});
    std::vector<Complex> work(w * h);
    const double inv_n = 1.0 / static_cast<double>(w * h);

    for (std::size_t ik = 0; ik < spec.k.size(); ++ik) {
        const double k = spec.k[ik];
        const Complex* slab = spec.samples.data() + ik * h * w;
        for (std::size_t iky = 0; iky < h; ++iky) {
            const double ky = spec.ky_axis[iky];
            for (std::size_t ikx = 0; ikx < w; ++ikx) {
                const auto kz = dispersion_kz(k, spec.kx_axis[ikx], ky);
                work[iky * w + ikx] =
                    kz ? slab[iky * w + ikx] * std::polar(1.0, sign * z_d * *kz)
                       : Complex{0.0, 0.0};
            }
        }
        detail::dft2_unscaled(work.data(), h, w, FFTW_BACKWARD);
        for (std::size_t i = 0; i < w * h; ++i) accum[i] += work[i] * inv_n;
    }
    return detail::recenter_image(accum, spec, z_d);
}

// Stack of independently focused planes at strictly increasing depths.
inline Volume rma_volume(const SpectrumCube& spec, std::span<const double> z_list) {
    detail::require(!z_list.empty(), "rma_volume: z_list must not be empty");
    for (std::size_t i = 0; i < z_list.size(); ++i) {
        detail::require(std::isfinite(z_list[i]) && z_list[i] > 0.0,
                        "rma_volume: depths must be finite and positive");
        if (i > 0) {
            detail::require(z_list[i] > z_list[i - 1],
                            "rma_volume: depths must be strictly increasing");
        }
    }
    Volume volume;
    volume.z_values.assign(z_list.begin(), z_list.end());
    volume.planes.reserve(z_list.size());
    for (const double z : z_list) volume.planes.push_back(rma_plane(spec, z));
    return volume;
}

// Direct matched filter in the spatial domain: every output pixel correlates
// the cube against the exact round-trip phase of a unit target at that pixel.
// Quadratic in pixel count times samples, so only small cases are practical;
// used as the reference the spectral path is checked against.
inline ComplexImage backprojection_oracle(const SignalCube& cube, double z_d,
                                          const ApertureGrid& out_grid) {
    cube.validate();
    out_grid.validate();
    detail::require(std::isfinite(z_d) && z_d > 0.0,
                    "backprojection_oracle: z_d must be finite and positive");

    const WavenumberGrid k = build_wavenumber_grid(cube.radar);
    const ApertureGrid& ap = cube.aperture;
    std::vector<double> ax(ap.nx), ay(ap.ny);
    for (std::size_t ix = 0; ix < ap.nx; ++ix) ax[ix] = ap.x_at(ix);
    for (std::size_t iy = 0; iy < ap.ny; ++iy) ay[iy] = ap.y_at(iy);

    ComplexImage img;
    img.nx = out_grid.nx;
    img.ny = out_grid.ny;
    img.dx = out_grid.dx;
    img.dy = out_grid.dy;
    img.origin_x = out_grid.x0;
    img.origin_y = out_grid.y0;
    img.z_d = z_d;
    img.values.assign(out_grid.nx * out_grid.ny, Complex{0.0, 0.0});

    const std::int64_t pixels = static_cast<std::int64_t>(img.nx * img.ny);
#pragma omp parallel for schedule(static)
    for (std::int64_t p = 0; p < pixels; ++p) {
        const std::size_t py = static_cast<std::size_t>(p) / img.nx;
        const std::size_t px = static_cast<std::size_t>(p) % img.nx;
        const double x = img.x_at(px);
        const double y = img.y_at(py);
        Complex acc{0.0, 0.0};
        for (std::size_t ik = 0; ik < k.size(); ++ik) {
            const double kk = k[ik];
            const Complex* slab = cube.samples.data() + ik * ap.ny * ap.nx;
            for (std::size_t iy = 0; iy < ap.ny; ++iy) {
                const double ey = ay[iy] - y;
                for (std::size_t ix = 0; ix < ap.nx; ++ix) {
                    const double ex = ax[ix] - x;
                    const double range = std::sqrt(ex * ex + ey * ey + z_d * z_d);
                    acc += slab[iy * ap.nx + ix] * std::polar(1.0, 2.0 * kk * range);
                }
            }
        }
        img.values[static_cast<std::size_t>(p)] = acc;
    }
    return img;
}

// Shape measurements of a focused point response.
struct PsfMetrics {
    std::size_t peak_iy = 0, peak_ix = 0;
    Complex peak_value{0.0, 0.0};
    double width_x_3db = 0.0;  // m
    double width_y_3db = 0.0;  // m
    double pslr_db = 0.0;      // -inf when no sidelobe exists
};

namespace detail {

// Distance from the peak to the half-power crossing in one circular
// direction along a lane, linearly interpolated between samples. Walks at
// most n/2 steps and reports the walked distance when no crossing occurs.
template <typename SampleAt>
double half_power_reach(SampleAt sample_at, std::size_t n, double spacing, double threshold,
                        double peak_mag, int direction) {
    double prev = peak_mag;
    for (std::size_t step = 1; step <= n / 2; ++step) {
        const double cur = sample_at(direction * static_cast<std::int64_t>(step));
        if (cur < threshold) {
            const double frac = (prev - threshold) / (prev - cur);
            return (static_cast<double>(step - 1) + frac) * spacing;
        }
        prev = cur;
    }
    return static_cast<double>(n / 2) * spacing;
}

}  // namespace detail

// Measures the magnitude peak, the -3 dB widths of the central lobe along x
// and y, and the peak sidelobe ratio. The magnitude maximum must be unique up
// to one small connected plateau of bitwise ties (at most four pixels, as an
// exactly symmetric scene can straddle a pixel boundary); the first tied pixel
// in row-major order is reported. Widths are clamped below at one pixel pitch
// and saturate at the axis extent when the lobe never drops below half power. The main lobe for
// sidelobe purposes is the region reachable from the peak without the
// magnitude rising again or falling below -10 dB; the largest local maximum
// outside it sets the ratio, and -infinity is reported when there is none.
inline PsfMetrics psf_metrics(const ComplexImage& image) {
    image.validate();
    const std::size_t w = image.nx;
    const std::size_t h = image.ny;

    std::vector<double> mags(w * h);
    for (std::size_t i = 0; i < w * h; ++i) mags[i] = std::abs(image.values[i]);

    std::size_t peak = 0;
    for (std::size_t i = 1; i < w * h; ++i) {
        if (mags[i] > mags[peak]) peak = i;
    }
    const double peak_mag = mags[peak];
    detail::require(peak_mag > 0.0, "psf_metrics: image is identically zero");
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < w * h; ++i) {
        if (mags[i] == peak_mag) ties.push_back(i);
    }
    if (ties.size() > 1) {
        detail::require(ties.size() <= 4, "psf_metrics: magnitude maximum is not unique");
        // accept only one wrapped-4-connected plateau of ties
        const auto adjacent = [&](std::size_t a, std::size_t b) {
            const std::size_t dx = std::min((a % w + w - b % w) % w, (b % w + w - a % w) % w);
            const std::size_t dy = std::min((a / w + h - b / w) % h, (b / w + h - a / w) % h);
            return dx + dy == 1;
        };
        std::vector<char> seen(ties.size(), 0);
        std::vector<std::size_t> frontier{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!frontier.empty()) {
            const std::size_t cur = frontier.back();
            frontier.pop_back();
            for (std::size_t j = 0; j < ties.size(); ++j) {
                if (!seen[j] && adjacent(ties[cur], ties[j])) {
                    seen[j] = 1;
                    ++reached;
                    frontier.push_back(j);
                }
            }
        }
        detail::require(reached == ties.size(),
                        "psf_metrics: magnitude maximum is not unique");
    }

    PsfMetrics m;
    m.peak_iy = peak / w;
    m.peak_ix = peak % w;
    m.peak_value = image.values[peak];

    const double half_power = peak_mag * std::pow(10.0, -3.0 / 20.0);
    const auto row_sample = [&](std::int64_t offset) {
        const std::size_t ix = static_cast<std::size_t>(
            (static_cast<std::int64_t>(m.peak_ix) + offset % static_cast<std::int64_t>(w) +
             static_cast<std::int64_t>(w)) %
            static_cast<std::int64_t>(w));
        return mags[m.peak_iy * w + ix];
    };
    const auto col_sample = [&](std::int64_t offset) {
        const std::size_t iy = static_cast<std::size_t>(
            (static_cast<std::int64_t>(m.peak_iy) + offset % static_cast<std::int64_t>(h) +
             static_cast<std::int64_t>(h)) %
            static_cast<std::int64_t>(h));
        return mags[iy * w + m.peak_ix];
    };
    const double wx = detail::half_power_reach(row_sample, w, image.dx, half_power, peak_mag, 1) +
                      detail::half_power_reach(row_sample, w, image.dx, half_power, peak_mag, -1);
    const double wy = detail::half_power_reach(col_sample, h, image.dy, half_power, peak_mag, 1) +
                      detail::half_power_reach(col_sample, h, image.dy, half_power, peak_mag, -1);
    m.width_x_3db = std::clamp(wx, image.dx, static_cast<double>(w) * image.dx);
    m.width_y_3db = std::clamp(wy, image.dy, static_cast<double>(h) * image.dy);

    // Main lobe: flood fill from the peak, stepping only to wrapped
    // 4-neighbors that do not exceed the current magnitude and stay at or
    // above the -10 dB contour.
    const double lobe_floor = peak_mag * std::pow(10.0, -10.0 / 20.0);
    std::vector<char> in_lobe(w * h, 0);
    std::vector<std::size_t> stack{peak};
    in_lobe[peak] = 1;
    const auto neighbors = [&](std::size_t idx, auto&& visit) {
        const std::size_t iy = idx / w;
        const std::size_t ix = idx % w;
        visit(iy * w + (ix + 1) % w);
        visit(iy * w + (ix + w - 1) % w);
        visit(((iy + 1) % h) * w + ix);
        visit(((iy + h - 1) % h) * w + ix);
    };
    while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        neighbors(cur, [&](std::size_t nb) {
            if (!in_lobe[nb] && mags[nb] >= lobe_floor && mags[nb] <= mags[cur]) {
                in_lobe[nb] = 1;
                stack.push_back(nb);
            }
        });
    }

    double best_sidelobe = 0.0;
    for (std::size_t i = 0; i < w * h; ++i) {
        if (in_lobe[i] || mags[i] <= 0.0 || mags[i] <= best_sidelobe) continue;
        bool is_local_max = true;
        neighbors(i, [&](std::size_t nb) {
            if (mags[nb] > mags[i]) is_local_max = false;
        });
        if (is_local_max) best_sidelobe = mags[i];
    }
    m.pslr_db = best_sidelobe > 0.0 ? 20.0 * std::log10(best_sidelobe / peak_mag)
                                    : -std::numeric_limits<double>::infinity();
    return m;
}

// Magnitude image in decibels relative to its own peak, clamped at floor_db.
struct DbImage {
    std::size_t nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    double origin_x = 0.0, origin_y = 0.0;
    double z_d = 0.0;
    double floor_db = 0.0;
    std::vector<double> values;  // in [floor_db, 0]

    double at(std::size_t iy, std::size_t ix) const { return values[iy * nx + ix]; }
};

inline DbImage normalize_db(const ComplexImage& image, double floor_db) {
    image.validate();
    detail::require(std::isfinite(floor_db) && floor_db < 0.0,
                    "normalize_db: floor_db must be finite and negative");
    double peak = 0.0;
    for (const auto& v : image.values) peak = std::max(peak, std::abs(v));
    detail::require(peak > 0.0, "normalize_db: image is identically zero");

    DbImage db;
    db.nx = image.nx;
    db.ny = image.ny;
    db.dx = image.dx;
    db.dy = image.dy;
    db.origin_x = image.origin_x;
    db.origin_y = image.origin_y;
    db.z_d = image.z_d;
    db.floor_db = floor_db;
    db.values.resize(image.values.size());
    for (std::size_t i = 0; i < image.values.size(); ++i) {
        const double level = 20.0 * std::log10(std::abs(image.values[i]) / peak);
        db.values[i] = std::max(level, floor_db);
    }
    return db;
}

}  // namespace nfsar
