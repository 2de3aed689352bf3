#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nfsar/errors.hpp"
#include "nfsar/geometry.hpp"
#include "nfsar/reconstruct.hpp"
#include "nfsar/spectral.hpp"

namespace nfsar {

// Cube container, little-endian throughout:
//   bytes  0..7   magic "NFSAR1\0\0"
//   bytes  8..19  u32 num_k, u32 ny, u32 nx
//   bytes 20..67  f64 f0, bandwidth, dx, dy, x0, y0
//   payload       float32 (re, im) pairs, ix fastest, then iy, then ik
// Samples are stored single precision; the chirp duration is not persisted
// and readers fall back to the preset 60 us value.
inline constexpr std::array<unsigned char, 8> cube_magic = {'N', 'F', 'S', 'A', 'R', '1', 0, 0};
inline constexpr std::size_t cube_header_bytes = 68;

namespace detail {

inline void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::vector<unsigned char>& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::vector<unsigned char>& buf, double v) {
    put_u64(buf, std::bit_cast<std::uint64_t>(v));
}

inline void put_f32(std::vector<unsigned char>& buf, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>((bits >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

inline double get_f64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

inline float get_f32(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return std::bit_cast<float>(v);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline bool parse_double(std::string_view token, double& out) {
    token = trim(token);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc{} && result.ptr == last;
}

inline bool parse_count(std::string_view token, std::uint64_t& out) {
    token = trim(token);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc{} && result.ptr == last;
}

}  // namespace detail

// Serializes the cube; returns the number of bytes written (68 + 8 per sample).
inline std::size_t write_cube(const SignalCube& cube, std::ostream& out) {
    cube.validate();
    constexpr std::uint64_t u32_max = std::numeric_limits<std::uint32_t>::max();
    detail::require(cube.radar.num_k <= u32_max && cube.aperture.ny <= u32_max &&
                        cube.aperture.nx <= u32_max,
                    "write_cube: axis count exceeds the 32-bit container field");

    std::vector<unsigned char> buf;
    buf.reserve(cube_header_bytes + 8 * cube.samples.size());
    buf.insert(buf.end(), cube_magic.begin(), cube_magic.end());
    detail::put_u32(buf, static_cast<std::uint32_t>(cube.radar.num_k));
    detail::put_u32(buf, static_cast<std::uint32_t>(cube.aperture.ny));
    detail::put_u32(buf, static_cast<std::uint32_t>(cube.aperture.nx));
    detail::put_f64(buf, cube.radar.f0);
    detail::put_f64(buf, cube.radar.bandwidth);
    detail::put_f64(buf, cube.aperture.dx);
    detail::put_f64(buf, cube.aperture.dy);
    detail::put_f64(buf, cube.aperture.x0);
    detail::put_f64(buf, cube.aperture.y0);
    for (const auto& s : cube.samples) {
        detail::put_f32(buf, static_cast<float>(s.real()));
        detail::put_f32(buf, static_cast<float>(s.imag()));
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write_cube: stream write failed");
    return buf.size();
}

inline std::size_t write_cube(const SignalCube& cube, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_cube: cannot open '" + path + "' for writing");
    return write_cube(cube, out);
}

inline SignalCube read_cube(std::istream& in, const std::string& name = "cube") {
    std::array<unsigned char, cube_header_bytes> header{};
    in.read(reinterpret_cast<char*>(header.data()), cube_header_bytes);
    const std::size_t header_got = static_cast<std::size_t>(in.gcount());
    if (header_got < cube_header_bytes) {
        throw IoError(name + ": truncated header, expected " +
                      std::to_string(cube_header_bytes) + " bytes, got " +
                      std::to_string(header_got));
    }
    for (std::size_t i = 0; i < cube_magic.size(); ++i) {
        if (header[i] != cube_magic[i]) {
            throw IoError(name + ": bad magic, not a cube file");
        }
    }

    SignalCube cube;
    cube.radar.num_k = detail::get_u32(header.data() + 8);
    cube.aperture.ny = detail::get_u32(header.data() + 12);
    cube.aperture.nx = detail::get_u32(header.data() + 16);
    cube.radar.f0 = detail::get_f64(header.data() + 20);
    cube.radar.bandwidth = detail::get_f64(header.data() + 28);
    cube.aperture.dx = detail::get_f64(header.data() + 36);
    cube.aperture.dy = detail::get_f64(header.data() + 44);
    cube.aperture.x0 = detail::get_f64(header.data() + 52);
    cube.aperture.y0 = detail::get_f64(header.data() + 60);
    cube.radar.chirp_duration = 60.0e-6;  // not persisted in the container

    if (cube.radar.num_k == 0 || cube.aperture.ny == 0 || cube.aperture.nx == 0) {
        throw IoError(name + ": zero axis count in header");
    }
    if (!(std::isfinite(cube.radar.f0) && cube.radar.f0 > 0.0) ||
        !(std::isfinite(cube.radar.bandwidth) && cube.radar.bandwidth > 0.0) ||
        !(std::isfinite(cube.aperture.dx) && cube.aperture.dx > 0.0) ||
        !(std::isfinite(cube.aperture.dy) && cube.aperture.dy > 0.0) ||
        !std::isfinite(cube.aperture.x0) || !std::isfinite(cube.aperture.y0)) {
        throw IoError(name + ": non-finite or non-positive header field");
    }

    const std::uint64_t count = static_cast<std::uint64_t>(cube.radar.num_k) *
                                cube.aperture.ny * cube.aperture.nx;
    if (count > (std::uint64_t{1} << 32)) {
        throw IoError(name + ": sample count in header is implausibly large");
    }
    const std::uint64_t payload = count * 8;
    std::vector<unsigned char> raw(payload);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(payload));
    const std::uint64_t got = static_cast<std::uint64_t>(in.gcount());
    if (got < payload) {
        throw IoError(name + ": truncated payload, expected " +
                      std::to_string(cube_header_bytes + payload) + " bytes total, got " +
                      std::to_string(cube_header_bytes + got));
    }

    cube.samples.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const float re = detail::get_f32(raw.data() + 8 * i);
        const float im = detail::get_f32(raw.data() + 8 * i + 4);
        if (!std::isfinite(re) || !std::isfinite(im)) {
            throw IoError(name + ": non-finite sample at index " + std::to_string(i));
        }
        cube.samples[i] = Complex{static_cast<double>(re), static_cast<double>(im)};
    }
    return cube;
}

inline SignalCube read_cube(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_cube: cannot open '" + path + "'");
    return read_cube(in, path);
}

// Scene text: one scatterer per line as "x_m, y_m, z_m, amplitude, phase_deg".
// '#' starts a comment; blank lines are skipped. Order is preserved.
inline Scene load_scene(std::istream& in, const std::string& name = "scene") {
    Scene scene;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        if (const auto hash = sv.find('#'); hash != std::string_view::npos) {
            sv = sv.substr(0, hash);
        }
        sv = detail::trim(sv);
        if (sv.empty()) continue;

        std::array<double, 5> fields{};
        std::size_t nfields = 0;
        std::size_t pos = 0;
        bool ok = true;
        while (true) {
            const auto comma = sv.find(',', pos);
            const auto token = sv.substr(pos, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - pos);
            if (nfields >= fields.size()) {
                ++nfields;  // count extras for the diagnostic
            } else if (!detail::parse_double(token, fields[nfields])) {
                ok = false;
                break;
            } else {
                ++nfields;
            }
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        const std::string where = name + ":" + std::to_string(lineno) + ": ";
        if (!ok) {
            throw IoError(where + "field " + std::to_string(nfields + 1) + " is not a number");
        }
        if (nfields != fields.size()) {
            throw IoError(where + "expected 5 comma-separated values, got " +
                          std::to_string(nfields));
        }
        PointScatterer s;
        s.x = fields[0];
        s.y = fields[1];
        s.z = fields[2];
        const double amplitude = fields[3];
        const double phase = fields[4] * std::numbers::pi / 180.0;
        if (!std::isfinite(amplitude) || !std::isfinite(phase)) {
            throw IoError(where + "amplitude and phase must be finite");
        }
        s.reflectivity = amplitude * Complex{std::cos(phase), std::sin(phase)};
        if (!(std::isfinite(s.x) && std::isfinite(s.y))) {
            throw IoError(where + "position must be finite");
        }
        if (!(std::isfinite(s.z) && s.z > 0.0)) {
            throw IoError(where + "z must be finite and positive");
        }
        scene.scatterers.push_back(s);
    }
    return scene;
}

inline Scene load_scene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_scene: cannot open '" + path + "'");
    return load_scene(in, path);
}

// Processing knobs that ride along with the acquisition description.
struct ReconOptions {
    std::size_t pad_factor = 2;
    Window window = Window::none;
    double floor_db = -40.0;
};

struct ToolkitConfig {
    RadarParams radar;
    ApertureGrid aperture;
    ReconOptions recon;
};

inline ToolkitConfig default_config() {
    ToolkitConfig cfg;
    const auto [radar, aperture] = default_acquisition();
    cfg.radar = radar;
    cfg.aperture = aperture;
    return cfg;
}

// Config text: "key = value" lines with '#' comments. Every key is optional
// and falls back to the default above; unknown keys are rejected. Values are
// validated where they appear so diagnostics carry the offending line.
inline ToolkitConfig load_config(std::istream& in, const std::string& name = "config") {
    ToolkitConfig cfg = default_config();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        if (const auto hash = sv.find('#'); hash != std::string_view::npos) {
            sv = sv.substr(0, hash);
        }
        sv = detail::trim(sv);
        if (sv.empty()) continue;

        const std::string where = name + ":" + std::to_string(lineno) + ": ";
        const auto eq = sv.find('=');
        if (eq == std::string_view::npos) {
            throw IoError(where + "expected 'key = value'");
        }
        const std::string key(detail::trim(sv.substr(0, eq)));
        const std::string_view value = detail::trim(sv.substr(eq + 1));

        const auto positive_double = [&](double& dst) {
            double v = 0.0;
            if (!detail::parse_double(value, v) || !std::isfinite(v) || v <= 0.0) {
                throw IoError(where + key + " must be a finite positive number");
            }
            dst = v;
        };
        const auto finite_double = [&](double& dst) {
            double v = 0.0;
            if (!detail::parse_double(value, v) || !std::isfinite(v)) {
                throw IoError(where + key + " must be a finite number");
            }
            dst = v;
        };
        const auto positive_count = [&](std::size_t& dst) {
            std::uint64_t v = 0;
            if (!detail::parse_count(value, v) || v == 0 || v > 1000000000ull) {
                throw IoError(where + key + " must be a positive integer");
            }
            dst = static_cast<std::size_t>(v);
        };

        if (key == "f0_hz") {
            positive_double(cfg.radar.f0);
        } else if (key == "bandwidth_hz") {
            positive_double(cfg.radar.bandwidth);
        } else if (key == "chirp_s") {
            positive_double(cfg.radar.chirp_duration);
        } else if (key == "num_k") {
            positive_count(cfg.radar.num_k);
        } else if (key == "nx") {
            positive_count(cfg.aperture.nx);
        } else if (key == "ny") {
            positive_count(cfg.aperture.ny);
        } else if (key == "dx_m") {
            positive_double(cfg.aperture.dx);
        } else if (key == "dy_m") {
            positive_double(cfg.aperture.dy);
        } else if (key == "x0_m") {
            finite_double(cfg.aperture.x0);
        } else if (key == "y0_m") {
            finite_double(cfg.aperture.y0);
        } else if (key == "pad_factor") {
            positive_count(cfg.recon.pad_factor);
        } else if (key == "window") {
            if (value == "none") {
                cfg.recon.window = Window::none;
            } else if (value == "cosine") {
                cfg.recon.window = Window::cosine;
            } else {
                throw IoError(where + "window must be 'none' or 'cosine'");
            }
        } else if (key == "floor_db") {
            double v = 0.0;
            if (!detail::parse_double(value, v) || !std::isfinite(v) || v >= 0.0) {
                throw IoError(where + "floor_db must be a finite negative number");
            }
            cfg.recon.floor_db = v;
        } else {
            throw IoError(where + "unknown key '" + key + "'");
        }
    }
    cfg.radar.validate();
    cfg.aperture.validate();
    return cfg;
}

inline ToolkitConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_config: cannot open '" + path + "'");
    return load_config(in, path);
}

enum class ImageFormat { pgm, csv };

// 16-bit binary PGM: floor_db maps to 0, the 0 dB peak to 65535, big-endian
// sample bytes per the format. Row 0 (smallest y) is written first.
inline void write_pgm(const DbImage& image, std::ostream& out) {
    detail::require(image.nx >= 1 && image.ny >= 1 && image.values.size() == image.nx * image.ny,
                    "write_pgm: malformed image");
    detail::require(image.floor_db < 0.0, "write_pgm: floor_db must be negative");
    out << "P5\n" << image.nx << " " << image.ny << "\n65535\n";
    std::vector<unsigned char> row(2 * image.nx);
    for (std::size_t iy = 0; iy < image.ny; ++iy) {
        for (std::size_t ix = 0; ix < image.nx; ++ix) {
            const double v = image.at(iy, ix);
            const double scaled = (v - image.floor_db) / (0.0 - image.floor_db) * 65535.0;
            const long long q = std::llround(scaled);
            const auto pix = static_cast<std::uint16_t>(std::clamp(q, 0ll, 65535ll));
            row[2 * ix] = static_cast<unsigned char>(pix >> 8);
            row[2 * ix + 1] = static_cast<unsigned char>(pix & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write_pgm: stream write failed");
}

// Comma-separated dB values at full double precision, one image row per text
// row; row 0 is the smallest y.
inline void write_csv(const DbImage& image, std::ostream& out) {
    detail::require(image.nx >= 1 && image.ny >= 1 && image.values.size() == image.nx * image.ny,
                    "write_csv: malformed image");
    char buf[40];
    for (std::size_t iy = 0; iy < image.ny; ++iy) {
        for (std::size_t ix = 0; ix < image.nx; ++ix) {
            std::snprintf(buf, sizeof buf, "%.17g", image.at(iy, ix));
            if (ix > 0) out.put(',');
            out << buf;
        }
        out.put('\n');
    }
    if (!out) throw IoError("write_csv: stream write failed");
}

inline void write_image(const DbImage& image, const std::string& path, ImageFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_image: cannot open '" + path + "' for writing");
    if (format == ImageFormat::pgm) {
        write_pgm(image, out);
    } else {
        write_csv(image, out);
    }
}

}  // namespace nfsar
