#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nfsar/errors.hpp"
#include "nfsar/forward.hpp"
#include "nfsar/geometry.hpp"
#include "nfsar/io.hpp"
#include "nfsar/reconstruct.hpp"
#include "nfsar/spectral.hpp"
#include "nfsar/version.hpp"

namespace nfsar::cli {

namespace detail {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_depth(double z) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", z);
    return buf;
}

using Entries = std::vector<std::pair<std::string, std::string>>;

inline void append_config_entries(Entries& e, const RadarParams& radar,
                                  const ApertureGrid& aperture, const ReconOptions& recon) {
    e.emplace_back("f0_hz", fmt(radar.f0));
    e.emplace_back("bandwidth_hz", fmt(radar.bandwidth));
    e.emplace_back("chirp_s", fmt(radar.chirp_duration));
    e.emplace_back("num_k", std::to_string(radar.num_k));
    e.emplace_back("nx", std::to_string(aperture.nx));
    e.emplace_back("ny", std::to_string(aperture.ny));
    e.emplace_back("dx_m", fmt(aperture.dx));
    e.emplace_back("dy_m", fmt(aperture.dy));
    e.emplace_back("x0_m", fmt(aperture.x0));
    e.emplace_back("y0_m", fmt(aperture.y0));
    e.emplace_back("pad_factor", std::to_string(recon.pad_factor));
    e.emplace_back("window", recon.window == Window::cosine ? "cosine" : "none");
    e.emplace_back("floor_db", fmt(recon.floor_db));
}

// Every produced artifact gets a sidecar "<artifact>.manifest" recording the
// command, version, resolved parameters, and wall-clock duration.
inline void write_manifest(const std::string& artifact, const Entries& entries) {
    const std::string path = artifact + ".manifest";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const auto& [key, value] : entries) {
        out << key << "=" << value << "\n";
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Parses and executes one command line (without the program name). Output and
// diagnostics go to the given streams. Exit codes: 0 success, 1 usage,
// 2 input or I/O problem, 3 numeric or invariant failure.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"near-field FMCW synthetic aperture imaging toolkit"};
    app.set_version_flag("--version", std::string("nfsar ") + version_string);
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "synthesize a beat-signal cube from a scene");
    std::string sim_config, sim_scene, sim_out;
    sim->add_option("--config", sim_config, "acquisition config file")->required();
    sim->add_option("--scene", sim_scene, "scene description file")->required();
    sim->add_option("--out", sim_out, "output cube path")->required();
    sim->callback([&] {
        const auto t0 = std::chrono::steady_clock::now();
        const ToolkitConfig cfg = load_config(sim_config);
        const Scene scene = load_scene(sim_scene);
        const SignalCube cube = simulate_cube(cfg.radar, cfg.aperture, scene);
        const std::size_t bytes = write_cube(cube, sim_out);

        detail::Entries entries;
        entries.emplace_back("command", "simulate");
        entries.emplace_back("version", std::string("nfsar ") + version_string);
        entries.emplace_back("config", sim_config);
        entries.emplace_back("scene", sim_scene);
        detail::append_config_entries(entries, cfg.radar, cfg.aperture, cfg.recon);
        entries.emplace_back("out", sim_out);
        entries.emplace_back("bytes", std::to_string(bytes));
        entries.emplace_back("duration_s", detail::fmt(detail::seconds_since(t0)));
        detail::write_manifest(sim_out, entries);
        out << "wrote " << sim_out << " (" << bytes << " bytes, " << cube.radar.num_k << "x"
            << cube.aperture.ny << "x" << cube.aperture.nx << " samples)\n";
    });

    // reconstruct
    auto* rec = app.add_subcommand("reconstruct", "focus depth planes from a cube");
    std::string rec_in, rec_prefix, rec_format = "pgm", rec_window = "none";
    double rec_z = 0.0, rec_z_stop = 0.0, rec_z_step = 0.0;
    std::size_t rec_pad = 2;
    double rec_floor = -40.0;
    rec->add_option("--in", rec_in, "input cube path")->required();
    rec->add_option("--out-prefix", rec_prefix, "output path prefix")->required();
    rec->add_option("--z", rec_z, "depth of the first plane, m")->required();
    auto* opt_stop = rec->add_option("--z-stop", rec_z_stop, "depth of the last plane, m");
    auto* opt_step = rec->add_option("--z-step", rec_z_step, "depth increment, m");
    opt_stop->needs(opt_step);
    opt_step->needs(opt_stop);
    rec->add_option("--format", rec_format, "pgm, csv, or both")
        ->check(CLI::IsMember({"pgm", "csv", "both"}));
    rec->add_option("--pad-factor", rec_pad, "spatial transform padding factor")
        ->check(CLI::PositiveNumber);
    rec->add_option("--window", rec_window, "aperture taper: none or cosine")
        ->check(CLI::IsMember({"none", "cosine"}));
    rec->add_option("--floor-db", rec_floor, "display floor for normalized output, dB");
    rec->callback([&] {
        const auto t0 = std::chrono::steady_clock::now();
        const SignalCube cube = read_cube(rec_in);
        ReconOptions recon;
        recon.pad_factor = rec_pad;
        recon.window = rec_window == "cosine" ? Window::cosine : Window::none;
        recon.floor_db = rec_floor;

        std::vector<double> z_list;
        if (opt_stop->count() == 0) {
            z_list.push_back(rec_z);
        } else {
            nfsar::detail::require(std::isfinite(rec_z_step) && rec_z_step > 0.0,
                                   "reconstruct: --z-step must be positive");
            nfsar::detail::require(rec_z_stop >= rec_z,
                                   "reconstruct: --z-stop must not be below --z");
            const auto count = static_cast<std::size_t>(
                std::floor((rec_z_stop - rec_z) / rec_z_step + 1e-9)) + 1;
            for (std::size_t i = 0; i < count; ++i) {
                z_list.push_back(rec_z + static_cast<double>(i) * rec_z_step);
            }
        }

        const SpectrumCube spec = spatial_fft2(cube, recon.pad_factor, recon.window);
        for (const double z : z_list) {
            const ComplexImage image = rma_plane(spec, z);
            const DbImage db = normalize_db(image, recon.floor_db);
            std::vector<std::pair<std::string, ImageFormat>> outputs;
            if (rec_format == "pgm" || rec_format == "both") {
                outputs.emplace_back(rec_prefix + "_z" + detail::fmt_depth(z) + ".pgm",
                                     ImageFormat::pgm);
            }
            if (rec_format == "csv" || rec_format == "both") {
                outputs.emplace_back(rec_prefix + "_z" + detail::fmt_depth(z) + ".csv",
                                     ImageFormat::csv);
            }
            for (const auto& [path, format] : outputs) {
                write_image(db, path, format);
                detail::Entries entries;
                entries.emplace_back("command", "reconstruct");
                entries.emplace_back("version", std::string("nfsar ") + version_string);
                entries.emplace_back("in", rec_in);
                detail::append_config_entries(entries, cube.radar, cube.aperture, recon);
                entries.emplace_back("z_m", detail::fmt(z));
                entries.emplace_back("format", format == ImageFormat::pgm ? "pgm" : "csv");
                entries.emplace_back("out", path);
                entries.emplace_back("duration_s", detail::fmt(detail::seconds_since(t0)));
                detail::write_manifest(path, entries);
                out << "wrote " << path << "\n";
            }
        }
    });

    // oracle
    auto* ora = app.add_subcommand("oracle", "direct matched-filter focusing (slow reference)");
    std::string ora_in, ora_prefix;
    double ora_z = 0.0, ora_floor = -40.0;
    bool ora_force = false;
    ora->add_option("--in", ora_in, "input cube path")->required();
    ora->add_option("--out-prefix", ora_prefix, "output path prefix")->required();
    ora->add_option("--z", ora_z, "depth of the plane, m")->required();
    ora->add_option("--floor-db", ora_floor, "display floor, dB");
    ora->add_flag("--force", ora_force, "run even on large cubes");
    ora->callback([&] {
        const auto t0 = std::chrono::steady_clock::now();
        const SignalCube cube = read_cube(ora_in);
        if (!ora_force && (cube.radar.num_k > 16 || cube.aperture.ny > 32 ||
                           cube.aperture.nx > 32)) {
            throw CLI::ValidationError(
                "oracle",
                "cube is " + std::to_string(cube.radar.num_k) + "x" +
                    std::to_string(cube.aperture.ny) + "x" + std::to_string(cube.aperture.nx) +
                    "; limit without --force is 16 wavenumbers over a 32x32 aperture");
        }
        const ComplexImage image = backprojection_oracle(cube, ora_z, cube.aperture);
        const DbImage db = normalize_db(image, ora_floor);
        const std::string path = ora_prefix + "_z" + detail::fmt_depth(ora_z) + ".pgm";
        write_image(db, path, ImageFormat::pgm);

        detail::Entries entries;
        entries.emplace_back("command", "oracle");
        entries.emplace_back("version", std::string("nfsar ") + version_string);
        entries.emplace_back("in", ora_in);
        entries.emplace_back("z_m", detail::fmt(ora_z));
        entries.emplace_back("floor_db", detail::fmt(ora_floor));
        entries.emplace_back("out", path);
        entries.emplace_back("duration_s", detail::fmt(detail::seconds_since(t0)));
        detail::write_manifest(path, entries);
        out << "wrote " << path << "\n";
    });

    // psf
    auto* psf = app.add_subcommand("psf", "point response metrics of a focused plane");
    std::string psf_in, psf_window = "none";
    double psf_z = 0.0;
    std::size_t psf_pad = 2;
    psf->add_option("--in", psf_in, "input cube path")->required();
    psf->add_option("--z", psf_z, "depth of the plane, m")->required();
    psf->add_option("--pad-factor", psf_pad, "spatial transform padding factor")
        ->check(CLI::PositiveNumber);
    psf->add_option("--window", psf_window, "aperture taper: none or cosine")
        ->check(CLI::IsMember({"none", "cosine"}));
    psf->callback([&] {
        const SignalCube cube = read_cube(psf_in);
        const Window window = psf_window == "cosine" ? Window::cosine : Window::none;
        const SpectrumCube spec = spatial_fft2(cube, psf_pad, window);
        const ComplexImage image = rma_plane(spec, psf_z);
        const PsfMetrics m = psf_metrics(image);
        out << "peak_iy=" << m.peak_iy << "\n";
        out << "peak_ix=" << m.peak_ix << "\n";
        out << "peak_x_m=" << detail::fmt(image.x_at(m.peak_ix)) << "\n";
        out << "peak_y_m=" << detail::fmt(image.y_at(m.peak_iy)) << "\n";
        out << "peak_mag=" << detail::fmt(std::abs(m.peak_value)) << "\n";
        out << "width_x_3db_m=" << detail::fmt(m.width_x_3db) << "\n";
        out << "width_y_3db_m=" << detail::fmt(m.width_y_3db) << "\n";
        out << "pslr_db=" << detail::fmt(m.pslr_db) << "\n";
    });

    // check
    auto* chk = app.add_subcommand("check", "sampling and approximation diagnostics");
    std::string chk_config;
    double chk_range = 0.3, chk_d = 0.01, chk_alpha = 0.25;
    chk->add_option("--config", chk_config, "acquisition config file (defaults when absent)");
    chk->add_option("--range", chk_range, "target standoff distance, m");
    chk->add_option("--d", chk_d, "transmit/receive element separation, m");
    chk->add_option("--alpha", chk_alpha, "accepted path error in wavelengths");
    chk->callback([&] {
        const ToolkitConfig cfg =
            chk_config.empty() ? default_config() : load_config(chk_config);
        const double fc = cfg.radar.center_frequency();
        const double fresnel = fresnel_distance(cfg.aperture, fc);
        const NyquistReport nyq = nyquist_check(cfg.aperture, cfg.radar);
        MonostaticCheck mono;
        mono.d = chk_d;
        mono.fc = fc;
        mono.range = chk_range;
        mono.alpha = chk_alpha;
        const ValidityReport validity = monostatic_validity(mono);

        out << "fc_hz=" << detail::fmt(fc) << "\n";
        out << "fresnel_distance_m=" << detail::fmt(fresnel) << "\n";
        out << "range_m=" << detail::fmt(chk_range) << "\n";
        out << "near_field=" << (chk_range < fresnel ? "true" : "false") << "\n";
        out << "nyquist_limit_m=" << detail::fmt(nyq.limit) << "\n";
        out << "nyquist_dx_m=" << detail::fmt(cfg.aperture.dx) << "\n";
        out << "nyquist_dx=" << (nyq.x_ok ? "pass" : "flagged") << "\n";
        out << "nyquist_dy_m=" << detail::fmt(cfg.aperture.dy) << "\n";
        out << "nyquist_dy=" << (nyq.y_ok ? "pass" : "flagged") << "\n";
        out << "monostatic_d_m=" << detail::fmt(chk_d) << "\n";
        out << "monostatic_threshold_m=" << detail::fmt(validity.threshold) << "\n";
        out << "monostatic_ratio=" << detail::fmt(validity.ratio) << "\n";
        out << "monostatic_valid=" << (validity.valid ? "true" : "false") << "\n";
    });

    // info
    auto* inf = app.add_subcommand("info", "print cube header fields");
    std::string inf_in;
    inf->add_option("--in", inf_in, "input cube path")->required();
    inf->callback([&] {
        const SignalCube cube = read_cube(inf_in);
        out << "path=" << inf_in << "\n";
        out << "num_k=" << cube.radar.num_k << "\n";
        out << "ny=" << cube.aperture.ny << "\n";
        out << "nx=" << cube.aperture.nx << "\n";
        out << "samples=" << cube.samples.size() << "\n";
        out << "f0_hz=" << detail::fmt(cube.radar.f0) << "\n";
        out << "bandwidth_hz=" << detail::fmt(cube.radar.bandwidth) << "\n";
        out << "dx_m=" << detail::fmt(cube.aperture.dx) << "\n";
        out << "dy_m=" << detail::fmt(cube.aperture.dy) << "\n";
        out << "x0_m=" << detail::fmt(cube.aperture.x0) << "\n";
        out << "y0_m=" << detail::fmt(cube.aperture.y0) << "\n";
        out << "x_extent_m=" << detail::fmt(cube.aperture.x_extent()) << "\n";
        out << "y_extent_m=" << detail::fmt(cube.aperture.y_extent()) << "\n";
    });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("nfsar");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForVersion& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvariantError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace nfsar::cli
