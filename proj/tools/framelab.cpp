// framelab — numerical laboratory for exponential systems E(Lambda) on a
// finite-measure spectrum S: Beurling density estimates, Gram/frame-operator
// spectra, frame-measure and criticality diagnostics, and weak-limit probes.
//
// Subcommands:
//   density   point-set density scan          (needs [pointset] + [density])
//   frames    frame-theoretic diagnostics     (needs [spectrum] + [pointset] + [frames.*])
//   hull      weak-limit / repetitivity ops   (needs [pointset] + [hull.*])
//   version   print tool version
//
// Reports are emitted as a JSON envelope (authoritative); --csv DIR adds flat
// CSV projections of per-center/per-return curves for plotting. Exit codes:
// 0 success, 2 config error, 3 resource limit, 4 numerical invariant
// violation. See docs/schema for the payload layout and configs/ for samples.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "framelab/config.hpp"
#include "framelab/errors.hpp"
#include "framelab/frame_analysis.hpp"
#include "framelab/hull.hpp"
#include "framelab/pointset.hpp"
#include "framelab/report.hpp"
#include "framelab/specmat.hpp"
#include "framelab/spectrum.hpp"
#include "framelab/version.hpp"

namespace fl = framelab;
using fl::json;

namespace {

/// Config view that records every key it is asked about, so leftovers can be
/// rejected as unknown keys afterwards.
class TrackedConfig {
  public:
    explicit TrackedConfig(const fl::Config& cfg) : cfg_(cfg) {}

    bool has(const std::string& key) {
        used_.insert(key);
        return cfg_.has(key);
    }
    double number(const std::string& key) {
        used_.insert(key);
        return cfg_.number(key);
    }
    double number_or(const std::string& key, double fallback) {
        used_.insert(key);
        return cfg_.number_or(key, fallback);
    }
    long long integer(const std::string& key) {
        used_.insert(key);
        return cfg_.integer(key);
    }
    std::string string(const std::string& key) {
        used_.insert(key);
        return cfg_.string(key);
    }
    std::vector<double> number_list(const std::string& key) {
        used_.insert(key);
        return cfg_.number_list(key);
    }
    std::vector<std::vector<double>> number_matrix(const std::string& key) {
        used_.insert(key);
        return cfg_.number_matrix(key);
    }
    int line_of(const std::string& key) const { return cfg_.line_of(key); }

    const fl::Config& raw() const { return cfg_; }

    void reject_unknown() const {
        for (const auto& [key, value] : cfg_.entries())
            if (!used_.count(key))
                throw fl::config_error("unknown key '" + key + "'", value.line);
    }

  private:
    const fl::Config& cfg_;
    std::set<std::string> used_;
};

fl::Spectrum build_spectrum(TrackedConfig& cfg) {
    const auto rows = cfg.number_matrix("spectrum.intervals");
    std::vector<fl::Spectrum::Interval> intervals;
    for (const auto& row : rows) {
        if (row.size() != 2)
            throw fl::config_error("spectrum.intervals entries must be [a, b] pairs",
                                   cfg.line_of("spectrum.intervals"));
        intervals.emplace_back(row[0], row[1]);
    }
    return fl::Spectrum(std::move(intervals));
}

fl::FrequencyGenerator build_generator(TrackedConfig& cfg, const std::string& prefix,
                                       const std::optional<std::uint64_t>& seed_override) {
    const std::string kind = cfg.string(prefix + ".kind");
    if (kind == "lattice") {
        fl::Lattice g;
        g.step = cfg.number(prefix + ".step");
        g.offset = cfg.number_or(prefix + ".offset", 0.0);
        return fl::FrequencyGenerator(g);
    }
    if (kind == "explicit") {
        fl::Explicit g;
        g.points = cfg.number_list(prefix + ".points");
        return fl::FrequencyGenerator(std::move(g));
    }
    if (kind == "cut_project") {
        const auto basis = cfg.number_matrix(prefix + ".basis");
        const auto window = cfg.number_list(prefix + ".window");
        if (basis.size() != 2 || basis[0].size() != 2 || basis[1].size() != 2)
            throw fl::config_error("'" + prefix + ".basis' must be a 2x2 matrix",
                                   cfg.line_of(prefix + ".basis"));
        if (window.size() != 2)
            throw fl::config_error("'" + prefix + ".window' must be [lo, hi)",
                                   cfg.line_of(prefix + ".window"));
        fl::CutProject g;
        g.basis = {basis[0][0], basis[0][1], basis[1][0], basis[1][1]};
        g.window_lo = window[0];
        g.window_hi = window[1];
        return fl::FrequencyGenerator(g);
    }
    if (kind == "union") {
        fl::UnionOf g;
        for (std::size_t i = 0;; ++i) {
            const std::string member = prefix + ".member." + std::to_string(i);
            if (!cfg.has(member + ".kind")) break;
            g.members.push_back(build_generator(cfg, member, seed_override));
        }
        if (g.members.empty())
            throw fl::config_error("union generator needs at least [" + prefix +
                                       ".member.0]",
                                   cfg.line_of(prefix + ".kind"));
        return fl::FrequencyGenerator(std::move(g));
    }
    if (kind == "perturbed") {
        fl::Perturbed g;
        g.amplitude = cfg.number(prefix + ".amplitude");
        g.seed = seed_override ? *seed_override
                               : static_cast<std::uint64_t>(cfg.integer(prefix + ".seed"));
        if (seed_override) cfg.has(prefix + ".seed"); // consume if present
        g.base = std::make_shared<fl::FrequencyGenerator>(
            build_generator(cfg, prefix + ".base", seed_override));
        return fl::FrequencyGenerator(std::move(g));
    }
    throw fl::config_error("unknown pointset kind '" + kind + "'",
                           cfg.line_of(prefix + ".kind"));
}

/// Either an explicit `centers` list or a `centers_span = [lo, hi, count]`.
std::vector<double> center_grid(TrackedConfig& cfg, const std::string& prefix) {
    const bool has_list = cfg.has(prefix + ".centers");
    const bool has_span = cfg.has(prefix + ".centers_span");
    if (has_list == has_span)
        throw fl::config_error("[" + prefix + "] needs exactly one of 'centers' or "
                                               "'centers_span'");
    if (has_list) return cfg.number_list(prefix + ".centers");
    const auto span = cfg.number_list(prefix + ".centers_span");
    if (span.size() != 3 || span[2] < 1 || span[2] != std::floor(span[2]))
        throw fl::config_error("'" + prefix + ".centers_span' must be [lo, hi, count]",
                               cfg.line_of(prefix + ".centers_span"));
    const int n = static_cast<int>(span[2]);
    std::vector<double> grid;
    for (int i = 0; i < n; ++i)
        grid.push_back(n == 1 ? span[0]
                              : span[0] + (span[1] - span[0]) * i / double(n - 1));
    return grid;
}

struct OutputTargets {
    std::optional<std::string> json_path;
    std::optional<std::string> csv_dir;
};

OutputTargets output_targets(TrackedConfig& cfg, const std::string& out_flag,
                             const std::string& csv_flag) {
    OutputTargets t;
    if (cfg.has("output.json")) t.json_path = cfg.string("output.json");
    if (cfg.has("output.csv_dir")) t.csv_dir = cfg.string("output.csv_dir");
    if (!out_flag.empty()) t.json_path = out_flag;   // flags override config scalars
    if (!csv_flag.empty()) t.csv_dir = csv_flag;
    return t;
}

json run_density(TrackedConfig& cfg, const fl::FrequencyGenerator& gen,
                 const OutputTargets& out) {
    const std::vector<double> radii = cfg.number_list("density.radii");
    if (radii.empty())
        throw fl::config_error("'density.radii' must be nonempty",
                               cfg.line_of("density.radii"));
    const double r_max = radii.back();
    double halfwidth = cfg.number_or("density.scan_halfwidth", 4.0 * r_max);
    double step;
    if (cfg.has("density.center_grid_step")) {
        step = cfg.number("density.center_grid_step");
    } else {
        const auto probe = fl::separation_stats(fl::realize(gen, 0.0, r_max));
        step = probe.sep ? *probe.sep / 4.0 : r_max / 16.0;
    }
    const fl::DensityReport report = fl::beurling_density(gen, radii, step, halfwidth);
    if (out.csv_dir) {
        std::vector<std::vector<double>> rows;
        for (const auto& c : report.curves) rows.push_back({c.r, c.d_minus_r, c.d_plus_r});
        fl::write_csv(*out.csv_dir + "/density.csv", {"r", "D_minus_r", "D_plus_r"}, rows);
    }
    json payload = fl::to_json(report);
    payload["center_grid_step"] = step;
    payload["scan_halfwidth"] = halfwidth;
    return payload;
}

json run_frames(TrackedConfig& cfg, const fl::Spectrum& spectrum,
                const fl::FrequencyGenerator& gen, unsigned threads,
                const OutputTargets& out) {
    json payload;
    payload["spectrum"] = fl::to_json(spectrum);
    bool any = false;

    if (cfg.has("frames.measure.r")) {
        any = true;
        const double r = cfg.number("frames.measure.r");
        const auto centers = center_grid(cfg, "frames.measure");
        const double trim = cfg.number("frames.measure.trim");
        const double rank_tol = cfg.number_or("frames.measure.rank_tol", 1e-8);
        const fl::FrameDiagnostics d =
            fl::frame_measure_upper(spectrum, gen, r, centers, trim, rank_tol, threads);
        payload["measure"] = fl::to_json(d);
        if (out.csv_dir) {
            std::vector<std::vector<double>> rows;
            for (const auto& c : d.per_center)
                if (c.core_average) rows.push_back({c.center, *c.core_average});
            fl::write_csv(*out.csv_dir + "/frames_measure.csv", {"center", "core_average"},
                          rows);
        }
    }
    if (cfg.has("frames.critical.r")) {
        any = true;
        const double r = cfg.number("frames.critical.r");
        const auto centers = center_grid(cfg, "frames.critical");
        const double rt = cfg.number_or("frames.critical.R_truncation", 4.0 * r);
        const double rank_tol = cfg.number_or("frames.critical.rank_tol", 1e-8);
        const fl::CriticalScanResult res =
            fl::critical_frame_scan(spectrum, gen, r, centers, rt, rank_tol, threads);
        payload["critical"] = fl::to_json(res);
        if (out.csv_dir) {
            std::vector<std::vector<double>> rows;
            for (const auto& e : res.per_center)
                if (e.min_diag) rows.push_back({e.center, *e.min_diag});
            fl::write_csv(*out.csv_dir + "/frames_critical.csv", {"center", "min_diag"},
                          rows);
        }
    }
    if (cfg.has("frames.bounds.window_r")) {
        any = true;
        const fl::FrameBoundsEstimate b = fl::frame_bounds_probe(
            spectrum, gen, cfg.number("frames.bounds.window_r"),
            cfg.number("frames.bounds.probe_step"),
            cfg.number("frames.bounds.probe_halfwidth"),
            cfg.number_or("frames.bounds.reg_tol", 0.1));
        payload["bounds"] = fl::to_json(b);
    }
    if (cfg.has("frames.functional.r")) {
        any = true;
        payload["functional"] = json{
            {"value", fl::riesz_density_functional(
                          spectrum, gen, cfg.number("frames.functional.r"),
                          cfg.number_or("frames.functional.center", 0.0),
                          cfg.number_or("frames.functional.y_step", 1.0 / 32.0),
                          cfg.number_or("frames.functional.rank_tol", 1e-8))}};
    }
    if (cfg.has("frames.eigenvalues.r")) {
        any = true;
        const double r = cfg.number("frames.eigenvalues.r");
        const double center = cfg.number_or("frames.eigenvalues.center", 0.0);
        const auto pts = fl::realize(gen, center, r);
        const auto eig = fl::decompose(fl::assemble_gram(spectrum, pts));
        payload["eigenvalues"] = json{{"center", center},
                                      {"window_r", r},
                                      {"n_points", pts.points.size()},
                                      {"values", eig.eigenvalues}};
        if (out.csv_dir) {
            std::vector<std::vector<double>> rows;
            for (std::size_t i = 0; i < eig.eigenvalues.size(); ++i)
                rows.push_back({static_cast<double>(i), eig.eigenvalues[i]});
            fl::write_csv(*out.csv_dir + "/frames_eigenvalues.csv",
                          {"index", "eigenvalue"}, rows);
        }
    }
    if (cfg.has("frames.residual.r")) {
        any = true;
        const double r = cfg.number("frames.residual.r");
        const fl::ResidualScanResult res = fl::residual_set_scan(
            spectrum, gen, cfg.number("frames.residual.eps"), r,
            center_grid(cfg, "frames.residual"),
            cfg.number_or("frames.residual.R_truncation", 4.0 * r),
            cfg.number_or("frames.residual.y_step", 1.0 / 32.0),
            cfg.number_or("frames.residual.rank_tol", 1e-8), threads);
        payload["residual"] = fl::to_json(res);
        if (out.csv_dir) {
            std::vector<std::vector<double>> rows;
            for (const auto& e : res.per_center) rows.push_back({e.center, e.measure});
            fl::write_csv(*out.csv_dir + "/frames_residual.csv", {"center", "measure"},
                          rows);
        }
    }
    if (!any)
        throw fl::config_error(
            "frames: no analysis requested; add [frames.measure], [frames.critical], "
            "[frames.bounds], [frames.functional], [frames.residual] or "
            "[frames.eigenvalues]");
    return payload;
}

json run_hull(TrackedConfig& cfg, const fl::FrequencyGenerator& gen, unsigned threads,
              const OutputTargets& out) {
    json payload;
    bool any = false;

    if (cfg.has("hull.match.r")) {
        any = true;
        const double r = cfg.number("hull.match.r");
        const double guard = cfg.number_or("hull.match.guard", fl::kHullGuard);
        const double shift = cfg.number("hull.match.shift");
        const fl::WindowedPointSet a = fl::realize(gen, 0.0, r + guard);
        const fl::WindowedPointSet b =
            fl::translate(fl::realize(gen, shift, r + guard), shift);
        const fl::MatchResult m = fl::local_match(a, b, r, guard);
        payload["match"] = fl::to_json(m);
        payload["match"]["weak_distance"] = fl::weak_distance(a, b, r, guard);
        payload["match"]["shift"] = shift;
    }
    if (cfg.has("hull.orbit.r")) {
        any = true;
        const fl::OrbitSample o = fl::orbit_sample(
            gen, cfg.number_list("hull.orbit.translates"), cfg.number("hull.orbit.r"),
            cfg.number_or("hull.orbit.eps_cluster", 0.05), threads);
        payload["orbit"] = fl::to_json(o);
    }
    if (cfg.has("hull.repetitivity.r")) {
        any = true;
        const auto hits = fl::repetitivity_probe(
            gen, cfg.number("hull.repetitivity.r"), cfg.number("hull.repetitivity.eps"),
            cfg.number("hull.repetitivity.halfwidth"),
            cfg.number("hull.repetitivity.step"), threads);
        json rows = json::array();
        std::vector<std::vector<double>> csv_rows;
        for (const auto& h : hits) {
            rows.push_back(json{{"x", h.x}, {"weak_distance", h.distance}});
            csv_rows.push_back({h.x, h.distance});
        }
        payload["repetitivity"] = json{{"returns", rows}, {"count", hits.size()}};
        if (out.csv_dir)
            fl::write_csv(*out.csv_dir + "/hull_repetitivity.csv",
                          {"x", "weak_distance"}, csv_rows);
    }
    if (cfg.has("hull.sot.R_truncation")) {
        any = true;
        TrackedConfig& c = cfg;
        const fl::Spectrum spectrum = build_spectrum(c);
        const double rt = cfg.number("hull.sot.R_truncation");
        std::vector<double> freqs{0.0};
        std::vector<fl::complex_d> coeffs{1.0};
        if (cfg.has("hull.sot.freqs")) {
            freqs = cfg.number_list("hull.sot.freqs");
            const auto re = cfg.number_list("hull.sot.coeffs_re");
            std::vector<double> im(re.size(), 0.0);
            if (cfg.has("hull.sot.coeffs_im")) im = cfg.number_list("hull.sot.coeffs_im");
            if (re.size() != freqs.size() || im.size() != freqs.size())
                throw fl::config_error("hull.sot coefficient arrays must match freqs",
                                       cfg.line_of("hull.sot.freqs"));
            coeffs.clear();
            for (std::size_t i = 0; i < re.size(); ++i) coeffs.emplace_back(re[i], im[i]);
        }
        const fl::ExpPolynomial f = fl::make_exp_polynomial(freqs, coeffs);
        const fl::WindowedPointSet limit = fl::realize(gen, 0.0, rt);
        const auto norms = fl::sot_convergence_probe(
            spectrum, gen, cfg.number_list("hull.sot.translates"), limit, f, rt, threads);
        payload["sot"] = json{{"translates", cfg.number_list("hull.sot.translates")},
                              {"norms", norms}};
    }
    if (!any)
        throw fl::config_error(
            "hull: no operation requested; add [hull.match], [hull.orbit], "
            "[hull.repetitivity] or [hull.sot]");
    return payload;
}

int run(const std::string& command, const std::string& config_path,
        const std::string& out_flag, const std::string& csv_flag, unsigned threads,
        std::optional<std::uint64_t> seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const fl::Config cfg = fl::Config::parse_file(config_path);
    TrackedConfig tracked(cfg);
    const OutputTargets out = output_targets(tracked, out_flag, csv_flag);
    if (out.csv_dir) std::filesystem::create_directories(*out.csv_dir);

    json payload;
    if (command == "density") {
        const auto gen = build_generator(tracked, "pointset", seed);
        payload = run_density(tracked, gen, out);
    } else if (command == "frames") {
        const auto spectrum = build_spectrum(tracked);
        const auto gen = build_generator(tracked, "pointset", seed);
        payload = run_frames(tracked, spectrum, gen, threads, out);
    } else {
        const auto gen = build_generator(tracked, "pointset", seed);
        payload = run_hull(tracked, gen, threads, out);
    }
    tracked.reject_unknown();

    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    const json envelope =
        fl::report_envelope(command, fl::config_hash(cfg), ms, std::move(payload));
    const std::string text = envelope.dump(2) + "\n";
    if (out.json_path) {
        std::ofstream f(*out.json_path);
        if (!f) throw std::runtime_error("cannot open output file: " + *out.json_path);
        f << text;
    } else {
        std::cout << text;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"framelab: numerical laboratory for exponential systems on "
                 "finite-measure spectra"};
    app.require_subcommand(1);

    std::string config_path, out_path, csv_dir;
    unsigned threads = 1;
    std::uint64_t seed_value = 0;
    bool seed_given = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_path, "write the JSON report here (default stdout)");
        sub->add_option("--csv", csv_dir, "emit CSV side files into this directory");
        sub->add_option("--threads", threads, "worker thread cap (results are unchanged)");
        sub->add_option("--seed", seed_value, "override perturbation seeds")
            ->each([&](const std::string&) { seed_given = true; });
    };
    add_common(app.add_subcommand("density", "Beurling density scan"));
    add_common(app.add_subcommand("frames", "frame diagnostics suite"));
    add_common(app.add_subcommand("hull", "weak-limit and repetitivity probes"));
    app.add_subcommand("version", "print version");

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    if (command == "version") {
        std::cout << fl::kToolName << " " << fl::kVersion << "\n";
        return 0;
    }

    try {
        return run(command, config_path, out_path, csv_dir, std::max(1u, threads),
                   seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt);
    } catch (const fl::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fl::invalid_input& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fl::resource_limit& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 3;
    } catch (const fl::invariant_violation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const fl::degenerate_probe& e) {
        std::cerr << "degenerate probe: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
