#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "framelab/config.hpp"
#include "framelab/frame_analysis.hpp"
#include "framelab/hull.hpp"
#include "framelab/numeric.hpp"
#include "framelab/pointset.hpp"
#include "framelab/spectrum.hpp"
#include "framelab/version.hpp"

namespace framelab {

using json = nlohmann::json;

/// Canonical JSON image of a parsed config: object keys are sorted, so the
/// hash is stable under key/table reordering in the source text.
inline json config_canonical_json(const ConfigValue& v) {
    switch (v.kind) {
        case ConfigValue::Kind::Number: return v.num;
        case ConfigValue::Kind::String: return v.str;
        case ConfigValue::Kind::Boolean: return v.boolean;
        case ConfigValue::Kind::Array: {
            json arr = json::array();
            for (const ConfigValue& e : v.array) arr.push_back(config_canonical_json(e));
            return arr;
        }
    }
    return nullptr;
}

inline std::string config_hash(const Config& cfg) {
    json obj = json::object();
    for (const auto& [key, value] : cfg.entries())
        obj[key] = config_canonical_json(value);
    std::ostringstream hex;
    hex << "fnv1a:" << std::hex << std::setw(16) << std::setfill('0')
        << fnv1a64(obj.dump());
    return hex.str();
}

/// Wraps a command payload with tool/version/config provenance. timing_ms is
/// wall-clock and is the one field excluded from byte-identity comparisons.
inline json report_envelope(const std::string& command, const std::string& cfg_hash,
                            double timing_ms, json payload) {
    return json{{"tool", kToolName},
                {"version", kVersion},
                {"command", command},
                {"config_hash", cfg_hash},
                {"timing_ms", timing_ms},
                {"payload", std::move(payload)}};
}

inline json to_json(const Spectrum& s) {
    json intervals = json::array();
    for (const auto& [a, b] : s.intervals()) intervals.push_back(json::array({a, b}));
    return json{{"intervals", intervals}};
}

inline Spectrum spectrum_from_json(const json& j) {
    std::vector<Spectrum::Interval> intervals;
    for (const auto& pair : j.at("intervals"))
        intervals.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    return Spectrum(std::move(intervals));
}

inline json to_json(const WindowedPointSet& w) {
    return json{{"points", w.points}, {"center", w.center}, {"radius", w.radius}};
}

inline json to_json(const DensityReport& r) {
    json curves = json::array();
    for (const auto& c : r.curves)
        curves.push_back(json{{"r", c.r}, {"D_minus_r", c.d_minus_r}, {"D_plus_r", c.d_plus_r}});
    json out{{"D_minus_est", r.D_minus_est},
             {"D_plus_est", r.D_plus_est},
             {"radii_used", r.radii_used},
             {"curves", curves}};
    out["sep"] = r.sep ? json(*r.sep) : json();
    out["rel"] = r.rel ? json(*r.rel) : json();
    return out;
}

inline json to_json(const FrameDiagnostics& d) {
    json per_center = json::array();
    for (const auto& c : d.per_center) {
        json e{{"center", c.center}, {"n_points", c.n_points}};
        e["core_average"] = c.core_average ? json(*c.core_average) : json();
        per_center.push_back(std::move(e));
    }
    json dual = json::array();
    for (const auto& [p, v] : d.dual_diag) dual.push_back(json::array({p, v}));
    json out{{"M_plus_est", d.M_plus_est},
             {"window_r", d.window_r},
             {"trim", d.trim},
             {"per_center", per_center},
             {"skipped_centers", d.skipped_centers},
             {"dual_diag", dual}};
    if (d.A_est) out["A_est"] = *d.A_est;
    if (d.B_est) out["B_est"] = *d.B_est;
    return out;
}

inline json to_json(const CriticalScanResult& r) {
    json per_center = json::array();
    for (const auto& e : r.per_center) {
        json row{{"center", e.center}, {"n_core", e.n_core}};
        row["min_diag"] = e.min_diag ? json(*e.min_diag) : json();
        per_center.push_back(std::move(row));
    }
    return json{{"best_center", r.best_center},
                {"best_min_diag", r.best_min_diag},
                {"per_center", per_center}};
}

inline json to_json(const FrameBoundsEstimate& b) {
    return json{{"A_est", b.A_est},
                {"B_est", b.B_est},
                {"probes_kept", b.probes_kept},
                {"probe_count", b.probe_count}};
}

inline json to_json(const ResidualScanResult& r) {
    json per_center = json::array();
    for (const auto& e : r.per_center)
        per_center.push_back(json{{"center", e.center}, {"measure", e.measure}});
    return json{{"best_center", r.best_center},
                {"best_measure", r.best_measure},
                {"per_center", per_center}};
}

inline json to_json(const MatchResult& m) {
    json pairs = json::array();
    for (const auto& [i, j] : m.pairs) pairs.push_back(json::array({i, j}));
    return json{{"pairs", pairs},
                {"epsilon_achieved", m.epsilon_achieved},
                {"unmatched_a", m.unmatched_a},
                {"unmatched_b", m.unmatched_b}};
}

inline json to_json(const OrbitSample& o) {
    json windows = json::array();
    for (const auto& w : o.windows) windows.push_back(to_json(w));
    json out{{"translates", o.translates}, {"windows", windows}};
    out["candidate_limit"] = o.candidate_limit ? to_json(*o.candidate_limit) : json();
    return out;
}

/// Plain CSV writer; rows are written with full double round-trip precision.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open CSV output: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << (i ? "," : "") << header[i];
    out << "\n";
    out << std::setprecision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

} // namespace framelab
