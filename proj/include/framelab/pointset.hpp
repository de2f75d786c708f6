#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/numeric.hpp"

namespace framelab {

inline constexpr std::size_t kMaxRealizedPoints = 10'000'000;

class FrequencyGenerator;

/// Arithmetic progression { step*n + offset : n in Z }, step > 0.
struct Lattice {
    double step = 1.0;
    double offset = 0.0;
};

/// Finite, strictly increasing list of frequencies.
struct Explicit {
    std::vector<double> points;
};

/// One-dimensional cut-and-project set: gamma = basis * (n, m) over integer
/// pairs, keeping p1(gamma) when p2(gamma) lies in the half-open window
/// [window_lo, window_hi). basis is row-major {b00, b01, b10, b11}.
struct CutProject {
    std::array<double, 4> basis{1.0, 0.0, 0.0, 1.0};
    double window_lo = 0.0;
    double window_hi = 1.0;
};

/// Union of sub-generators; realized points are merged and deduplicated.
struct UnionOf {
    std::vector<FrequencyGenerator> members;
};

/// Base generator with i.i.d. uniform offsets in [-amplitude, amplitude),
/// drawn from a counter-based stream keyed by the base point's lattice index,
/// so realizations are window-consistent. Offsets are quantized to a
/// 2^-25-grid of the amplitude; with dyadic parameters a translated generator
/// realizes to exactly translated points.
struct Perturbed {
    std::shared_ptr<const FrequencyGenerator> base;
    double amplitude = 0.0;
    std::uint64_t seed = 0;
};

class FrequencyGenerator {
  public:
    using Variant = std::variant<Lattice, Explicit, CutProject, UnionOf, Perturbed>;

    FrequencyGenerator(Lattice g) : v_(validate(std::move(g))) {}
    FrequencyGenerator(Explicit g) : v_(validate(std::move(g))) {}
    FrequencyGenerator(CutProject g) : v_(validate(std::move(g))) {}
    FrequencyGenerator(UnionOf g) : v_(std::move(g)) {}
    FrequencyGenerator(Perturbed g) : v_(validate(std::move(g))) {}

    const Variant& value() const { return v_; }

    template <typename T>
    const T* get_if() const {
        return std::get_if<T>(&v_);
    }

  private:
    static Lattice validate(Lattice g) {
        if (!(g.step > 0.0) || !std::isfinite(g.step) || !std::isfinite(g.offset))
            throw invalid_input("lattice: step must be finite and > 0");
        return g;
    }
    static Explicit validate(Explicit g) {
        for (std::size_t i = 0; i < g.points.size(); ++i) {
            if (!std::isfinite(g.points[i]))
                throw invalid_input("explicit: points must be finite");
            if (i > 0 && !(g.points[i - 1] < g.points[i]))
                throw invalid_input("explicit: points must be strictly increasing");
        }
        return g;
    }
    static CutProject validate(CutProject g) {
        const double det = g.basis[0] * g.basis[3] - g.basis[1] * g.basis[2];
        if (!std::isfinite(det) || std::abs(det) < 1e-9)
            throw invalid_input("cut_project: basis is (near-)singular, |det| < 1e-9");
        if (!std::isfinite(g.window_lo) || !std::isfinite(g.window_hi) ||
            g.window_hi < g.window_lo)
            throw invalid_input("cut_project: window must satisfy lo <= hi");
        return g;
    }
    static Perturbed validate(Perturbed g) {
        if (!g.base) throw invalid_input("perturbed: missing base generator");
        if (!(g.amplitude >= 0.0) || !std::isfinite(g.amplitude))
            throw invalid_input("perturbed: amplitude must be finite and >= 0");
        return g;
    }

    Variant v_;
};

/// A realized finite window Lambda intersected with the open ball B_radius(center).
struct WindowedPointSet {
    std::vector<double> points; // strictly increasing, all |p - center| < radius
    double center = 0.0;
    double radius = 0.0;
};

struct SeparationStats {
    std::optional<double> sep; // min consecutive gap; needs >= 2 points
    std::optional<int> rel;    // max count in a closed unit window; needs >= 1
};

struct DensityCurvePoint {
    double r;
    double d_minus_r;
    double d_plus_r;
};

struct DensityReport {
    double D_minus_est = 0.0;
    double D_plus_est = 0.0;
    std::optional<double> sep;
    std::optional<int> rel;
    std::vector<double> radii_used;
    std::vector<DensityCurvePoint> curves;
};

namespace detail {

struct TaggedPoint {
    double value;
    std::uint64_t key;
};

inline void check_budget(std::size_t count) {
    if (count > kMaxRealizedPoints)
        throw resource_limit("realize: window produces too many points", count,
                             kMaxRealizedPoints);
}

inline void enumerate_lattice(const Lattice& g, double lo, double hi,
                              std::vector<TaggedPoint>& out) {
    if (!(lo < hi)) return;
    const double n_lo = std::ceil((lo - g.offset) / g.step) - 1.0;
    const double n_hi = std::floor((hi - g.offset) / g.step) + 1.0;
    if (n_hi < n_lo) return;
    check_budget(out.size() + static_cast<std::size_t>(std::max(0.0, n_hi - n_lo + 1.0)));
    for (double n = n_lo; n <= n_hi; n += 1.0) {
        const double p = g.step * n + g.offset;
        if (p > lo && p < hi)
            out.push_back({p, static_cast<std::uint64_t>(static_cast<std::int64_t>(n))});
    }
}

inline void enumerate_cut_project(const CutProject& g, double lo, double hi,
                                  std::vector<TaggedPoint>& out) {
    if (!(lo < hi) || !(g.window_lo < g.window_hi)) return;
    const double b00 = g.basis[0], b01 = g.basis[1], b10 = g.basis[2], b11 = g.basis[3];
    const double det = b00 * b11 - b01 * b10;
    // Integer preimage of the box [lo,hi] x [wlo,whi] is a parallelogram whose
    // n-extent is attained at the box corners.
    double n_min = std::numeric_limits<double>::infinity();
    double n_max = -n_min;
    for (double x : {lo, hi}) {
        for (double y : {g.window_lo, g.window_hi}) {
            const double n = (b11 * x - b01 * y) / det;
            n_min = std::min(n_min, n);
            n_max = std::max(n_max, n);
        }
    }
    const auto m_interval = [](double coef, double c0, double c1, double shift,
                               double& m_lo, double& m_hi) {
        // coef*m + shift in [c0, c1] solved for m (c0 <= c1).
        const double a = (c0 - shift) / coef;
        const double b = (c1 - shift) / coef;
        m_lo = std::max(m_lo, std::min(a, b));
        m_hi = std::min(m_hi, std::max(a, b));
    };
    const long long n_begin = static_cast<long long>(std::floor(n_min)) - 1;
    const long long n_end = static_cast<long long>(std::ceil(n_max)) + 1;
    for (long long ni = n_begin; ni <= n_end; ++ni) {
        const double n = static_cast<double>(ni);
        double m_lo = -std::numeric_limits<double>::infinity();
        double m_hi = std::numeric_limits<double>::infinity();
        if (b11 != 0.0) m_interval(b11, g.window_lo, g.window_hi, b10 * n, m_lo, m_hi);
        else if (!(b10 * n >= g.window_lo && b10 * n < g.window_hi)) continue;
        if (b01 != 0.0) m_interval(b01, lo, hi, b00 * n, m_lo, m_hi);
        else if (!(b00 * n > lo && b00 * n < hi)) continue;
        if (!(m_lo <= m_hi)) continue;
        const long long m_begin = static_cast<long long>(std::floor(m_lo)) - 1;
        const long long m_end = static_cast<long long>(std::ceil(m_hi)) + 1;
        for (long long mi = m_begin; mi <= m_end; ++mi) {
            const double m = static_cast<double>(mi);
            const double p1 = b00 * n + b01 * m;
            const double p2 = b10 * n + b11 * m;
            if (p2 >= g.window_lo && p2 < g.window_hi && p1 > lo && p1 < hi) {
                check_budget(out.size() + 1);
                out.push_back({p1, hash_mix(static_cast<std::uint64_t>(ni),
                                            static_cast<std::uint64_t>(mi))});
            }
        }
    }
}

inline void enumerate_points(const FrequencyGenerator& gen, double lo, double hi,
                             std::vector<TaggedPoint>& out);

inline void enumerate_union(const UnionOf& g, double lo, double hi,
                            std::vector<TaggedPoint>& out) {
    for (std::size_t i = 0; i < g.members.size(); ++i) {
        std::vector<TaggedPoint> part;
        enumerate_points(g.members[i], lo, hi, part);
        check_budget(out.size() + part.size());
        for (const auto& tp : part)
            out.push_back({tp.value, hash_mix(tp.key, static_cast<std::uint64_t>(i) + 1)});
    }
}

inline double perturbation_offset(const Perturbed& g, std::uint64_t key) {
    const std::uint64_t h = splitmix64(g.seed ^ splitmix64(key));
    const double u = static_cast<double>(h >> 38) * 0x1p-25; // 26-bit grid in [0, 2)
    return g.amplitude * (u - 1.0);
}

inline void enumerate_perturbed(const Perturbed& g, double lo, double hi,
                                std::vector<TaggedPoint>& out) {
    std::vector<TaggedPoint> base;
    enumerate_points(*g.base, lo - g.amplitude, hi + g.amplitude, base);
    std::sort(base.begin(), base.end(),
              [](const TaggedPoint& a, const TaggedPoint& b) { return a.value < b.value; });
    if (g.amplitude > 0.0 && base.size() >= 2) {
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < base.size(); ++i)
            min_gap = std::min(min_gap, base[i].value - base[i - 1].value);
        if (!(g.amplitude < 0.5 * min_gap))
            throw invalid_input(
                "perturbed: amplitude must be below half the base separation");
    }
    for (const auto& tp : base) {
        const double p = tp.value + perturbation_offset(g, tp.key);
        if (p > lo && p < hi) {
            check_budget(out.size() + 1);
            out.push_back({p, tp.key});
        }
    }
}

inline void enumerate_points(const FrequencyGenerator& gen, double lo, double hi,
                             std::vector<TaggedPoint>& out) {
    std::visit(
        [&](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Lattice>) {
                enumerate_lattice(g, lo, hi, out);
            } else if constexpr (std::is_same_v<T, Explicit>) {
                for (std::size_t i = 0; i < g.points.size(); ++i)
                    if (g.points[i] > lo && g.points[i] < hi)
                        out.push_back({g.points[i], static_cast<std::uint64_t>(i)});
            } else if constexpr (std::is_same_v<T, CutProject>) {
                enumerate_cut_project(g, lo, hi, out);
            } else if constexpr (std::is_same_v<T, UnionOf>) {
                enumerate_union(g, lo, hi, out);
            } else {
                enumerate_perturbed(g, lo, hi, out);
            }
        },
        gen.value());
}

} // namespace detail

/// Realizes the generator's points inside the open ball B_radius(center).
/// Deterministic given the generator (including perturbation seeds).
inline WindowedPointSet realize(const FrequencyGenerator& gen, double center,
                                double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius) || !std::isfinite(center))
        throw invalid_input("realize: radius must be finite and > 0");
    std::vector<detail::TaggedPoint> tagged;
    detail::enumerate_points(gen, center - radius, center + radius, tagged);
    std::sort(tagged.begin(), tagged.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    WindowedPointSet out;
    out.center = center;
    out.radius = radius;
    out.points.reserve(tagged.size());
    for (const auto& tp : tagged)
        if (out.points.empty() || tp.value != out.points.back())
            out.points.push_back(tp.value);
    return out;
}

/// Cut-and-project points for an explicit basis/window; see CutProject.
inline WindowedPointSet cut_and_project_points(const std::array<double, 4>& basis,
                                               double window_lo, double window_hi,
                                               double center, double radius) {
    CutProject g;
    g.basis = basis;
    g.window_lo = window_lo;
    g.window_hi = window_hi;
    return realize(FrequencyGenerator(g), center, radius);
}

/// sep = min consecutive gap (needs >= 2 points), rel = max point count in a
/// closed unit-length window, by a two-pointer sweep (needs >= 1 point).
/// Missing fields indicate a degenerate input rather than an error.
inline SeparationStats separation_stats(const WindowedPointSet& pts) {
    SeparationStats st;
    const auto& p = pts.points;
    if (!p.empty()) {
        int best = 1;
        std::size_t lo = 0;
        for (std::size_t hi = 0; hi < p.size(); ++hi) {
            while (p[hi] - p[lo] > 1.0) ++lo;
            best = std::max(best, static_cast<int>(hi - lo + 1));
        }
        st.rel = best;
    }
    if (p.size() >= 2) {
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < p.size(); ++i)
            min_gap = std::min(min_gap, p[i] - p[i - 1]);
        st.sep = min_gap;
    }
    return st;
}

/// Counts points in the open interval (lo, hi) of a sorted vector.
inline std::size_t count_in_open(const std::vector<double>& sorted, double lo, double hi) {
    auto first = std::upper_bound(sorted.begin(), sorted.end(), lo);
    auto last = std::lower_bound(sorted.begin(), sorted.end(), hi);
    return first < last ? static_cast<std::size_t>(last - first) : 0;
}

/// Finite surrogate for the Beurling densities: for each radius r the center
/// x is scanned over {-scan_halfwidth, ..., +scan_halfwidth} with the given
/// grid step, recording min and max of #(Lambda cap B_r(x)) / (2r). The
/// estimates are the extremes at the largest radius; the per-r curves are
/// kept so convergence in r stays inspectable.
inline DensityReport beurling_density(const FrequencyGenerator& gen,
                                      const std::vector<double>& radii,
                                      double center_grid_step, double scan_halfwidth) {
    if (radii.empty()) throw invalid_input("beurling_density: radii must be nonempty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw invalid_input("beurling_density: radii must be positive");
        if (i > 0 && !(radii[i - 1] < radii[i]))
            throw invalid_input("beurling_density: radii must be increasing");
    }
    if (!(center_grid_step > 0.0))
        throw invalid_input("beurling_density: center_grid_step must be > 0");
    const double r_max = radii.back();
    if (!(scan_halfwidth >= r_max))
        throw invalid_input("beurling_density: scan_halfwidth must be >= max radius");

    const WindowedPointSet master = realize(gen, 0.0, scan_halfwidth + r_max);
    const auto stats = separation_stats(master);

    DensityReport report;
    report.sep = stats.sep;
    report.rel = stats.rel;
    report.radii_used = radii;
    const long long n_steps =
        static_cast<long long>(std::floor(scan_halfwidth / center_grid_step));
    for (double r : radii) {
        double d_min = std::numeric_limits<double>::infinity();
        double d_max = 0.0;
        for (long long i = -n_steps; i <= n_steps; ++i) {
            const double x = static_cast<double>(i) * center_grid_step;
            const double ratio =
                static_cast<double>(count_in_open(master.points, x - r, x + r)) / (2.0 * r);
            d_min = std::min(d_min, ratio);
            d_max = std::max(d_max, ratio);
        }
        report.curves.push_back({r, d_min, d_max});
    }
    report.D_minus_est = report.curves.back().d_minus_r;
    report.D_plus_est = report.curves.back().d_plus_r;
    return report;
}

/// Lambda - x: subtracts x from every point and from the window center.
inline WindowedPointSet translate(const WindowedPointSet& pts, double x) {
    WindowedPointSet out;
    out.center = pts.center - x;
    out.radius = pts.radius;
    out.points.reserve(pts.points.size());
    for (double p : pts.points) out.points.push_back(p - x);
    return out;
}

/// Generator-level translation Lambda - x, for the variants where it stays
/// expressible (all but CutProject, whose translates leave the family).
inline FrequencyGenerator translated(const FrequencyGenerator& gen, double x) {
    return std::visit(
        [&](const auto& g) -> FrequencyGenerator {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, Lattice>) {
                return FrequencyGenerator(Lattice{g.step, g.offset - x});
            } else if constexpr (std::is_same_v<T, Explicit>) {
                Explicit shifted;
                shifted.points.reserve(g.points.size());
                for (double p : g.points) shifted.points.push_back(p - x);
                return FrequencyGenerator(std::move(shifted));
            } else if constexpr (std::is_same_v<T, UnionOf>) {
                UnionOf shifted;
                shifted.members.reserve(g.members.size());
                for (const auto& m : g.members) shifted.members.push_back(translated(m, x));
                return FrequencyGenerator(std::move(shifted));
            } else if constexpr (std::is_same_v<T, Perturbed>) {
                Perturbed shifted;
                shifted.base =
                    std::make_shared<FrequencyGenerator>(translated(*g.base, x));
                shifted.amplitude = g.amplitude;
                shifted.seed = g.seed;
                return FrequencyGenerator(std::move(shifted));
            } else {
                throw invalid_input("translated: cut-and-project sets have no "
                                    "translated generator form");
            }
        },
        gen.value());
}

} // namespace framelab
