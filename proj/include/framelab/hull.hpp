#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/frame_analysis.hpp"
#include "framelab/numeric.hpp"
#include "framelab/parallel.hpp"
#include "framelab/pointset.hpp"
#include "framelab/spectrum.hpp"

namespace framelab {

inline constexpr double kHullGuard = 1.0;

/// Bijective local pairing between two windowed sets on B_r(0).
struct MatchResult {
    std::vector<std::pair<int, int>> pairs; // (index in A, index in B)
    double epsilon_achieved = 0.0;
    std::vector<int> unmatched_a; // core indices of A left unpaired
    std::vector<int> unmatched_b;
};

namespace detail {

inline void require_window_covers(const WindowedPointSet& w, double reach,
                                  const char* who) {
    if (!(w.center - w.radius <= -reach && w.center + w.radius >= reach))
        throw invalid_input(std::string(who) + ": window must contain B_{r+guard}(0)");
}

} // namespace detail

/// Greedy nearest-neighbor matching of A and B restricted to B_r(0). Points
/// in the guard annulus (r, r+guard] are eligible as partners, which absorbs
/// boundary drift without the measure-zero nondegeneracy condition. For
/// separated sets with min gap s and epsilon_achieved < s/2 the matching is
/// the unique one.
inline MatchResult local_match(const WindowedPointSet& a, const WindowedPointSet& b,
                               double r, double guard = kHullGuard) {
    if (!(r > 0.0) || !(guard > 0.0))
        throw invalid_input("local_match: r and guard must be > 0");
    detail::require_window_covers(a, r + guard, "local_match(A)");
    detail::require_window_covers(b, r + guard, "local_match(B)");

    const auto eligible = [&](const WindowedPointSet& w) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < w.points.size(); ++i)
            if (std::abs(w.points[i]) <= r + guard) idx.push_back(static_cast<int>(i));
        return idx;
    };
    const auto is_core = [&](const WindowedPointSet& w, int i) {
        return std::abs(w.points[static_cast<std::size_t>(i)]) < r;
    };
    const std::vector<int> ia = eligible(a);
    const std::vector<int> ib = eligible(b);

    struct Candidate {
        double dist;
        int i, j;
    };
    std::vector<Candidate> cands;
    for (int i : ia)
        for (int j : ib)
            if (is_core(a, i) || is_core(b, j))
                cands.push_back({std::abs(a.points[static_cast<std::size_t>(i)] -
                                          b.points[static_cast<std::size_t>(j)]),
                                 i, j});
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
        if (x.dist != y.dist) return x.dist < y.dist;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });

    MatchResult res;
    std::vector<char> used_a(a.points.size(), 0), used_b(b.points.size(), 0);
    for (const Candidate& c : cands) {
        if (used_a[static_cast<std::size_t>(c.i)] || used_b[static_cast<std::size_t>(c.j)])
            continue;
        used_a[static_cast<std::size_t>(c.i)] = 1;
        used_b[static_cast<std::size_t>(c.j)] = 1;
        res.pairs.emplace_back(c.i, c.j);
        res.epsilon_achieved = std::max(res.epsilon_achieved, c.dist);
    }
    for (int i : ia)
        if (is_core(a, i) && !used_a[static_cast<std::size_t>(i)])
            res.unmatched_a.push_back(i);
    for (int j : ib)
        if (is_core(b, j) && !used_b[static_cast<std::size_t>(j)])
            res.unmatched_b.push_back(j);
    return res;
}

/// Smallest eps such that each set's B_r(0)-points lie within eps of the
/// other set's guard-extended points: the two-sided inclusion radius of the
/// weak-convergence definition. Infinity when one side has core points but
/// the other side is empty on B_{r+guard}(0).
inline double weak_distance(const WindowedPointSet& a, const WindowedPointSet& b, double r,
                            double guard = kHullGuard) {
    if (!(r > 0.0) || !(guard > 0.0))
        throw invalid_input("weak_distance: r and guard must be > 0");
    detail::require_window_covers(a, r + guard, "weak_distance(A)");
    detail::require_window_covers(b, r + guard, "weak_distance(B)");

    const auto one_sided = [&](const WindowedPointSet& from, const WindowedPointSet& to) {
        std::vector<double> partners;
        for (double q : to.points)
            if (std::abs(q) <= r + guard) partners.push_back(q);
        double worst = 0.0;
        for (double p : from.points) {
            if (!(std::abs(p) < r)) continue;
            if (partners.empty()) return std::numeric_limits<double>::infinity();
            auto it = std::lower_bound(partners.begin(), partners.end(), p);
            double d = std::numeric_limits<double>::infinity();
            if (it != partners.end()) d = std::min(d, *it - p);
            if (it != partners.begin()) d = std::min(d, p - *(it - 1));
            worst = std::max(worst, d);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

/// Realized orbit of translates with an optional stabilized weak limit.
struct OrbitSample {
    std::vector<double> translates;
    std::vector<WindowedPointSet> windows;          // (Lambda - x_n) cap B_{r+1}(0)
    std::optional<WindowedPointSet> candidate_limit;
};

/// Realizes (Lambda - x_n) cap B_{r+1}(0) for each translate and declares the
/// final realization a candidate weak limit when the last three windows are
/// pairwise within eps_cluster in weak_distance at radius r.
inline OrbitSample orbit_sample(const FrequencyGenerator& gen,
                                const std::vector<double>& translates, double r,
                                double eps_cluster, unsigned threads = 1) {
    if (translates.empty()) throw invalid_input("orbit_sample: translates must be nonempty");
    OrbitSample out;
    out.translates = translates;
    out.windows.resize(translates.size());
    parallel_for(translates.size(), threads, [&](std::size_t i) {
        out.windows[i] = translate(realize(gen, translates[i], r + kHullGuard),
                                   translates[i]);
    });
    if (translates.size() >= 3) {
        const std::size_t n = translates.size();
        bool stable = true;
        for (std::size_t i = n - 3; i < n && stable; ++i)
            for (std::size_t j = i + 1; j < n && stable; ++j)
                stable = weak_distance(out.windows[i], out.windows[j], r) <= eps_cluster;
        if (stable) out.candidate_limit = out.windows.back();
    }
    return out;
}

struct ReturnVector {
    double x;
    double distance;
};

/// Scans translates x in [-search_halfwidth, search_halfwidth] and returns
/// those with weak_distance(Lambda, Lambda - x, r) <= eps: the eps-return
/// vectors. For (almost) repetitive sets this list is relatively dense in the
/// scan range; bounded return gaps are the reported evidence.
inline std::vector<ReturnVector> repetitivity_probe(const FrequencyGenerator& gen, double r,
                                                    double eps, double search_halfwidth,
                                                    double step, unsigned threads = 1) {
    if (!(step > 0.0 && step <= 0.5 * eps))
        throw invalid_input("repetitivity_probe: step must be in (0, eps/2]");
    if (!(search_halfwidth > 0.0))
        throw invalid_input("repetitivity_probe: search_halfwidth must be > 0");
    const WindowedPointSet base = realize(gen, 0.0, r + kHullGuard);
    const long long k_max = static_cast<long long>(std::floor(search_halfwidth / step));
    const std::size_t count = static_cast<std::size_t>(2 * k_max + 1);
    std::vector<double> dist(count);
    parallel_for(count, threads, [&](std::size_t i) {
        const double x = static_cast<double>(static_cast<long long>(i) - k_max) * step;
        const WindowedPointSet shifted = translate(realize(gen, x, r + kHullGuard), x);
        dist[i] = weak_distance(base, shifted, r);
    });
    std::vector<ReturnVector> hits;
    for (std::size_t i = 0; i < count; ++i)
        if (dist[i] <= eps)
            hits.push_back({static_cast<double>(static_cast<long long>(i) - k_max) * step,
                            dist[i]});
    return hits;
}

/// Strong-operator-topology probe: per translate, the truncated frame
/// operators of (Lambda - x_n) and of the limit window are applied to f and
/// the norm of the difference returned (closed form via norm_sq).
inline std::vector<double> sot_convergence_probe(const Spectrum& s,
                                                 const FrequencyGenerator& gen,
                                                 const std::vector<double>& translates,
                                                 const WindowedPointSet& limit,
                                                 const ExpPolynomial& f, double R_truncation,
                                                 unsigned threads = 1) {
    if (!(R_truncation > 0.0))
        throw invalid_input("sot_convergence_probe: R_truncation must be > 0");
    for (double fr : f.freqs)
        if (!(std::abs(fr) <= 0.5 * R_truncation))
            throw invalid_input(
                "sot_convergence_probe: f's frequencies must lie within B_{R/2}");
    const ExpPolynomial limit_image = apply_frame_operator(s, limit, f);
    std::vector<double> norms(translates.size());
    parallel_for(translates.size(), threads, [&](std::size_t i) {
        const WindowedPointSet pts =
            translate(realize(gen, translates[i], R_truncation), translates[i]);
        const ExpPolynomial image = apply_frame_operator(s, pts, f);
        norms[i] = std::sqrt(norm_sq(s, poly_difference(image, limit_image)));
    });
    return norms;
}

} // namespace framelab
