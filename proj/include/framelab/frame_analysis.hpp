#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/numeric.hpp"
#include "framelab/parallel.hpp"
#include "framelab/pointset.hpp"
#include "framelab/specmat.hpp"
#include "framelab/spectrum.hpp"

namespace framelab {

/// Finite exponential sum f = sum_k c_k e_{freq_k}, an element of L^2(S).
struct ExpPolynomial {
    std::vector<double> freqs;      // strictly increasing
    std::vector<complex_d> coeffs;  // same length
};

/// Sorts by frequency and merges duplicates (coefficients add).
inline ExpPolynomial make_exp_polynomial(std::vector<double> freqs,
                                         std::vector<complex_d> coeffs) {
    if (freqs.size() != coeffs.size())
        throw invalid_input("exp_polynomial: freqs and coeffs must have equal length");
    std::vector<std::size_t> order(freqs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return freqs[a] < freqs[b]; });
    ExpPolynomial out;
    for (std::size_t i : order) {
        if (!std::isfinite(freqs[i]))
            throw invalid_input("exp_polynomial: frequencies must be finite");
        if (!out.freqs.empty() && freqs[i] == out.freqs.back()) {
            out.coeffs.back() += coeffs[i];
        } else {
            out.freqs.push_back(freqs[i]);
            out.coeffs.push_back(coeffs[i]);
        }
    }
    return out;
}

/// f - g as a single exponential polynomial (frequencies merged exactly).
inline ExpPolynomial poly_difference(const ExpPolynomial& f, const ExpPolynomial& g) {
    std::vector<double> freqs = f.freqs;
    std::vector<complex_d> coeffs = f.coeffs;
    freqs.insert(freqs.end(), g.freqs.begin(), g.freqs.end());
    for (const complex_d& c : g.coeffs) coeffs.push_back(-c);
    return make_exp_polynomial(std::move(freqs), std::move(coeffs));
}

/// ||f||^2 in L^2(S), evaluated in closed form as c* G c over f's frequencies.
inline double norm_sq(const Spectrum& s, const ExpPolynomial& f) {
    const std::size_t n = f.freqs.size();
    std::vector<double> terms;
    terms.reserve(n + n * (n - 1) / 2);
    const double meas = s.measure();
    for (std::size_t j = 0; j < n; ++j) terms.push_back(meas * std::norm(f.coeffs[j]));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            terms.push_back(2.0 * std::real(std::conj(f.coeffs[j]) * f.coeffs[k] *
                                            s.ft_indicator(f.freqs[j] - f.freqs[k])));
    const double v = terms.empty() ? 0.0 : pairwise_sum(terms);
    return std::max(v, 0.0);
}

/// Truncated frame operator S_Lambda f = sum_{lambda in pts} d_lambda e_lambda
/// with d_lambda = sum_k c_k 1_S^(lambda - freq_k); exact, no quadrature.
inline ExpPolynomial apply_frame_operator(const Spectrum& s, const WindowedPointSet& pts,
                                          const ExpPolynomial& f) {
    if (pts.points.empty())
        throw invalid_input("apply_frame_operator: point set must be nonempty");
    ExpPolynomial out;
    out.freqs = pts.points;
    out.coeffs.resize(pts.points.size());
    std::vector<complex_d> terms(f.freqs.size());
    for (std::size_t j = 0; j < pts.points.size(); ++j) {
        for (std::size_t k = 0; k < f.freqs.size(); ++k)
            terms[k] = f.coeffs[k] * s.ft_indicator(pts.points[j] - f.freqs[k]);
        out.coeffs[j] = terms.empty() ? complex_d{} : pairwise_sum(terms);
    }
    return out;
}

/// One Gram factorization of E(Lambda cap window), reusable across many probe
/// frequencies y. Tolerates an empty window (the projection is then zero).
class SpanProjector {
  public:
    SpanProjector(const Spectrum& s, const WindowedPointSet& pts, double rank_tol)
        : spectrum_(&s), points_(pts.points), rank_tol_(rank_tol) {
        if (!(rank_tol > 0.0 && rank_tol < 1.0))
            throw invalid_input("span_projector: rank_tol must be in (0,1)");
        if (points_.empty()) return;
        gram_ = assemble_gram(s, pts);
        eig_ = decompose(*gram_);
        const double lam_max = eig_->eigenvalues.front();
        kept_ = 0;
        if (lam_max > 0.0) {
            const double cutoff = rank_tol * lam_max;
            while (kept_ < static_cast<int>(points_.size()) &&
                   eig_->eigenvalues[static_cast<std::size_t>(kept_)] > cutoff)
                ++kept_;
        }
    }

    const std::vector<double>& points() const { return points_; }
    int retained_rank() const { return kept_; }
    const HermitianMatrix* gram() const { return gram_ ? &*gram_ : nullptr; }

    /// ||P_{span} e_y||^2 = g* G^+ g with g_j = 1_S^(lambda_j - y).
    double proj_norm_sq(double y) const {
        if (points_.empty() || kept_ == 0) return 0.0;
        const std::size_t n = points_.size();
        Eigen::VectorXcd g(static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j)
            g(static_cast<Eigen::Index>(j)) = spectrum_->ft_indicator(points_[j] - y);
        const Eigen::VectorXcd w = eig_->vectors.leftCols(kept_).adjoint() * g;
        std::vector<double> terms(static_cast<std::size_t>(kept_));
        for (int i = 0; i < kept_; ++i)
            terms[static_cast<std::size_t>(i)] =
                std::norm(w(i)) / eig_->eigenvalues[static_cast<std::size_t>(i)];
        return pairwise_sum(terms);
    }

    /// diag(G G^+): the per-point dual-diagonal surrogate, each entry in [0,1].
    std::vector<double> projection_diag() const {
        std::vector<double> diag(points_.size(), 0.0);
        for (std::size_t i = 0; i < points_.size(); ++i) {
            double acc = 0.0;
            for (int k = 0; k < kept_; ++k)
                acc += std::norm(eig_->vectors(static_cast<Eigen::Index>(i), k));
            diag[i] = std::min(1.0, acc);
        }
        return diag;
    }

  private:
    const Spectrum* spectrum_;
    std::vector<double> points_;
    double rank_tol_;
    std::optional<HermitianMatrix> gram_;
    std::optional<EigenDecomposition> eig_;
    int kept_ = 0;
};

/// ||P_{Lambda cap window} e_y||^2; in [0, |S|], equal to |S| when y is a point.
inline double projection_norm_sq(const Spectrum& s, const WindowedPointSet& pts, double y,
                                 double rank_tol) {
    if (pts.points.empty())
        throw invalid_input("projection_norm_sq: point set must be nonempty");
    return SpanProjector(s, pts, rank_tol).proj_norm_sq(y);
}

struct FrameMeasureCenter {
    double center;
    std::optional<double> core_average; // nullopt: core window was empty (skipped)
    std::size_t n_points = 0;
};

/// Windowed upper-frame-measure diagnostics; dual_diag holds the per-point
/// values at the maximizing center.
struct FrameDiagnostics {
    std::map<double, double> dual_diag;
    double M_plus_est = 0.0;
    std::optional<double> A_est;
    std::optional<double> B_est;
    double window_r = 0.0;
    double trim = 0.0;
    std::vector<FrameMeasureCenter> per_center;
    std::vector<double> skipped_centers;
};

/// Finite surrogate of the upper frame measure: per center, the dual diagonal
/// of E(Lambda cap B_r(x)) is averaged over the trimmed core B_{r-trim}(x);
/// M_plus_est is the maximum over centers.
inline FrameDiagnostics frame_measure_upper(const Spectrum& s, const FrequencyGenerator& gen,
                                            double r, const std::vector<double>& centers,
                                            double trim, double rank_tol,
                                            unsigned threads = 1) {
    if (!(trim >= 0.0 && trim < r))
        throw invalid_input("frame_measure_upper: trim must satisfy 0 <= trim < r");
    if (centers.empty())
        throw invalid_input("frame_measure_upper: centers must be nonempty");

    struct CenterOutcome {
        FrameMeasureCenter summary;
        std::map<double, double> diag;
    };
    std::vector<CenterOutcome> results(centers.size());
    parallel_for(centers.size(), threads, [&](std::size_t i) {
        const double x = centers[i];
        CenterOutcome& out = results[i];
        out.summary.center = x;
        const WindowedPointSet pts = realize(gen, x, r);
        out.summary.n_points = pts.points.size();
        SpanProjector proj(s, pts, rank_tol);
        const std::vector<double> diag = proj.projection_diag();
        std::vector<double> core_vals;
        for (std::size_t j = 0; j < pts.points.size(); ++j) {
            if (std::abs(pts.points[j] - x) <= r - trim) {
                core_vals.push_back(diag[j]);
                out.diag.emplace(pts.points[j], diag[j]);
            }
        }
        if (!core_vals.empty())
            out.summary.core_average =
                pairwise_sum(core_vals) / static_cast<double>(core_vals.size());
    });

    FrameDiagnostics d;
    d.window_r = r;
    d.trim = trim;
    std::size_t best = centers.size();
    for (std::size_t i = 0; i < results.size(); ++i) {
        d.per_center.push_back(results[i].summary);
        if (!results[i].summary.core_average) {
            d.skipped_centers.push_back(centers[i]);
            continue;
        }
        if (best == centers.size() ||
            *results[i].summary.core_average > *results[best].summary.core_average)
            best = i;
    }
    if (best == centers.size())
        throw invalid_input("frame_measure_upper: every center had an empty core window");
    d.M_plus_est = *results[best].summary.core_average;
    d.dual_diag = std::move(results[best].diag);
    return d;
}

struct CriticalScanEntry {
    double center;
    std::optional<double> min_diag; // nullopt: no points inside B_r(center)
    std::size_t n_core = 0;
};

struct CriticalScanResult {
    double best_center = 0.0;
    double best_min_diag = 0.0;
    std::vector<CriticalScanEntry> per_center;
};

/// Criticality scan: the dual diagonal is approximated on the larger
/// window B_{R_truncation}(x) and m(x) = min over Lambda cap B_r(x) recorded;
/// returns the maximizing center. Values of best_min_diag near 1 are evidence
/// for criticality; values bounded away from 1 across widening scans are
/// evidence against. No boolean verdict is produced.
inline CriticalScanResult critical_frame_scan(const Spectrum& s,
                                              const FrequencyGenerator& gen, double r,
                                              const std::vector<double>& center_grid,
                                              double R_truncation, double rank_tol,
                                              unsigned threads = 1) {
    if (!(R_truncation >= 4.0 * r))
        throw invalid_input("critical_frame_scan: R_truncation must be >= 4r");
    if (center_grid.empty())
        throw invalid_input("critical_frame_scan: center grid must be nonempty");
    std::vector<CriticalScanEntry> entries(center_grid.size());
    parallel_for(center_grid.size(), threads, [&](std::size_t i) {
        const double x = center_grid[i];
        CriticalScanEntry& e = entries[i];
        e.center = x;
        const WindowedPointSet pts = realize(gen, x, R_truncation);
        SpanProjector proj(s, pts, rank_tol);
        const std::vector<double> diag = proj.projection_diag();
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < pts.points.size(); ++j) {
            if (std::abs(pts.points[j] - x) < r) {
                m = std::min(m, diag[j]);
                ++e.n_core;
            }
        }
        if (e.n_core > 0) e.min_diag = m;
    });
    CriticalScanResult out;
    out.per_center = std::move(entries);
    std::size_t best = out.per_center.size();
    for (std::size_t i = 0; i < out.per_center.size(); ++i) {
        if (!out.per_center[i].min_diag) continue;
        if (best == out.per_center.size() ||
            *out.per_center[i].min_diag > *out.per_center[best].min_diag)
            best = i;
    }
    if (best == out.per_center.size())
        throw invalid_input("critical_frame_scan: no center had points inside B_r");
    out.best_center = out.per_center[best].center;
    out.best_min_diag = *out.per_center[best].min_diag;
    return out;
}

struct FrameBoundsEstimate {
    double A_est = 0.0;
    double B_est = 0.0;
    int probes_kept = 0;
    int probe_count = 0;
};

namespace detail {

/// Generalized Rayleigh extremes of (A, B) over an explicit probe family.
inline FrameBoundsEstimate frame_bounds_probe_at(const Spectrum& s,
                                                 const WindowedPointSet& window,
                                                 const std::vector<double>& probes,
                                                 double reg_tol) {
    if (!(reg_tol > 0.0 && reg_tol < 1.0))
        throw invalid_input("frame_bounds_probe: reg_tol must be in (0,1)");
    const Eigen::Index m = static_cast<Eigen::Index>(probes.size());
    if (m == 0) throw degenerate_probe("frame_bounds_probe: empty probe family");
    const Eigen::Index nl = static_cast<Eigen::Index>(window.points.size());

    // A_{jk} = sum_lambda conj(1_S^(lambda-gamma_j)) 1_S^(lambda-gamma_k) = U* U
    Eigen::MatrixXcd u(nl, m);
    for (Eigen::Index l = 0; l < nl; ++l)
        for (Eigen::Index j = 0; j < m; ++j)
            u(l, j) = s.ft_indicator(window.points[static_cast<std::size_t>(l)] -
                                     probes[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXcd a = u.adjoint() * u;

    Eigen::MatrixXcd b(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        b(j, j) = s.measure();
        for (Eigen::Index k = j + 1; k < m; ++k) {
            b(j, k) = s.ft_indicator(probes[static_cast<std::size_t>(j)] -
                                     probes[static_cast<std::size_t>(k)]);
            b(k, j) = std::conj(b(j, k));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> bsolver(b);
    if (bsolver.info() != Eigen::Success)
        throw invariant_violation("frame_bounds_probe: probe Gram eigensolve failed");
    const double b_max = bsolver.eigenvalues()(m - 1);
    if (!(b_max > 0.0))
        throw degenerate_probe("frame_bounds_probe: probe Gram is numerically zero");
    const double cutoff = reg_tol * b_max;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < m; ++i)
        if (bsolver.eigenvalues()(i) > cutoff) kept.push_back(i);
    if (kept.empty())
        throw degenerate_probe("frame_bounds_probe: all probe directions below cutoff");

    Eigen::MatrixXcd w(m, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i)
        w.col(static_cast<Eigen::Index>(i)) =
            bsolver.eigenvectors().col(kept[i]) / std::sqrt(bsolver.eigenvalues()(kept[i]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> msolver(w.adjoint() * a * w);
    if (msolver.info() != Eigen::Success)
        throw invariant_violation("frame_bounds_probe: whitened eigensolve failed");

    FrameBoundsEstimate est;
    est.A_est = std::max(0.0, msolver.eigenvalues()(0));
    est.B_est = msolver.eigenvalues()(static_cast<Eigen::Index>(kept.size()) - 1);
    est.probes_kept = static_cast<int>(kept.size());
    est.probe_count = static_cast<int>(m);
    return est;
}

} // namespace detail

/// Frame-bound estimates from generalized Rayleigh quotients
/// <S_Lambda f, f> / ||f||^2 over the probe family {e_gamma} on a symmetric
/// grid. A_est lower-bounds the restriction of the true lower bound to the
/// probe span; B_est <= B up to truncation leakage (probes_kept is reported,
/// not hidden). Default reg_tol 0.1 keeps the well-conditioned probe
/// directions, whose leakage past the window is negligible.
inline FrameBoundsEstimate frame_bounds_probe(const Spectrum& s,
                                              const FrequencyGenerator& gen,
                                              double window_r, double probe_freq_step,
                                              double probe_halfwidth,
                                              double reg_tol = 0.1) {
    if (!(probe_freq_step > 0.0))
        throw invalid_input("frame_bounds_probe: probe_freq_step must be > 0");
    if (!(probe_halfwidth >= 0.0))
        throw invalid_input("frame_bounds_probe: probe_halfwidth must be >= 0");
    std::vector<double> probes;
    const long long k_max =
        static_cast<long long>(std::floor(probe_halfwidth / probe_freq_step));
    for (long long k = -k_max; k <= k_max; ++k)
        probes.push_back(static_cast<double>(k) * probe_freq_step);
    const WindowedPointSet window = realize(gen, 0.0, window_r);
    return detail::frame_bounds_probe_at(s, window, probes, reg_tol);
}

namespace detail {

struct MidpointRule {
    double h;
    std::size_t n;
    double node(std::size_t i, double lo) const {
        return lo + (static_cast<double>(i) + 0.5) * h;
    }
};

inline MidpointRule midpoint_rule(double lo, double hi, double step) {
    MidpointRule rule;
    rule.n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    if (rule.n == 0) rule.n = 1;
    rule.h = (hi - lo) / static_cast<double>(rule.n);
    return rule;
}

} // namespace detail

/// Windowed density functional: (1/|B_r|) integral over B_r(center) of
/// ||P_{Lambda cap B_r(center)} e_y||^2 dy by composite midpoint quadrature,
/// with one Gram factorization reused across all y. The uniform-minimality
/// hypothesis is the caller's modeling assumption.
inline double riesz_density_functional(const Spectrum& s, const FrequencyGenerator& gen,
                                       double r, double center, double y_step,
                                       double rank_tol) {
    if (!(y_step > 0.0 && y_step <= 0.125))
        throw invalid_input("riesz_density_functional: y_step must be in (0, 1/8]");
    const WindowedPointSet pts = realize(gen, center, r);
    if (pts.points.empty()) return 0.0;
    SpanProjector proj(s, pts, rank_tol);
    const auto rule = detail::midpoint_rule(center - r, center + r, y_step);
    std::vector<double> vals(rule.n);
    for (std::size_t i = 0; i < rule.n; ++i)
        vals[i] = proj.proj_norm_sq(rule.node(i, center - r));
    return pairwise_sum(vals) / static_cast<double>(rule.n);
}

struct ResidualScanEntry {
    double center;
    double measure;
};

struct ResidualScanResult {
    double best_center = 0.0;
    double best_measure = 0.0;
    std::vector<ResidualScanEntry> per_center;
};

/// Residual-set scan: estimates |{y in B_r(x) : ||(I-P) e_y|| >= eps}|
/// per center by counting quadrature nodes, with P approximated on
/// B_{R_truncation}(x); returns the minimizing center. Minima tending to 0 as
/// the scan widens evidence criticality; minima bounded below evidence
/// D+ < |S|. delta is an output (best_measure), not an input threshold.
inline ResidualScanResult residual_set_scan(const Spectrum& s, const FrequencyGenerator& gen,
                                            double eps, double r,
                                            const std::vector<double>& center_grid,
                                            double R_truncation, double y_step,
                                            double rank_tol, unsigned threads = 1) {
    const double meas = s.measure();
    if (!(eps > 0.0 && eps < std::sqrt(meas)))
        throw invalid_input("residual_set_scan: eps must be in (0, sqrt(|S|))");
    if (!(y_step > 0.0 && y_step <= 0.125))
        throw invalid_input("residual_set_scan: y_step must be in (0, 1/8]");
    if (!(R_truncation >= r))
        throw invalid_input("residual_set_scan: R_truncation must be >= r");
    if (center_grid.empty())
        throw invalid_input("residual_set_scan: center grid must be nonempty");
    const double eps_sq = eps * eps;
    std::vector<ResidualScanEntry> entries(center_grid.size());
    parallel_for(center_grid.size(), threads, [&](std::size_t i) {
        const double x = center_grid[i];
        const WindowedPointSet pts = realize(gen, x, R_truncation);
        SpanProjector proj(s, pts, rank_tol);
        const auto rule = detail::midpoint_rule(x - r, x + r, y_step);
        std::size_t count = 0;
        for (std::size_t k = 0; k < rule.n; ++k)
            if (meas - proj.proj_norm_sq(rule.node(k, x - r)) >= eps_sq) ++count;
        entries[i] = {x, static_cast<double>(count) * rule.h};
    });
    ResidualScanResult out;
    out.per_center = std::move(entries);
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.per_center.size(); ++i)
        if (out.per_center[i].measure < out.per_center[best].measure) best = i;
    out.best_center = out.per_center[best].center;
    out.best_measure = out.per_center[best].measure;
    return out;
}

} // namespace framelab
