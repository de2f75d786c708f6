// Test-only oracles, deliberately independent of the library's evaluation
// paths: plain quadrature, brute-force enumeration, and closed-form series.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

/// Composite-midpoint quadrature of integral_S e^{-2 pi i xi t} dt.
inline cd quad_ft_indicator(const std::vector<std::pair<double, double>>& intervals,
                            double xi, double step = 1e-4) {
    cd total = 0.0;
    for (const auto& [a, b] : intervals) {
        const std::size_t n = static_cast<std::size_t>(std::ceil((b - a) / step));
        const double h = (b - a) / static_cast<double>(n);
        cd acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = a + (static_cast<double>(i) + 0.5) * h;
            acc += std::polar(1.0, -2.0 * kPi * xi * t);
        }
        total += acc * h;
    }
    return total;
}

/// Full integer-box enumeration of the cut-and-project set (no per-axis
/// interval solving): every (n, m) in the preimage bounding box is tested.
inline std::vector<double> brute_cut_project(const std::array<double, 4>& basis,
                                             double window_lo, double window_hi,
                                             double center, double radius) {
    const double b00 = basis[0], b01 = basis[1], b10 = basis[2], b11 = basis[3];
    const double det = b00 * b11 - b01 * b10;
    const double lo = center - radius, hi = center + radius;
    double n_min = 1e300, n_max = -1e300, m_min = 1e300, m_max = -1e300;
    for (double x : {lo, hi}) {
        for (double y : {window_lo, window_hi}) {
            const double n = (b11 * x - b01 * y) / det;
            const double m = (-b10 * x + b00 * y) / det;
            n_min = std::min(n_min, n);
            n_max = std::max(n_max, n);
            m_min = std::min(m_min, m);
            m_max = std::max(m_max, m);
        }
    }
    std::vector<double> pts;
    for (long long n = static_cast<long long>(std::floor(n_min)) - 2;
         n <= static_cast<long long>(std::ceil(n_max)) + 2; ++n) {
        for (long long m = static_cast<long long>(std::floor(m_min)) - 2;
             m <= static_cast<long long>(std::ceil(m_max)) + 2; ++m) {
            const double p1 = b00 * n + b01 * m;
            const double p2 = b10 * n + b11 * m;
            if (p2 >= window_lo && p2 < window_hi && p1 > lo && p1 < hi)
                pts.push_back(p1);
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

inline double brute_min_gap(const std::vector<double>& sorted) {
    double g = 1e300;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        g = std::min(g, sorted[i] - sorted[i - 1]);
    return g;
}

/// Max point count in any closed unit window, O(n^2).
inline int brute_max_unit_count(const std::vector<double>& sorted) {
    int best = sorted.empty() ? 0 : 1;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        int count = 0;
        for (std::size_t j = 0; j < sorted.size(); ++j)
            if (sorted[j] >= sorted[i] && sorted[j] <= sorted[i] + 1.0) ++count;
        best = std::max(best, count);
    }
    return best;
}

/// sum over n in [-w, w) of 1 / (pi (n - 1/2))^2 — the closed-form value of
/// ||P_{Z cap B_w} e_{1/2}||^2 on S = [0,1]; the full series sums to 1.
inline double half_integer_projection_series(long long w) {
    double acc = 0.0;
    for (long long n = -w + 1; n < w; ++n) {
        const double d = kPi * (static_cast<double>(n) - 0.5);
        acc += 1.0 / (d * d);
    }
    return acc;
}

/// Direct-sum frame-operator quadratic form sum_lambda |1_S^(lambda - gamma)|^2
/// for S = [0,1] via |1_S^(xi)| = |sin(pi xi)/(pi xi)|.
inline double direct_energy_unit_interval(const std::vector<double>& lambdas,
                                          double gamma) {
    double acc = 0.0;
    for (double l : lambdas) {
        const double xi = l - gamma;
        const double v = xi == 0.0 ? 1.0 : std::sin(kPi * xi) / (kPi * xi);
        acc += v * v;
    }
    return acc;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

} // namespace oracle
