#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "framelab/errors.hpp"
#include "framelab/numeric.hpp"

namespace framelab {

/// A set S of finite positive measure on the real line, modeled as a finite
/// disjoint union of intervals [a_j, b_j]. The constructor sorts the
/// intervals and merges abutting ones (b_j == a_{j+1}), so equality and
/// measure are well defined on the canonical form.
class Spectrum {
  public:
    using Interval = std::pair<double, double>;

    explicit Spectrum(std::vector<Interval> intervals) {
        if (intervals.empty()) throw invalid_input("spectrum: needs at least one interval");
        for (const auto& [a, b] : intervals) {
            if (!std::isfinite(a) || !std::isfinite(b))
                throw invalid_input("spectrum: interval endpoints must be finite");
            if (!(a < b)) throw invalid_input("spectrum: intervals must satisfy a < b");
        }
        std::sort(intervals.begin(), intervals.end());
        intervals_.push_back(intervals.front());
        for (std::size_t i = 1; i < intervals.size(); ++i) {
            auto& last = intervals_.back();
            const auto& cur = intervals[i];
            if (cur.first < last.second)
                throw invalid_input("spectrum: intervals overlap");
            if (cur.first == last.second)
                last.second = cur.second; // merge abutting
            else
                intervals_.push_back(cur);
        }
        std::vector<double> lengths;
        lengths.reserve(intervals_.size());
        max_length_ = 0.0;
        for (const auto& [a, b] : intervals_) {
            lengths.push_back(b - a);
            max_length_ = std::max(max_length_, b - a);
        }
        measure_ = pairwise_sum(lengths);
        if (!(measure_ > 0.0)) throw invalid_input("spectrum: total measure must be positive");
    }

    const std::vector<Interval>& intervals() const { return intervals_; }

    /// Lebesgue measure |S|.
    double measure() const { return measure_; }

    double max_interval_length() const { return max_length_; }

    /// Fourier transform of the indicator, 1_S^(xi) = integral_S e^{-2 pi i xi t} dt.
    ///
    /// Each interval contributes L e^{-2 pi i xi m} sinc(pi xi L) with m the
    /// midpoint and L the length; the product form is cancellation-free and
    /// continuous at xi = 0, where the value is |S|.
    complex_d ft_indicator(double xi) const {
        if (!std::isfinite(xi)) throw invalid_input("ft_indicator: xi must be finite");
        complex_d total = 0.0;
        for (const auto& [a, b] : intervals_) {
            const double len = b - a;
            const double mid = 0.5 * (a + b);
            const double phase = -kTwoPi * xi * mid;
            total += len * sinc(kPi * xi * len) *
                     complex_d(std::cos(phase), std::sin(phase));
        }
        return total;
    }

    /// <e_mu, e_lam> in L^2(S); equals 1_S^(lam - mu).
    complex_d exp_inner(double lam, double mu) const { return ft_indicator(lam - mu); }

    bool operator==(const Spectrum& other) const { return intervals_ == other.intervals_; }

  private:
    std::vector<Interval> intervals_;
    double measure_ = 0.0;
    double max_length_ = 0.0;
};

inline double measure(const Spectrum& s) { return s.measure(); }
inline complex_d ft_indicator(const Spectrum& s, double xi) { return s.ft_indicator(xi); }
inline complex_d exp_inner(const Spectrum& s, double lam, double mu) {
    return s.exp_inner(lam, mu);
}

} // namespace framelab
