#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "framelab/spectrum.hpp"
#include "oracles.hpp"

using namespace framelab;
using Catch::Approx;

namespace {

Spectrum random_spectrum(std::mt19937_64& rng, int max_intervals = 4) {
    std::uniform_int_distribution<int> count(1, max_intervals);
    std::uniform_real_distribution<double> len(0.05, 1.5);
    std::uniform_real_distribution<double> gap(0.01, 2.0);
    std::uniform_real_distribution<double> start(-5.0, 5.0);
    std::vector<Spectrum::Interval> iv;
    double a = start(rng);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        const double b = a + len(rng);
        iv.emplace_back(a, b);
        a = b + gap(rng);
    }
    return Spectrum(std::move(iv));
}

} // namespace

TEST_CASE("measure sums interval lengths") {
    CHECK(Spectrum({{0, 1}}).measure() == 1.0);
    CHECK(Spectrum({{0, 1}, {2, 3}}).measure() == 2.0);
    CHECK(Spectrum({{0, 0.5}, {1, 1.25}}).measure() == Approx(0.75).margin(1e-15));
}

TEST_CASE("constructor normalizes and validates") {
    SECTION("sorts intervals") {
        Spectrum s({{2, 3}, {0, 1}});
        CHECK(s.intervals().front().first == 0.0);
    }
    SECTION("merges abutting intervals") {
        Spectrum s({{0, 1}, {1, 2}});
        CHECK(s.intervals().size() == 1);
        CHECK(s.measure() == 2.0);
    }
    SECTION("rejects bad input") {
        CHECK_THROWS_AS(Spectrum({}), invalid_input);
        CHECK_THROWS_AS(Spectrum({{1, 1}}), invalid_input);
        CHECK_THROWS_AS(Spectrum({{1, 0}}), invalid_input);
        CHECK_THROWS_AS(Spectrum({{0, 2}, {1, 3}}), invalid_input);
    }
}

TEST_CASE("ft_indicator on the unit interval") {
    const Spectrum s({{0, 1}});
    SECTION("xi = 0 gives |S|") { CHECK(s.ft_indicator(0.0) == complex_d(1.0, 0.0)); }
    SECTION("nonzero integers vanish") {
        for (int n : {1, -1, 2, 5, -7})
            CHECK(std::abs(s.ft_indicator(n)) < 1e-12);
    }
    SECTION("xi = 1/2 equals -2i/pi") {
        const complex_d v = s.ft_indicator(0.5);
        CHECK(v.real() == Approx(0.0).margin(1e-12));
        CHECK(v.imag() == Approx(-2.0 / kPi).margin(1e-12));
        CHECK(std::abs(v) == Approx(2.0 / kPi).margin(1e-12));
    }
    SECTION("rejects non-finite xi") {
        CHECK_THROWS_AS(s.ft_indicator(std::nan("")), invalid_input);
        CHECK_THROWS_AS(s.ft_indicator(INFINITY), invalid_input);
    }
}

TEST_CASE("ft_indicator is continuous through the small-xi switch") {
    const Spectrum s({{0, 1}, {2, 3.5}});
    const complex_d at0 = s.ft_indicator(0.0);
    CHECK(at0.real() == Approx(s.measure()));
    // |d/dxi 1_S^| <= 2 pi sup|t| |S| = 55 for this spectrum
    for (double xi : {1e-12, 1e-10, 1e-9, 1e-7})
        CHECK(std::abs(s.ft_indicator(xi) - at0) <= 60.0 * xi + 1e-12);
}

TEST_CASE("exp_inner basics") {
    const Spectrum s({{0, 1}});
    CHECK(s.exp_inner(3.0, 3.0).real() == Approx(1.0));
    CHECK(std::abs(s.exp_inner(2.0, 5.0)) < 1e-12);

    const Spectrum two({{0, 1}, {2, 3}});
    SECTION("two-interval cancellation at lambda = 1/4") {
        CHECK(std::abs(two.exp_inner(0.25, 0.0)) < 1e-12);
        const auto q = oracle::quad_ft_indicator({{0, 1}, {2, 3}}, 0.25);
        CHECK(std::abs(q) < 1e-6);
    }
    SECTION("conjugate symmetry in the arguments") {
        const complex_d a = two.exp_inner(0.3, 1.7);
        const complex_d b = two.exp_inner(1.7, 0.3);
        CHECK(a.real() == Approx(b.real()).margin(1e-15));
        CHECK(a.imag() == Approx(-b.imag()).margin(1e-15));
    }
}

TEST_CASE("quadrature oracle agreement on random spectra") {
    auto rng = oracle::rng(20240811);
    std::uniform_real_distribution<double> xi_dist(-20.0, 20.0);
    for (int trial = 0; trial < 100; ++trial) {
        const Spectrum s = random_spectrum(rng);
        const double xi = xi_dist(rng);
        std::vector<std::pair<double, double>> iv(s.intervals().begin(),
                                                  s.intervals().end());
        const complex_d expected = oracle::quad_ft_indicator(iv, xi);
        CHECK(std::abs(s.ft_indicator(xi) - expected) < 1e-6);
    }
}

TEST_CASE("ft_indicator properties on random spectra") {
    auto rng = oracle::rng(99123);
    std::uniform_real_distribution<double> xi_dist(-40.0, 40.0);
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const Spectrum s = random_spectrum(rng);
        const double xi = xi_dist(rng);
        SECTION("trial " + std::to_string(trial)) {}
        const complex_d v = s.ft_indicator(xi);

        // conjugate symmetry: S is real
        const complex_d w = s.ft_indicator(-xi);
        CHECK(std::abs(w - std::conj(v)) < 1e-13);

        // |1_S^| <= |S| with equality at 0
        CHECK(std::abs(v) <= s.measure() + 1e-12);

        // translation covariance: (S + c)^ = e^{-2 pi i xi c} S^
        const double c = shift(rng);
        std::vector<Spectrum::Interval> moved;
        for (auto [a, b] : s.intervals()) moved.emplace_back(a + c, b + c);
        const complex_d translated = Spectrum(moved).ft_indicator(xi);
        const complex_d predicted = v * std::polar(1.0, -kTwoPi * xi * c);
        CHECK(std::abs(translated - predicted) < 1e-12 * std::max(1.0, std::abs(v)));
    }
}
