#include "doctest.h"

#include "oracle.hpp"
#include "tubeosc/errors.hpp"
#include "tubeosc/tube_geometry.hpp"

#include <cmath>
#include <random>

using namespace tubeosc;

TEST_CASE("sign convention") {
    CHECK(sign_convention(3.2) == 1);
    CHECK(sign_convention(-0.0001) == -1);
    CHECK(sign_convention(0.0) == 1);
    CHECK(sign_convention(-0.0) == 1);
}

TEST_CASE("single line crossing") {
    const Line flat{0, 100.0, 0.0};
    CHECK(single_line_crossing(flat, 5, 101.0, 99.0) == 1);
    CHECK(single_line_crossing(flat, 5, 99.0, 101.0) == -1);
    CHECK(single_line_crossing(flat, 5, 99.0, 99.5) == 0);

    // Line 100.5 -> 101 rises through a constant price of 100.9: the price
    // goes from above the line to below it.
    const Line rising{0, 100.0, 0.5};
    CHECK(single_line_crossing(rising, 2, 100.9, 100.9) == oracle::line_crossing(100.0, 0.5, 0, 2, 100.9, 100.9));
    CHECK(single_line_crossing(rising, 2, 100.9, 100.9) == 1);

    // touching the line counts as not above it
    CHECK(single_line_crossing(flat, 1, 100.0, 99.0) == 0);
    CHECK(single_line_crossing(flat, 1, 99.0, 100.0) == 0);
    CHECK(single_line_crossing(flat, 1, 100.0, 101.0) == -1);
}

TEST_CASE("grid construction") {
    const LineGrid g(10, {1.0, 2.0, 3.0}, 0.5, {1.0, 2.0});
    CHECK(g.line_count() == 3);
    CHECK(g.slopes() == std::vector<double>{0.5, -0.5, 1.0, -1.0});
    CHECK(g.grid_step() == 1.0);
    CHECK(g.line_value(2, 3, 12) == 1.0);
    CHECK_THROWS_AS(LineGrid(0, {1.0}, 1.0, {1.0}), InvalidGrid);
    CHECK_THROWS_AS(LineGrid(0, {1.0, 2.0, 4.0}, 1.0, {1.0}), InvalidGrid);
    CHECK_THROWS_AS(LineGrid(0, {2.0, 1.0}, 1.0, {1.0}), InvalidGrid);
    CHECK_THROWS_AS(LineGrid(0, {1.0, 2.0}, 0.0, {1.0}), InvalidGrid);
    CHECK_THROWS_AS(LineGrid(0, {1.0, 2.0}, 1.0, {1.0, -1.0}), InvalidGrid);
    CHECK_THROWS_AS(LineGrid(0, {1.0, 2.0}, 1.0, {}), InvalidGrid);
}

TEST_CASE("slope crossing count examples") {
    const LineGrid g(0, {1.0, 2.0, 3.0, 4.0, 5.0}, 1e-6, {1.0});
    CHECK(slope_crossing_count(g, 0, 1, 1.5, 4.5) == -3);
    CHECK(slope_crossing_count(g, 1, 1, 1.5, 4.5) == -3);
    CHECK(slope_crossing_count(g, 0, 1, 2.5, 2.5) == 0);
    CHECK(slope_crossing_count(g, 0, 1, 2.2, 2.8) == 0);
    CHECK(slope_crossing_count(g, 0, 1, 9.0, -9.0) == 5);
}

TEST_CASE("fast crossing count matches the per-line sum") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 40;
        const double step = 0.25 * (1 + trial % 5);
        std::vector<double> points;
        for (int j = 1; j <= n; ++j) {
            points.push_back(90.0 + step * j);
        }
        const LineGrid g(0, points, 0.125 * (1 + trial % 3), {0.5, 1.0, 4.0});
        const auto prices = oracle::random_walk(rng, 90.0 + step * n / 2.0, 0.0625, 200, 16);
        for (std::size_t i = 1; i < prices.size(); ++i) {
            const auto t = static_cast<EpochSeconds>(i);
            for (std::size_t k = 0; k < g.slope_count(); ++k) {
                REQUIRE(slope_crossing_count(g, k, t, prices[i - 1], prices[i]) ==
                        oracle::slope_crossing(points, g.slopes()[k], 0, t, prices[i - 1], prices[i]));
            }
        }
    }
}

namespace {

LineGrid unit_grid(int n, double m = 0.001) {
    std::vector<double> points;
    for (int j = 1; j <= n; ++j) {
        points.push_back(j);
    }
    return LineGrid(0, points, m, {1.0});
}

}  // namespace

TEST_CASE("rising ramp gives a positive oscillator") {
    // price 0.5 + t crosses one line of each slope per second
    OscillatorState s(unit_grid(40), 5);
    OscillatorOutput out;
    for (EpochSeconds t = 1; t <= 5; ++t) {
        out = s.update(t, 0.5 + static_cast<double>(t - 1), 0.5 + static_cast<double>(t), 2.0);
        CHECK(s.last_crossing(0) == -1);
        CHECK(s.last_crossing(1) == -1);
    }
    CHECK(out.raw == 1.0);
    CHECK(out.scaled == 2.0);
}

TEST_CASE("window average of two crossings") {
    OscillatorState s(unit_grid(10), 5);
    s.update(1, 5.5, 4.5, 1.0);
    s.update(2, 4.5, 3.5, 1.0);
    s.update(3, 3.5, 3.5, 1.0);
    s.update(4, 3.5, 3.5, 1.0);
    const auto out = s.update(5, 3.5, 3.5, 1.0);
    CHECK(s.window_sum(0) == 2);
    CHECK(out.raw == -0.4);
    s.update(6, 3.5, 3.5, 1.0);
    CHECK(s.window_sum(0) == 1);
}

TEST_CASE("constant price between lines") {
    OscillatorState s(unit_grid(10), 5);
    for (EpochSeconds t = 1; t <= 20; ++t) {
        CHECK(s.update(t, 4.5, 4.5, 1.0).raw == 0.0);
    }
}

TEST_CASE("sequencing and reset") {
    OscillatorState s(unit_grid(10), 3);
    CHECK(s.current_time() == 0);
    CHECK_THROWS_AS(s.update(2, 1.0, 1.0, 1.0), SequenceError);
    CHECK_THROWS_AS(s.update_idle(0, 1.0), SequenceError);
    s.update(1, 1.5, 3.5, 1.0);
    CHECK(s.raw() != 0.0);
    s.reset_for_period(unit_grid(10), 3);
    s.reset_for_period(unit_grid(10), 3);
    CHECK(s.raw() == 0.0);
    CHECK(s.current_time() == 0);
    CHECK(s.update(1, 4.5, 4.6, 1.0).raw == 0.0);
    CHECK_THROWS_AS(OscillatorState(unit_grid(3), 0), RangeError);
    CHECK_THROWS_AS(OscillatorState(unit_grid(3), 3, 1.5), RangeError);
    CHECK_THROWS_AS(OscillatorState(unit_grid(3), 3, 0.0), RangeError);
}

TEST_CASE("idle seconds record no crossings") {
    OscillatorState s(unit_grid(10), 4);
    s.update(1, 1.5, 5.5, 1.0);
    const double before = s.raw();
    s.update_idle(2, 1.0);
    CHECK(s.raw() == before);
    CHECK(s.last_crossing(0) == 0);
}

TEST_CASE("incremental oscillator matches the from-scratch oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 5 + trial % 30;
        std::vector<double> points;
        for (int j = 1; j <= n; ++j) {
            points.push_back(0.5 * j);
        }
        const std::vector<double> factors{0.25, 1.0};
        const double m = 0.0078125;
        const std::int64_t bandwidth = 1 + trial % 17;
        const std::optional<double> gamma = trial % 3 == 0 ? std::optional<double>(0.9) : std::nullopt;
        const EpochSeconds t0 = 1000;
        OscillatorState s(LineGrid(t0, points, m, factors), bandwidth, gamma);
        const auto prices = oracle::random_walk(rng, 0.25 * n, 0.125, 120, 6);
        std::vector<bool> present(prices.size(), true);
        for (std::size_t i = 0; i < present.size(); ++i) {
            present[i] = (i * 7 + trial) % 11 != 0;
        }
        const auto d = oracle::crossing_table(points, oracle::paired_slopes(m, factors), t0, prices, present);
        for (std::size_t i = 1; i < prices.size(); ++i) {
            const auto t = t0 + static_cast<EpochSeconds>(i);
            const auto out = present[i] && present[i - 1] ? s.update(t, prices[i - 1], prices[i], 1.0)
                                                          : s.update_idle(t, 1.0);
            REQUIRE(s.sums_consistent());
            if (gamma) {
                CHECK(out.raw == doctest::Approx(oracle::raw_at(d, i, bandwidth, *gamma)).epsilon(1e-12));
            } else {
                const double expected = -static_cast<double>(oracle::window_total(d, i, bandwidth)) /
                                        static_cast<double>(bandwidth * 4);
                REQUIRE(out.raw == expected);
                CHECK(std::abs(out.raw) <= n);
            }
        }
    }
}

TEST_CASE("discount of one equals the plain window") {
    OscillatorState a(unit_grid(20), 7);
    OscillatorState b(unit_grid(20), 7, 1.0);
    std::mt19937_64 rng(9);
    const auto prices = oracle::random_walk(rng, 10.0, 0.3, 60, 4);
    for (std::size_t i = 1; i < prices.size(); ++i) {
        const auto t = static_cast<EpochSeconds>(i);
        CHECK(a.update(t, prices[i - 1], prices[i], 1.0).raw == b.update(t, prices[i - 1], prices[i], 1.0).raw);
    }
    CHECK_FALSE(b.discounted());
}
