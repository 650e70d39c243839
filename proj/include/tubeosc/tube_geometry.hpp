#pragma once

// Grid of support/resistance lines, line-crossing counts and the tube
// oscillator maintained over a sliding window of seconds.

#include "tubeosc/timebase.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace tubeosc {

/// +1 for x >= 0, -1 otherwise. A price exactly on a line counts as "not above" it.
[[nodiscard]] constexpr int sign_convention(double x) noexcept { return x >= 0.0 ? 1 : -1; }

struct Line {
    EpochSeconds anchor_time = 0;
    double anchor_price = 0.0;
    double slope = 0.0;  ///< price units per second

    [[nodiscard]] double value(EpochSeconds t) const noexcept {
        return anchor_price + slope * static_cast<double>(t - anchor_time);
    }
};

/// Crossing of one line between t-1 and t: +1 when the price moves from above
/// the line to below it, -1 for below to above, 0 otherwise.
[[nodiscard]] int single_line_crossing(const Line& line, EpochSeconds t, double prev_price, double price) noexcept;

/// Uniformly spaced starting points crossed with sign-paired slopes
/// (+m_basic*f_k, -m_basic*f_k). Slope index 2i is positive, 2i+1 negative.
class LineGrid {
public:
    /// Throws InvalidGrid unless starting points number at least two, are
    /// strictly increasing and uniformly spaced, m_basic > 0 and every factor > 0.
    LineGrid(EpochSeconds anchor_time, std::vector<double> starting_points, double m_basic,
             std::vector<double> slope_factors);

    [[nodiscard]] EpochSeconds anchor_time() const noexcept { return anchor_time_; }
    [[nodiscard]] const std::vector<double>& starting_points() const noexcept { return points_; }
    [[nodiscard]] const std::vector<double>& slopes() const noexcept { return slopes_; }
    [[nodiscard]] double m_basic() const noexcept { return m_basic_; }
    [[nodiscard]] double grid_step() const noexcept { return step_; }
    [[nodiscard]] std::size_t line_count() const noexcept { return points_.size(); }
    [[nodiscard]] std::size_t slope_count() const noexcept { return slopes_.size(); }

    [[nodiscard]] Line line(std::size_t point_index, std::size_t slope_index) const noexcept {
        return {anchor_time_, points_[point_index], slopes_[slope_index]};
    }
    [[nodiscard]] double line_value(std::size_t point_index, std::size_t slope_index, EpochSeconds t) const noexcept {
        return points_[point_index] + slopes_[slope_index] * static_cast<double>(t - anchor_time_);
    }

    /// Number of lines of the given slope lying strictly below the price at t.
    /// O(1): an index estimate from the uniform spacing, corrected against the
    /// actual line values so the result matches a per-line scan exactly.
    [[nodiscard]] std::int64_t lines_below(std::size_t slope_index, EpochSeconds t, double price) const noexcept;

private:
    EpochSeconds anchor_time_;
    std::vector<double> points_;
    double m_basic_;
    std::vector<double> slopes_;
    double step_;
};

/// Net crossing count for all lines of one slope between t-1 and t.
[[nodiscard]] std::int64_t slope_crossing_count(const LineGrid& grid, std::size_t slope_index, EpochSeconds t,
                                                double prev_price, double price) noexcept;

struct OscillatorOutput {
    double raw = 0.0;
    double scaled = 0.0;
    double multiplicator = 1.0;
};

[[nodiscard]] inline OscillatorOutput make_output(double raw, double multiplicator) noexcept {
    return {raw, multiplicator * raw, multiplicator};
}

/// Sliding-window state of the oscillator for one period. Crossing counts are
/// kept as integers per slope; division by the bandwidth and slope count only
/// happens when the value is read. Seconds before the anchor count as zero.
class OscillatorState {
public:
    /// discount, when set, must lie in (0, 1]; values below 1 switch to the
    /// geometrically discounted window.
    OscillatorState(LineGrid grid, std::int64_t bandwidth, std::optional<double> discount = std::nullopt);

    void reset_for_period(LineGrid grid, std::int64_t bandwidth, std::optional<double> discount = std::nullopt);

    /// Feeds second t = current_time() + 1. Throws SequenceError otherwise.
    OscillatorOutput update(EpochSeconds t, double prev_price, double price, double multiplicator);
    /// Feeds a second without a usable price pair; every slope records zero crossings.
    OscillatorOutput update_idle(EpochSeconds t, double multiplicator);

    [[nodiscard]] double raw() const noexcept;
    [[nodiscard]] EpochSeconds current_time() const noexcept { return current_time_; }
    [[nodiscard]] const LineGrid& grid() const noexcept { return grid_; }
    [[nodiscard]] std::int64_t bandwidth() const noexcept { return bandwidth_; }
    [[nodiscard]] std::optional<double> discount() const noexcept { return discount_; }
    [[nodiscard]] bool discounted() const noexcept { return discount_ && *discount_ < 1.0; }

    /// Sum of the last `bandwidth` crossing counts of one slope.
    [[nodiscard]] std::int64_t window_sum(std::size_t slope_index) const noexcept { return sums_[slope_index]; }
    /// Crossing count of one slope at current_time().
    [[nodiscard]] std::int32_t last_crossing(std::size_t slope_index) const noexcept;
    /// Recomputes every window sum from the ring buffers.
    [[nodiscard]] bool sums_consistent() const noexcept;

private:
    void advance(EpochSeconds t);
    void push(std::size_t slope_index, std::int32_t crossing) noexcept;
    [[nodiscard]] std::int32_t buffered(std::size_t slope_index, std::int64_t age) const noexcept;

    LineGrid grid_;
    std::int64_t bandwidth_ = 1;
    std::optional<double> discount_;
    std::vector<double> weights_;  // discount^i, i = 0..bandwidth-1
    std::vector<std::int32_t> ring_;  // slope-major, bandwidth entries per slope
    std::vector<std::int64_t> sums_;
    std::size_t head_ = 0;  // slot of the newest entry
    EpochSeconds current_time_ = 0;
};

}  // namespace tubeosc
