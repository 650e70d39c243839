#include "tubeosc/tube_geometry.hpp"

#include "tubeosc/errors.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace tubeosc {

int single_line_crossing(const Line& line, EpochSeconds t, double prev_price, double price) noexcept {
    const int now = sign_convention(line.value(t) - price);
    const int before = sign_convention(line.value(t - 1) - prev_price);
    return (now - before) / 2;
}

LineGrid::LineGrid(EpochSeconds anchor_time, std::vector<double> starting_points, double m_basic,
                   std::vector<double> slope_factors)
    : anchor_time_(anchor_time), points_(std::move(starting_points)), m_basic_(m_basic), step_(0.0) {
    if (points_.size() < 2) {
        throw InvalidGrid("a line grid needs at least two starting points");
    }
    if (!(m_basic > 0.0) || !std::isfinite(m_basic)) {
        throw InvalidGrid("basic slope must be positive and finite");
    }
    if (slope_factors.empty()) {
        throw InvalidGrid("at least one slope factor is required");
    }
    for (double f : slope_factors) {
        if (!(f > 0.0) || !std::isfinite(f)) {
            throw InvalidGrid("slope factors must be positive and finite");
        }
    }
    for (double p : points_) {
        if (!std::isfinite(p)) {
            throw InvalidGrid("starting points must be finite");
        }
    }
    step_ = (points_.back() - points_.front()) / static_cast<double>(points_.size() - 1);
    if (!(step_ > 0.0)) {
        throw InvalidGrid("starting points must be strictly increasing");
    }
    const double scale = std::max(std::abs(points_.front()), std::abs(points_.back()));
    const double tolerance = 1e-9 * step_ + 16.0 * std::numeric_limits<double>::epsilon() * scale;
    for (std::size_t j = 1; j < points_.size(); ++j) {
        const double diff = points_[j] - points_[j - 1];
        if (!(diff > 0.0)) {
            throw InvalidGrid("starting points must be strictly increasing");
        }
        if (std::abs(diff - step_) > tolerance) {
            throw InvalidGrid("starting points must be uniformly spaced (step " + std::to_string(diff) +
                              " differs from " + std::to_string(step_) + ")");
        }
    }
    slopes_.reserve(2 * slope_factors.size());
    for (double f : slope_factors) {
        const double m = m_basic * f;
        slopes_.push_back(m);
        slopes_.push_back(-m);
    }
}

std::int64_t LineGrid::lines_below(std::size_t slope_index, EpochSeconds t, double price) const noexcept {
    const auto n = static_cast<std::int64_t>(points_.size());
    const double shift = slopes_[slope_index] * static_cast<double>(t - anchor_time_);
    const double estimate = std::ceil((price - shift - points_.front()) / step_);
    std::int64_t idx = 0;
    if (estimate >= static_cast<double>(n)) {
        idx = n;
    } else if (estimate > 0.0) {
        idx = static_cast<std::int64_t>(estimate);
    }
    // line_value is non-decreasing in the point index, so "value < price" is a
    // monotone predicate and the walk below lands on its exact boundary.
    while (idx > 0 && !(line_value(static_cast<std::size_t>(idx - 1), slope_index, t) < price)) {
        --idx;
    }
    while (idx < n && line_value(static_cast<std::size_t>(idx), slope_index, t) < price) {
        ++idx;
    }
    return idx;
}

std::int64_t slope_crossing_count(const LineGrid& grid, std::size_t slope_index, EpochSeconds t,
                                  double prev_price, double price) noexcept {
    return grid.lines_below(slope_index, t - 1, prev_price) - grid.lines_below(slope_index, t, price);
}

OscillatorState::OscillatorState(LineGrid grid, std::int64_t bandwidth, std::optional<double> discount)
    : grid_(std::move(grid)) {
    reset_for_period(grid_, bandwidth, discount);
}

void OscillatorState::reset_for_period(LineGrid grid, std::int64_t bandwidth, std::optional<double> discount) {
    if (bandwidth < 1) {
        throw RangeError("bandwidth must be at least one second");
    }
    if (discount && !(*discount > 0.0 && *discount <= 1.0)) {
        throw RangeError("discount must lie in (0, 1]");
    }
    grid_ = std::move(grid);
    bandwidth_ = bandwidth;
    discount_ = discount;
    weights_.clear();
    if (discounted()) {
        weights_.resize(static_cast<std::size_t>(bandwidth_));
        double w = 1.0;
        for (auto& x : weights_) {
            x = w;
            w *= *discount_;
        }
    }
    ring_.assign(grid_.slope_count() * static_cast<std::size_t>(bandwidth_), 0);
    sums_.assign(grid_.slope_count(), 0);
    head_ = 0;
    current_time_ = grid_.anchor_time();
}

void OscillatorState::advance(EpochSeconds t) {
    if (t != current_time_ + 1) {
        throw SequenceError("oscillator expects second " + std::to_string(current_time_ + 1) + ", got " +
                            std::to_string(t));
    }
    head_ = (head_ + 1) % static_cast<std::size_t>(bandwidth_);
    current_time_ = t;
}

void OscillatorState::push(std::size_t slope_index, std::int32_t crossing) noexcept {
    auto& slot = ring_[slope_index * static_cast<std::size_t>(bandwidth_) + head_];
    sums_[slope_index] += crossing - slot;
    slot = crossing;
}

std::int32_t OscillatorState::buffered(std::size_t slope_index, std::int64_t age) const noexcept {
    const auto bw = static_cast<std::size_t>(bandwidth_);
    const auto pos = (head_ + bw - static_cast<std::size_t>(age)) % bw;
    return ring_[slope_index * bw + pos];
}

std::int32_t OscillatorState::last_crossing(std::size_t slope_index) const noexcept {
    return buffered(slope_index, 0);
}

OscillatorOutput OscillatorState::update(EpochSeconds t, double prev_price, double price, double multiplicator) {
    advance(t);
    for (std::size_t k = 0; k < grid_.slope_count(); ++k) {
        push(k, static_cast<std::int32_t>(slope_crossing_count(grid_, k, t, prev_price, price)));
    }
#ifdef TUBEOSC_CHECK_INVARIANTS
    assert(sums_consistent());
#endif
    return make_output(raw(), multiplicator);
}

OscillatorOutput OscillatorState::update_idle(EpochSeconds t, double multiplicator) {
    advance(t);
    for (std::size_t k = 0; k < grid_.slope_count(); ++k) {
        push(k, 0);
    }
    return make_output(raw(), multiplicator);
}

double OscillatorState::raw() const noexcept {
    const double denom = static_cast<double>(bandwidth_) * static_cast<double>(grid_.slope_count());
    if (!discounted()) {
        const std::int64_t total = std::accumulate(sums_.begin(), sums_.end(), std::int64_t{0});
        return -static_cast<double>(total) / denom;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < grid_.slope_count(); ++k) {
        for (std::int64_t i = 0; i < bandwidth_; ++i) {
            total += weights_[static_cast<std::size_t>(i)] * buffered(k, i);
        }
    }
    return -total / denom;
}

bool OscillatorState::sums_consistent() const noexcept {
    const auto bw = static_cast<std::size_t>(bandwidth_);
    for (std::size_t k = 0; k < grid_.slope_count(); ++k) {
        const auto first = ring_.begin() + static_cast<std::ptrdiff_t>(k * bw);
        if (std::accumulate(first, first + static_cast<std::ptrdiff_t>(bw), std::int64_t{0}) != sums_[k]) {
            return false;
        }
    }
    return true;
}

}  // namespace tubeosc
