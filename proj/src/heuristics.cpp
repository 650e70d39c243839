#include "tubeosc/heuristics.hpp"

#include "tubeosc/errors.hpp"

#include <cmath>
#include <numbers>

namespace tubeosc {

void OscillatorParams::validate() const {
    if (!(m_basic > 0.0)) {
        throw RangeError("basic slope must be positive");
    }
    if (slope_factors.empty()) {
        throw RangeError("at least one slope factor is required");
    }
    for (double f : slope_factors) {
        if (!(f > 0.0)) {
            throw RangeError("slope factors must be positive");
        }
    }
    if (bandwidth < 1) {
        throw RangeError("bandwidth must be at least one second");
    }
    if (!(multiplicator > 0.0)) {
        throw RangeError("multiplicator must be positive");
    }
    if (discount && !(*discount > 0.0 && *discount <= 1.0)) {
        throw RangeError("discount must lie in (0, 1]");
    }
}

LineGrid OscillatorParams::make_grid(EpochSeconds anchor_time) const {
    return LineGrid(anchor_time, starting_points, m_basic, slope_factors);
}

Heuristic<double> basic_slope_from_previous(const PeriodSummary& previous, std::int64_t zone_length,
                                            double fallback) {
    if (zone_length <= 0) {
        throw RangeError("zone length must be positive");
    }
    const double range = previous.max_price - previous.min_price;
    if (range < 0.0) {
        throw RangeError("previous maximum lies below previous minimum");
    }
    if (range == 0.0) {
        return {fallback, true};
    }
    return {range / static_cast<double>(zone_length), false};
}

std::vector<double> default_slope_factors(int count) {
    if (count < 1 || count > 9) {
        throw RangeError("the tangent slope family supports 1..9 factors (k/10 = 1 is a pole)");
    }
    std::vector<double> factors;
    factors.reserve(static_cast<std::size_t>(count));
    for (int k = 1; k <= count; ++k) {
        factors.push_back(std::tan(std::numbers::pi / 2.0 * (static_cast<double>(k) / 10.0)));
    }
    return factors;
}

std::vector<double> centered_starting_points(double center, double half_width, int count) {
    if (count < 2) {
        throw RangeError("at least two starting points are required");
    }
    if (!(half_width > 0.0)) {
        throw DegenerateRange("grid half-width must be positive");
    }
    const double step = 2.0 * half_width / static_cast<double>(count);
    const double base = center - half_width;
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int j = 1; j <= count; ++j) {
        points.push_back(base + static_cast<double>(j) * step);
    }
    return points;
}

std::vector<double> default_starting_points(double first_price, double range, int count) {
    if (range < 0.0) {
        throw RangeError("price range must be non-negative");
    }
    if (range == 0.0) {
        throw DegenerateRange("previous period has an empty price range");
    }
    return centered_starting_points(first_price, 2.0 * range, count);
}

DerivedParams derive_params(const PeriodSummary& previous, double first_price, std::int64_t zone_length,
                            const HeuristicConfig& config) {
    DerivedParams out;
    auto& p = out.params;
    p.bandwidth = config.bandwidth;
    p.multiplicator = config.multiplicator;
    p.discount = config.discount;

    if (config.fixed_m_basic) {
        p.m_basic = *config.fixed_m_basic;
    } else {
        const auto slope = basic_slope_from_previous(previous, zone_length, config.fallback_m_basic);
        p.m_basic = slope.value;
        if (slope.degenerate) {
            out.warnings.push_back("degenerate previous range; using fallback basic slope");
        }
    }

    p.slope_factors = config.slope_factors ? *config.slope_factors : default_slope_factors(config.factor_count);

    const int n = config.starting_point_count;
    if (config.fixed_grid_step) {
        p.starting_points = centered_starting_points(first_price, 0.5 * *config.fixed_grid_step * n, n);
    } else {
        const double range = previous.range();
        if (range > 0.0) {
            p.starting_points = centered_starting_points(first_price, config.width_factor * range, n);
        } else {
            out.warnings.push_back("degenerate previous range; using fallback grid half-width");
            p.starting_points = centered_starting_points(first_price, config.fallback_half_width, n);
        }
    }
    p.validate();
    return out;
}

}  // namespace tubeosc
