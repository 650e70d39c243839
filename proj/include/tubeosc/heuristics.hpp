#pragma once

// Rules of thumb that derive oscillator parameters from the previous period.

#include "tubeosc/timebase.hpp"
#include "tubeosc/tube_geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tubeosc {

struct OscillatorParams {
    double m_basic = 0.0;
    std::vector<double> slope_factors;
    std::vector<double> starting_points;
    std::int64_t bandwidth = 300;
    double multiplicator = 20.0;
    std::optional<double> discount;

    /// Throws RangeError on a non-positive factor, bandwidth or multiplicator.
    void validate() const;
    [[nodiscard]] LineGrid make_grid(EpochSeconds anchor_time) const;
};

/// Result of a heuristic that may fall back to a configured value.
template <typename T>
struct Heuristic {
    T value;
    bool degenerate = false;  ///< the fallback was used
};

/// (max - min) / zone_length of the previous period; `fallback` when the
/// range is empty.
[[nodiscard]] Heuristic<double> basic_slope_from_previous(const PeriodSummary& previous, std::int64_t zone_length,
                                                          double fallback);

/// f_k = tan(pi/2 * k/10) for k = 1..count. Throws RangeError unless 1 <= count <= 9.
[[nodiscard]] std::vector<double> default_slope_factors(int count);

/// count points spaced 4*range/count apart, covering
/// (first_price - 2*range, first_price + 2*range]. Throws DegenerateRange when
/// range is zero and RangeError when count < 2 or range < 0.
[[nodiscard]] std::vector<double> default_starting_points(double first_price, double range, int count);

/// Same layout with an arbitrary half-width: count points spaced
/// 2*half_width/count apart, covering (center - half_width, center + half_width].
[[nodiscard]] std::vector<double> centered_starting_points(double center, double half_width, int count);

/// Knobs for deriving per-period parameters. Explicit values override the heuristics.
struct HeuristicConfig {
    std::optional<double> fixed_m_basic;
    double fallback_m_basic = 1e-6;
    std::optional<std::vector<double>> slope_factors;  ///< default: tangent family
    int factor_count = 9;
    int starting_point_count = 300;
    /// Grid half-width in multiples of the previous range (2 means +-2*range).
    double width_factor = 2.0;
    /// Half-width used when the previous range is empty.
    double fallback_half_width = 0.01;
    /// Explicit spacing of a grid centred on the first price; overrides the
    /// range-based width.
    std::optional<double> fixed_grid_step;
    std::int64_t bandwidth = 300;
    double multiplicator = 20.0;
    std::optional<double> discount;
};

struct DerivedParams {
    OscillatorParams params;
    std::vector<std::string> warnings;
};

/// Parameters for a period whose zone length is `zone_length`, given the
/// previous period's summary and the first price of the new zone.
[[nodiscard]] DerivedParams derive_params(const PeriodSummary& previous, double first_price,
                                          std::int64_t zone_length, const HeuristicConfig& config);

}  // namespace tubeosc
