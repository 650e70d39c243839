#pragma once

// Time model: Unix seconds, trading periods (days), zones of interest and
// per-period price summaries.

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace tubeosc {

using EpochSeconds = std::int64_t;

inline constexpr EpochSeconds kSecondsPerDay = 86400;

/// Closed interval [start, end] of epoch seconds.
struct ZoneInterval {
    EpochSeconds start = 0;
    EpochSeconds end = 0;

    [[nodiscard]] constexpr EpochSeconds length() const noexcept { return end - start; }
    [[nodiscard]] constexpr std::int64_t seconds() const noexcept { return end - start + 1; }
    [[nodiscard]] constexpr bool contains(EpochSeconds t) const noexcept { return t >= start && t <= end; }

    friend constexpr bool operator==(const ZoneInterval&, const ZoneInterval&) = default;
};

/// One trading period and its zone of interest. The zone is
/// [period_start + zone_offset, period_start + zone_offset + zone_length].
class PeriodSpec {
public:
    /// Throws InvalidSpec unless zone_offset >= 0, zone_length > 0 and, when
    /// day_period is set, the zone ends within the day.
    PeriodSpec(EpochSeconds period_start, std::int64_t zone_offset, std::int64_t zone_length,
               bool day_period = true);

    [[nodiscard]] EpochSeconds period_start() const noexcept { return period_start_; }
    [[nodiscard]] std::int64_t zone_offset() const noexcept { return zone_offset_; }
    [[nodiscard]] std::int64_t zone_length() const noexcept { return zone_length_; }

private:
    EpochSeconds period_start_;
    std::int64_t zone_offset_;
    std::int64_t zone_length_;
};

[[nodiscard]] ZoneInterval zone_interval(const PeriodSpec& spec) noexcept;

/// High, low, close and pivot of one zone.
struct PeriodSummary {
    double max_price = 0.0;
    double min_price = 0.0;
    double close_price = 0.0;
    double pivot = 0.0;

    [[nodiscard]] double range() const noexcept { return max_price - min_price; }
};

[[nodiscard]] PeriodSummary make_summary(double max_price, double min_price, double close_price) noexcept;

struct SecondSeries;
enum class PriceSource : int;

/// Summary over the seconds of the series that carry a price. The close is
/// the price at the last second of the series. Throws EmptyPeriod when no
/// second carries a price.
[[nodiscard]] PeriodSummary summarize_period(const SecondSeries& series, PriceSource source);

// Calendar helpers. Dates are civil dates in the timestamp frame of the data.

using Date = std::chrono::year_month_day;

/// Parses YYYY-MM-DD; throws FormatError on anything else.
[[nodiscard]] Date parse_date(std::string_view text);
[[nodiscard]] std::string format_date(const Date& date);
[[nodiscard]] EpochSeconds day_start(const Date& date) noexcept;
[[nodiscard]] Date date_of(EpochSeconds t) noexcept;
[[nodiscard]] Date next_day(const Date& date) noexcept;

/// Year-month key ordered chronologically, printed as YYYY-MM.
struct YearMonth {
    int year = 1970;
    unsigned month = 1;

    friend constexpr auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

[[nodiscard]] YearMonth year_month_of(const Date& date) noexcept;
[[nodiscard]] YearMonth year_month_of(EpochSeconds t) noexcept;
[[nodiscard]] YearMonth next_month(YearMonth ym) noexcept;
[[nodiscard]] std::string format_year_month(YearMonth ym);

/// Parses "HH:MM[:SS]" or a plain integer number of seconds.
[[nodiscard]] std::int64_t parse_clock_seconds(std::string_view text);

}  // namespace tubeosc
