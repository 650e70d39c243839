#include "tubeosc/timebase.hpp"

#include "tubeosc/errors.hpp"
#include "tubeosc/price_series.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>

namespace tubeosc {

namespace {

template <typename Int>
bool parse_int(std::string_view text, Int& out) {
    if (text.empty()) {
        return false;
    }
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

}  // namespace

PeriodSpec::PeriodSpec(EpochSeconds period_start, std::int64_t zone_offset, std::int64_t zone_length,
                       bool day_period)
    : period_start_(period_start), zone_offset_(zone_offset), zone_length_(zone_length) {
    if (zone_offset < 0) {
        throw InvalidSpec("zone offset must be non-negative");
    }
    if (zone_length <= 0) {
        throw InvalidSpec("zone length must be positive");
    }
    if (day_period && zone_offset + zone_length > kSecondsPerDay) {
        throw InvalidSpec("zone of interest extends past the end of the day");
    }
}

ZoneInterval zone_interval(const PeriodSpec& spec) noexcept {
    const EpochSeconds start = spec.period_start() + spec.zone_offset();
    return {start, start + spec.zone_length()};
}

PeriodSummary make_summary(double max_price, double min_price, double close_price) noexcept {
    PeriodSummary s;
    s.max_price = max_price;
    s.min_price = min_price;
    s.close_price = close_price;
    s.pivot = (max_price + min_price + close_price) / 3.0;
    // Rounding can push the pivot an ulp outside [min, max] when all three coincide.
    s.pivot = std::clamp(s.pivot, min_price, max_price);
    return s;
}

PeriodSummary summarize_period(const SecondSeries& series, PriceSource source) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!series.present[i]) {
            continue;
        }
        const double p = series.price(i, source);
        hi = std::max(hi, p);
        lo = std::min(lo, p);
        any = true;
    }
    if (!any) {
        throw EmptyPeriod("no price in the zone of interest");
    }
    // Present flags are monotone (once a tick is seen every later second
    // carries a price), so the last second is present whenever any is.
    const double close = series.price(series.size() - 1, source);
    return make_summary(hi, lo, close);
}

Date parse_date(std::string_view text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
        !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d)) {
        throw FormatError("expected date YYYY-MM-DD, got '" + std::string(text) + "'");
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) {
        throw FormatError("invalid calendar date '" + std::string(text) + "'");
    }
    return date;
}

std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

EpochSeconds day_start(const Date& date) noexcept {
    const std::chrono::sys_days days{date};
    return static_cast<EpochSeconds>(days.time_since_epoch().count()) * kSecondsPerDay;
}

Date date_of(EpochSeconds t) noexcept {
    EpochSeconds day = t / kSecondsPerDay;
    if (t % kSecondsPerDay < 0) {
        --day;
    }
    return Date{std::chrono::sys_days{std::chrono::days{day}}};
}

Date next_day(const Date& date) noexcept {
    return Date{std::chrono::sys_days{date} + std::chrono::days{1}};
}

YearMonth year_month_of(const Date& date) noexcept {
    return {static_cast<int>(date.year()), static_cast<unsigned>(date.month())};
}

YearMonth year_month_of(EpochSeconds t) noexcept { return year_month_of(date_of(t)); }

YearMonth next_month(YearMonth ym) noexcept {
    if (ym.month == 12) {
        return {ym.year + 1, 1};
    }
    return {ym.year, ym.month + 1};
}

std::string format_year_month(YearMonth ym) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", ym.year, ym.month);
    return buf;
}

std::int64_t parse_clock_seconds(std::string_view text) {
    std::int64_t plain = 0;
    if (parse_int(text, plain)) {
        return plain;
    }
    std::int64_t parts[3] = {0, 0, 0};
    int n = 0;
    std::size_t pos = 0;
    bool more = true;
    while (more && n < 3) {
        const auto colon = text.find(':', pos);
        const auto field = text.substr(pos, colon == std::string_view::npos ? text.npos : colon - pos);
        if (!parse_int(field, parts[n])) {
            throw FormatError("expected HH:MM[:SS] or seconds, got '" + std::string(text) + "'");
        }
        ++n;
        more = colon != std::string_view::npos;
        pos = colon + 1;
    }
    if (more || n < 2 || parts[1] < 0 || parts[1] > 59 || parts[2] < 0 || parts[2] > 59 || parts[0] < 0) {
        throw FormatError("expected HH:MM[:SS] or seconds, got '" + std::string(text) + "'");
    }
    return parts[0] * 3600 + parts[1] * 60 + parts[2];
}

}  // namespace tubeosc
