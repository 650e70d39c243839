#include "doctest.h"

#include "tubeosc/errors.hpp"
#include "tubeosc/price_series.hpp"
#include "tubeosc/timebase.hpp"

#include <random>

using namespace tubeosc;

TEST_CASE("zone interval of NYSE hours") {
    const auto z = zone_interval(PeriodSpec(1712782800, 34200, 23400));
    CHECK(z.start == 1712817000);
    CHECK(z.end == 1712840400);
}

TEST_CASE("zone interval degenerate and nine-hour cases") {
    CHECK(zone_interval(PeriodSpec(0, 0, 1)) == ZoneInterval{0, 1});
    // 86400 + 32400 = 118800; + 32400 = 151200
    CHECK(zone_interval(PeriodSpec(86400, 3600 * 9, 3600 * 9)) == ZoneInterval{118800, 151200});
}

TEST_CASE("zone length matches the spec for random specs") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
        const std::int64_t offset = std::uniform_int_distribution<std::int64_t>(0, 80000)(rng);
        const std::int64_t length = std::uniform_int_distribution<std::int64_t>(1, 86400 - offset)(rng);
        const EpochSeconds start = std::uniform_int_distribution<std::int64_t>(0, 2000000000)(rng);
        const auto z = zone_interval(PeriodSpec(start, offset, length));
        CHECK(z.length() == length);
        CHECK(z.start == start + offset);
    }
}

TEST_CASE("period spec rejects invalid zones") {
    CHECK_THROWS_AS(PeriodSpec(0, -1, 10), InvalidSpec);
    CHECK_THROWS_AS(PeriodSpec(0, 0, 0), InvalidSpec);
    CHECK_THROWS_AS(PeriodSpec(0, 80000, 7000), InvalidSpec);
    CHECK_NOTHROW(PeriodSpec(0, 80000, 7000, false));
    CHECK_NOTHROW(PeriodSpec(0, 0, 86400));
}

namespace {

SecondSeries series_of(const std::vector<double>& prices, EpochSeconds start = 1000) {
    SecondSeries s;
    s.t_start = start;
    s.ask = prices;
    s.bid = prices;
    s.present.assign(prices.size(), 1);
    return s;
}

}  // namespace

TEST_CASE("summaries") {
    SUBCASE("constant") {
        const auto s = summarize_period(series_of({100, 100, 100}), PriceSource::ask);
        CHECK(s.max_price == 100);
        CHECK(s.min_price == 100);
        CHECK(s.close_price == 100);
        CHECK(s.pivot == 100);
    }
    SUBCASE("symmetric") {
        const auto s = summarize_period(series_of({100, 110, 90, 100}), PriceSource::ask);
        CHECK(s.max_price == 110);
        CHECK(s.min_price == 90);
        CHECK(s.pivot == 100);
    }
    SUBCASE("ramp") {
        std::vector<double> ramp;
        for (int i = 0; i <= 20; ++i) {
            ramp.push_back(90.0 + i);
        }
        const auto s = summarize_period(series_of(ramp), PriceSource::ask);
        CHECK(s.max_price == 110);
        CHECK(s.min_price == 90);
        CHECK(s.close_price == 110);
        CHECK(s.pivot == doctest::Approx((110.0 + 90.0 + 110.0) / 3.0).epsilon(1e-15));
    }
    SUBCASE("empty") {
        auto s = series_of({1, 2});
        s.present = {0, 0};
        CHECK_THROWS_AS((void)summarize_period(s, PriceSource::ask), EmptyPeriod);
    }
    SUBCASE("price source") {
        SecondSeries s = series_of({10, 12});
        s.bid = {9, 11};
        CHECK(summarize_period(s, PriceSource::bid).max_price == 11);
        CHECK(summarize_period(s, PriceSource::mid).min_price == 9.5);
    }
}

TEST_CASE("pivot stays inside the range") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> p(1 + i % 37);
        for (auto& x : p) {
            x = u(rng);
        }
        const auto s = summarize_period(series_of(p), PriceSource::ask);
        CHECK(s.min_price <= s.pivot);
        CHECK(s.pivot <= s.max_price);
    }
}

TEST_CASE("summary ignores out-of-zone ticks") {
    const ZoneInterval zone{100, 110};
    std::vector<TickRecord> ticks{{99000, 5.0, 4.9}, {100500, 2.0, 1.9}, {105000, 3.0, 2.9}, {112000, 9.0, 8.9}};
    const auto a = summarize_period(resample_to_seconds(ticks, zone), PriceSource::ask);
    ticks.back().ask = 100.0;
    ticks.push_back({200000, 50.0, 49.0});
    const auto b = summarize_period(resample_to_seconds(ticks, zone), PriceSource::ask);
    CHECK(a.max_price == b.max_price);
    CHECK(a.min_price == b.min_price);
    CHECK(a.close_price == b.close_price);
}

TEST_CASE("calendar helpers") {
    const auto d = parse_date("2024-04-10");
    CHECK(format_date(d) == "2024-04-10");
    CHECK(day_start(d) == 1712707200);
    CHECK(date_of(1712782800) == parse_date("2024-04-10"));
    CHECK(format_date(next_day(parse_date("2024-02-28"))) == "2024-02-29");
    CHECK(format_date(next_day(parse_date("2023-12-31"))) == "2024-01-01");
    CHECK(format_year_month(next_month({2023, 12})) == "2024-01");
    CHECK(year_month_of(parse_date("2024-04-30")) == YearMonth{2024, 4});
    CHECK_THROWS_AS((void)parse_date("2024-13-01"), FormatError);
    CHECK_THROWS_AS((void)parse_date("2024-02-30"), FormatError);
    CHECK_THROWS_AS((void)parse_date("20240101"), FormatError);
}

TEST_CASE("clock parsing") {
    CHECK(parse_clock_seconds("09:30") == 34200);
    CHECK(parse_clock_seconds("09:30:15") == 34215);
    CHECK(parse_clock_seconds("32400") == 32400);
    CHECK_THROWS((void)parse_clock_seconds("09:30:00:00"));
    CHECK_THROWS((void)parse_clock_seconds("09:75"));
    CHECK_THROWS((void)parse_clock_seconds("x"));
}
