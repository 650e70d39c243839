#pragma once

// Profitability statistics over a trade ledger and equity curve.

#include "tubeosc/timebase.hpp"
#include "tubeosc/trading.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace tubeosc {

enum class SdConvention : std::uint8_t { Sample, Population };

struct MonthlyReturn {
    YearMonth month;
    double balance_start = 0.0;
    double balance_end = 0.0;
    double return_fraction = 0.0;
    double risk_free = 0.0;  ///< monthly fraction
};

/// Returns for every calendar month from `first` to `last` inclusive, measured
/// between month-end balances of the equity curve (initial balance before the
/// first month). Months without trades return 0.
[[nodiscard]] std::vector<MonthlyReturn> monthly_returns(double initial_balance, std::span<const EquityPoint> equity,
                                                         YearMonth first, YearMonth last);

struct DailyYield {
    Date date;
    double annual_percent = 0.0;
};

/// Reads `date,annual_percent` rows. Rows whose value does not parse (for
/// example "." placeholders) are skipped.
[[nodiscard]] std::vector<DailyYield> read_yields(std::istream& in);
[[nodiscard]] std::vector<DailyYield> read_yields_file(const std::filesystem::path& path);

/// Monthly risk-free fraction = mean annual percent of the month / 12 / 100.
[[nodiscard]] std::map<YearMonth, double> risk_free_monthly(std::span<const DailyYield> yields);

/// Fills MonthlyReturn::risk_free. Throws MissingData for a month without yields.
void attach_risk_free(std::vector<MonthlyReturn>& months, const std::map<YearMonth, double>& risk_free);

struct SharpeRatio {
    double monthly = 0.0;
    double yearly = 0.0;
};

/// Mean excess return over its standard deviation, annualised by sqrt(12).
/// Throws RangeError with fewer than two months, DegenerateVariance when the
/// deviation is zero.
[[nodiscard]] SharpeRatio sharpe(std::span<const MonthlyReturn> months, SdConvention sd = SdConvention::Sample);
[[nodiscard]] SharpeRatio sharpe_from_excess(std::span<const double> excess, SdConvention sd = SdConvention::Sample);

struct Summary {
    double mean = 0.0;
    double sd = 0.0;
    double median = 0.0;
    double mad = 0.0;  ///< mean absolute deviation from the median
};

[[nodiscard]] double mean_of(std::span<const double> xs) noexcept;
[[nodiscard]] double sd_of(std::span<const double> xs, SdConvention sd) noexcept;
[[nodiscard]] double median_of(std::span<const double> xs);
[[nodiscard]] double mad_of(std::span<const double> xs);
[[nodiscard]] Summary summarize(std::span<const double> xs, SdConvention sd = SdConvention::Sample);

struct TradeStats {
    std::size_t n_trades = 0;
    Summary duration;
    Summary profit_per_share;
    Summary trades_per_day;
    double win_rate = 0.0;     ///< percent of trades with profit > 0
    double win_rate_sd = 0.0;  ///< SD of the 0/100 win indicator
    bool win_rate_defined = false;
    std::size_t trading_days = 0;
};

/// trading_days lists every day of the calendar that was traded, including
/// days without trades; trades count towards the day of their entry.
[[nodiscard]] TradeStats trade_stats(std::span<const TradeRecord> ledger, std::span<const Date> trading_days,
                                     SdConvention sd = SdConvention::Sample);

struct HourBucket {
    std::size_t count = 0;
    double mean_profit_per_share = 0.0;
};

/// Trades grouped by the hour of day of their entry time.
[[nodiscard]] std::map<int, HourBucket> hourly_profile(std::span<const TradeRecord> ledger);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over [min, max] of the data; the last bin is closed.
[[nodiscard]] std::vector<HistogramBin> histogram(std::span<const double> xs, std::size_t bins);

}  // namespace tubeosc
