#pragma once

// End-to-end backtest: per-day oscillator and trading loops, metrics and
// file outputs.

#include "tubeosc/config.hpp"
#include "tubeosc/heuristics.hpp"
#include "tubeosc/metrics.hpp"
#include "tubeosc/trading.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tubeosc {

enum class DayStatus : std::uint8_t { Traded, Warmup, Skipped };

[[nodiscard]] std::string_view to_string(DayStatus status) noexcept;

struct AuditEntry {
    Date date;
    DayStatus status = DayStatus::Skipped;
    std::string detail;  ///< skip reason or warnings
};

/// Full per-second record of one traded day.
struct DayTrace {
    Date date;
    ZoneInterval zone;
    PriceSource price_source = PriceSource::ask;
    std::vector<double> ask;
    std::vector<double> bid;
    std::vector<std::uint8_t> present;
    std::vector<double> raw;
    std::vector<double> scaled;
    std::vector<TradingEngine::Signal> signals;
    OscillatorParams params;
};

struct DayParamsEcho {
    Date date;
    double m_basic = 0.0;
    double grid_first = 0.0;
    double grid_step = 0.0;
    std::size_t lines = 0;
    std::size_t slopes = 0;
    double first_price = 0.0;
};

struct BacktestReport {
    BacktestConfig config;
    double initial_balance = 0.0;
    double final_balance = 0.0;
    std::vector<TradeRecord> ledger;
    std::vector<EquityPoint> equity;
    std::vector<MonthlyReturn> months;
    std::optional<SharpeRatio> sharpe;
    std::string sharpe_note;
    Summary monthly_return_summary;
    TradeStats stats;
    std::map<int, HourBucket> hourly;
    std::vector<AuditEntry> audit;
    std::vector<DayParamsEcho> day_params;
    std::vector<DayTrace> traces;
    std::vector<std::string> warnings;
    bool data_missing = false;  ///< a listed day could not be read

    [[nodiscard]] double total_profit() const noexcept { return final_balance - initial_balance; }
    [[nodiscard]] std::size_t count(DayStatus status) const noexcept;
};

/// Simulates one zone of second data with given parameters. The engine is
/// driven with its configured volume; the oscillator is 0 at the zone start.
struct DayResult {
    std::vector<TradeRecord> ledger;
    std::vector<double> raw;
    std::vector<double> scaled;
    std::vector<TradingEngine::Signal> signals;
};
[[nodiscard]] DayResult simulate_day(const SecondSeries& series, PriceSource source, const OscillatorParams& params,
                                     const EngineConfig& engine, double start_balance, bool keep_trace);

/// Runs every day in the configured range. Days are processed in parallel;
/// balances are folded in date order, so the output does not depend on the
/// thread count. Throws ConfigError for unusable configuration.
[[nodiscard]] BacktestReport run_backtest(const BacktestConfig& config);

/// Writes report.json, trades.csv and monthly_returns.csv into the directory,
/// plus run-level plot data under plotdata/.
void write_report(const BacktestReport& report, const std::filesystem::path& dir);

/// Writes per-day plot data for the selected days (all traced days when
/// empty). Throws TraceUnavailable when a selected day has no trace.
void emit_plot_data(const BacktestReport& report, const std::vector<Date>& days, const std::filesystem::path& dir);

[[nodiscard]] std::string report_json(const BacktestReport& report);
[[nodiscard]] std::string trades_csv(const std::vector<TradeRecord>& ledger);

/// Indices of at most `points` evenly spread seconds out of n, always
/// including the first and last; 0 keeps all.
[[nodiscard]] std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t points);

}  // namespace tubeosc
