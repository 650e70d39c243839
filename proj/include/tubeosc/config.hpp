#pragma once

// Backtest configuration: `key = value` lines with optional
// `[instrument NAME]` sections whose keys override the global ones.

#include "tubeosc/heuristics.hpp"
#include "tubeosc/metrics.hpp"
#include "tubeosc/price_series.hpp"
#include "tubeosc/trading.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tubeosc {

struct BacktestConfig {
    std::string instrument = "default";
    std::string manifest;  ///< as written in the config
    std::filesystem::path manifest_path;  ///< resolved against the config's directory
    std::int64_t zone_offset = 9 * 3600;
    std::int64_t zone_length = 9 * 3600;
    PriceSource price_source = PriceSource::ask;
    TickFormat tick_format;

    HeuristicConfig oscillator;
    bool symmetric = true;
    EngineConfig engine;
    double start_balance = 10000.0;

    std::string rf_file;
    std::filesystem::path rf_path;
    std::filesystem::path output_dir = "out";
    std::optional<Date> from;
    std::optional<Date> to;
    int warmup_days = 1;

    bool trace = false;
    std::vector<Date> trace_days;  ///< empty: every traded day
    std::size_t trace_points = 1000;  ///< 0 keeps every second
    std::size_t histogram_bins = 50;
    unsigned threads = 0;  ///< 0: hardware concurrency
    SdConvention sd = SdConvention::Sample;

    /// Derives symmetric short thresholds, then checks every field. Throws
    /// ConfigError describing the first inconsistency.
    void finalize();
};

/// Raw key/value view of a config file, kept for error messages and tests.
struct ConfigDocument {
    std::map<std::string, std::string> globals;
    std::map<std::string, std::map<std::string, std::string>> sections;  ///< by instrument
};

[[nodiscard]] ConfigDocument parse_config_document(std::istream& in);

/// Applies the document onto defaults. `instrument` selects a section; without
/// it the global `instrument` key or the only section is used. Relative paths
/// resolve against `base_dir`. Throws ConfigError.
[[nodiscard]] BacktestConfig build_config(const ConfigDocument& doc, const std::optional<std::string>& instrument,
                                          const std::filesystem::path& base_dir);

[[nodiscard]] BacktestConfig load_config(const std::filesystem::path& path,
                                         const std::optional<std::string>& instrument = std::nullopt);

/// Applies one `key = value` setting; used for both files and CLI overrides.
void apply_setting(BacktestConfig& config, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir);

}  // namespace tubeosc
