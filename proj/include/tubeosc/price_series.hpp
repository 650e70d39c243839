#pragma once

// Tick ingestion and resampling to one quote per second.

#include "tubeosc/timebase.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tubeosc {

struct TickRecord {
    std::int64_t timestamp_ms = 0;
    double ask = 0.0;
    double bid = 0.0;

    friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

enum class TimestampFormat {
    automatic,  ///< integer epoch-ms if the field is all digits, ISO-8601 otherwise
    epoch_ms,
    iso8601,
};

struct TickFormat {
    TimestampFormat timestamp = TimestampFormat::automatic;
    /// Allowed backwards step between consecutive timestamps.
    std::int64_t out_of_order_tolerance_ms = 0;
};

struct TickParseResult {
    std::vector<TickRecord> ticks;
    std::size_t skipped_rows = 0;    ///< unparsable fields
    std::size_t crossed_quotes = 0;  ///< rows with bid > ask or non-positive prices
};

/// Reads `timestamp,ask,bid[,askVolume,bidVolume]` CSV with one header row.
/// Throws FormatError on a header mismatch and OutOfOrderError when a
/// timestamp regresses by more than the tolerance.
[[nodiscard]] TickParseResult parse_ticks(std::istream& in, const TickFormat& format = {});
[[nodiscard]] TickParseResult parse_ticks_file(const std::filesystem::path& path, const TickFormat& format = {});

/// Parses "YYYY-MM-DD[ T]HH:MM:SS[.fff][Z]" into epoch milliseconds.
[[nodiscard]] std::int64_t parse_iso8601_ms(std::string_view text);

enum class PriceSource : int { ask = 0, bid = 1, mid = 2 };

[[nodiscard]] PriceSource parse_price_source(std::string_view text);
[[nodiscard]] std::string_view to_string(PriceSource source) noexcept;

/// Last observed quote for each second of a zone, forward filled.
struct SecondSeries {
    EpochSeconds t_start = 0;
    std::vector<double> ask;
    std::vector<double> bid;
    /// 1 once any tick has been observed at or before the second.
    std::vector<std::uint8_t> present;

    [[nodiscard]] std::size_t size() const noexcept { return ask.size(); }
    [[nodiscard]] EpochSeconds t_end() const noexcept {
        return t_start + static_cast<EpochSeconds>(size()) - 1;
    }
    [[nodiscard]] double price(std::size_t i, PriceSource source) const noexcept {
        switch (source) {
            case PriceSource::bid: return bid[i];
            case PriceSource::mid: return 0.5 * (ask[i] + bid[i]);
            case PriceSource::ask: break;
        }
        return ask[i];
    }
    /// Index of the first second carrying a price, or size() if none.
    [[nodiscard]] std::size_t first_present() const noexcept;
};

/// Second s takes the last tick with timestamp_ms < (s + 1) * 1000, including
/// ticks before the zone. Throws EmptySeries if no tick precedes the zone end.
[[nodiscard]] SecondSeries resample_to_seconds(const std::vector<TickRecord>& ticks, const ZoneInterval& zone);

struct ManifestEntry {
    Date date;
    std::filesystem::path path;
};

/// Reads `YYYY-MM-DD <path>` lines; relative paths resolve against the
/// manifest's directory. Blank lines and `#` comments are ignored.
[[nodiscard]] std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

}  // namespace tubeosc
