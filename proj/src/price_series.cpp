#include "tubeosc/price_series.hpp"

#include "tubeosc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace tubeosc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(pos)));
            break;
        }
        fields.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return fields;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) {
        return false;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_int64(std::string_view s, std::int64_t& out) {
    if (s.empty()) {
        return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool parse_timestamp(std::string_view field, TimestampFormat format, std::int64_t& out) {
    const bool numeric = all_digits(field);
    if (format == TimestampFormat::epoch_ms || (format == TimestampFormat::automatic && numeric)) {
        return parse_int64(field, out);
    }
    try {
        out = parse_iso8601_ms(field);
        return true;
    } catch (const FormatError&) {
        return false;
    }
}

}  // namespace

std::int64_t parse_iso8601_ms(std::string_view text) {
    const auto fail = [&]() -> std::int64_t {
        throw FormatError("bad ISO-8601 timestamp '" + std::string(text) + "'");
    };
    if (text.size() < 19 || (text[10] != ' ' && text[10] != 'T') || text[13] != ':' || text[16] != ':') {
        return fail();
    }
    Date date;
    try {
        date = parse_date(text.substr(0, 10));
    } catch (const FormatError&) {
        return fail();
    }
    std::int64_t hh = 0;
    std::int64_t mm = 0;
    std::int64_t ss = 0;
    if (!all_digits(text.substr(11, 2)) || !all_digits(text.substr(14, 2)) || !all_digits(text.substr(17, 2))) {
        return fail();
    }
    parse_int64(text.substr(11, 2), hh);
    parse_int64(text.substr(14, 2), mm);
    parse_int64(text.substr(17, 2), ss);
    if (hh > 23 || mm > 59 || ss > 60) {
        return fail();
    }
    std::int64_t millis = 0;
    std::string_view rest = text.substr(19);
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        std::size_t n = 0;
        while (n < rest.size() && std::isdigit(static_cast<unsigned char>(rest[n]))) {
            ++n;
        }
        if (n == 0) {
            return fail();
        }
        // Milliseconds; further digits are truncated.
        std::int64_t scale = 100;
        for (std::size_t i = 0; i < n && i < 3; ++i) {
            millis += (rest[i] - '0') * scale;
            scale /= 10;
        }
        rest.remove_prefix(n);
    }
    if (rest == "Z") {
        rest.remove_prefix(1);
    }
    if (!rest.empty()) {
        return fail();
    }
    return (day_start(date) + hh * 3600 + mm * 60 + ss) * 1000 + millis;
}

TickParseResult parse_ticks(std::istream& in, const TickFormat& format) {
    TickParseResult result;
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("tick file is empty (missing header)");
    }
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3);  // UTF-8 BOM
    }
    {
        const auto header = split_csv(line);
        const auto first = header.empty() ? std::string{} : lower(header[0]);
        const bool time_ok = first == "timestamp" || first == "time" || first == "gmt time" || first == "local time";
        if (header.size() < 3 || !time_ok || lower(header[1]) != "ask" || lower(header[2]) != "bid") {
            throw FormatError("expected header 'timestamp,ask,bid[,askVolume,bidVolume]', got '" + line + "'");
        }
    }

    bool needs_sort = false;
    std::int64_t last_ts = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv(line);
        TickRecord tick;
        if (fields.size() < 3 || !parse_timestamp(fields[0], format.timestamp, tick.timestamp_ms) ||
            !parse_double(fields[1], tick.ask) || !parse_double(fields[2], tick.bid)) {
            ++result.skipped_rows;
            continue;
        }
        if (!(tick.bid > 0.0) || tick.bid > tick.ask) {
            ++result.crossed_quotes;
            continue;
        }
        if (!result.ticks.empty() && tick.timestamp_ms < last_ts) {
            if (last_ts - tick.timestamp_ms > format.out_of_order_tolerance_ms) {
                throw OutOfOrderError("timestamp regresses by " + std::to_string(last_ts - tick.timestamp_ms) +
                                      " ms at line " + std::to_string(line_no));
            }
            needs_sort = true;
        }
        last_ts = result.ticks.empty() ? tick.timestamp_ms : std::max(last_ts, tick.timestamp_ms);
        result.ticks.push_back(tick);
    }
    if (needs_sort) {
        std::stable_sort(result.ticks.begin(), result.ticks.end(),
                         [](const TickRecord& a, const TickRecord& b) { return a.timestamp_ms < b.timestamp_ms; });
    }
    return result;
}

TickParseResult parse_ticks_file(const std::filesystem::path& path, const TickFormat& format) {
    std::ifstream in(path);
    if (!in) {
        throw DataMissing("cannot open tick file " + path.string());
    }
    return parse_ticks(in, format);
}

PriceSource parse_price_source(std::string_view text) {
    const auto t = lower(trim(text));
    if (t == "ask") return PriceSource::ask;
    if (t == "bid") return PriceSource::bid;
    if (t == "mid") return PriceSource::mid;
    throw ConfigError("price source must be ask, bid or mid, got '" + std::string(text) + "'");
}

std::string_view to_string(PriceSource source) noexcept {
    switch (source) {
        case PriceSource::bid: return "bid";
        case PriceSource::mid: return "mid";
        case PriceSource::ask: break;
    }
    return "ask";
}

std::size_t SecondSeries::first_present() const noexcept {
    const auto it = std::find(present.begin(), present.end(), std::uint8_t{1});
    return static_cast<std::size_t>(it - present.begin());
}

SecondSeries resample_to_seconds(const std::vector<TickRecord>& ticks, const ZoneInterval& zone) {
    const auto n = static_cast<std::size_t>(zone.seconds());
    SecondSeries out;
    out.t_start = zone.start;
    out.ask.assign(n, 0.0);
    out.bid.assign(n, 0.0);
    out.present.assign(n, 0);

    std::size_t next = 0;
    bool seen = false;
    double ask = 0.0;
    double bid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t limit_ms = (zone.start + static_cast<EpochSeconds>(i) + 1) * 1000;
        while (next < ticks.size() && ticks[next].timestamp_ms < limit_ms) {
            ask = ticks[next].ask;
            bid = ticks[next].bid;
            seen = true;
            ++next;
        }
        if (seen) {
            out.ask[i] = ask;
            out.bid[i] = bid;
            out.present[i] = 1;
        }
    }
    if (!seen) {
        throw EmptySeries("no tick at or before the end of the zone");
    }
    return out;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
    std::ifstream in(manifest);
    if (!in) {
        throw ConfigError("cannot open manifest " + manifest.string());
    }
    const auto base = manifest.parent_path();
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = trim(line);
        if (view.empty() || view.front() == '#') {
            continue;
        }
        const auto space = view.find_first_of(" \t");
        if (space == std::string_view::npos) {
            throw ConfigError("manifest line " + std::to_string(line_no) + ": expected 'YYYY-MM-DD <path>'");
        }
        ManifestEntry entry;
        try {
            entry.date = parse_date(view.substr(0, space));
        } catch (const FormatError& e) {
            throw ConfigError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        std::filesystem::path p{std::string(trim(view.substr(space)))};
        entry.path = p.is_absolute() ? p : base / p;
        entries.push_back(std::move(entry));
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const ManifestEntry& a, const ManifestEntry& b) { return a.date < b.date; });
    return entries;
}

}  // namespace tubeosc
