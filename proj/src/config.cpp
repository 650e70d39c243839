#include "tubeosc/config.hpp"

#include "tubeosc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>

namespace tubeosc {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return std::string(s);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view expected) {
    throw ConfigError("config key '" + key + "': expected " + std::string(expected) + ", got '" + value + "'");
}

double to_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (value.empty() || ec != std::errc{} || ptr != last) {
        bad_value(key, value, "a number");
    }
    return out;
}

std::int64_t to_int(const std::string& key, const std::string& value) {
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size()) {
        bad_value(key, value, "an integer");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    const auto v = lower(value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    bad_value(key, value, "true or false");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= value.size()) {
        const auto comma = value.find(',', pos);
        auto item = trim(std::string_view(value).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!item.empty()) {
            out.push_back(std::move(item));
        }
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

Date to_date(const std::string& key, const std::string& value) {
    try {
        return parse_date(value);
    } catch (const FormatError&) {
        bad_value(key, value, "a date YYYY-MM-DD");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p{value};
    return p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

void apply_setting(BacktestConfig& c, const std::string& raw_key, const std::string& value,
                   const std::filesystem::path& base_dir) {
    const auto key = lower(raw_key);
    auto& osc = c.oscillator;
    if (key == "instrument") {
        c.instrument = value;
    } else if (key == "manifest") {
        c.manifest = value;
        c.manifest_path = resolve(base_dir, value);
    } else if (key == "zone_start") {
        try {
            c.zone_offset = parse_clock_seconds(value);
        } catch (const FormatError&) {
            bad_value(key, value, "HH:MM[:SS] or seconds");
        }
    } else if (key == "zone_length") {
        try {
            c.zone_length = parse_clock_seconds(value);
        } catch (const FormatError&) {
            bad_value(key, value, "HH:MM[:SS] or seconds");
        }
    } else if (key == "price_source") {
        c.price_source = parse_price_source(value);
    } else if (key == "timestamp_format") {
        const auto v = lower(value);
        if (v == "auto") c.tick_format.timestamp = TimestampFormat::automatic;
        else if (v == "epoch_ms") c.tick_format.timestamp = TimestampFormat::epoch_ms;
        else if (v == "iso8601") c.tick_format.timestamp = TimestampFormat::iso8601;
        else bad_value(key, value, "auto, epoch_ms or iso8601");
    } else if (key == "out_of_order_tolerance_ms") {
        c.tick_format.out_of_order_tolerance_ms = to_int(key, value);
    } else if (key == "bandwidth") {
        osc.bandwidth = to_int(key, value);
    } else if (key == "multiplicator") {
        osc.multiplicator = to_double(key, value);
    } else if (key == "discount") {
        if (lower(value) == "off" || lower(value) == "none") osc.discount.reset();
        else osc.discount = to_double(key, value);
    } else if (key == "m_basic") {
        if (lower(value) == "auto") osc.fixed_m_basic.reset();
        else osc.fixed_m_basic = to_double(key, value);
    } else if (key == "fallback_m_basic") {
        osc.fallback_m_basic = to_double(key, value);
    } else if (key == "slope_factors") {
        if (lower(value) == "tan") {
            osc.slope_factors.reset();
        } else {
            std::vector<double> factors;
            for (const auto& item : split_list(value)) {
                factors.push_back(to_double(key, item));
            }
            osc.slope_factors = std::move(factors);
        }
    } else if (key == "factor_count") {
        osc.factor_count = static_cast<int>(to_int(key, value));
    } else if (key == "starting_points") {
        osc.starting_point_count = static_cast<int>(to_int(key, value));
    } else if (key == "grid_width_factor") {
        osc.width_factor = to_double(key, value);
    } else if (key == "fallback_half_width") {
        osc.fallback_half_width = to_double(key, value);
    } else if (key == "grid_step") {
        if (lower(value) == "auto") osc.fixed_grid_step.reset();
        else osc.fixed_grid_step = to_double(key, value);
    } else if (key == "thresholds") {
        const auto slash = value.find('/');
        if (slash == std::string::npos) {
            bad_value(key, value, "IN/OUT");
        }
        c.engine.thresholds.in_long = to_double(key, trim(value.substr(0, slash)));
        c.engine.thresholds.out_long = to_double(key, trim(value.substr(slash + 1)));
    } else if (key == "in_long") {
        c.engine.thresholds.in_long = to_double(key, value);
    } else if (key == "out_long") {
        c.engine.thresholds.out_long = to_double(key, value);
    } else if (key == "in_short") {
        c.engine.thresholds.in_short = to_double(key, value);
    } else if (key == "out_short") {
        c.engine.thresholds.out_short = to_double(key, value);
    } else if (key == "symmetric") {
        c.symmetric = to_bool(key, value);
    } else if (key == "delay") {
        c.engine.execution_delay = static_cast<int>(to_int(key, value));
    } else if (key == "volume_mode") {
        const auto v = lower(value);
        if (v == "reinvest" || v == "reinvest_100") c.engine.volume_mode = VolumeMode::Reinvest;
        else if (v == "fixed") c.engine.volume_mode = VolumeMode::Fixed;
        else bad_value(key, value, "reinvest or fixed");
    } else if (key == "fixed_volume") {
        c.engine.fixed_volume = to_double(key, value);
    } else if (key == "same_second_reentry") {
        c.engine.same_second_reentry = to_bool(key, value);
    } else if (key == "start_balance") {
        c.start_balance = to_double(key, value);
    } else if (key == "rf_file") {
        c.rf_file = value;
        c.rf_path = value.empty() ? std::filesystem::path{} : resolve(base_dir, value);
    } else if (key == "output_dir") {
        c.output_dir = resolve(base_dir, value);
    } else if (key == "from") {
        c.from = to_date(key, value);
    } else if (key == "to") {
        c.to = to_date(key, value);
    } else if (key == "warmup_days") {
        c.warmup_days = static_cast<int>(to_int(key, value));
    } else if (key == "trace") {
        c.trace = to_bool(key, value);
    } else if (key == "trace_days") {
        c.trace_days.clear();
        for (const auto& item : split_list(value)) {
            c.trace_days.push_back(to_date(key, item));
        }
    } else if (key == "trace_points") {
        c.trace_points = static_cast<std::size_t>(to_int(key, value));
    } else if (key == "histogram_bins") {
        c.histogram_bins = static_cast<std::size_t>(to_int(key, value));
    } else if (key == "threads") {
        c.threads = static_cast<unsigned>(to_int(key, value));
    } else if (key == "sd_convention") {
        const auto v = lower(value);
        if (v == "sample") c.sd = SdConvention::Sample;
        else if (v == "population") c.sd = SdConvention::Population;
        else bad_value(key, value, "sample or population");
    } else {
        throw ConfigError("unknown config key '" + raw_key + "'");
    }
}

void BacktestConfig::finalize() {
    if (symmetric) {
        const auto& t = engine.thresholds;
        engine.thresholds = Thresholds::symmetric(t.in_long, t.out_long);
    }
    const auto wrap = [](auto&& check) {
        try {
            check();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    };
    wrap([&] { engine.thresholds.validate(); });
    wrap([&] { PeriodSpec(0, zone_offset, zone_length); });
    if (manifest_path.empty()) {
        throw ConfigError("config key 'manifest' is required");
    }
    if (engine.execution_delay != 0 && engine.execution_delay != 1) {
        throw ConfigError("delay must be 0 or 1");
    }
    if (engine.volume_mode == VolumeMode::Fixed && !(engine.fixed_volume > 0.0)) {
        throw ConfigError("fixed_volume must be positive");
    }
    if (!(start_balance > 0.0)) {
        throw ConfigError("start_balance must be positive");
    }
    if (oscillator.bandwidth < 1) {
        throw ConfigError("bandwidth must be at least 1 second");
    }
    if (!(oscillator.multiplicator > 0.0)) {
        throw ConfigError("multiplicator must be positive");
    }
    if (oscillator.discount && !(*oscillator.discount > 0.0 && *oscillator.discount <= 1.0)) {
        throw ConfigError("discount must lie in (0, 1]");
    }
    if (oscillator.starting_point_count < 2) {
        throw ConfigError("starting_points must be at least 2");
    }
    if (!oscillator.slope_factors && (oscillator.factor_count < 1 || oscillator.factor_count > 9)) {
        throw ConfigError("factor_count must lie in 1..9 for the tangent slope family");
    }
    if (oscillator.slope_factors) {
        if (oscillator.slope_factors->empty()) {
            throw ConfigError("slope_factors must not be empty");
        }
        for (double f : *oscillator.slope_factors) {
            if (!(f > 0.0)) {
                throw ConfigError("slope_factors must be positive");
            }
        }
    }
    if (oscillator.fixed_m_basic && !(*oscillator.fixed_m_basic > 0.0)) {
        throw ConfigError("m_basic must be positive");
    }
    if (!(oscillator.fallback_m_basic > 0.0) || !(oscillator.fallback_half_width > 0.0) ||
        !(oscillator.width_factor > 0.0)) {
        throw ConfigError("fallback_m_basic, fallback_half_width and grid_width_factor must be positive");
    }
    if (oscillator.fixed_grid_step && !(*oscillator.fixed_grid_step > 0.0)) {
        throw ConfigError("grid_step must be positive");
    }
    if (warmup_days < 1) {
        throw ConfigError("warmup_days must be at least 1 (parameters need a previous period)");
    }
    if (from && to && *to < *from) {
        throw ConfigError("date range is empty: to < from");
    }
}

ConfigDocument parse_config_document(std::istream& in) {
    ConfigDocument doc;
    std::map<std::string, std::string>* target = &doc.globals;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        auto text = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (text.empty()) {
            continue;
        }
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
            }
            const auto inner = trim(std::string_view(text).substr(1, text.size() - 2));
            const std::string prefix = "instrument";
            if (inner.rfind(prefix, 0) != 0 || trim(inner.substr(prefix.size())).empty()) {
                throw ConfigError("line " + std::to_string(line_no) + ": expected [instrument NAME]");
            }
            target = &doc.sections[trim(inner.substr(prefix.size()))];
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        auto key = trim(std::string_view(text).substr(0, eq));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        }
        (*target)[lower(key)] = trim(std::string_view(text).substr(eq + 1));
    }
    return doc;
}

BacktestConfig build_config(const ConfigDocument& doc, const std::optional<std::string>& instrument,
                            const std::filesystem::path& base_dir) {
    std::string name;
    if (instrument) {
        name = *instrument;
    } else if (const auto it = doc.globals.find("instrument"); it != doc.globals.end()) {
        name = it->second;
    } else if (doc.sections.size() == 1) {
        name = doc.sections.begin()->first;
    } else if (doc.sections.size() > 1) {
        throw ConfigError("several instrument sections; select one with --instrument");
    }
    const std::map<std::string, std::string>* section = nullptr;
    if (!name.empty() && !doc.sections.empty()) {
        const auto it = doc.sections.find(name);
        if (it == doc.sections.end()) {
            throw ConfigError("no [instrument " + name + "] section");
        }
        section = &it->second;
    }

    BacktestConfig c;
    if (!name.empty()) {
        c.instrument = name;
    }
    for (const auto* kv : {&doc.globals, section}) {
        if (!kv) {
            continue;
        }
        for (const auto& [k, v] : *kv) {
            if (k != "instrument") {
                apply_setting(c, k, v, base_dir);
            }
        }
    }
    const auto has = [&](const std::string& k) {
        return doc.globals.count(k) || (section && section->count(k));
    };
    // Explicit short thresholds imply an asymmetric setup unless stated otherwise.
    if ((has("in_short") || has("out_short")) && !has("symmetric")) {
        c.symmetric = false;
    }
    return c;
}

BacktestConfig load_config(const std::filesystem::path& path, const std::optional<std::string>& instrument) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    return build_config(parse_config_document(in), instrument, path.parent_path());
}

}  // namespace tubeosc
