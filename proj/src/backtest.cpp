#include "tubeosc/backtest.hpp"

#include "tubeosc/errors.hpp"
#include "tubeosc/format.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace tubeosc {

namespace {

using json = nlohmann::ordered_json;

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (n == 0) {
        return;
    }
    const auto workers = static_cast<std::size_t>(std::max(1u, threads));
    if (workers == 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    const auto count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

struct LoadedDay {
    Date date;
    DayStatus status = DayStatus::Skipped;
    std::string detail;
    bool unreadable = false;
    std::optional<SecondSeries> series;
    PeriodSummary summary;
    double first_price = 0.0;
    std::vector<std::string> warnings;
    OscillatorParams params;
    DayResult result;
    bool traced = false;
};

void load_day(LoadedDay& day, const std::map<Date, std::filesystem::path>& files, const BacktestConfig& config) {
    const auto it = files.find(day.date);
    if (it == files.end()) {
        day.detail = "no data file";
        return;
    }
    TickParseResult parsed;
    try {
        parsed = parse_ticks_file(it->second, config.tick_format);
    } catch (const Error& e) {
        day.detail = std::string("unreadable: ") + e.what();
        day.unreadable = true;
        return;
    }
    if (parsed.skipped_rows > 0 || parsed.crossed_quotes > 0) {
        day.warnings.push_back(format_date(day.date) + ": skipped " + std::to_string(parsed.skipped_rows) +
                               " unparsable rows and " + std::to_string(parsed.crossed_quotes) +
                               " rows with bid > ask");
    }
    const auto zone = zone_interval(PeriodSpec(day_start(day.date), config.zone_offset, config.zone_length));
    const auto in_zone = std::any_of(parsed.ticks.begin(), parsed.ticks.end(), [&](const TickRecord& t) {
        return t.timestamp_ms >= zone.start * 1000 && t.timestamp_ms < (zone.end + 1) * 1000;
    });
    if (!in_zone) {
        day.detail = "no ticks in zone";
        return;
    }
    day.series = resample_to_seconds(parsed.ticks, zone);
    day.summary = summarize_period(*day.series, config.price_source);
    day.first_price = day.series->price(day.series->first_present(), config.price_source);
    day.status = DayStatus::Traded;
}

bool wants_trace(const BacktestConfig& config, const Date& date) {
    if (!config.trace) {
        return false;
    }
    return config.trace_days.empty() ||
           std::find(config.trace_days.begin(), config.trace_days.end(), date) != config.trace_days.end();
}

json config_json(const BacktestConfig& c) {
    json j;
    j["instrument"] = c.instrument;
    j["manifest"] = c.manifest;
    j["zone_start"] = c.zone_offset;
    j["zone_length"] = c.zone_length;
    j["price_source"] = std::string(to_string(c.price_source));
    const auto& o = c.oscillator;
    j["bandwidth"] = o.bandwidth;
    j["multiplicator"] = o.multiplicator;
    j["discount"] = o.discount ? json(*o.discount) : json(nullptr);
    j["m_basic"] = o.fixed_m_basic ? json(*o.fixed_m_basic) : json("auto");
    j["fallback_m_basic"] = o.fallback_m_basic;
    j["slope_factors"] = o.slope_factors ? json(*o.slope_factors) : json("tan");
    j["factor_count"] = o.factor_count;
    j["starting_points"] = o.starting_point_count;
    j["grid_width_factor"] = o.width_factor;
    j["fallback_half_width"] = o.fallback_half_width;
    j["grid_step"] = o.fixed_grid_step ? json(*o.fixed_grid_step) : json("auto");
    const auto& th = c.engine.thresholds;
    j["thresholds"] = {{"in_long", th.in_long}, {"out_long", th.out_long}, {"in_short", th.in_short},
                       {"out_short", th.out_short}};
    j["symmetric"] = c.symmetric;
    j["delay"] = c.engine.execution_delay;
    j["volume_mode"] = c.engine.volume_mode == VolumeMode::Reinvest ? "reinvest" : "fixed";
    j["fixed_volume"] = c.engine.fixed_volume;
    j["same_second_reentry"] = c.engine.same_second_reentry;
    j["start_balance"] = c.start_balance;
    j["rf_file"] = c.rf_file;
    j["from"] = c.from ? json(format_date(*c.from)) : json(nullptr);
    j["to"] = c.to ? json(format_date(*c.to)) : json(nullptr);
    j["warmup_days"] = c.warmup_days;
    j["sd_convention"] = c.sd == SdConvention::Sample ? "sample" : "population";
    return j;
}

json summary_json(const Summary& s) {
    return {{"mean", s.mean}, {"sd", s.sd}, {"median", s.median}, {"mad", s.mad}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
}

std::string monthly_csv(const std::vector<MonthlyReturn>& months) {
    std::ostringstream os;
    os << "month,balance_start,balance_end,return,risk_free,excess\n";
    for (const auto& m : months) {
        os << format_year_month(m.month) << ',' << format_double(m.balance_start) << ','
           << format_double(m.balance_end) << ',' << format_double(m.return_fraction) << ','
           << format_double(m.risk_free) << ',' << format_double(m.return_fraction - m.risk_free) << '\n';
    }
    return os.str();
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
    std::ostringstream os;
    os << "lower,upper,count,log10_count\n";
    for (const auto& b : bins) {
        os << format_double(b.lower) << ',' << format_double(b.upper) << ',' << b.count << ',';
        if (b.count > 0) {
            os << format_double(std::log10(static_cast<double>(b.count)));
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace

std::string_view to_string(DayStatus status) noexcept {
    switch (status) {
        case DayStatus::Traded: return "traded";
        case DayStatus::Warmup: return "warmup";
        case DayStatus::Skipped: break;
    }
    return "skipped";
}

std::size_t BacktestReport::count(DayStatus status) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(audit.begin(), audit.end(), [&](const AuditEntry& a) { return a.status == status; }));
}

DayResult simulate_day(const SecondSeries& series, PriceSource source, const OscillatorParams& params,
                       const EngineConfig& engine_config, double start_balance, bool keep_trace) {
    DayResult out;
    const auto n = series.size();
    if (n == 0) {
        return out;
    }
    const ZoneInterval zone{series.t_start, series.t_end()};
    OscillatorState osc(params.make_grid(zone.start), params.bandwidth, params.discount);
    TradingEngine engine(engine_config, AccountState(start_balance));
    engine.begin_period(zone);
    if (keep_trace) {
        out.raw.reserve(n);
        out.scaled.reserve(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const EpochSeconds t = zone.start + static_cast<EpochSeconds>(i);
        OscillatorOutput value = make_output(osc.raw(), params.multiplicator);
        if (i > 0) {
            if (series.present[i - 1] && series.present[i]) {
                value = osc.update(t, series.price(i - 1, source), series.price(i, source), params.multiplicator);
            } else {
                value = osc.update_idle(t, params.multiplicator);
            }
        }
        if (keep_trace) {
            out.raw.push_back(value.raw);
            out.scaled.push_back(value.scaled);
        }
        if (series.present[i]) {
            engine.step(t, value.scaled, series.ask[i], series.bid[i]);
        }
    }
    engine.force_close_at_period_end(zone.end, series.ask[n - 1], series.bid[n - 1]);
    out.ledger = engine.ledger();
    if (keep_trace) {
        out.signals = engine.signals();
    }
    return out;
}

BacktestReport run_backtest(const BacktestConfig& config_in) {
    BacktestReport report;
    report.config = config_in;
    auto& config = report.config;
    config.finalize();

    const auto manifest = read_manifest(config.manifest_path);
    std::map<Date, std::filesystem::path> files;
    for (const auto& e : manifest) {
        if (!files.emplace(e.date, e.path).second) {
            throw ConfigError("manifest lists " + format_date(e.date) + " twice");
        }
    }
    if (!config.from && files.empty()) {
        throw ConfigError("empty manifest and no date range");
    }
    const Date from = config.from ? *config.from : files.begin()->first;
    const Date to = config.to ? *config.to : files.rbegin()->first;
    if (to < from) {
        throw ConfigError("date range is empty");
    }

    std::vector<LoadedDay> days;
    for (Date d = from; d <= to; d = next_day(d)) {
        days.emplace_back().date = d;
    }

    std::optional<std::map<YearMonth, double>> risk_free;
    if (!config.rf_path.empty()) {
        const auto yields = read_yields_file(config.rf_path);
        risk_free = risk_free_monthly(yields);
    } else {
        report.warnings.push_back("no risk-free file supplied; risk-free rate taken as 0");
    }

    const unsigned threads = config.threads > 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    EngineConfig engine = config.engine;
    const bool reinvest = engine.volume_mode == VolumeMode::Reinvest;
    if (reinvest) {
        // Per-share ledgers do not depend on the balance; sizes are applied in
        // the sequential fold below.
        engine.volume_mode = VolumeMode::Fixed;
        engine.fixed_volume = 1.0;
    }

    const std::size_t batch = std::max<std::size_t>(16, 4 * static_cast<std::size_t>(threads));
    std::optional<PeriodSummary> previous;
    int data_days = 0;
    AccountState account(config.start_balance);

    for (std::size_t begin = 0; begin < days.size(); begin += batch) {
        const std::size_t end = std::min(days.size(), begin + batch);
        parallel_for(end - begin, threads, [&](std::size_t i) { load_day(days[begin + i], files, config); });

        for (std::size_t i = begin; i < end; ++i) {
            auto& day = days[i];
            if (day.status != DayStatus::Traded) {
                continue;
            }
            if (data_days++ < config.warmup_days || !previous) {
                day.status = DayStatus::Warmup;
                day.detail = "parameter warm-up";
            } else {
                auto derived = derive_params(*previous, day.first_price, config.zone_length, config.oscillator);
                day.params = std::move(derived.params);
                for (auto& w : derived.warnings) {
                    day.warnings.push_back(format_date(day.date) + ": " + w);
                }
                day.traced = wants_trace(config, day.date);
            }
            previous = day.summary;
        }

        parallel_for(end - begin, threads, [&](std::size_t i) {
            auto& day = days[begin + i];
            if (day.status == DayStatus::Traded) {
                day.result = simulate_day(*day.series, config.price_source, day.params, engine, config.start_balance,
                                          day.traced);
            }
        });

        for (std::size_t i = begin; i < end; ++i) {
            auto& day = days[i];
            for (auto& w : day.warnings) {
                report.warnings.push_back(std::move(w));
            }
            if (day.unreadable) {
                report.data_missing = true;
                report.warnings.push_back(format_date(day.date) + ": " + day.detail);
            }
            if (day.status == DayStatus::Traded) {
                auto& ledger = day.result.ledger;
                if (reinvest) {
                    settle_reinvested(ledger, account);
                } else {
                    for (const auto& trade : ledger) {
                        account.balance += trade.profit;
                        account.equity.push_back({trade.exit_time, account.balance});
                    }
                }
                report.ledger.insert(report.ledger.end(), ledger.begin(), ledger.end());

                const auto grid = day.params.make_grid(day.series->t_start);
                report.day_params.push_back({day.date, day.params.m_basic, grid.starting_points().front(),
                                             grid.grid_step(), grid.line_count(), grid.slope_count(),
                                             day.first_price});
                if (day.traced) {
                    DayTrace trace;
                    trace.date = day.date;
                    trace.zone = {day.series->t_start, day.series->t_end()};
                    trace.price_source = config.price_source;
                    trace.ask = day.series->ask;
                    trace.bid = day.series->bid;
                    trace.present = day.series->present;
                    trace.raw = std::move(day.result.raw);
                    trace.scaled = std::move(day.result.scaled);
                    trace.signals = std::move(day.result.signals);
                    trace.params = day.params;
                    report.traces.push_back(std::move(trace));
                }
            }
            report.audit.push_back({day.date, day.status, day.detail});
            day.series.reset();
            day.result = {};
        }
    }

    report.initial_balance = config.start_balance;
    report.final_balance = account.balance;
    report.equity = std::move(account.equity);

    report.months = monthly_returns(report.initial_balance, report.equity, year_month_of(from), year_month_of(to));
    if (risk_free) {
        attach_risk_free(report.months, *risk_free);
    }
    std::vector<double> returns;
    for (const auto& m : report.months) {
        returns.push_back(m.return_fraction);
    }
    report.monthly_return_summary = summarize(returns, config.sd);
    try {
        report.sharpe = sharpe(report.months, config.sd);
    } catch (const RangeError& e) {
        report.sharpe_note = e.what();
    } catch (const DegenerateVariance& e) {
        report.sharpe_note = e.what();
    }

    std::vector<Date> traded;
    for (const auto& a : report.audit) {
        if (a.status == DayStatus::Traded) {
            traded.push_back(a.date);
        }
    }
    report.stats = trade_stats(report.ledger, traded, config.sd);
    report.hourly = hourly_profile(report.ledger);
    return report;
}

std::string trades_csv(const std::vector<TradeRecord>& ledger) {
    std::ostringstream os;
    os << "entry_time,exit_time,side,entry_price,exit_price,size,profit,profit_per_share,duration,exit_reason\n";
    for (const auto& t : ledger) {
        os << t.entry_time << ',' << t.exit_time << ',' << to_string(t.side) << ',' << format_double(t.entry_price)
           << ',' << format_double(t.exit_price) << ',' << format_double(t.size) << ',' << format_double(t.profit)
           << ',' << format_double(t.profit_per_share) << ',' << t.duration << ',' << to_string(t.exit_reason)
           << '\n';
    }
    return os.str();
}

std::string report_json(const BacktestReport& r) {
    json j;
    j["config"] = config_json(r.config);
    j["initial_balance"] = r.initial_balance;
    j["final_balance"] = r.final_balance;
    j["total_profit"] = r.total_profit();
    j["return_on_investment"] = r.total_profit() / r.initial_balance;
    if (r.sharpe) {
        j["sr_monthly"] = r.sharpe->monthly;
        j["sr_yearly"] = r.sharpe->yearly;
    } else {
        j["sr_monthly"] = nullptr;
        j["sr_yearly"] = nullptr;
        j["sharpe_note"] = r.sharpe_note;
    }
    j["monthly_returns_summary"] = summary_json(r.monthly_return_summary);

    const auto& s = r.stats;
    json stats;
    stats["n_trades"] = s.n_trades;
    stats["trading_days"] = s.trading_days;
    stats["duration_seconds"] = summary_json(s.duration);
    stats["profit_per_share"] = summary_json(s.profit_per_share);
    stats["trades_per_day"] = summary_json(s.trades_per_day);
    stats["win_rate_percent"] = s.win_rate;
    stats["win_rate_sd"] = s.win_rate_sd;
    stats["win_rate_defined"] = s.win_rate_defined;
    j["trade_stats"] = stats;

    json months = json::array();
    for (const auto& m : r.months) {
        months.push_back({{"month", format_year_month(m.month)},
                          {"balance_start", m.balance_start},
                          {"balance_end", m.balance_end},
                          {"return", m.return_fraction},
                          {"risk_free", m.risk_free}});
    }
    j["monthly_returns"] = months;

    json hourly = json::array();
    for (const auto& [hour, b] : r.hourly) {
        hourly.push_back({{"hour", hour}, {"count", b.count}, {"mean_profit_per_share", b.mean_profit_per_share}});
    }
    j["hourly_profile"] = hourly;

    j["days"] = {{"calendar", r.audit.size()},
                 {"traded", r.count(DayStatus::Traded)},
                 {"warmup", r.count(DayStatus::Warmup)},
                 {"skipped", r.count(DayStatus::Skipped)}};
    json audit = json::array();
    for (const auto& a : r.audit) {
        audit.push_back({{"date", format_date(a.date)}, {"status", std::string(to_string(a.status))},
                         {"detail", a.detail}});
    }
    j["audit"] = audit;

    json params = json::array();
    for (const auto& p : r.day_params) {
        params.push_back({{"date", format_date(p.date)},
                          {"m_basic", p.m_basic},
                          {"first_price", p.first_price},
                          {"grid_first", p.grid_first},
                          {"grid_step", p.grid_step},
                          {"lines", p.lines},
                          {"slopes", p.slopes}});
    }
    j["day_params"] = params;
    j["warnings"] = r.warnings;
    j["data_missing"] = r.data_missing;
    return j.dump(2) + "\n";
}

std::vector<std::size_t> downsample_indices(std::size_t n, std::size_t points) {
    std::vector<std::size_t> out;
    if (n == 0) {
        return out;
    }
    if (points == 0 || points >= n) {
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = i;
        }
        return out;
    }
    if (points == 1) {
        return {0};
    }
    out.reserve(points);
    for (std::size_t k = 0; k < points; ++k) {
        // Integer interpolation keeps the selection exact and reproducible.
        const std::size_t idx = (k * (n - 1) + (points - 1) / 2) / (points - 1);
        if (out.empty() || out.back() != idx) {
            out.push_back(idx);
        }
    }
    return out;
}

void write_report(const BacktestReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir / "plotdata");
    write_file(dir / "report.json", report_json(report));
    write_file(dir / "trades.csv", trades_csv(report.ledger));
    write_file(dir / "monthly_returns.csv", monthly_csv(report.months));

    const auto plot = dir / "plotdata";
    write_file(plot / "monthly_returns.csv", monthly_csv(report.months));
    std::vector<double> pps;
    std::vector<double> durations;
    for (const auto& t : report.ledger) {
        pps.push_back(t.profit_per_share);
        durations.push_back(static_cast<double>(t.duration));
    }
    std::map<Date, std::size_t> per_day;
    for (const auto& a : report.audit) {
        if (a.status == DayStatus::Traded) {
            per_day[a.date] = 0;
        }
    }
    for (const auto& t : report.ledger) {
        ++per_day[date_of(t.entry_time)];
    }
    std::vector<double> counts;
    for (const auto& [d, n] : per_day) {
        counts.push_back(static_cast<double>(n));
    }
    write_file(plot / "hist_profit_per_share.csv", histogram_csv(histogram(pps, report.config.histogram_bins)));
    write_file(plot / "hist_duration.csv", histogram_csv(histogram(durations, report.config.histogram_bins)));
    write_file(plot / "hist_trades_per_day.csv", histogram_csv(histogram(counts, report.config.histogram_bins)));

    std::ostringstream hourly;
    hourly << "hour,count,mean_profit_per_share\n";
    for (const auto& [hour, b] : report.hourly) {
        hourly << hour << ',' << b.count << ',' << format_double(b.mean_profit_per_share) << '\n';
    }
    write_file(plot / "hourly_profile.csv", hourly.str());
}

void emit_plot_data(const BacktestReport& report, const std::vector<Date>& days, const std::filesystem::path& dir) {
    std::vector<const DayTrace*> selected;
    if (days.empty()) {
        for (const auto& t : report.traces) {
            selected.push_back(&t);
        }
    } else {
        for (const auto& d : days) {
            const auto it = std::find_if(report.traces.begin(), report.traces.end(),
                                         [&](const DayTrace& t) { return t.date == d; });
            if (it == report.traces.end()) {
                throw TraceUnavailable("no trace recorded for " + format_date(d) + " (run with --trace)");
            }
            selected.push_back(&*it);
        }
    }

    for (const auto* trace : selected) {
        const auto day_dir = dir / "plotdata" / format_date(trace->date);
        std::filesystem::create_directories(day_dir);
        const auto n = trace->ask.size();
        const auto idx = downsample_indices(n, report.config.trace_points);

        std::set<EpochSeconds> signal_times;
        for (const auto& s : trace->signals) {
            signal_times.insert(s.time);
        }
        std::vector<std::size_t> rows = idx;
        if (report.config.trace_points != 0) {
            for (auto t : signal_times) {
                rows.push_back(static_cast<std::size_t>(t - trace->zone.start));
            }
            std::sort(rows.begin(), rows.end());
            rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        }

        std::ostringstream price;
        price << "t,ask,bid\n";
        for (auto i : rows) {
            if (!trace->present[i]) {
                continue;
            }
            price << trace->zone.start + static_cast<EpochSeconds>(i) << ',' << format_double(trace->ask[i]) << ','
                  << format_double(trace->bid[i]) << '\n';
        }
        write_file(day_dir / "price.csv", price.str());

        std::ostringstream osc;
        osc << "t,raw,scaled,signal\n";
        std::size_t sig = 0;
        for (auto i : rows) {
            const EpochSeconds t = trace->zone.start + static_cast<EpochSeconds>(i);
            osc << t << ',' << format_double(trace->raw[i]) << ',' << format_double(trace->scaled[i]) << ',';
            std::string labels;
            while (sig < trace->signals.size() && trace->signals[sig].time < t) {
                ++sig;
            }
            for (std::size_t k = sig; k < trace->signals.size() && trace->signals[k].time == t; ++k) {
                const auto& s = trace->signals[k];
                if (!labels.empty()) {
                    labels += '|';
                }
                labels += std::string(s.entry ? "in_" : "out_") + std::string(to_string(s.side));
            }
            osc << labels << '\n';
        }
        write_file(day_dir / "oscillator.csv", osc.str());

        const auto grid = trace->params.make_grid(trace->zone.start);
        std::ostringstream lines;
        lines << "slope_index,slope,start_price,t_start,value_start,t_end,value_end\n";
        for (std::size_t k = 0; k < grid.slope_count(); ++k) {
            for (std::size_t j = 0; j < grid.line_count(); ++j) {
                lines << k << ',' << format_double(grid.slopes()[k]) << ',' << format_double(grid.starting_points()[j])
                      << ',' << trace->zone.start << ',' << format_double(grid.line_value(j, k, trace->zone.start))
                      << ',' << trace->zone.end << ',' << format_double(grid.line_value(j, k, trace->zone.end))
                      << '\n';
            }
        }
        write_file(day_dir / "grid.csv", lines.str());

        std::ostringstream trades;
        trades << "side,entry_time,entry_price,exit_time,exit_price,profit,profit_per_share,exit_reason\n";
        for (const auto& t : report.ledger) {
            if (!trace->zone.contains(t.entry_time)) {
                continue;
            }
            trades << to_string(t.side) << ',' << t.entry_time << ',' << format_double(t.entry_price) << ','
                   << t.exit_time << ',' << format_double(t.exit_price) << ',' << format_double(t.profit) << ','
                   << format_double(t.profit_per_share) << ',' << to_string(t.exit_reason) << '\n';
        }
        write_file(day_dir / "trades.csv", trades.str());
    }
}

}  // namespace tubeosc
