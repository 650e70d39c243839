#include "tubeosc/metrics.hpp"

#include "tubeosc/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <string>

namespace tubeosc {

std::vector<MonthlyReturn> monthly_returns(double initial_balance, std::span<const EquityPoint> equity,
                                           YearMonth first, YearMonth last) {
    std::vector<MonthlyReturn> out;
    double balance = initial_balance;
    std::size_t next = 0;
    for (YearMonth ym = first; ym <= last; ym = next_month(ym)) {
        MonthlyReturn m;
        m.month = ym;
        m.balance_start = balance;
        // Points dated before `first` are folded into the first month.
        while (next < equity.size() && year_month_of(equity[next].time) <= ym) {
            balance = equity[next].balance;
            ++next;
        }
        m.balance_end = balance;
        m.return_fraction = m.balance_end / m.balance_start - 1.0;
        out.push_back(m);
    }
    return out;
}

std::vector<DailyYield> read_yields(std::istream& in) {
    std::vector<DailyYield> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            continue;
        }
        DailyYield y;
        try {
            y.date = parse_date(line.substr(0, comma));
        } catch (const FormatError&) {
            continue;  // header or malformed date
        }
        std::string value = line.substr(comma + 1);
        while (!value.empty() && value.back() == ' ') {
            value.pop_back();
        }
        const auto* begin = value.data();
        while (begin != value.data() + value.size() && *begin == ' ') {
            ++begin;
        }
        const auto [ptr, ec] = std::from_chars(begin, value.data() + value.size(), y.annual_percent);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            continue;
        }
        rows.push_back(y);
    }
    return rows;
}

std::vector<DailyYield> read_yields_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open risk-free file " + path.string());
    }
    return read_yields(in);
}

std::map<YearMonth, double> risk_free_monthly(std::span<const DailyYield> yields) {
    std::map<YearMonth, std::pair<double, std::size_t>> acc;
    for (const auto& y : yields) {
        auto& slot = acc[year_month_of(y.date)];
        slot.first += y.annual_percent;
        ++slot.second;
    }
    std::map<YearMonth, double> out;
    for (const auto& [ym, s] : acc) {
        // one division keeps round figures exact: 4.8 / 1200 == 0.004
        out[ym] = (s.first / static_cast<double>(s.second)) / 1200.0;
    }
    return out;
}

void attach_risk_free(std::vector<MonthlyReturn>& months, const std::map<YearMonth, double>& risk_free) {
    for (auto& m : months) {
        const auto it = risk_free.find(m.month);
        if (it == risk_free.end()) {
            throw MissingData("no risk-free yield for " + format_year_month(m.month));
        }
        m.risk_free = it->second;
    }
}

double mean_of(std::span<const double> xs) noexcept {
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(std::span<const double> xs, SdConvention sd) noexcept {
    const auto n = xs.size();
    if (n == 0 || (sd == SdConvention::Sample && n < 2)) {
        return 0.0;
    }
    const double mu = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mu) * (x - mu);
    }
    const double denom = sd == SdConvention::Sample ? static_cast<double>(n - 1) : static_cast<double>(n);
    return std::sqrt(ss / denom);
}

double median_of(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mad_of(std::span<const double> xs) {
    if (xs.empty()) {
        return 0.0;
    }
    const double med = median_of(xs);
    double total = 0.0;
    for (double x : xs) {
        total += std::abs(x - med);
    }
    return total / static_cast<double>(xs.size());
}

Summary summarize(std::span<const double> xs, SdConvention sd) {
    return {mean_of(xs), sd_of(xs, sd), median_of(xs), mad_of(xs)};
}

SharpeRatio sharpe_from_excess(std::span<const double> excess, SdConvention sd) {
    if (excess.size() < 2) {
        throw RangeError("Sharpe ratio needs at least two months");
    }
    const double sigma = sd_of(excess, sd);
    if (!(sigma > 0.0)) {
        throw DegenerateVariance("excess returns have zero variance");
    }
    SharpeRatio sr;
    sr.monthly = mean_of(excess) / sigma;
    sr.yearly = std::sqrt(12.0) * sr.monthly;
    return sr;
}

SharpeRatio sharpe(std::span<const MonthlyReturn> months, SdConvention sd) {
    std::vector<double> excess;
    excess.reserve(months.size());
    for (const auto& m : months) {
        excess.push_back(m.return_fraction - m.risk_free);
    }
    return sharpe_from_excess(excess, sd);
}

TradeStats trade_stats(std::span<const TradeRecord> ledger, std::span<const Date> trading_days, SdConvention sd) {
    TradeStats st;
    st.n_trades = ledger.size();
    st.trading_days = trading_days.size();

    std::vector<double> durations;
    std::vector<double> pps;
    std::vector<double> wins;
    durations.reserve(ledger.size());
    pps.reserve(ledger.size());
    wins.reserve(ledger.size());
    std::map<Date, std::size_t> per_day;
    for (const auto& d : trading_days) {
        per_day[d] = 0;
    }
    for (const auto& t : ledger) {
        durations.push_back(static_cast<double>(t.duration));
        pps.push_back(t.profit_per_share);
        wins.push_back(t.profit > 0.0 ? 100.0 : 0.0);
        const auto it = per_day.find(date_of(t.entry_time));
        if (it != per_day.end()) {
            ++it->second;
        }
    }
    std::vector<double> counts;
    counts.reserve(per_day.size());
    for (const auto& [day, n] : per_day) {
        counts.push_back(static_cast<double>(n));
    }
    st.duration = summarize(durations, sd);
    st.profit_per_share = summarize(pps, sd);
    st.trades_per_day = summarize(counts, sd);
    st.win_rate_defined = !ledger.empty();
    st.win_rate = mean_of(wins);
    st.win_rate_sd = sd_of(wins, sd);
    return st;
}

std::map<int, HourBucket> hourly_profile(std::span<const TradeRecord> ledger) {
    std::map<int, std::pair<std::size_t, double>> acc;
    for (const auto& t : ledger) {
        auto secs = t.entry_time % kSecondsPerDay;
        if (secs < 0) {
            secs += kSecondsPerDay;
        }
        auto& slot = acc[static_cast<int>(secs / 3600)];
        ++slot.first;
        slot.second += t.profit_per_share;
    }
    std::map<int, HourBucket> out;
    for (const auto& [hour, s] : acc) {
        out[hour] = {s.first, s.second / static_cast<double>(s.first)};
    }
    return out;
}

std::vector<HistogramBin> histogram(std::span<const double> xs, std::size_t bins) {
    if (xs.empty() || bins == 0) {
        return {};
    }
    const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi == lo) {
        return {{lo, hi, xs.size()}};
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<HistogramBin> out(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lower = lo + static_cast<double>(b) * width;
        out[b].upper = b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width;
    }
    for (double x : xs) {
        auto b = static_cast<std::size_t>(std::floor((x - lo) / width));
        b = std::min(b, bins - 1);
        ++out[b].count;
    }
    return out;
}

}  // namespace tubeosc
