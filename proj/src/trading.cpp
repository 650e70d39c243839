#include "tubeosc/trading.hpp"

#include "tubeosc/errors.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace tubeosc {

std::string_view to_string(Side side) noexcept { return side == Side::Long ? "long" : "short"; }

std::string_view to_string(ExitReason reason) noexcept {
    return reason == ExitReason::Signal ? "signal" : "period_end";
}

Thresholds Thresholds::symmetric(double in_long, double out_long) {
    return {in_long, out_long, -in_long, -out_long};
}

void Thresholds::validate() const {
    if (!(in_long > out_long && out_long > 0.0)) {
        throw InvalidThresholds("long thresholds must satisfy in_long > out_long > 0");
    }
    if (!(in_short < out_short && out_short < 0.0)) {
        throw InvalidThresholds("short thresholds must satisfy in_short < out_short < 0");
    }
}

std::optional<EpochSeconds> apply_execution_delay(EpochSeconds signal_time, int delay,
                                                  EpochSeconds zone_end) noexcept {
    const EpochSeconds t = signal_time + delay;
    if (t > zone_end) {
        return std::nullopt;
    }
    return t;
}

TradeRecord close_position(const Position& position, EpochSeconds t, double ask, double bid,
                           ExitReason reason) noexcept {
    TradeRecord r;
    r.side = position.side;
    r.entry_time = position.entry_time;
    r.exit_time = t;
    r.entry_price = position.entry_price;
    r.size = position.size;
    if (position.side == Side::Long) {
        r.exit_price = bid;
        r.profit_per_share = bid - position.entry_price;
    } else {
        r.exit_price = ask;
        r.profit_per_share = position.entry_price - ask;
    }
    r.profit = r.profit_per_share * r.size;
    r.duration = t - position.entry_time;
    r.exit_reason = reason;
    return r;
}

TradingEngine::TradingEngine(EngineConfig config, AccountState account)
    : config_(std::move(config)), account_(std::move(account)) {
    config_.thresholds.validate();
    if (config_.execution_delay != 0 && config_.execution_delay != 1) {
        throw RangeError("execution delay must be 0 or 1 second");
    }
    if (config_.volume_mode == VolumeMode::Fixed && !(config_.fixed_volume > 0.0)) {
        throw RangeError("fixed trade volume must be positive");
    }
}

void TradingEngine::begin_period(const ZoneInterval& zone) {
    if (position_ || signalled_side_ || !pending_.empty()) {
        throw std::logic_error("position still open at the start of a new period");
    }
    zone_ = zone;
}

std::optional<TradeRecord> TradingEngine::record_close(TradeRecord trade) {
    account_.balance += trade.profit;
    account_.equity.push_back({trade.exit_time, account_.balance});
    ledger_.push_back(trade);
    return trade;
}

std::optional<TradeRecord> TradingEngine::fill(const Order& order, EpochSeconds t, double ask, double bid) {
    if (ask < bid) {
        throw InvalidQuote("ask " + std::to_string(ask) + " below bid " + std::to_string(bid) + " at second " +
                           std::to_string(t));
    }
    if (!order.open) {
        assert(position_);
        auto trade = close_position(*position_, t, ask, bid, ExitReason::Signal);
        position_.reset();
        return record_close(trade);
    }
    assert(!position_);
    const double price = order.side == Side::Long ? ask : bid;
    double size = config_.fixed_volume;
    if (config_.volume_mode == VolumeMode::Reinvest) {
        if (!(account_.balance > 0.0)) {
            throw std::runtime_error("balance exhausted; cannot size a reinvested position");
        }
        size = account_.balance / price;
    }
    position_ = Position{order.side, t, price, size};
    return std::nullopt;
}

std::optional<TradeRecord> TradingEngine::step(EpochSeconds t, double scaled_oscillator, double ask, double bid) {
    const auto& th = config_.thresholds;
    const auto schedule = [&](bool open, Side side) {
        // A position filled at the last zone second could only be force-closed
        // in that same second, so such entries are dropped like late ones.
        const auto when = apply_execution_delay(t, config_.execution_delay, open ? zone_.end - 1 : zone_.end);
        if (when) {
            pending_.push_back({open, side, *when});
        }
        signals_.push_back({t, side, open});
    };

    bool exited = false;
    if (signalled_side_ && signalled_at_ < t) {
        const bool exit_long = *signalled_side_ == Side::Long && scaled_oscillator < th.out_long;
        const bool exit_short = *signalled_side_ == Side::Short && scaled_oscillator > th.out_short;
        if (exit_long || exit_short) {
            schedule(false, *signalled_side_);
            signalled_side_.reset();
            exited = true;
        }
    }
    if (!signalled_side_ && (!exited || config_.same_second_reentry)) {
        const bool enter_long = scaled_oscillator > th.in_long;
        const bool enter_short = scaled_oscillator < th.in_short;
        assert(!(enter_long && enter_short));
        if (enter_long || enter_short) {
            const Side side = enter_long ? Side::Long : Side::Short;
            const auto before = pending_.size();
            schedule(true, side);
            // An entry that cannot fill inside the zone leaves the engine flat.
            if (pending_.size() > before) {
                signalled_side_ = side;
                signalled_at_ = t;
            }
        }
    }

    std::optional<TradeRecord> closed;
    std::size_t done = 0;
    for (; done < pending_.size() && pending_[done].exec_time == t; ++done) {
        if (auto trade = fill(pending_[done], t, ask, bid)) {
            assert(!closed);
            closed = trade;
        }
    }
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(done));
    return closed;
}

std::optional<TradeRecord> TradingEngine::force_close_at_period_end(EpochSeconds t_end, double ask, double bid) {
    pending_.clear();
    signalled_side_.reset();
    if (!position_) {
        return std::nullopt;
    }
    if (ask < bid) {
        throw InvalidQuote("ask below bid at the period end " + std::to_string(t_end));
    }
    auto trade = close_position(*position_, t_end, ask, bid, ExitReason::PeriodEnd);
    position_.reset();
    return record_close(trade);
}

void settle_reinvested(std::vector<TradeRecord>& ledger, AccountState& account) {
    for (auto& trade : ledger) {
        if (!(account.balance > 0.0)) {
            throw std::runtime_error("balance exhausted; cannot size a reinvested position");
        }
        trade.size = account.balance / trade.entry_price;
        trade.profit = trade.profit_per_share * trade.size;
        account.balance += trade.profit;
        account.equity.push_back({trade.exit_time, account.balance});
    }
}

}  // namespace tubeosc
