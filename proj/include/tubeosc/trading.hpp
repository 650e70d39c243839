#pragma once

// Threshold trading on the scaled oscillator with bid/ask accounting.

#include "tubeosc/timebase.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tubeosc {

enum class Side : std::uint8_t { Long, Short };
enum class ExitReason : std::uint8_t { Signal, PeriodEnd };

[[nodiscard]] std::string_view to_string(Side side) noexcept;
[[nodiscard]] std::string_view to_string(ExitReason reason) noexcept;

/// Entry/exit levels on the scaled oscillator:
/// in_long > out_long > 0 > out_short > in_short.
struct Thresholds {
    double in_long = 0.4;
    double out_long = 0.1;
    double in_short = -0.4;
    double out_short = -0.1;

    /// in_short = -in_long, out_short = -out_long.
    [[nodiscard]] static Thresholds symmetric(double in_long, double out_long);
    /// Throws InvalidThresholds when the arrangement above does not hold.
    void validate() const;
};

struct Position {
    Side side = Side::Long;
    EpochSeconds entry_time = 0;
    double entry_price = 0.0;  ///< ask for longs, bid for shorts
    double size = 0.0;
};

struct TradeRecord {
    Side side = Side::Long;
    EpochSeconds entry_time = 0;
    EpochSeconds exit_time = 0;
    double entry_price = 0.0;
    double exit_price = 0.0;
    double size = 0.0;
    double profit = 0.0;
    double profit_per_share = 0.0;
    std::int64_t duration = 0;
    ExitReason exit_reason = ExitReason::Signal;
};

struct EquityPoint {
    EpochSeconds time = 0;
    double balance = 0.0;
};

struct AccountState {
    double initial_balance = 10000.0;
    double balance = 10000.0;
    std::vector<EquityPoint> equity;

    explicit AccountState(double start = 10000.0) : initial_balance(start), balance(start) {}
};

enum class VolumeMode : std::uint8_t { Reinvest, Fixed };

struct EngineConfig {
    Thresholds thresholds;
    int execution_delay = 0;  ///< 0 or 1 second
    VolumeMode volume_mode = VolumeMode::Reinvest;
    double fixed_volume = 1.0;
    /// Allow a new entry in the second an exit signal fired.
    bool same_second_reentry = true;
};

/// Execution second for a signal, or nothing when it falls past the zone end.
[[nodiscard]] std::optional<EpochSeconds> apply_execution_delay(EpochSeconds signal_time, int delay,
                                                                EpochSeconds zone_end) noexcept;

/// Closes a position at the quotes of one second.
[[nodiscard]] TradeRecord close_position(const Position& position, EpochSeconds t, double ask, double bid,
                                         ExitReason reason) noexcept;

/// One position at a time, one zone at a time. Signals are evaluated per
/// second: exits first (never for a position signalled in the same second),
/// then entries. Orders fill at the quotes of signal second + delay.
class TradingEngine {
public:
    TradingEngine(EngineConfig config, AccountState account);

    /// Starts a new zone. Throws std::logic_error if a position is still open.
    void begin_period(const ZoneInterval& zone);

    /// Throws InvalidQuote when an order fills at a second with ask < bid.
    std::optional<TradeRecord> step(EpochSeconds t, double scaled_oscillator, double ask, double bid);

    /// Drops pending orders and closes any open position at the zone end quotes.
    std::optional<TradeRecord> force_close_at_period_end(EpochSeconds t_end, double ask, double bid);

    [[nodiscard]] const std::optional<Position>& position() const noexcept { return position_; }
    [[nodiscard]] bool has_pending_orders() const noexcept { return !pending_.empty(); }
    [[nodiscard]] const AccountState& account() const noexcept { return account_; }
    [[nodiscard]] const EngineConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<TradeRecord>& ledger() const noexcept { return ledger_; }

    /// Seconds in which an entry signal fired, with its side.
    struct Signal {
        EpochSeconds time;
        Side side;
        bool entry;
    };
    [[nodiscard]] const std::vector<Signal>& signals() const noexcept { return signals_; }

private:
    struct Order {
        bool open = false;
        Side side = Side::Long;
        EpochSeconds exec_time = 0;
    };

    std::optional<TradeRecord> fill(const Order& order, EpochSeconds t, double ask, double bid);
    std::optional<TradeRecord> record_close(TradeRecord trade);

    EngineConfig config_;
    AccountState account_;
    ZoneInterval zone_{};
    std::optional<Side> signalled_side_;  // position state as seen by the signal logic
    EpochSeconds signalled_at_ = 0;
    std::optional<Position> position_;  // filled position
    std::vector<Order> pending_;
    std::vector<TradeRecord> ledger_;
    std::vector<Signal> signals_;
};

/// Re-sizes a ledger traded with any volume to 100% reinvestment of a running
/// balance: size = balance / entry_price, profit = profit_per_share * size.
/// Appends to the account's equity curve.
void settle_reinvested(std::vector<TradeRecord>& ledger, AccountState& account);

}  // namespace tubeosc
