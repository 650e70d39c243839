"""Independent brute-force backtest of the golden instrument.

Evaluates every line of the grid at every second (Eq. 2-3), sums per slope
(Eq. 4), recomputes the window average from scratch (Eq. 5) and the
oscillator (Eq. 8), then replays the threshold rules with bid/ask fills and
100% reinvestment. Writes expected_ledger.csv next to this file.
"""
import calendar
import configparser
import datetime as dt
import math
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent


def load_config():
    parser = configparser.ConfigParser()
    parser.read_string("[main]\n" + (HERE / "golden.ini").read_text())
    return parser["main"]


def sign(x):
    return 1 if x >= 0 else -1


def read_ticks(path):
    ticks = []
    for line in path.read_text().splitlines()[1:]:
        ts, ask, bid = line.split(",")
        ticks.append((int(ts), float(ask), float(bid)))
    return ticks


def resample(ticks, start, end):
    asks, bids, present = [], [], []
    for s in range(start, end + 1):
        before = [t for t in ticks if t[0] < (s + 1) * 1000]
        if before:
            asks.append(before[-1][1])
            bids.append(before[-1][2])
            present.append(True)
        else:
            asks.append(0.0)
            bids.append(0.0)
            present.append(False)
    return asks, bids, present


def oscillator(prices, present, points, slopes, bandwidth, multiplicator):
    n = len(prices)
    d = [[0] * len(slopes) for _ in range(n)]
    for i in range(1, n):
        if not (present[i] and present[i - 1]):
            continue
        for k, m in enumerate(slopes):
            total = 0
            for s in points:
                now = s + m * float(i)
                before = s + m * float(i - 1)
                total += (sign(now - prices[i]) - sign(before - prices[i - 1])) // 2
            d[i][k] = total
    scaled = []
    for i in range(n):
        total = 0
        for lag in range(bandwidth):
            if i - lag < 0:
                break
            total += sum(d[i - lag])
        raw = -float(total) / float(bandwidth * len(slopes))
        scaled.append(multiplicator * raw)
    return scaled


def trade_day(start, end, scaled, asks, bids, present, th, delay):
    """Per-share ledger of one zone: (side, entry_t, exit_t, entry_px, exit_px, reason)."""
    ledger = []
    signalled = None
    signalled_at = None
    pending = []
    position = None
    for i in range(len(scaled)):
        t = start + i
        if not present[i]:
            continue
        o = scaled[i]
        if signalled is not None and signalled_at < t:
            if (signalled == "long" and o < th["out_long"]) or (signalled == "short" and o > th["out_short"]):
                if t + delay <= end:
                    pending.append((t + delay, "close", signalled))
                signalled = None
        if signalled is None:
            side = "long" if o > th["in_long"] else "short" if o < th["in_short"] else None
            if side is not None and t + delay < end:
                pending.append((t + delay, "open", side))
                signalled, signalled_at = side, t
        for order in [p for p in pending if p[0] == t]:
            pending.remove(order)
            _, kind, side = order
            if kind == "open":
                position = (side, t, asks[i] if side == "long" else bids[i])
            else:
                ledger.append(close(position, t, asks[i], bids[i], "signal"))
                position = None
    if position is not None:
        ledger.append(close(position, end, asks[-1], bids[-1], "period_end"))
    return ledger


def close(position, t, ask, bid, reason):
    side, entry_t, entry_px = position
    exit_px = bid if side == "long" else ask
    return (side, entry_t, t, entry_px, exit_px, reason)


def main():
    cfg = load_config()
    zone_start = 10 * 3600
    zone_length = int(cfg["zone_length"])
    bandwidth = int(cfg["bandwidth"])
    multiplicator = float(cfg["multiplicator"])
    m_basic = float(cfg["m_basic"])
    factors = [float(f) for f in cfg["slope_factors"].split(",")]
    count = int(cfg["starting_points"])
    step = float(cfg["grid_step"])
    in_long, out_long = (float(x) for x in cfg["thresholds"].split("/"))
    th = {"in_long": in_long, "out_long": out_long, "in_short": -in_long, "out_short": -out_long}
    delay = int(cfg["delay"])
    balance = float(cfg["start_balance"])

    slopes = []
    for f in factors:
        slopes += [m_basic * f, -(m_basic * f)]

    days = [line.split() for line in (HERE / "manifest.txt").read_text().splitlines() if line.strip()]
    rows = []
    for n, (date, name) in enumerate(days):
        day = calendar.timegm(dt.date.fromisoformat(date).timetuple())
        start = day + zone_start
        end = start + zone_length
        asks, bids, present = resample(read_ticks(HERE / name), start, end)
        if n == 0:
            continue  # warm-up day seeds parameters only
        first = next(i for i in range(len(present)) if present[i])
        center = asks[first]
        half = 0.5 * step * count
        spacing = 2.0 * half / count
        base = center - half
        points = [base + float(j) * spacing for j in range(1, count + 1)]
        scaled = oscillator(asks, present, points, slopes, bandwidth, multiplicator)
        for side, entry_t, exit_t, entry_px, exit_px, reason in trade_day(
            start, end, scaled, asks, bids, present, th, delay
        ):
            pps = exit_px - entry_px if side == "long" else entry_px - exit_px
            size = balance / entry_px
            profit = pps * size
            balance += profit
            rows.append((entry_t, exit_t, side, entry_px, exit_px, size, profit, pps, exit_t - entry_t, reason))

    out = ["entry_time,exit_time,side,entry_price,exit_price,size,profit,profit_per_share,duration,exit_reason"]
    for r in rows:
        out.append(",".join(repr(x) if isinstance(x, float) else str(x) for x in r))
    (HERE / "expected_ledger.csv").write_text("\n".join(out) + "\n")
    print(f"{len(rows)} trades, final balance {balance!r}", file=sys.stderr)


if __name__ == "__main__":
    main()
